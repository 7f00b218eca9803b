#pragma once

// p = 1 machinery: the transportation-cost (Arens-Eells) norm by min-cost
// flow, the 1-Lipschitz dual witness recovered from node potentials, and the
// envelope-map checks built on top of them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "freelip/config.hpp"
#include "freelip/errors.hpp"
#include "freelip/flow_norm.hpp"
#include "freelip/metric_space.hpp"
#include "freelip/molecule.hpp"
#include "freelip/random.hpp"
#include "freelip/sampling.hpp"

namespace freelip {

/// A scalar 1-Lipschitz functional vanishing at the base point.
struct DualWitness {
  std::vector<double> f;
  double lipschitz_constant = 0.0;
  double value = 0.0;  // <mu, f>
};

struct EnvelopeSolution {
  NormResult primal;
  DualWitness witness;
};

namespace detail {

struct TransportFlow {
  std::vector<double> flow;       // n*n, directed i -> j
  std::vector<double> potential;  // final SSP potentials
};

// Successive shortest paths with Johnson potentials on the complete directed
// graph (uncapacitated arcs of cost d(i,j)). Supplies: a_z at z != base, the
// base absorbs the balance. Dense O(n^2) Dijkstra per augmentation.
inline TransportFlow solve_transport(const FiniteMetricSpace& space, const Molecule& mu, const Tolerances& tol) {
  const std::size_t n = space.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> excess = mu.dense();
  double sum = 0.0;
  for (double a : excess) sum += a;
  excess[kBase] = -sum;
  const double eps = tol.flow_snap * std::max(1.0, mu.total_mass());

  TransportFlow tf{std::vector<double>(n * n, 0.0), std::vector<double>(n, 0.0)};
  auto& flow = tf.flow;
  auto& pi = tf.potential;

  std::vector<double> dist(n);
  std::vector<PointIndex> pred(n);
  std::vector<bool> reverse(n), done(n);
  for (std::size_t guard = 0; guard < 4 * n * n + 16; ++guard) {
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) any = any || excess[i] > eps;
    if (!any) break;

    std::fill(dist.begin(), dist.end(), inf);
    std::fill(done.begin(), done.end(), false);
    for (std::size_t i = 0; i < n; ++i) {
      if (excess[i] > eps) {
        dist[i] = 0.0;
        pred[i] = i;
      }
    }
    for (std::size_t round = 0; round < n; ++round) {
      std::size_t u = n;
      for (std::size_t i = 0; i < n; ++i)
        if (!done[i] && dist[i] < inf && (u == n || dist[i] < dist[u])) u = i;
      if (u == n) break;
      done[u] = true;
      for (std::size_t v = 0; v < n; ++v) {
        if (v == u || done[v]) continue;
        const double d = space.d(u, v);
        // Forward arc u -> v, or cancelling existing flow v -> u.
        double rc = std::max(0.0, d + pi[u] - pi[v]);
        bool rev = false;
        if (flow[v * n + u] > eps) {
          const double rrc = std::max(0.0, -d + pi[u] - pi[v]);
          if (rrc < rc) rc = rrc, rev = true;
        }
        if (dist[u] + rc < dist[v]) {
          dist[v] = dist[u] + rc;
          pred[v] = u;
          reverse[v] = rev;
        }
      }
    }

    std::size_t t = n;
    for (std::size_t i = 0; i < n; ++i)
      if (excess[i] < -eps && (t == n || dist[i] < dist[t])) t = i;
    if (t == n) break;

    double amount = -excess[t];
    std::size_t s = t;
    for (std::size_t v = t; pred[v] != v; v = pred[v]) {
      if (reverse[v]) amount = std::min(amount, flow[v * n + pred[v]]);
      s = pred[v];
    }
    amount = std::min(amount, excess[s]);
    for (std::size_t v = t; pred[v] != v; v = pred[v]) {
      const std::size_t u = pred[v];
      if (reverse[v]) {
        flow[v * n + u] -= amount;
        if (flow[v * n + u] < eps) flow[v * n + u] = 0.0;
      } else {
        flow[u * n + v] += amount;
      }
    }
    excess[s] -= amount;
    excess[t] += amount;
    for (std::size_t i = 0; i < n; ++i)
      if (dist[i] < inf) pi[i] += dist[i];
  }
  return tf;
}

}  // namespace detail

/// Envelope norm ||mu||_{F(M)} together with its dual witness.
inline EnvelopeSolution solve_envelope(const FiniteMetricSpace& space, const Molecule& mu, const Tolerances& tol = {}) {
  require_same_space(space, mu);
  const std::size_t n = space.size();
  EnvelopeSolution sol;
  sol.primal = NormResult{0.0, Decomposition(space), NormMethod::MinCostFlow, true};
  sol.witness.f.assign(n, 0.0);
  if (mu.is_zero()) return sol;

  const auto tf = detail::solve_transport(space, mu, tol);
  const double snap = tol.flow_snap * mu.total_mass();
  for (PointIndex i = 0; i < n; ++i) {
    for (PointIndex j = i + 1; j < n; ++j) {
      const double net = tf.flow[i * n + j] - tf.flow[j * n + i];
      if (net > snap) sol.primal.certificate.add(space, Term{i, j, net * space.d(i, j)});
      if (net < -snap) sol.primal.certificate.add(space, Term{j, i, -net * space.d(i, j)});
    }
  }
  sol.primal.value = cost_p(sol.primal.certificate, 1.0);

  // f = pi(base) - pi: reduced costs >= 0 on all residual arcs give
  // f(u) - f(v) <= d(u, v), tight wherever flow runs.
  auto& w = sol.witness;
  for (PointIndex i = 0; i < n; ++i) w.f[i] = tf.potential[kBase] - tf.potential[i];
  w.f[kBase] = 0.0;
  for (PointIndex i = 0; i < n; ++i)
    for (PointIndex j = i + 1; j < n; ++j)
      w.lipschitz_constant = std::max(w.lipschitz_constant, std::abs(w.f[i] - w.f[j]) / space.d(i, j));
  w.value = pair(space, mu, w.f);
  return sol;
}

inline NormResult envelope_norm(const FiniteMetricSpace& space, const Molecule& mu, const Tolerances& tol = {}) {
  return solve_envelope(space, mu, tol).primal;
}

inline DualWitness dual_witness(const FiniteMetricSpace& space, const Molecule& mu, const Tolerances& tol = {}) {
  return solve_envelope(space, mu, tol).witness;
}

/// Image of a molecule under the envelope map into F(M). Same coefficients;
/// the wrapper marks that its norm is the p = 1 one.
struct EnvelopeImage {
  Molecule molecule;
};

inline EnvelopeImage envelope_map(const Molecule& mu) { return EnvelopeImage{mu}; }

inline NormResult envelope_norm(const FiniteMetricSpace& space, const EnvelopeImage& img, const Tolerances& tol = {}) {
  return envelope_norm(space, img.molecule, tol);
}

struct ContractionReport {
  double env_norm = 0.0;
  double p_norm = 0.0;
  bool ok = false;
};

/// ||J mu||_{F(M)} <= ||mu||_{F_p(M)}.
inline ContractionReport check_contraction(const FiniteMetricSpace& space, const Molecule& mu, double p,
                                           NormMethod method = NormMethod::Auto, const SolverOptions& opt = {}) {
  require_p(p);
  ContractionReport r;
  r.env_norm = envelope_norm(space, envelope_map(mu), opt.tol).value;
  r.p_norm = pnorm(space, mu, p, method, opt).value;
  r.ok = r.env_norm <= r.p_norm + opt.tol.cost_relative;
  return r;
}

struct SeparationSample {
  Molecule molecule;
  double env_norm = 0.0;
  double witness_value = 0.0;
  double p_norm = 0.0;
  bool ok = false;
};

struct SeparationReport {
  std::vector<SeparationSample> samples;
  double min_env_norm = 0.0;
  double min_witness_value = 0.0;
  double min_ratio = 0.0;  // p_norm / env_norm
  double max_ratio = 0.0;
  double mean_ratio = 0.0;
  bool ok = false;
};

/// For every nonzero sampled molecule: positive envelope norm and a witness
/// with strictly positive pairing. Samples are the canonical basis delta(x)
/// followed by `samples` seeded random molecules.
inline SeparationReport separation_suite(const FiniteMetricSpace& space, double p, std::size_t samples,
                                         std::uint64_t seed, const SolverOptions& opt = {}) {
  require_p(p);
  if (samples < 1) throw ContractError("separation_suite needs samples >= 1");
  std::vector<Molecule> mols;
  for (PointIndex x = 1; x < space.size(); ++x) mols.push_back(Molecule::delta(space, x));
  for (std::size_t s = 0; s < samples; ++s) {
    Rng rng = derive_rng(seed, s);
    mols.push_back(random_molecule(space, rng, s % 2 == 0 ? CoefficientKind::Discrete : CoefficientKind::Continuous));
  }

  SeparationReport rep;
  rep.ok = true;
  rep.min_env_norm = rep.min_witness_value = rep.min_ratio = std::numeric_limits<double>::infinity();
  double ratio_sum = 0.0;
  for (auto& mu : mols) {
    if (mu.is_zero()) continue;
    const auto env = solve_envelope(space, mu, opt.tol);
    SeparationSample s{mu, env.primal.value, env.witness.value, pnorm(space, mu, p, NormMethod::Auto, opt).value, false};
    s.ok = s.env_norm > 0.0 && s.witness_value > 0.0;
    rep.ok = rep.ok && s.ok;
    rep.min_env_norm = std::min(rep.min_env_norm, s.env_norm);
    rep.min_witness_value = std::min(rep.min_witness_value, s.witness_value);
    const double ratio = s.p_norm / s.env_norm;
    rep.min_ratio = std::min(rep.min_ratio, ratio);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    ratio_sum += ratio;
    rep.samples.push_back(std::move(s));
  }
  if (!rep.samples.empty()) rep.mean_ratio = ratio_sum / static_cast<double>(rep.samples.size());
  return rep;
}

}  // namespace freelip

#pragma once

// Seeded property suite over one space: every row is one checked inequality.
// Used by `freelip suite`; output depends only on (space, grid, samples, seed).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "freelip/config.hpp"
#include "freelip/errors.hpp"
#include "freelip/flow_norm.hpp"
#include "freelip/io.hpp"
#include "freelip/metric_space.hpp"
#include "freelip/molecule.hpp"
#include "freelip/sampling.hpp"
#include "freelip/transport_dual.hpp"

namespace freelip {

// Per-check slack; the CLI can override any entry by name.
struct SuiteTolerances {
  double isometry = 1e-9;     // relative
  double homogeneity = 1e-9;  // relative
  double triangle = 1e-9;     // absolute, on p-th powers
  double monotone = 1e-9;     // relative
  double contraction = 1e-9;  // absolute
  double duality = 1e-7;      // absolute
  double agreement = 1e-7;    // absolute
  double lipschitz = 1e-9;    // relative

  // Returns false for unknown names.
  bool set(const std::string& name, double v) {
    const std::map<std::string, double*> slots{
        {"isometry", &isometry}, {"homogeneity", &homogeneity}, {"triangle", &triangle},
        {"monotone", &monotone}, {"contraction", &contraction}, {"duality", &duality},
        {"agreement", &agreement}, {"lipschitz", &lipschitz}};
    auto it = slots.find(name);
    if (it == slots.end()) return false;
    *it->second = v;
    return true;
  }
};

struct SuiteRow {
  std::string check;
  double p = 0.0;  // 0 when the check does not depend on p
  long sample = -1;
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = false;

  friend bool operator==(const SuiteRow&, const SuiteRow&) = default;
};

struct SuiteConfig {
  std::vector<double> p_grid{0.25, 0.5, 0.75, 1.0};
  std::size_t samples = 20;
  std::uint64_t seed = 0;
  SolverOptions solver{};
  SuiteTolerances tol{};
};

inline std::vector<SuiteRow> run_property_suite(const FiniteMetricSpace& space, SuiteConfig cfg) {
  if (cfg.samples < 1) throw ContractError("suite needs samples >= 1");
  if (cfg.p_grid.empty()) throw ContractError("suite needs at least one p value");
  for (double p : cfg.p_grid) require_p(p);
  std::sort(cfg.p_grid.begin(), cfg.p_grid.end());
  cfg.p_grid.erase(std::unique(cfg.p_grid.begin(), cfg.p_grid.end()), cfg.p_grid.end());
  if (space.size() < 2) throw ContractError("suite needs at least two points");

  const auto& t = cfg.tol;
  std::vector<SuiteRow> rows;
  auto norm = [&](const Molecule& mu, double p) { return pnorm(space, mu, p, NormMethod::Auto, cfg.solver).value; };

  // Metric implies p-metric.
  const bool metric = is_metric(space, cfg.solver.tol);
  for (double p : cfg.p_grid) {
    const auto rep = validate(space, ValidationMode::PMetric, p, cfg.solver.tol);
    double worst = 0.0;
    for (const auto& v : rep.violations) worst = std::max(worst, v.slack);
    rows.push_back({"p_triangle", p, -1, worst, 0.0, !metric || rep.ok});
  }

  // Isometric embedding of the space.
  long pair_id = 0;
  for (PointIndex x = 0; x < space.size(); ++x) {
    for (PointIndex y = x + 1; y < space.size(); ++y, ++pair_id) {
      const Molecule e = elementary(space, x, y);
      for (double p : cfg.p_grid) {
        const double v = norm(e, p);
        rows.push_back({"isometry", p, pair_id, v, 1.0, std::abs(v - 1.0) <= t.isometry});
      }
    }
  }

  for (std::size_t s = 0; s < cfg.samples; ++s) {
    Rng rng = derive_rng(cfg.seed, s);
    const auto kind = s % 2 == 0 ? CoefficientKind::Discrete : CoefficientKind::Continuous;
    const Molecule mu = random_molecule(space, rng, kind);
    const Molecule nu = random_molecule(space, rng, kind);
    const double lambda = 4.0 * uniform01(rng) - 2.0;
    const long id = static_cast<long>(s);

    const auto env = solve_envelope(space, mu, cfg.solver.tol);
    std::vector<double> norms;
    for (double p : cfg.p_grid) {
      const double nm = norm(mu, p);
      norms.push_back(nm);
      const double nl = norm(lambda * mu, p);
      rows.push_back({"homogeneity", p, id, nl, std::abs(lambda) * nm,
                      std::abs(nl - std::abs(lambda) * nm) <= t.homogeneity * std::max(1.0, nm)});
      const double lhs = std::pow(norm(mu + nu, p), p);
      const double rhs = std::pow(nm, p) + std::pow(norm(nu, p), p);
      rows.push_back({"p_norm_triangle", p, id, lhs, rhs, lhs <= rhs + t.triangle});
      rows.push_back({"positivity", p, id, nm, 0.0, nm > 0.0});
      rows.push_back({"contraction", p, id, env.primal.value, nm, env.primal.value <= nm + t.contraction});
    }
    for (std::size_t i = 0; i + 1 < norms.size(); ++i) {
      rows.push_back({"monotone", cfg.p_grid[i + 1], id, norms[i], norms[i + 1],
                      norms[i] >= norms[i + 1] * (1.0 - t.monotone)});
    }
    rows.push_back({"duality_gap", 1.0, id, env.primal.value, env.witness.value,
                    std::abs(env.primal.value - env.witness.value) <= t.duality});
    rows.push_back({"witness_lipschitz", 1.0, id, env.witness.lipschitz_constant, 1.0,
                    env.witness.lipschitz_constant <= 1.0 + t.lipschitz});
    rows.push_back({"separation", 1.0, id, env.primal.value, env.witness.value,
                    env.primal.value > 0.0 && env.witness.value > 0.0});
    if (space.size() <= cfg.solver.exact_threshold) {
      const double forest = forest_exact(space, mu, 1.0, cfg.solver).value;
      rows.push_back({"agreement", 1.0, id, forest, env.primal.value,
                      std::abs(forest - env.primal.value) <= t.agreement});
    }
  }
  return rows;
}

inline bool all_ok(const std::vector<SuiteRow>& rows) {
  return std::all_of(rows.begin(), rows.end(), [](const SuiteRow& r) { return r.ok; });
}

inline std::string suite_csv(const std::vector<SuiteRow>& rows) {
  std::string out = "check,p,sample,lhs,rhs,ok\n";
  for (const auto& r : rows) {
    out += r.check + "," + io::format_real(r.p) + "," + std::to_string(r.sample) + "," + io::format_real(r.lhs) + "," +
           io::format_real(r.rhs) + "," + (r.ok ? "1" : "0") + "\n";
  }
  return out;
}

}  // namespace freelip

#pragma once

// p-norms of molecules as concave-cost network flows.
//
// A decomposition sum_j a_j (delta(x_j) - delta(y_j)) / d(x_j, y_j) is a flow
// b_e = a_j / d(e) on the directed edges of the complete graph over all
// points, with outflow - inflow = a_z at every non-base point z. Its p-cost is
// (sum_e d(e)^p |b_e|^p)^(1/p). For p <= 1 the cost is concave, so some
// minimizer has cycle-free support. Every feasible forest flow coincides with
// the flow of any spanning tree extending the forest (the added edges carry
// zero net flow), so enumerating spanning trees visits every candidate
// optimum. Trees are generated from Prüfer sequences.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "freelip/config.hpp"
#include "freelip/errors.hpp"
#include "freelip/metric_space.hpp"
#include "freelip/molecule.hpp"
#include "freelip/random.hpp"

namespace freelip {

enum class NormMethod { Auto, ForestExact, LocalSearch, MinCostFlow };

inline std::string_view to_string(NormMethod m) {
  switch (m) {
    case NormMethod::Auto: return "auto";
    case NormMethod::ForestExact: return "forest-exact";
    case NormMethod::LocalSearch: return "local-search";
    case NormMethod::MinCostFlow: return "mincost-flow";
  }
  return "?";
}

struct NormResult {
  double value = 0.0;
  Decomposition certificate;
  NormMethod method = NormMethod::Auto;
  bool optimal = false;
};

/// (sum_j |a_j|^p)^(1/p); zero for an empty family.
inline double cost_p(std::span<const Term> terms, double p) {
  require_p(p);
  if (terms.empty()) return 0.0;
  double s = 0.0;
  if (p == 1.0) {
    for (const auto& t : terms) s += std::abs(t.a);
    return s;
  }
  for (const auto& t : terms) s += std::pow(std::abs(t.a), p);
  return std::pow(s, 1.0 / p);
}

inline double cost_p(const Decomposition& decomp, double p) { return cost_p(decomp.terms(), p); }

inline constexpr std::size_t kMaxExactPoints = 12;

namespace detail {

using Edge = std::pair<PointIndex, PointIndex>;

// Precomputed per-instance data shared read-only by all workers.
struct TreeFlowProblem {
  std::size_t n = 0;
  double p = 1.0;
  std::vector<double> supply;  // a_x per point, 0 at the base
  std::vector<double> dpow;    // d(i,j)^p, row-major
  double snap = 0.0;           // |flow| <= snap is exactly zero

  TreeFlowProblem(const FiniteMetricSpace& space, const Molecule& mu, double p_, const Tolerances& tol)
      : n(space.size()), p(p_), supply(mu.dense()), dpow(n * n, 0.0), snap(tol.flow_snap * mu.total_mass()) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) dpow[i * n + j] = p == 1.0 ? space.d(i, j) : std::pow(space.d(i, j), p);
  }

  double edge_cost(PointIndex c, PointIndex q, double flow) const {
    const double f = std::abs(flow);
    if (f <= snap) return 0.0;
    return dpow[c * n + q] * (p == 1.0 ? f : std::pow(f, p));
  }
};

// Spanning tree in leaf-elimination order: child[k] is removed before parent[k]
// and before every ancestor, and the base point is the root.
struct EliminationTree {
  std::array<std::uint8_t, kMaxExactPoints> child{};
  std::array<std::uint8_t, kMaxExactPoints> parent{};
};

// Prüfer label v corresponds to point (v + 1) % n, so the label n-1, which
// linear decoding never removes, is the base point.
inline void decode_pruefer(std::size_t n, const std::uint8_t* seq, EliminationTree& tree) {
  std::array<std::uint8_t, kMaxExactPoints> degree;
  std::fill_n(degree.begin(), n, std::uint8_t{1});
  for (std::size_t i = 0; i + 2 < n; ++i) ++degree[seq[i]];
  std::size_t ptr = 0;
  while (degree[ptr] != 1) ++ptr;
  std::size_t leaf = ptr;
  auto point = [n](std::size_t v) { return static_cast<std::uint8_t>((v + 1) % n); };
  for (std::size_t i = 0; i + 2 < n; ++i) {
    const std::size_t v = seq[i];
    tree.child[i] = point(leaf);
    tree.parent[i] = point(v);
    if (--degree[v] == 1 && v < ptr) {
      leaf = v;
    } else {
      ++ptr;
      while (degree[ptr] != 1) ++ptr;
      leaf = ptr;
    }
  }
  tree.child[n - 2] = point(leaf);
  tree.parent[n - 2] = point(n - 1);
}

// Sum of |a_e|^p over the tree; flow[k] receives the flow on edge k directed
// child -> parent. Stops early (returning +inf) once the running sum exceeds
// `bound`.
inline double tree_cost_pow(const TreeFlowProblem& prob, const EliminationTree& tree, double* flow,
                            double bound = std::numeric_limits<double>::infinity()) {
  std::array<double, kMaxExactPoints> sub;
  std::copy(prob.supply.begin(), prob.supply.end(), sub.begin());
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < prob.n; ++k) {
    const PointIndex c = tree.child[k], q = tree.parent[k];
    const double f = sub[c];
    sub[q] += f;
    flow[k] = f;
    acc += prob.edge_cost(c, q, f);
    if (acc > bound) return std::numeric_limits<double>::infinity();
  }
  return acc;
}

inline std::vector<Edge> support_edges(const TreeFlowProblem& prob, const EliminationTree& tree, const double* flow) {
  std::vector<Edge> edges;
  for (std::size_t k = 0; k + 1 < prob.n; ++k) {
    if (std::abs(flow[k]) <= prob.snap) continue;
    const PointIndex c = tree.child[k], q = tree.parent[k];
    edges.emplace_back(std::min(c, q), std::max(c, q));
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

inline std::uint64_t ipow(std::uint64_t b, std::size_t e) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < e; ++i) r *= b;
  return r;
}

// Visits Prüfer sequences with global indices [lo, hi) in order.
template <typename Visit>
void for_each_tree(std::size_t n, std::uint64_t lo, std::uint64_t hi, Visit&& visit) {
  const std::size_t len = n - 2;
  std::array<std::uint8_t, kMaxExactPoints> seq{};
  std::uint64_t rest = lo;
  for (std::size_t i = len; i-- > 0;) {
    seq[i] = static_cast<std::uint8_t>(rest % n);
    rest /= n;
  }
  EliminationTree tree;
  for (std::uint64_t idx = lo; idx < hi; ++idx) {
    decode_pruefer(n, seq.data(), tree);
    visit(idx, tree);
    for (std::size_t i = len; i-- > 0;) {
      if (++seq[i] < n) break;
      seq[i] = 0;
    }
  }
}

template <typename Work>
void run_partitioned(std::uint64_t total, std::size_t threads, Work&& work) {
  threads = std::max<std::size_t>(1, std::min<std::uint64_t>(threads, total));
  if (threads == 1) {
    work(0, std::uint64_t{0}, total);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    const std::uint64_t lo = total * t / threads, hi = total * (t + 1) / threads;
    pool.emplace_back([&work, t, lo, hi] { work(t, lo, hi); });
  }
  for (auto& th : pool) th.join();
}

inline Decomposition tree_certificate(const FiniteMetricSpace& space, const TreeFlowProblem& prob,
                                      const EliminationTree& tree, const double* flow) {
  Decomposition cert(space);
  for (std::size_t k = 0; k + 1 < prob.n; ++k) {
    if (std::abs(flow[k]) <= prob.snap) continue;
    const PointIndex c = tree.child[k], q = tree.parent[k];
    cert.add(space, Term{c, q, flow[k] * space.d(c, q)});
  }
  return cert;
}

}  // namespace detail

/// Exact p-norm by spanning-tree enumeration.
///
/// Pass one finds the minimum of sum |a_e|^p (min is order-independent, so
/// it is bit-identical for any thread count). Pass two picks, among trees
/// within the relative cost tolerance, the one whose sorted support edge list
/// is lexicographically least, breaking exact ties by Prüfer index.
inline NormResult forest_exact(const FiniteMetricSpace& space, const Molecule& mu, double p,
                               const SolverOptions& opt = {}) {
  require_p(p);
  require_same_space(space, mu);
  const std::size_t n = space.size();
  if (n > opt.exact_hard_cap || n > kMaxExactPoints) {
    throw SolverRangeError("forest-exact supports at most " +
                           std::to_string(std::min(opt.exact_hard_cap, kMaxExactPoints)) + " points, space has " +
                           std::to_string(n) + "; use method local-search for an upper bound");
  }
  NormResult result{0.0, Decomposition(space), NormMethod::ForestExact, true};
  if (mu.is_zero()) return result;

  const detail::TreeFlowProblem prob(space, mu, p, opt.tol);
  const std::uint64_t total = detail::ipow(n, n - 2);
  const std::size_t threads = std::max<std::size_t>(1, opt.threads);

  std::vector<double> best_per_worker(threads, std::numeric_limits<double>::infinity());
  detail::run_partitioned(total, threads, [&](std::size_t t, std::uint64_t lo, std::uint64_t hi) {
    std::array<double, kMaxExactPoints> flow;
    double best = std::numeric_limits<double>::infinity();
    detail::for_each_tree(n, lo, hi, [&](std::uint64_t, const detail::EliminationTree& tree) {
      best = std::min(best, detail::tree_cost_pow(prob, tree, flow.data(), best));
    });
    best_per_worker[t] = best;
  });
  const double best_pow = *std::min_element(best_per_worker.begin(), best_per_worker.end());
  const double accept = best_pow * std::pow(1.0 + opt.tol.cost_relative, p);

  struct Candidate {
    std::vector<detail::Edge> edges;
    std::uint64_t index = std::numeric_limits<std::uint64_t>::max();
    bool found = false;
    bool before(const Candidate& o) const {
      if (!o.found) return found;
      if (!found) return false;
      if (edges != o.edges) return edges < o.edges;
      return index < o.index;
    }
  };
  std::vector<Candidate> cand_per_worker(threads);
  detail::run_partitioned(total, threads, [&](std::size_t t, std::uint64_t lo, std::uint64_t hi) {
    std::array<double, kMaxExactPoints> flow;
    Candidate mine;
    detail::for_each_tree(n, lo, hi, [&](std::uint64_t idx, const detail::EliminationTree& tree) {
      if (detail::tree_cost_pow(prob, tree, flow.data(), accept) > accept) return;
      Candidate c{detail::support_edges(prob, tree, flow.data()), idx, true};
      if (c.before(mine)) mine = std::move(c);
    });
    cand_per_worker[t] = std::move(mine);
  });
  Candidate chosen;
  for (auto& c : cand_per_worker)
    if (c.before(chosen)) chosen = std::move(c);

  // Rebuild the chosen tree's flows.
  std::array<std::uint8_t, kMaxExactPoints> seq{};
  std::uint64_t rest = chosen.index;
  for (std::size_t i = n - 2; i-- > 0;) {
    seq[i] = static_cast<std::uint8_t>(rest % n);
    rest /= n;
  }
  detail::EliminationTree tree;
  detail::decode_pruefer(n, seq.data(), tree);
  std::array<double, kMaxExactPoints> flow;
  detail::tree_cost_pow(prob, tree, flow.data());
  result.certificate = detail::tree_certificate(space, prob, tree, flow.data());
  result.value = cost_p(result.certificate, p);
  return result;
}

namespace detail {

// Undirected spanning tree as an edge list; flows computed by rooting at base.
struct SpanningTree {
  std::vector<Edge> edges;
};

struct RootedFlows {
  std::vector<PointIndex> order;   // BFS order from base
  std::vector<PointIndex> parent;  // parent[base] = base
  std::vector<double> flow;        // flow on (v, parent[v]) directed v -> parent
};

inline double rooted_cost_pow(const FiniteMetricSpace& space, const std::vector<double>& supply, double p, double snap,
                              const SpanningTree& tree, RootedFlows* out = nullptr) {
  const std::size_t n = space.size();
  std::vector<std::vector<PointIndex>> adj(n);
  for (const auto& [u, v] : tree.edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  std::vector<PointIndex> order{kBase}, parent(n, kBase);
  std::vector<bool> seen(n, false);
  seen[kBase] = true;
  for (std::size_t h = 0; h < order.size(); ++h) {
    for (PointIndex w : adj[order[h]]) {
      if (!seen[w]) {
        seen[w] = true;
        parent[w] = order[h];
        order.push_back(w);
      }
    }
  }
  std::vector<double> sub = supply;
  double acc = 0.0;
  for (std::size_t k = order.size(); k-- > 1;) {
    const PointIndex v = order[k];
    sub[parent[v]] += sub[v];
    const double f = std::abs(sub[v]);
    if (f > snap) acc += std::pow(f * space.d(v, parent[v]), p);
  }
  if (out) *out = {std::move(order), std::move(parent), std::move(sub)};
  return acc;
}

inline Decomposition rooted_certificate(const FiniteMetricSpace& space, const RootedFlows& rf, double snap) {
  Decomposition cert(space);
  for (std::size_t k = 1; k < rf.order.size(); ++k) {
    const PointIndex v = rf.order[k];
    if (std::abs(rf.flow[v]) <= snap) continue;
    cert.add(space, Term{v, rf.parent[v], rf.flow[v] * space.d(v, rf.parent[v])});
  }
  return cert;
}

inline SpanningTree random_tree(std::size_t n, Rng& rng) {
  SpanningTree t;
  if (n < 2) return t;
  std::vector<std::uint8_t> seq(n >= 2 ? n - 2 : 0);
  for (auto& s : seq) s = static_cast<std::uint8_t>(below(rng, n));
  // General Prüfer decode (labels are points directly).
  std::vector<std::size_t> degree(n, 1);
  for (auto s : seq) ++degree[s];
  std::size_t ptr = 0;
  while (degree[ptr] != 1) ++ptr;
  std::size_t leaf = ptr;
  for (auto s : seq) {
    t.edges.emplace_back(std::min<std::size_t>(leaf, s), std::max<std::size_t>(leaf, s));
    if (--degree[s] == 1 && s < ptr) {
      leaf = s;
    } else {
      ++ptr;
      while (degree[ptr] != 1) ++ptr;
      leaf = ptr;
    }
  }
  t.edges.emplace_back(leaf, n - 1);
  return t;
}

// Best-improvement edge swaps until no strict decrease remains.
inline double improve_tree(const FiniteMetricSpace& space, const std::vector<double>& supply, double p, double snap,
                           SpanningTree& tree) {
  const std::size_t n = space.size();
  double current = rooted_cost_pow(space, supply, p, snap, tree);
  for (std::size_t iter = 0; iter < 10'000; ++iter) {
    double best = current;
    std::size_t best_edge = 0;
    Edge best_new{};
    bool improved = false;
    for (std::size_t e = 0; e < tree.edges.size(); ++e) {
      // Side of the cut not containing edges[e].first.
      std::vector<std::vector<PointIndex>> adj(n);
      for (std::size_t k = 0; k < tree.edges.size(); ++k) {
        if (k == e) continue;
        adj[tree.edges[k].first].push_back(tree.edges[k].second);
        adj[tree.edges[k].second].push_back(tree.edges[k].first);
      }
      std::vector<bool> side(n, false);
      std::vector<PointIndex> stack{tree.edges[e].first};
      side[tree.edges[e].first] = true;
      while (!stack.empty()) {
        const PointIndex u = stack.back();
        stack.pop_back();
        for (PointIndex w : adj[u])
          if (!side[w]) side[w] = true, stack.push_back(w);
      }
      const Edge removed = tree.edges[e];
      for (PointIndex u = 0; u < n; ++u) {
        if (!side[u]) continue;
        for (PointIndex w = 0; w < n; ++w) {
          if (side[w]) continue;
          const Edge cand{std::min(u, w), std::max(u, w)};
          if (cand == removed) continue;
          tree.edges[e] = cand;
          const double c = rooted_cost_pow(space, supply, p, snap, tree);
          if (c < best * (1.0 - 1e-12)) {
            best = c;
            best_edge = e;
            best_new = cand;
            improved = true;
          }
        }
      }
      tree.edges[e] = removed;
    }
    if (!improved) break;
    tree.edges[best_edge] = best_new;
    current = best;
  }
  return current;
}

}  // namespace detail

/// Heuristic upper bound for spaces beyond exact range.
///
/// Starts from the direct-edge decomposition (every a_x routed straight to
/// the base) and from `restarts` seeded random spanning trees, then applies
/// best-improvement single-edge swaps.
inline NormResult local_search(const FiniteMetricSpace& space, const Molecule& mu, double p,
                               const SolverOptions& opt = {}) {
  require_p(p);
  require_same_space(space, mu);
  NormResult result{0.0, Decomposition(space), NormMethod::LocalSearch, false};
  if (mu.is_zero()) return result;

  const std::size_t n = space.size();
  const std::vector<double> supply = mu.dense();
  const double snap = opt.tol.flow_snap * mu.total_mass();

  std::vector<detail::SpanningTree> starts;
  detail::SpanningTree star;
  for (PointIndex x = 1; x < n; ++x) star.edges.emplace_back(kBase, x);
  starts.push_back(std::move(star));
  for (std::size_t r = 0; r < opt.restarts; ++r) {
    Rng rng = derive_rng(opt.seed, r);
    starts.push_back(detail::random_tree(n, rng));
  }

  double best = std::numeric_limits<double>::infinity();
  detail::SpanningTree best_tree;
  for (auto& t : starts) {
    const double c = detail::improve_tree(space, supply, p, snap, t);
    if (c < best) {
      best = c;
      best_tree = t;
    }
  }
  detail::RootedFlows rf;
  detail::rooted_cost_pow(space, supply, p, snap, best_tree, &rf);
  result.certificate = detail::rooted_certificate(space, rf, snap);
  result.value = cost_p(result.certificate, p);
  return result;
}

/// ||mu|| in F_p(M). Auto picks forest-exact up to opt.exact_threshold points.
/// The min-cost-flow method lives in transport_dual (envelope_norm).
inline NormResult pnorm(const FiniteMetricSpace& space, const Molecule& mu, double p,
                        NormMethod method = NormMethod::Auto, const SolverOptions& opt = {}) {
  require_p(p);
  require_same_space(space, mu);
  switch (method) {
    case NormMethod::Auto:
      return space.size() <= opt.exact_threshold ? forest_exact(space, mu, p, opt) : local_search(space, mu, p, opt);
    case NormMethod::ForestExact: return forest_exact(space, mu, p, opt);
    case NormMethod::LocalSearch: return local_search(space, mu, p, opt);
    case NormMethod::MinCostFlow:
      throw ContractError("mincost-flow computes the p = 1 envelope norm; call envelope_norm");
  }
  throw ContractError("unknown norm method");
}

}  // namespace freelip

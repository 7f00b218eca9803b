#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "freelip/config.hpp"
#include "freelip/errors.hpp"
#include "freelip/random.hpp"

namespace freelip {

using PointIndex = std::size_t;

// The distinguished base point is always stored at index 0.
inline constexpr PointIndex kBase = 0;

namespace detail {
inline std::uint64_t next_space_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}
}  // namespace detail

/// A finite pointed (p-)metric space with a dense distance matrix.
///
/// Construction checks shape and numeric content (finite, nonnegative,
/// symmetric, zero exactly on the diagonal). The triangle inequality is not
/// enforced here; use validate() for that, since some experiments need
/// non-metric weight matrices.
///
/// Every constructed space gets a process-unique id. Molecules and maps
/// record the id of the space they live over and are checked against it.
class FiniteMetricSpace {
 public:
  FiniteMetricSpace(std::vector<std::string> labels, std::vector<std::vector<double>> dist)
      : labels_(std::move(labels)), id_(detail::next_space_id()) {
    const std::size_t n = labels_.size();
    if (n == 0) throw StructuralError("space must contain at least the base point");
    if (dist.size() != n) {
      throw StructuralError("distance matrix has " + std::to_string(dist.size()) +
                            " rows but there are " + std::to_string(n) + " labels");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (dist[i].size() != n) {
        throw StructuralError("distance matrix row " + std::to_string(i) + " has " +
                              std::to_string(dist[i].size()) + " entries, expected " +
                              std::to_string(n));
      }
    }
    std::unordered_set<std::string> seen;
    for (const auto& l : labels_) {
      if (!seen.insert(l).second) throw StructuralError("duplicate label '" + l + "'");
    }
    dist_.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double v = dist[i][j];
        if (!std::isfinite(v)) throw DataError("non-finite distance at " + where(i, j));
        if (v < 0.0) throw DataError("negative distance at " + where(i, j));
        if (i == j && v != 0.0) throw DataError("nonzero diagonal entry at " + where(i, j));
        if (i != j && v == 0.0) throw DataError("zero distance between distinct points at " + where(i, j));
        if (v != dist[j][i]) throw DataError("asymmetric distance at " + where(i, j));
        dist_[i * n + j] = v;
      }
    }
  }

  std::size_t size() const noexcept { return labels_.size(); }
  std::uint64_t id() const noexcept { return id_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::string& label(PointIndex i) const { return labels_.at(i); }

  double d(PointIndex i, PointIndex j) const noexcept { return dist_[i * size() + j]; }

  // Smallest positive distance; +inf for a single-point space.
  double min_distance() const noexcept {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = i + 1; j < size(); ++j) m = std::min(m, d(i, j));
    return m;
  }

  PointIndex index_of(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) throw ContractError("unknown point label '" + label + "'");
    return static_cast<PointIndex>(it - labels_.begin());
  }

  std::vector<std::vector<double>> matrix() const {
    std::vector<std::vector<double>> m(size(), std::vector<double>(size()));
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = 0; j < size(); ++j) m[i][j] = d(i, j);
    return m;
  }

 private:
  std::string where(std::size_t i, std::size_t j) const {
    return "(" + labels_[i] + ", " + labels_[j] + ")";
  }

  std::vector<std::string> labels_;
  std::vector<double> dist_;
  std::uint64_t id_;
};

enum class ValidationMode { Metric, PMetric };

struct TriangleViolation {
  PointIndex i, j, k;  // d(i,k) exceeds the bound through j
  double slack;        // amount by which the inequality fails
};

struct ValidationReport {
  bool ok = true;
  ValidationMode mode = ValidationMode::Metric;
  double p = 1.0;
  std::vector<TriangleViolation> violations;
};

/// Checks d(i,k) <= d(i,j) + d(j,k) (metric mode) or the p-powered version
/// (p-metric mode) for every triple with i < k. Reports all violations.
inline ValidationReport validate(const FiniteMetricSpace& space, ValidationMode mode, double p = 1.0,
                                 const Tolerances& tol = {}) {
  if (mode == ValidationMode::PMetric) require_p(p);
  const double q = mode == ValidationMode::Metric ? 1.0 : p;
  auto pw = [q](double v) { return q == 1.0 ? v : std::pow(v, q); };

  ValidationReport report;
  report.mode = mode;
  report.p = q;
  const std::size_t n = space.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k < n; ++k) {
      const double lhs = pw(space.d(i, k));
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i || j == k) continue;
        const double slack = lhs - (pw(space.d(i, j)) + pw(space.d(j, k)));
        if (slack > tol.validation_slack) report.violations.push_back({i, j, k, slack});
      }
    }
  }
  report.ok = report.violations.empty();
  return report;
}

inline bool is_metric(const FiniteMetricSpace& space, const Tolerances& tol = {}) {
  return validate(space, ValidationMode::Metric, 1.0, tol).ok;
}

/// Snowflake transform d -> d^alpha. Requires a metric input.
inline FiniteMetricSpace snowflake(const FiniteMetricSpace& space, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ContractError("snowflake exponent must lie in (0, 1], got " + std::to_string(alpha));
  }
  if (!is_metric(space)) throw ContractError("snowflake requires a metric space");
  auto m = space.matrix();
  if (alpha != 1.0) {
    for (auto& row : m)
      for (auto& v : row) v = std::pow(v, alpha);
  }
  return FiniteMetricSpace(space.labels(), std::move(m));
}

enum class Generator { UniformShortestPath, Euclidean };

struct GeneratorSpec {
  std::size_t n = 6;
  std::uint64_t seed = 0;
  Generator kind = Generator::UniformShortestPath;
  std::size_t dim = 2;
};

inline std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  return labels;
}

/// Seeded random metric space. Bit-for-bit reproducible from its GeneratorSpec.
inline FiniteMetricSpace random_space(const GeneratorSpec& spec) {
  const std::size_t n = spec.n;
  if (n < 2) throw ContractError("random_space needs n >= 2");
  Rng rng(spec.seed);
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));

  switch (spec.kind) {
    case Generator::UniformShortestPath: {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          const double w = 1.0 - uniform01(rng);  // (0, 1]
          m[i][j] = m[j][i] = w;
        }
      }
      // Floyd-Warshall closure.
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j)
            if (m[i][k] + m[k][j] < m[i][j]) m[i][j] = m[i][k] + m[k][j];
      break;
    }
    case Generator::Euclidean: {
      if (spec.dim == 0) throw ContractError("euclidean generator needs dim >= 1");
      std::vector<std::vector<double>> pts(n, std::vector<double>(spec.dim));
      for (auto& pt : pts)
        for (auto& c : pt) c = uniform01(rng);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          double s = 0.0;
          for (std::size_t c = 0; c < spec.dim; ++c) s += (pts[i][c] - pts[j][c]) * (pts[i][c] - pts[j][c]);
          m[i][j] = m[j][i] = std::sqrt(s);
        }
      }
      break;
    }
  }
  return FiniteMetricSpace(default_labels(n), std::move(m));
}

inline FiniteMetricSpace random_space(std::size_t n, std::uint64_t seed,
                                      Generator kind = Generator::UniformShortestPath, std::size_t dim = 2) {
  return random_space(GeneratorSpec{n, seed, kind, dim});
}

}  // namespace freelip

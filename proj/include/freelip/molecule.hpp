#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "freelip/config.hpp"
#include "freelip/errors.hpp"
#include "freelip/metric_space.hpp"

namespace freelip {

/// An element sum_x a_x delta(x) of the span of point evaluations.
///
/// Stored in canonical sparse form: sorted by point, no base entry (delta of
/// the base point is zero), no coefficient below the prune threshold. Two
/// molecules compare equal iff they live over the same space and their
/// canonical maps are equal.
class Molecule {
 public:
  using Coefficients = std::map<PointIndex, double>;

  Molecule(const FiniteMetricSpace& space, std::span<const std::pair<PointIndex, double>> entries,
           double prune = Tolerances{}.coefficient_prune)
      : space_id_(space.id()), points_(space.size()) {
    for (const auto& [x, a] : entries) {
      if (x >= points_) throw ContractError("molecule entry refers to point " + std::to_string(x) + " outside the space");
      if (!std::isfinite(a)) throw DataError("non-finite molecule coefficient");
      if (x == kBase) continue;
      coeffs_[x] += a;
    }
    canonicalize(prune);
  }

  Molecule(const FiniteMetricSpace& space, std::initializer_list<std::pair<PointIndex, double>> entries)
      : Molecule(space, std::span<const std::pair<PointIndex, double>>(entries.begin(), entries.size())) {}

  static Molecule zero(const FiniteMetricSpace& space) { return Molecule(space, {}); }

  /// delta(x); the zero molecule when x is the base point.
  static Molecule delta(const FiniteMetricSpace& space, PointIndex x) { return Molecule(space, {{x, 1.0}}); }

  /// Dense coefficient vector indexed by point (base entry 0).
  static Molecule from_dense(const FiniteMetricSpace& space, std::span<const double> dense) {
    if (dense.size() != space.size()) throw ContractError("dense coefficient vector has wrong length");
    std::vector<std::pair<PointIndex, double>> e;
    for (std::size_t i = 0; i < dense.size(); ++i) e.emplace_back(i, dense[i]);
    return Molecule(space, e);
  }

  std::uint64_t space_id() const noexcept { return space_id_; }
  std::size_t space_size() const noexcept { return points_; }
  const Coefficients& coeffs() const noexcept { return coeffs_; }
  bool is_zero() const noexcept { return coeffs_.empty(); }

  double coeff(PointIndex x) const {
    auto it = coeffs_.find(x);
    return it == coeffs_.end() ? 0.0 : it->second;
  }

  std::vector<double> dense() const {
    std::vector<double> v(points_, 0.0);
    for (const auto& [x, a] : coeffs_) v[x] = a;
    return v;
  }

  double max_abs() const noexcept {
    double m = 0.0;
    for (const auto& [x, a] : coeffs_) m = std::max(m, std::abs(a));
    return m;
  }

  double total_mass() const noexcept {
    double m = 0.0;
    for (const auto& [x, a] : coeffs_) m += std::abs(a);
    return m;
  }

  // Same coefficients, same space.
  friend bool operator==(const Molecule& a, const Molecule& b) {
    return a.space_id_ == b.space_id_ && a.coeffs_ == b.coeffs_;
  }

  /// Coefficient-wise comparison with an absolute tolerance.
  bool approx_equal(const Molecule& other, double tol) const {
    if (space_id_ != other.space_id_) return false;
    for (std::size_t x = 1; x < points_; ++x) {
      if (std::abs(coeff(x) - other.coeff(x)) > tol) return false;
    }
    return true;
  }

  friend Molecule operator+(const Molecule& a, const Molecule& b) { return combine(1.0, a, 1.0, b); }
  friend Molecule operator-(const Molecule& a, const Molecule& b) { return combine(1.0, a, -1.0, b); }
  friend Molecule operator-(const Molecule& a) { return a * -1.0; }
  friend Molecule operator*(double s, const Molecule& a) { return a * s; }
  friend Molecule operator*(const Molecule& a, double s) {
    Molecule r = a;
    for (auto& [x, c] : r.coeffs_) c *= s;
    r.canonicalize(Tolerances{}.coefficient_prune);
    return r;
  }

  /// alpha * a + beta * b.
  static Molecule combine(double alpha, const Molecule& a, double beta, const Molecule& b) {
    if (a.space_id_ != b.space_id_) throw SpaceMismatch("molecules live over different spaces");
    Molecule r = a;
    for (auto& [x, c] : r.coeffs_) c *= alpha;
    for (const auto& [x, c] : b.coeffs_) r.coeffs_[x] += beta * c;
    r.canonicalize(Tolerances{}.coefficient_prune);
    return r;
  }

 private:
  void canonicalize(double prune) {
    std::erase_if(coeffs_, [prune](const auto& kv) { return std::abs(kv.second) < prune || kv.second == 0.0; });
  }

  std::uint64_t space_id_;
  std::size_t points_;
  Coefficients coeffs_;
};

inline void require_same_space(const FiniteMetricSpace& space, const Molecule& mu) {
  if (mu.space_id() != space.id()) throw SpaceMismatch("molecule does not live over this space");
}

/// <mu, f> = sum_x a_x f(x). f must vanish at the base point.
inline double pair(const FiniteMetricSpace& space, const Molecule& mu, std::span<const double> f) {
  require_same_space(space, mu);
  if (f.size() != space.size()) throw ContractError("function has wrong length for this space");
  if (f[kBase] != 0.0) throw ContractError("function must vanish at the base point");
  double s = 0.0;
  for (const auto& [x, a] : mu.coeffs()) s += a * f[x];
  return s;
}

/// (delta(x) - delta(y)) / d(x, y).
inline Molecule elementary(const FiniteMetricSpace& space, PointIndex x, PointIndex y) {
  if (x >= space.size() || y >= space.size()) throw ContractError("elementary molecule point out of range");
  if (x == y) throw ContractError("elementary molecule needs distinct points");
  const double w = 1.0 / space.d(x, y);
  return Molecule(space, {{x, w}, {y, -w}});
}

/// One term a * (delta(x) - delta(y)) / d(x, y) of a decomposition.
struct Term {
  PointIndex x;
  PointIndex y;
  double a;

  friend bool operator==(const Term&, const Term&) = default;
};

/// A finite expansion of a molecule into weighted elementary molecules.
class Decomposition {
 public:
  Decomposition() = default;
  explicit Decomposition(const FiniteMetricSpace& space, std::vector<Term> terms = {})
      : space_id_(space.id()), terms_(std::move(terms)) {
    for (const auto& t : terms_) check(space, t);
  }

  void add(const FiniteMetricSpace& space, Term t) {
    if (space.id() != space_id_) throw SpaceMismatch("term added to decomposition over another space");
    check(space, t);
    terms_.push_back(t);
  }

  std::uint64_t space_id() const noexcept { return space_id_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }

 private:
  static void check(const FiniteMetricSpace& space, const Term& t) {
    if (t.x >= space.size() || t.y >= space.size()) throw ContractError("decomposition term point out of range");
    if (t.x == t.y) throw ContractError("decomposition term needs x != y");
    if (!std::isfinite(t.a)) throw DataError("non-finite decomposition coefficient");
  }

  std::uint64_t space_id_ = 0;
  std::vector<Term> terms_;
};

/// sum_j a_j * elementary(x_j, y_j), in canonical form.
inline Molecule realize(const FiniteMetricSpace& space, const Decomposition& decomp) {
  if (decomp.space_id() != space.id()) throw SpaceMismatch("decomposition does not live over this space");
  std::vector<double> dense(space.size(), 0.0);
  for (const auto& t : decomp.terms()) {
    const double w = t.a / space.d(t.x, t.y);
    dense[t.x] += w;
    dense[t.y] -= w;
  }
  return Molecule::from_dense(space, dense);
}

}  // namespace freelip

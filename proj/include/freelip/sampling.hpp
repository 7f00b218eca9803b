#pragma once

#include <array>
#include <span>
#include <vector>

#include "freelip/metric_space.hpp"
#include "freelip/molecule.hpp"
#include "freelip/random.hpp"

namespace freelip {

enum class CoefficientKind {
  Discrete,    // drawn from {+-1, +-0.5, +-2}
  Continuous,  // uniform in [-1, 1) \ {0}
};

inline double draw_coefficient(Rng& rng, CoefficientKind kind) {
  static constexpr std::array<double, 6> kDiscrete{1.0, -1.0, 0.5, -0.5, 2.0, -2.0};
  if (kind == CoefficientKind::Discrete) return kDiscrete[below(rng, kDiscrete.size())];
  double a = 0.0;
  while (a == 0.0) a = 2.0 * uniform01(rng) - 1.0;
  return a;
}

/// Nonzero molecule with a random nonempty support among the non-base points.
inline Molecule random_molecule(const FiniteMetricSpace& space, Rng& rng, CoefficientKind kind) {
  const std::size_t n = space.size();
  if (n < 2) throw ContractError("random_molecule needs a point besides the base");
  std::vector<std::pair<PointIndex, double>> entries;
  const std::size_t k = 1 + below(rng, n - 1);
  std::vector<PointIndex> pts;
  for (PointIndex x = 1; x < n; ++x) pts.push_back(x);
  // Partial Fisher-Yates: first k entries become the support.
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(pts[i], pts[i + below(rng, pts.size() - i)]);
    entries.emplace_back(pts[i], draw_coefficient(rng, kind));
  }
  return Molecule(space, entries);
}

/// Random molecule supported on the given points (base entries are dropped).
inline Molecule random_molecule_on(const FiniteMetricSpace& space, std::span<const PointIndex> support, Rng& rng,
                                   CoefficientKind kind) {
  std::vector<std::pair<PointIndex, double>> entries;
  for (PointIndex x : support) entries.emplace_back(x, draw_coefficient(rng, kind));
  return Molecule(space, entries);
}

}  // namespace freelip

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "freelip/flow_norm.hpp"
#include "freelip/metric_space.hpp"
#include "freelip/molecule.hpp"
#include "freelip/random.hpp"
#include "freelip/sampling.hpp"
#include "freelip/transport_dual.hpp"
#include "oracles.hpp"

using namespace freelip;

namespace {

FiniteMetricSpace hub_space() {
  return FiniteMetricSpace({"0", "a", "b"}, {{0, 1, 1}, {1, 0, 0.1}, {1, 0.1, 0}});
}

bool is_one_lipschitz(const FiniteMetricSpace& s, const std::vector<double>& f, double slack) {
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (i != j && std::abs(f[i] - f[j]) > s.d(i, j) * (1 + slack)) return false;
  return f[kBase] == 0.0;
}

}  // namespace

TEST(Envelope, ElementaryHasNormOne) {
  const auto s = hub_space();
  EXPECT_NEAR(envelope_norm(s, elementary(s, 1, 2)).value, 1.0, 1e-12);
  EXPECT_NEAR(envelope_norm(s, elementary(s, 1, 0)).value, 1.0, 1e-12);
}

TEST(Envelope, ZeroMolecule) {
  const auto s = hub_space();
  const auto sol = solve_envelope(s, Molecule::zero(s));
  EXPECT_EQ(sol.primal.value, 0.0);
  EXPECT_TRUE(sol.primal.certificate.empty());
  EXPECT_EQ(sol.witness.value, 0.0);
}

TEST(Envelope, HubExample) {
  const auto s = hub_space();
  const Molecule mu(s, {{1, 1.0}, {2, 1.0}});
  const auto r = envelope_norm(s, mu);
  EXPECT_NEAR(r.value, 2.0, 1e-12);
  EXPECT_EQ(r.method, NormMethod::MinCostFlow);
  EXPECT_TRUE(realize(s, r.certificate).approx_equal(mu, 1e-12));
}

TEST(Witness, SinglePoint) {
  const FiniteMetricSpace one({"0", "a"}, {{0, 1}, {1, 0}});
  const auto w1 = dual_witness(one, Molecule::delta(one, 1));
  EXPECT_NEAR(w1.f[1], 1.0, 1e-12);
  EXPECT_EQ(w1.f[0], 0.0);

  const FiniteMetricSpace two({"0", "a"}, {{0, 2}, {2, 0}});
  const auto w2 = dual_witness(two, Molecule::delta(two, 1));
  EXPECT_NEAR(w2.f[1], 2.0, 1e-12);
  EXPECT_NEAR(w2.value, 2.0, 1e-12);
  EXPECT_LE(w2.lipschitz_constant, 1.0 + 1e-12);
}

TEST(Witness, NegativeMass) {
  const FiniteMetricSpace s({"0", "a"}, {{0, 2}, {2, 0}});
  const auto sol = solve_envelope(s, Molecule(s, {{1, -3.0}}));
  EXPECT_NEAR(sol.primal.value, 6.0, 1e-12);
  EXPECT_NEAR(sol.witness.value, 6.0, 1e-12);
  EXPECT_NEAR(sol.witness.f[1], -2.0, 1e-12);
}

TEST(Duality, MatchesVertexEnumeration) {
  Rng rng(21);
  for (int trial = 0; trial < 60; ++trial) {
    const auto s = random_space(2 + trial % 4, 500 + static_cast<std::uint64_t>(trial),
                                trial % 2 ? Generator::Euclidean : Generator::UniformShortestPath, 2);
    const auto mu = random_molecule(s, rng, CoefficientKind::Continuous);
    const double lp = oracle::lipschitz_dual_max(s.matrix(), mu.dense());
    const auto sol = solve_envelope(s, mu);
    EXPECT_NEAR(sol.primal.value, lp, 1e-9 * std::max(1.0, lp)) << trial;
    EXPECT_NEAR(sol.witness.value, lp, 1e-9 * std::max(1.0, lp)) << trial;
  }
}

TEST(Duality, GapAndLipschitzOnRandomInstances) {
  Rng rng(8);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto s = random_space(6, seed);
    const auto mu = random_molecule(s, rng, seed % 2 ? CoefficientKind::Discrete : CoefficientKind::Continuous);
    const auto sol = solve_envelope(s, mu);
    EXPECT_LE(std::abs(sol.primal.value - sol.witness.value), 1e-7) << seed;
    EXPECT_LE(sol.witness.lipschitz_constant, 1.0 + 1e-9) << seed;
    EXPECT_TRUE(realize(s, sol.primal.certificate).approx_equal(mu, 1e-9)) << seed;
  }
}

TEST(Duality, WeakDualityForRandomLipschitzFunctions) {
  Rng rng(13);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = random_space(7, seed + 900);
    const auto mu = random_molecule(s, rng, CoefficientKind::Continuous);
    const double norm = envelope_norm(s, mu).value;
    for (int k = 0; k < 10; ++k) {
      // Scaled distance-to-a-point functions are 1-Lipschitz.
      const PointIndex c = below(rng, s.size());
      const double t = 2 * uniform01(rng) - 1;
      std::vector<double> f(s.size());
      for (std::size_t i = 0; i < s.size(); ++i) f[i] = t * (s.d(i, c) - s.d(kBase, c));
      ASSERT_TRUE(is_one_lipschitz(s, f, 1e-12));
      EXPECT_LE(pair(s, mu, f), norm + 1e-9);
    }
  }
}

TEST(Agreement, ForestExactAtPOne) {
  Rng rng(4);
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    const auto s = random_space(3 + seed % 5, seed + 40, seed % 3 ? Generator::UniformShortestPath : Generator::Euclidean, 2);
    const auto mu = random_molecule(s, rng, seed % 2 ? CoefficientKind::Discrete : CoefficientKind::Continuous);
    const double flow = envelope_norm(s, mu).value;
    const double tree = forest_exact(s, mu, 1.0, {}).value;
    EXPECT_NEAR(flow, tree, 1e-7) << seed;
  }
}

TEST(Contraction, HubExample) {
  const auto s = hub_space();
  const Molecule mu(s, {{1, 1.0}, {2, 1.0}});
  const auto r = check_contraction(s, mu, 0.5);
  EXPECT_TRUE(r.ok);
  EXPECT_NEAR(r.env_norm, 2.0, 1e-12);
  EXPECT_NEAR(r.p_norm, std::pow(std::sqrt(2.0) + std::sqrt(0.1), 2), 1e-9);
}

TEST(Contraction, RandomMolecules) {
  Rng rng(17);
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto s = random_space(3 + seed % 5, seed + 7);
    const auto mu = random_molecule(s, rng, CoefficientKind::Continuous);
    for (double p : {0.25, 0.5, 0.75, 1.0}) EXPECT_TRUE(check_contraction(s, mu, p).ok) << seed << " p=" << p;
  }
}

TEST(EnvelopeMap, KeepsCoefficients) {
  const auto s = hub_space();
  const Molecule mu(s, {{1, 0.5}, {2, -2.0}});
  EXPECT_EQ(envelope_map(mu).molecule, mu);
  EXPECT_EQ(envelope_norm(s, envelope_map(mu)).value, envelope_norm(s, mu).value);
}

TEST(Separation, BasisNormIsDistanceToBase) {
  const auto s = random_space(6, 3);
  const auto rep = separation_suite(s, 0.5, 10, 1);
  EXPECT_TRUE(rep.ok);
  for (PointIndex x = 1; x < s.size(); ++x) EXPECT_NEAR(rep.samples[x - 1].env_norm, s.d(kBase, x), 1e-12);
  EXPECT_GT(rep.min_env_norm, 0.0);
  EXPECT_GT(rep.min_witness_value, 0.0);
  EXPECT_GE(rep.min_ratio, 1.0 - 1e-9);
}

TEST(Separation, InjectivityLowerBound) {
  // f = d(., base) is 1-Lipschitz, so the norm is at least sum a_x d(base, x).
  Rng rng(2);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto s = random_space(5, seed);
    std::vector<std::pair<PointIndex, double>> e;
    for (PointIndex x = 1; x < s.size(); ++x) e.emplace_back(x, 0.1 + uniform01(rng));
    const Molecule mu(s, e);
    double lower = 0.0;
    for (auto& [x, a] : e) lower += a * s.d(kBase, x);
    EXPECT_GE(envelope_norm(s, mu).value, lower - 1e-12);
  }
}

TEST(Separation, RejectsZeroSamples) {
  EXPECT_THROW(separation_suite(hub_space(), 0.5, 0, 1), ContractError);
  EXPECT_THROW(separation_suite(hub_space(), 1.5, 3, 1), ContractError);
}

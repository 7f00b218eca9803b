#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "freelip/flow_norm.hpp"
#include "freelip/io.hpp"
#include "freelip/random.hpp"
#include "freelip/sampling.hpp"

using namespace freelip;
using io::json;

TEST(FormatReal, Digits) {
  EXPECT_EQ(io::format_real(2.0), "2");
  EXPECT_EQ(io::format_real(0.1), "0.1");
  EXPECT_EQ(io::format_real(2.9944271909999163), "2.994427191");
  EXPECT_EQ(io::format_real(486000.0), "486000");
  EXPECT_EQ(io::format_real(1.0 / 3.0), "0.333333333333");
}

TEST(SpaceJson, BaseMovedFirst) {
  const json j = json::parse(R"({"labels": ["a", "0", "b"], "base": "0",
                                 "dist": [[0, 1, 0.1], [1, 0, 1], [0.1, 1, 0]]})");
  const auto s = io::space_from_json(j);
  EXPECT_EQ(s.labels(), (std::vector<std::string>{"0", "a", "b"}));
  EXPECT_EQ(s.d(1, 2), 0.1);
  EXPECT_EQ(s.d(0, 1), 1.0);
}

TEST(SpaceJson, Errors) {
  EXPECT_THROW(io::space_from_json(json::parse(R"({"labels": ["0", "0"], "dist": [[0, 1], [1, 0]]})")),
               StructuralError);
  EXPECT_THROW(io::space_from_json(json::parse(R"({"labels": ["0", "a"], "base": "z", "dist": [[0, 1], [1, 0]]})")),
               StructuralError);
  EXPECT_THROW(io::space_from_json(json::parse(R"({"labels": ["0", "a"], "dist": [[0, 1]]})")), StructuralError);
  EXPECT_THROW(io::space_from_json(json::parse(R"({"labels": ["0", "a"], "dist": [[0, 1], [2, 0]]})")), DataError);
  EXPECT_THROW(io::space_from_json(json::parse(R"({"labels": ["0", "a"]})")), ParseError);
  EXPECT_THROW(io::space_from_json(json::parse(R"([1, 2])")), ParseError);
}

TEST(SpaceJson, RoundTrip) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = random_space(2 + seed % 7, seed, seed % 2 ? Generator::Euclidean : Generator::UniformShortestPath);
    const auto back = io::space_from_json(json::parse(io::to_json(s).dump()));
    EXPECT_EQ(back.labels(), s.labels());
    EXPECT_EQ(back.matrix(), s.matrix());
  }
}

TEST(MoleculeJson, RoundTripAndBaseDrop) {
  Rng rng(1);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto s = random_space(6, seed);
    const auto mu = random_molecule(s, rng, CoefficientKind::Continuous);
    EXPECT_EQ(io::molecule_from_json(s, json::parse(io::to_json(s, mu).dump())), mu);
  }
  const auto s = random_space(3, 0);
  std::vector<std::string> dropped;
  const auto mu = io::molecule_from_json(s, json::parse(R"({"coeffs": {"0": 4, "1": 2.5}})"), &dropped);
  EXPECT_EQ(mu, Molecule(s, {{1, 2.5}}));
  EXPECT_EQ(dropped, (std::vector<std::string>{"0"}));
  EXPECT_THROW(io::molecule_from_json(s, json::parse(R"({"coeffs": {"q": 1}})")), ContractError);
  EXPECT_THROW(io::molecule_from_json(s, json::parse(R"({"coeffs": [1]})")), ParseError);
}

TEST(CertificateJson, RoundTrip) {
  const FiniteMetricSpace s({"0", "a", "b"}, {{0, 1, 1}, {1, 0, 0.1}, {1, 0.1, 0}});
  const Molecule mu(s, {{1, 1.0}, {2, 1.0}});
  const auto r = forest_exact(s, mu, 0.5, {});
  const auto j = io::to_json(s, r, true);
  EXPECT_EQ(j.at("method"), "forest-exact");
  EXPECT_EQ(j.at("optimal"), true);
  const auto back = io::decomposition_from_json(s, j.at("certificate"));
  EXPECT_EQ(back.terms(), r.certificate.terms());
  EXPECT_FALSE(io::to_json(s, r, false).contains("certificate"));
}

TEST(GeneratorSpec, Parse) {
  const auto g = io::parse_generator_spec("random:n=6,seed=42,gen=euclid,dim=3");
  EXPECT_EQ(g.n, 6u);
  EXPECT_EQ(g.seed, 42u);
  EXPECT_EQ(g.kind, Generator::Euclidean);
  EXPECT_EQ(g.dim, 3u);
  EXPECT_EQ(io::parse_generator_spec("random:n=4").kind, Generator::UniformShortestPath);
  EXPECT_EQ(io::load_space("random:n=6,seed=42").matrix(), random_space(6, 42).matrix());
  EXPECT_THROW(io::parse_generator_spec("random:seed=1"), ParseError);
  EXPECT_THROW(io::parse_generator_spec("random:n=x"), ParseError);
  EXPECT_THROW(io::parse_generator_spec("random:n=3,gen=tree"), ParseError);
  EXPECT_THROW(io::parse_generator_spec("rand:n=3"), ParseError);
}

TEST(MapJson, InlineAndFileRefs) {
  const auto dir = std::filesystem::temp_directory_path() / "freelip_io_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "n.json") << R"({"labels": ["0", "a", "b"], "dist": [[0, 1, 1], [1, 0, 0.1], [1, 0.1, 0]]})";
    std::ofstream(dir / "map.json") << R"({"domain": "n.json",
      "codomain": {"labels": ["0", "c"], "dist": [[0, 2], [2, 0]]},
      "image": {"a": "c", "b": "c"}})";
    std::ofstream(dir / "partial.json") << R"({"domain": "n.json", "codomain": "n.json", "image": {"a": "b"}})";
  }
  const auto h = io::load_map(dir / "map.json");
  EXPECT_EQ(h.image(), (std::vector<PointIndex>{0, 1, 1}));
  EXPECT_DOUBLE_EQ(h.lipschitz_constant(), 2.0);
  EXPECT_THROW(io::load_map(dir / "partial.json"), ContractError);
  EXPECT_THROW(io::load_map(dir / "missing.json"), ParseError);
  std::filesystem::remove_all(dir);
}

#pragma once

// JSON file formats and text helpers shared by the CLI and tests.
//
//   space:       {"labels": [..], "base": "<label>", "dist": [[..]]}
//   molecule:    {"coeffs": {"<label>": <real>, ...}}
//   certificate: {"terms": [{"x": label, "y": label, "a": real}]}
//   witness:     {"f": {label: real}, "value": real}
//   map:         {"domain": spaceRef, "codomain": spaceRef, "image": {label: label}}
//
// A spaceRef is either an inline space object or a path, resolved relative to
// the map file.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "freelip/errors.hpp"
#include "freelip/maps.hpp"
#include "freelip/metric_space.hpp"
#include "freelip/molecule.hpp"
#include "freelip/transport_dual.hpp"

namespace freelip::io {

using json = nlohmann::json;

/// 12 significant digits, '.' decimal point, independent of the C locale.
inline std::string format_real(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("'" + path.string() + "': " + e.what());
  }
}

inline FiniteMetricSpace space_from_json(const json& j) {
  try {
    if (!j.is_object()) throw ParseError("space must be a JSON object");
    auto labels = j.at("labels").get<std::vector<std::string>>();
    auto dist = j.at("dist").get<std::vector<std::vector<double>>>();
    const std::string base = j.contains("base") ? j.at("base").get<std::string>() : (labels.empty() ? "" : labels[0]);
    auto it = std::find(labels.begin(), labels.end(), base);
    if (it == labels.end()) throw StructuralError("base label '" + base + "' is not among the labels");
    if (dist.size() != labels.size()) {
      throw StructuralError("distance matrix has " + std::to_string(dist.size()) + " rows but there are " +
                            std::to_string(labels.size()) + " labels");
    }
    for (const auto& row : dist)
      if (row.size() != labels.size()) throw StructuralError("distance matrix is not square");
    // Storage puts the base first; other points keep their order.
    const std::size_t b = static_cast<std::size_t>(it - labels.begin());
    std::vector<std::size_t> order{b};
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (i != b) order.push_back(i);
    std::vector<std::string> l2;
    std::vector<std::vector<double>> d2(labels.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
      l2.push_back(labels[order[r]]);
      for (std::size_t c = 0; c < order.size(); ++c) d2[r].push_back(dist[order[r]][order[c]]);
    }
    return FiniteMetricSpace(std::move(l2), std::move(d2));
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed space: ") + e.what());
  }
}

inline json to_json(const FiniteMetricSpace& space) {
  return json{{"labels", space.labels()}, {"base", space.label(kBase)}, {"dist", space.matrix()}};
}

/// Parses "random:n=6,seed=42,gen=usp" (gen: usp | euclid, optional dim=).
inline GeneratorSpec parse_generator_spec(std::string_view spec) {
  constexpr std::string_view prefix = "random:";
  if (spec.substr(0, prefix.size()) != prefix) throw ParseError("generator spec must start with 'random:'");
  GeneratorSpec g;
  bool have_n = false;
  std::string rest(spec.substr(prefix.size()));
  std::stringstream ss(rest);
  std::string item;
  auto to_u64 = [](const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size()) throw ParseError("bad integer for '" + key + "': " + v);
    return out;
  };
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ParseError("generator option '" + item + "' lacks '='");
    const std::string key = item.substr(0, eq), val = item.substr(eq + 1);
    if (key == "n") {
      g.n = to_u64(key, val);
      have_n = true;
    } else if (key == "seed") {
      g.seed = to_u64(key, val);
    } else if (key == "dim") {
      g.dim = to_u64(key, val);
    } else if (key == "gen") {
      if (val == "usp" || val == "uniform-shortest-path") g.kind = Generator::UniformShortestPath;
      else if (val == "euclid" || val == "euclidean") g.kind = Generator::Euclidean;
      else throw ParseError("unknown generator '" + val + "'");
    } else {
      throw ParseError("unknown generator option '" + key + "'");
    }
  }
  if (!have_n) throw ParseError("generator spec needs n=");
  return g;
}

/// A --space argument: inline generator spec or a JSON file.
inline FiniteMetricSpace load_space(const std::string& arg) {
  if (arg.rfind("random:", 0) == 0) return random_space(parse_generator_spec(arg));
  return space_from_json(read_json_file(arg));
}

/// Base-point keys are dropped; their labels are appended to `dropped`.
inline Molecule molecule_from_json(const FiniteMetricSpace& space, const json& j,
                                   std::vector<std::string>* dropped = nullptr) {
  try {
    const auto& c = j.at("coeffs");
    if (!c.is_object()) throw ParseError("'coeffs' must be an object");
    std::vector<std::pair<PointIndex, double>> entries;
    for (const auto& [label, value] : c.items()) {
      const PointIndex x = space.index_of(label);
      if (x == kBase && dropped) dropped->push_back(label);
      entries.emplace_back(x, value.get<double>());
    }
    return Molecule(space, entries);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed molecule: ") + e.what());
  }
}

inline json to_json(const FiniteMetricSpace& space, const Molecule& mu) {
  require_same_space(space, mu);
  json c = json::object();
  for (const auto& [x, a] : mu.coeffs()) c[space.label(x)] = a;
  return json{{"coeffs", c}};
}

inline json to_json(const FiniteMetricSpace& space, const Decomposition& d) {
  json terms = json::array();
  for (const auto& t : d.terms()) terms.push_back({{"x", space.label(t.x)}, {"y", space.label(t.y)}, {"a", t.a}});
  return json{{"terms", terms}};
}

inline Decomposition decomposition_from_json(const FiniteMetricSpace& space, const json& j) {
  try {
    Decomposition d(space);
    for (const auto& t : j.at("terms")) {
      d.add(space, Term{space.index_of(t.at("x").get<std::string>()), space.index_of(t.at("y").get<std::string>()),
                        t.at("a").get<double>()});
    }
    return d;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed certificate: ") + e.what());
  }
}

inline json to_json(const FiniteMetricSpace& space, const DualWitness& w) {
  json f = json::object();
  for (PointIndex i = 0; i < space.size(); ++i) f[space.label(i)] = w.f[i];
  return json{{"f", f}, {"value", w.value}};
}

inline json to_json(const FiniteMetricSpace& space, const NormResult& r, bool with_certificate) {
  json out{{"value", r.value}, {"method", std::string(to_string(r.method))}, {"optimal", r.optimal}};
  if (with_certificate) out["certificate"] = to_json(space, r.certificate);
  return out;
}

inline SpacePtr space_ref_from_json(const json& ref, const std::filesystem::path& base_dir) {
  if (ref.is_string()) {
    const std::string s = ref.get<std::string>();
    if (s.rfind("random:", 0) == 0) return std::make_shared<const FiniteMetricSpace>(load_space(s));
    std::filesystem::path p(s);
    if (p.is_relative()) p = base_dir / p;
    return std::make_shared<const FiniteMetricSpace>(space_from_json(read_json_file(p)));
  }
  return std::make_shared<const FiniteMetricSpace>(space_from_json(ref));
}

inline LipschitzMap map_from_json(const json& j, const std::filesystem::path& base_dir = ".") {
  try {
    auto dom = space_ref_from_json(j.at("domain"), base_dir);
    auto cod = j.at("codomain") == j.at("domain") ? dom : space_ref_from_json(j.at("codomain"), base_dir);
    std::vector<PointIndex> img(dom->size(), kBase);
    std::vector<bool> given(dom->size(), false);
    for (const auto& [from, to] : j.at("image").items()) {
      const PointIndex x = dom->index_of(from);
      img[x] = cod->index_of(to.get<std::string>());
      given[x] = true;
    }
    for (PointIndex x = 1; x < dom->size(); ++x)
      if (!given[x]) throw ContractError("map image misses point '" + dom->label(x) + "'");
    return LipschitzMap(dom, cod, std::move(img));
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed map: ") + e.what());
  }
}

inline LipschitzMap load_map(const std::filesystem::path& path) {
  return map_from_json(read_json_file(path), path.parent_path());
}

}  // namespace freelip::io

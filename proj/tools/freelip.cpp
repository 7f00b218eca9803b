// freelip: command-line front end for free p-space norms over finite spaces.
//
// Exit codes: 0 success, 1 domain or invariant failure (including solver
// range refusals), 2 usage, parse or input-data errors.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "freelip/freelip.hpp"

namespace {

using freelip::io::json;
namespace io = freelip::io;

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct RunConfig {
  std::string space;
  std::string molecule;
  std::string map;
  std::string subset;
  std::vector<double> p{1.0};
  std::string method = "auto";
  std::string mode = "metric";
  std::uint64_t seed = 0;
  std::size_t samples = 20;
  std::size_t threads = 1;
  std::string format = "json";
  bool certificate = false;
  std::vector<std::string> tol;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::size_t default_threads() {
  if (const char* env = std::getenv("FREELIP_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring invalid FREELIP_THREADS='" << env << "'\n";
  }
  return 1;
}

freelip::SolverOptions solver_options(const RunConfig& cfg) {
  freelip::SolverOptions opt;
  opt.threads = cfg.threads;
  opt.seed = cfg.seed;
  return opt;
}

double single_p(const RunConfig& cfg) {
  if (cfg.p.size() != 1) throw UsageError("this command takes exactly one --p value");
  return cfg.p.front();
}

void check_p_values(const RunConfig& cfg) {
  for (double p : cfg.p)
    if (!(p > 0.0 && p <= 1.0)) throw UsageError("--p values must lie in (0, 1]");
}

freelip::Molecule load_molecule(const freelip::FiniteMetricSpace& space, const std::string& path) {
  if (path.empty()) throw UsageError("--molecule is required");
  std::vector<std::string> dropped;
  auto mu = io::molecule_from_json(space, io::read_json_file(path), &dropped);
  for (const auto& l : dropped) std::cerr << "warning: dropped coefficient on base point '" << l << "'\n";
  return mu;
}

std::string label_list(const freelip::FiniteMetricSpace& space, const freelip::TriangleViolation& v) {
  return space.label(v.i) + "," + space.label(v.j) + "," + space.label(v.k);
}

int cmd_validate(const RunConfig& cfg) {
  const auto space = io::load_space(cfg.space);
  freelip::ValidationMode mode;
  if (cfg.mode == "metric") mode = freelip::ValidationMode::Metric;
  else if (cfg.mode == "p-metric") mode = freelip::ValidationMode::PMetric;
  else throw UsageError("--mode must be metric or p-metric");
  const double p = mode == freelip::ValidationMode::PMetric ? single_p(cfg) : 1.0;
  const auto rep = freelip::validate(space, mode, p);
  if (cfg.format == "csv") {
    std::cout << "i,j,k,slack\n";
    for (const auto& v : rep.violations) std::cout << label_list(space, v) << "," << io::format_real(v.slack) << "\n";
  } else {
    json viol = json::array();
    for (const auto& v : rep.violations) {
      viol.push_back({{"i", space.label(v.i)}, {"j", space.label(v.j)}, {"k", space.label(v.k)}, {"slack", v.slack}});
    }
    std::cout << json{{"ok", rep.ok}, {"mode", cfg.mode}, {"p", rep.p}, {"violations", viol}}.dump(2) << "\n";
  }
  return rep.ok ? kOk : kFailure;
}

int cmd_norm(const RunConfig& cfg) {
  const auto space = io::load_space(cfg.space);
  const auto mu = load_molecule(space, cfg.molecule);
  const auto opt = solver_options(cfg);
  json results = json::array();
  for (double p : cfg.p) {
    freelip::NormResult r;
    if (cfg.method == "flow") {
      if (p != 1.0) throw UsageError("--method flow computes the p = 1 norm only");
      r = freelip::envelope_norm(space, mu);
    } else if (cfg.method == "auto") {
      r = freelip::pnorm(space, mu, p, freelip::NormMethod::Auto, opt);
    } else if (cfg.method == "forest") {
      r = freelip::pnorm(space, mu, p, freelip::NormMethod::ForestExact, opt);
    } else if (cfg.method == "local") {
      r = freelip::pnorm(space, mu, p, freelip::NormMethod::LocalSearch, opt);
    } else {
      throw UsageError("--method must be auto, forest, local or flow");
    }
    json out = io::to_json(space, r, cfg.certificate);
    out["p"] = p;
    results.push_back(std::move(out));
  }
  std::cout << (results.size() == 1 ? results[0] : results).dump(2) << "\n";
  return kOk;
}

int cmd_envelope(const RunConfig& cfg) {
  const auto space = io::load_space(cfg.space);
  const auto mu = load_molecule(space, cfg.molecule);
  const auto r = freelip::envelope_norm(space, freelip::envelope_map(mu));
  std::cout << io::to_json(space, r, cfg.certificate).dump(2) << "\n";
  return kOk;
}

int cmd_witness(const RunConfig& cfg) {
  const auto space = io::load_space(cfg.space);
  const auto mu = load_molecule(space, cfg.molecule);
  const auto sol = freelip::solve_envelope(space, mu);
  json out = io::to_json(space, sol.witness);
  out["norm"] = sol.primal.value;
  out["duality_gap"] = std::abs(sol.primal.value - sol.witness.value);
  out["lipschitz"] = sol.witness.lipschitz_constant;
  std::cout << out.dump(2) << "\n";
  return kOk;
}

int cmd_suite(const RunConfig& cfg) {
  if (cfg.samples < 1) throw UsageError("--samples must be at least 1");
  const auto space = io::load_space(cfg.space);
  freelip::SuiteConfig sc;
  sc.p_grid = cfg.p;
  sc.samples = cfg.samples;
  sc.seed = cfg.seed;
  sc.solver = solver_options(cfg);
  for (const auto& kv : cfg.tol) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--tol expects NAME=VALUE, got '" + kv + "'");
    double v = 0.0;
    try {
      v = std::stod(kv.substr(eq + 1));
    } catch (const std::exception&) {
      throw UsageError("--tol value is not a number: '" + kv + "'");
    }
    if (!sc.tol.set(kv.substr(0, eq), v)) throw UsageError("unknown tolerance '" + kv.substr(0, eq) + "'");
  }
  const auto rows = freelip::run_property_suite(space, sc);
  if (cfg.format == "json") {
    json arr = json::array();
    for (const auto& r : rows) {
      arr.push_back({{"check", r.check}, {"p", r.p}, {"sample", r.sample}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"ok", r.ok}});
    }
    std::cout << arr.dump(2) << "\n";
  } else {
    std::cout << freelip::suite_csv(rows);
  }
  std::size_t failures = 0;
  for (const auto& r : rows) failures += r.ok ? 0 : 1;
  std::cerr << rows.size() << " checks, " << failures << " failures\n";
  return failures == 0 ? kOk : kFailure;
}

int cmd_distort(const RunConfig& cfg) {
  if (cfg.subset.empty()) throw UsageError("--subset is required");
  auto ambient = std::make_shared<const freelip::FiniteMetricSpace>(io::load_space(cfg.space));
  std::vector<freelip::PointIndex> subset;
  std::stringstream ss(cfg.subset);
  std::string label;
  while (std::getline(ss, label, ',')) subset.push_back(ambient->index_of(label));
  if (std::find(subset.begin(), subset.end(), freelip::kBase) == subset.end()) {
    throw UsageError("--subset must contain the base point '" + ambient->label(freelip::kBase) + "'");
  }
  const freelip::SubspaceView view(ambient, subset);
  const auto rep = freelip::subspace_distortion(view, single_p(cfg), cfg.samples, cfg.seed, solver_options(cfg));
  if (cfg.format == "json") {
    json arr = json::array();
    for (const auto& s : rep.samples) {
      arr.push_back({{"sample", s.id}, {"kind", s.kind}, {"ratio", s.ratio}, {"bound", rep.bound},
                     {"within_bound", s.within_bound}});
    }
    std::cout << json{{"samples", arr}, {"max_ratio", rep.max_ratio}, {"argmax", rep.argmax},
                      {"min_ratio", rep.min_ratio}, {"bound", rep.bound}, {"ambient_metric", rep.ambient_metric},
                      {"ok", rep.ok}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << "sample,kind,ratio,bound,within_bound\n";
    for (const auto& s : rep.samples) {
      std::cout << s.id << "," << s.kind << "," << io::format_real(s.ratio) << "," << io::format_real(rep.bound) << ","
                << (s.within_bound ? 1 : 0) << "\n";
    }
  }
  std::cerr << "max ratio " << io::format_real(rep.max_ratio) << " (sample " << rep.argmax << "), bound "
            << io::format_real(rep.bound) << (rep.ambient_metric ? "" : ", ambient is not a metric space") << "\n";
  return rep.ok ? kOk : kFailure;
}

int cmd_lipschitz(const RunConfig& cfg) {
  if (cfg.map.empty()) throw UsageError("--map is required");
  const auto h = io::load_map(cfg.map);
  const auto rep = freelip::operator_norm_check(h, single_p(cfg), cfg.samples, cfg.seed, solver_options(cfg));
  std::cout << json{{"lip", rep.lip}, {"max_ratio", rep.max_ratio}, {"extremal_ratio", rep.extremal_ratio},
                    {"samples", rep.ratios.size()}, {"ok", rep.ok}}
                   .dump(2)
            << "\n";
  return rep.ok ? kOk : kFailure;
}

int cmd_separate(const RunConfig& cfg) {
  if (cfg.samples < 1) throw UsageError("--samples must be at least 1");
  const auto space = io::load_space(cfg.space);
  const auto rep = freelip::separation_suite(space, single_p(cfg), cfg.samples, cfg.seed, solver_options(cfg));
  std::cout << json{{"samples", rep.samples.size()}, {"min_env_norm", rep.min_env_norm},
                    {"min_witness_value", rep.min_witness_value}, {"min_ratio", rep.min_ratio},
                    {"max_ratio", rep.max_ratio}, {"mean_ratio", rep.mean_ratio}, {"ok", rep.ok}}
                   .dump(2)
            << "\n";
  return rep.ok ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Norms in Lipschitz-free p-spaces over finite pointed metric spaces"};
  app.require_subcommand(1);
  RunConfig cfg;
  cfg.threads = default_threads();

  auto add_space = [&](CLI::App* sub) {
    sub->add_option("--space", cfg.space, "space JSON file or generator spec random:n=..,seed=..,gen=usp|euclid")
        ->required();
  };
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--p", cfg.p, "exponent(s) in (0,1]")->delimiter(',');
    sub->add_option("--seed", cfg.seed, "random seed");
    sub->add_option("--threads", cfg.threads, "worker threads (default FREELIP_THREADS or 1)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  };

  auto* validate = app.add_subcommand("validate", "check (p-)triangle inequalities");
  add_space(validate);
  add_common(validate);
  validate->add_option("--mode", cfg.mode, "metric or p-metric");

  auto* norm = app.add_subcommand("norm", "p-norm of a molecule");
  add_space(norm);
  add_common(norm);
  norm->add_option("--molecule", cfg.molecule, "molecule JSON file")->required();
  norm->add_option("--method", cfg.method, "auto, forest, local or flow");
  norm->add_flag("--certificate", cfg.certificate, "include the optimal decomposition");

  auto* envelope = app.add_subcommand("envelope", "transportation-cost norm of the envelope image");
  add_space(envelope);
  add_common(envelope);
  envelope->add_option("--molecule", cfg.molecule, "molecule JSON file")->required();
  envelope->add_flag("--certificate", cfg.certificate, "include the optimal decomposition");

  auto* witness = app.add_subcommand("witness", "1-Lipschitz dual witness at p = 1");
  add_space(witness);
  add_common(witness);
  witness->add_option("--molecule", cfg.molecule, "molecule JSON file")->required();

  auto* suite = app.add_subcommand("suite", "seeded property suite (CSV)");
  add_space(suite);
  add_common(suite);
  suite->add_option("--samples", cfg.samples, "random molecule pairs");
  suite->add_option("--tol", cfg.tol, "tolerance override NAME=VALUE (repeatable)");

  auto* distort = app.add_subcommand("distort", "subspace embedding distortion");
  add_space(distort);
  add_common(distort);
  distort->add_option("--subset", cfg.subset, "comma-separated labels, must include the base");
  distort->add_option("--samples", cfg.samples, "random molecules besides all elementary ones");

  auto* lipschitz = app.add_subcommand("lipschitz", "operator norm of a linearized map");
  add_common(lipschitz);
  lipschitz->add_option("--map", cfg.map, "map JSON file")->required();
  lipschitz->add_option("--samples", cfg.samples, "random molecules besides all elementary ones");

  auto* separate = app.add_subcommand("separate", "molecule-level point separation by dual witnesses");
  add_space(separate);
  add_common(separate);
  separate->add_option("--samples", cfg.samples, "random molecules besides the canonical basis");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  // Defaults that depend on the subcommand.
  if (suite->parsed() && suite->count("--p") == 0) cfg.p = {0.25, 0.5, 0.75, 1.0};
  if ((suite->parsed() && suite->count("--format") == 0) || (distort->parsed() && distort->count("--format") == 0)) {
    cfg.format = "csv";
  }

  try {
    check_p_values(cfg);
    if (validate->parsed()) return cmd_validate(cfg);
    if (norm->parsed()) return cmd_norm(cfg);
    if (envelope->parsed()) return cmd_envelope(cfg);
    if (witness->parsed()) return cmd_witness(cfg);
    if (suite->parsed()) return cmd_suite(cfg);
    if (distort->parsed()) return cmd_distort(cfg);
    if (lipschitz->parsed()) return cmd_lipschitz(cfg);
    if (separate->parsed()) return cmd_separate(cfg);
  } catch (const freelip::SolverRangeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const freelip::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

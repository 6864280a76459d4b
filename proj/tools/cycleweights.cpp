// Command-line front end: weights, normalizations, exact pmfs, sampling,
// saddle-point tables and limit-law verification.
#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "cycleweights/errors.hpp"
#include "cycleweights/exact.hpp"
#include "cycleweights/io.hpp"
#include "cycleweights/limits.hpp"
#include "cycleweights/montecarlo.hpp"
#include "cycleweights/saddle.hpp"
#include "cycleweights/verify.hpp"

namespace cw = cycleweights;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitVerify = 4;

struct Flags {
  std::string config_path;
  std::optional<std::string> family;
  std::optional<double> gamma;
  std::optional<double> theta;
  std::optional<std::size_t> n;
  std::optional<std::vector<std::size_t>> n_grid;
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> j_max;
  std::optional<std::string> format;
  std::optional<std::string> statistic;
  std::optional<std::size_t> j;
  std::string out_path;
};

struct RunConfig {
  cw::FamilyParams family;
  std::size_t max_n = 20000;
  std::size_t n = 0;
  std::vector<std::size_t> n_grid;
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
  std::size_t j_max = 5;
  std::string format = "csv";
  std::string statistic = "L1";
};

std::size_t max_n_from_env() {
  const char* env = std::getenv("CYCLEWEIGHTS_MAX_N");
  if (env == nullptr || *env == '\0') return 20000;
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(env, &pos);
    if (pos == std::string(env).size() && v >= 1) return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
  }
  throw cw::ConfigError(fmt::format("CYCLEWEIGHTS_MAX_N must be a positive integer (got '{}')", env));
}

template <class T>
T json_get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw cw::ConfigError(fmt::format("config key '{}': {}", key, e.what()));
  }
}

// Config file first, flags on top.
RunConfig resolve(const Flags& f) {
  RunConfig c;
  c.max_n = max_n_from_env();
  json family_json = {{"family", "uniform"}};
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw cw::ConfigError(fmt::format("cannot open config '{}'", f.config_path));
    json cfg;
    try {
      cfg = json::parse(in);
    } catch (const json::parse_error& e) {
      throw cw::ConfigError(fmt::format("config '{}': {}", f.config_path, e.what()));
    }
    if (!cfg.is_object()) throw cw::ConfigError("config must be a JSON object");
    for (const auto& [key, value] : cfg.items()) {
      if (key == "family") {
        family_json = value;
      } else if (key == "n") {
        c.n = json_get<std::size_t>(cfg, "n");
      } else if (key == "n_grid") {
        c.n_grid = json_get<std::vector<std::size_t>>(cfg, "n_grid");
      } else if (key == "samples") {
        c.samples = json_get<std::size_t>(cfg, "samples");
      } else if (key == "seed") {
        c.seed = json_get<std::uint64_t>(cfg, "seed");
      } else if (key == "j_max") {
        c.j_max = json_get<std::size_t>(cfg, "j_max");
      } else if (key == "format") {
        c.format = json_get<std::string>(cfg, "format");
      } else if (key == "statistic") {
        c.statistic = json_get<std::string>(cfg, "statistic");
      } else {
        throw cw::ConfigError(fmt::format("unknown config key '{}'", key));
      }
    }
  }
  if (f.family) {
    // A new family on the command line drops parameters that belonged to the old one.
    if (!family_json.is_object() || json_get<std::string>(family_json, "family") != *f.family) {
      family_json = {{"family", *f.family}};
    }
  }
  if (f.gamma) family_json["gamma"] = *f.gamma;
  if (f.theta) family_json["theta"] = *f.theta;
  c.family = cw::io::family_from_json(family_json);

  if (f.n) c.n = *f.n;
  if (f.n_grid) c.n_grid = *f.n_grid;
  if (f.samples) c.samples = *f.samples;
  if (f.seed) c.seed = *f.seed;
  if (f.j_max) c.j_max = *f.j_max;
  if (f.format) c.format = *f.format;
  if (f.statistic) c.statistic = *f.statistic;
  if (f.j) {
    if (c.statistic != "R" && c.statistic != "R_j" && c.statistic != "Rj") {
      throw cw::ConfigError("--j only applies to --statistic R");
    }
    c.statistic = fmt::format("R_{}", *f.j);
  }
  if (c.format != "csv" && c.format != "json") throw cw::ConfigError(fmt::format("unknown format '{}'", c.format));
  if (c.n > c.max_n) throw cw::ConfigError(fmt::format("n = {} exceeds the cap N = {}", c.n, c.max_n));
  for (std::size_t v : c.n_grid) {
    if (v < 1 || v > c.max_n) throw cw::ConfigError(fmt::format("n_grid entry {} outside 1..{}", v, c.max_n));
  }
  return c;
}

std::size_t require_n(const RunConfig& c) {
  if (c.n < 1) throw cw::ConfigError("--n is required (n >= 1)");
  return c.n;
}

const std::vector<std::size_t>& require_grid(const RunConfig& c) {
  if (c.n_grid.empty()) throw cw::ConfigError("--n-grid must list at least one n");
  return c.n_grid;
}

std::size_t grid_max(const std::vector<std::size_t>& grid) { return *std::max_element(grid.begin(), grid.end()); }

std::string cmd_weights(const RunConfig& c) {
  const std::size_t N = require_n(c);
  const cw::WeightTable w = cw::build_weights(c.family, N);
  if (c.format == "json") {
    json rows = json::array();
    for (std::size_t n = 1; n <= N; ++n) rows.push_back({{"n", n}, {"log_theta", cw::io::number_or_null(w.log_theta(n))}});
    return json{{"family", cw::io::to_json(c.family)}, {"rows", rows}}.dump(2) + "\n";
  }
  std::string out = "n,log_theta\n";
  for (std::size_t n = 1; n <= N; ++n) out += fmt::format("{},{}\n", n, cw::io::format_double(w.log_theta(n)));
  return out;
}

std::string cmd_normalize(const RunConfig& c) {
  const auto& grid = require_grid(c);
  const std::size_t N = grid_max(grid);
  const cw::NormTable norms = cw::compute_norms(cw::build_weights(c.family, N), N);
  if (c.format == "json") {
    json rows = json::array();
    for (std::size_t n : grid) rows.push_back({{"n", n}, {"log_h", cw::io::number_or_null(norms.log_h(n))}});
    return json{{"family", cw::io::to_json(c.family)}, {"rows", rows}}.dump(2) + "\n";
  }
  std::string out = "n,log_h\n";
  for (std::size_t n : grid) out += fmt::format("{},{}\n", n, cw::io::format_double(norms.log_h(n)));
  return out;
}

std::string cmd_dist(const RunConfig& c) {
  const std::size_t n = require_n(c);
  const cw::Statistic stat = cw::parse_statistic(c.statistic);
  const cw::NormTable norms = cw::compute_norms(cw::build_weights(c.family, n), n);
  cw::Pmf pmf;
  switch (stat.kind) {
    case cw::Statistic::Kind::L1: pmf = cw::dist_L1(norms, n); break;
    case cw::Statistic::Kind::K: pmf = cw::dist_K(norms, n); break;
    case cw::Statistic::Kind::Rj:
      if (stat.j > n) throw cw::ConfigError(fmt::format("j = {} exceeds n = {}", stat.j, n));
      pmf = cw::dist_Rj(norms, n, stat.j);
      break;
    case cw::Statistic::Kind::LargestCycles: throw cw::ConfigError("dist supports L1, K and R_j");
  }
  if (c.format == "json") {
    json j = cw::io::to_json(pmf);
    j["family"] = cw::io::to_json(c.family);
    j["n"] = n;
    j["statistic"] = stat.name();
    // The limit law the pmf should approach, when one is known.
    try {
      j["limit_law"] = cw::io::to_json(cw::predict(norms.weights(), stat));
    } catch (const cw::Unsupported&) {
      j["limit_law"] = nullptr;
    }
    return j.dump(2) + "\n";
  }
  return cw::io::pmf_csv(pmf);
}

std::string cmd_moments(const RunConfig& c) {
  const std::size_t n = require_n(c);
  const cw::NormTable norms = cw::compute_norms(cw::build_weights(c.family, n), n);
  struct Row {
    std::string name;
    double value;
  };
  std::vector<Row> rows;
  rows.push_back({"E[L1]", cw::dist_L1(norms, n).mean()});
  rows.push_back({"E[K]", cw::expected_K(norms, n)});
  for (std::size_t j = 1; j <= std::min(c.j_max, n); ++j) {
    const auto jj = static_cast<std::int64_t>(j);
    rows.push_back({fmt::format("E[R_{}]", j), cw::factorial_moment(norms, n, {{jj, 1}})});
    if (2 * j <= n) rows.push_back({fmt::format("E[R_{0}(R_{0}-1)]", j), cw::factorial_moment(norms, n, {{jj, 2}})});
  }
  if (c.format == "json") {
    json arr = json::array();
    for (const Row& r : rows) arr.push_back({{"moment", r.name}, {"value", r.value}});
    return json{{"family", cw::io::to_json(c.family)}, {"n", n}, {"moments", arr}}.dump(2) + "\n";
  }
  std::string out = "moment,value\n";
  for (const Row& r : rows) out += fmt::format("{},{}\n", r.name, cw::io::format_double(r.value));
  return out;
}

std::string cmd_sample(const RunConfig& c) {
  const std::size_t n = require_n(c);
  if (c.j_max > n) throw cw::ConfigError(fmt::format("j_max = {} exceeds n = {}", c.j_max, n));
  const cw::NormTable norms = cw::compute_norms(cw::build_weights(c.family, n), n);
  const std::vector<cw::SampleRecord> samples = cw::sample_batch(norms, n, c.samples, c.seed);
  if (c.format == "csv") return cw::io::samples_csv(samples);
  const cw::BatchStats st = cw::summarize(samples, n, c.seed, c.j_max);
  json j = cw::io::to_json(st);
  j["family"] = cw::io::to_json(c.family);
  return j.dump(2) + "\n";
}

std::string cmd_saddle(const RunConfig& c) {
  const auto& grid = require_grid(c);
  const std::size_t N = grid_max(grid);
  const cw::WeightTable weights = cw::build_weights(c.family, c.family.kind == cw::FamilyKind::Algebraic ? N : c.max_n);
  const cw::NormTable norms = cw::compute_norms(weights, N);
  const cw::GenFnSpec spec = c.family.kind == cw::FamilyKind::Algebraic ? cw::GenFnSpec::algebraic(c.family.gamma)
                                                                         : cw::GenFnSpec::series(weights);
  json rows = json::array();
  std::string out = "n,r_n,I_m1,I_0,I_1,log_h_asymptotic,log_h_exact,delta\n";
  for (std::size_t n : grid) {
    const cw::SaddleSolution sol = cw::solve_saddle(spec, n);
    const double approx = cw::asymptotic_hn(spec, sol);
    const double exact = norms.log_h(n);
    const double delta = approx - exact;
    out += fmt::format("{},{},{},{},{},{},{},{}\n", n, cw::io::format_double(sol.r), cw::io::format_double(sol.I_m1),
                       cw::io::format_double(sol.I_0), cw::io::format_double(sol.I_1), cw::io::format_double(approx),
                       cw::io::format_double(exact), cw::io::format_double(delta));
    rows.push_back({{"n", n},
                    {"r_n", sol.r},
                    {"I_m1", sol.I_m1},
                    {"I_0", sol.I_0},
                    {"I_1", sol.I_1},
                    {"log_h_asymptotic", approx},
                    {"log_h_exact", cw::io::number_or_null(exact)},
                    {"delta", cw::io::number_or_null(delta)}});
  }
  if (c.format == "json") return json{{"family", cw::io::to_json(c.family)}, {"rows", rows}}.dump(2) + "\n";
  return out;
}

std::string cmd_verify(const RunConfig& c, bool& failed) {
  cw::VerifyOptions o;
  o.n = c.n > 0 ? c.n : c.max_n;
  o.samples = c.samples;
  o.sample_n = std::min<std::size_t>(o.n, 10000);
  o.seed = c.seed;
  const std::vector<cw::VerifyRow> rows = cw::verify_family(c.family, o);
  failed = std::any_of(rows.begin(), rows.end(), [](const cw::VerifyRow& r) { return r.status == cw::RowStatus::Fail; });
  if (c.format == "json") {
    json arr = json::array();
    for (const auto& r : rows) {
      arr.push_back({{"claim", r.claim},
                     {"statistic", r.statistic},
                     {"distance", cw::io::number_or_null(r.distance)},
                     {"tolerance", cw::io::number_or_null(r.tolerance)},
                     {"status", std::string(cw::status_name(r.status))}});
    }
    return json{{"family", cw::io::to_json(c.family)}, {"rows", arr}}.dump(2) + "\n";
  }
  std::string out = "claim,statistic,distance,tolerance,status\n";
  for (const auto& r : rows) {
    out += fmt::format("\"{}\",{},{},{},{}\n", r.claim, r.statistic, cw::io::format_double(r.distance),
                       cw::io::format_double(r.tolerance), cw::status_name(r.status));
  }
  return out;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw cw::ConfigError(fmt::format("cannot write '{}'", path));
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted random permutations: exact laws, sampling and limit checks"};
  app.require_subcommand(1);
  Flags f;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config_path, "JSON run config; flags override it");
    sub->add_option("--family", f.family, "weight family");
    sub->add_option("--gamma", f.gamma, "family exponent");
    sub->add_option("--theta", f.theta, "Ewens parameter");
    sub->add_option("--n", f.n, "permutation size");
    sub->add_option("--n-grid", f.n_grid, "list of sizes")->delimiter(',');
    sub->add_option("--samples", f.samples, "number of samples");
    sub->add_option("--seed", f.seed, "random seed");
    sub->add_option("--j-max", f.j_max, "largest j for R_j summaries");
    sub->add_option("--format", f.format, "csv or json");
    sub->add_option("--out", f.out_path, "output file (default stdout)");
  };

  CLI::App* weights = app.add_subcommand("weights", "ln theta_1..ln theta_n");
  CLI::App* normalize = app.add_subcommand("normalize", "ln h_n on a grid");
  CLI::App* dist = app.add_subcommand("dist", "exact pmf of L1, K or R_j");
  CLI::App* moments = app.add_subcommand("moments", "means and factorial moments");
  CLI::App* sample = app.add_subcommand("sample", "exact samples of cycle types");
  CLI::App* saddle = app.add_subcommand("saddle", "saddle-point approximation of ln h_n");
  CLI::App* verify = app.add_subcommand("verify", "compare exact laws with limit laws");
  for (CLI::App* sub : {weights, normalize, dist, moments, sample, saddle, verify}) add_common(sub);
  dist->add_option("--statistic", f.statistic, "L1, K, R_j or R (with --j)");
  dist->add_option("--j", f.j, "cycle length for R_j");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    const RunConfig c = resolve(f);
    std::string text;
    bool failed = false;
    if (weights->parsed()) text = cmd_weights(c);
    if (normalize->parsed()) text = cmd_normalize(c);
    if (dist->parsed()) text = cmd_dist(c);
    if (moments->parsed()) text = cmd_moments(c);
    if (sample->parsed()) text = cmd_sample(c);
    if (saddle->parsed()) text = cmd_saddle(c);
    if (verify->parsed()) text = cmd_verify(c, failed);
    emit(text, f.out_path);
    return failed ? kExitVerify : 0;
  } catch (const cw::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const cw::Unsupported& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return kExitConfig;
  } catch (const cw::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}

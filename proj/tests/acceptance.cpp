// Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed below.
//
//   acceptance            runs every criterion
//   acceptance 3 7        runs only the listed criteria
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "cycleweights/exact.hpp"
#include "cycleweights/limits.hpp"
#include "cycleweights/montecarlo.hpp"
#include "cycleweights/saddle.hpp"
#include "oracle.hpp"
#include "presets.hpp"

namespace cw = cycleweights;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

std::string join(const std::vector<double>& v, const char* fmtstr = "{:.4g}") {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt::format(fmt::runtime(fmtstr), v[i]);
  return out;
}

// Norm tables shared between criteria, built on first use.
class Tables {
 public:
  const cw::NormTable& get(const cw::FamilyParams& p, std::size_t N) {
    const std::string key = fmt::format("{}/{}/{}/{}", cw::family_name(p.kind), p.theta, p.gamma, N);
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, cw::compute_norms(cw::build_weights(p, N), N)).first;
    return it->second;
  }

 private:
  std::map<std::string, cw::NormTable> cache_;
};

Tables tables;

bool rel_ok(double got, long double want, double tol) {
  return std::abs(got - static_cast<double>(want)) <= tol * std::abs(static_cast<double>(want));
}

Outcome brute_force_oracle() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::size_t checks = 0;
  auto track = [&](double got, long double want) {
    ++checks;
    if (want == 0.0L) {
      worst = std::max(worst, got == 0.0 ? 0.0 : 1.0);
      return;
    }
    worst = std::max(worst, std::abs(got - static_cast<double>(want)) / std::abs(static_cast<double>(want)));
  };
  auto track_pmf = [&](const cw::Pmf& pmf, const std::map<int, long double>& want) {
    for (const auto& [k, p] : want) track(pmf.probability_of(k), p);
    for (std::size_t i = 0; i < pmf.size(); ++i) {
      if (!want.count(static_cast<int>(pmf.support[i]))) track(pmf.probability(i), 0.0L);
    }
  };
  for (const auto& params : presets::all()) {
    const auto w = cw::build_weights(params, 8);
    const auto norms = cw::compute_norms(w, 8);
    const auto theta = oracle::linear_weights(w, 8);
    for (int n = 1; n <= 8; ++n) {
      const auto laws = oracle::laws(theta, n);
      track(std::exp(norms.log_h(n)), laws.h);
      track_pmf(cw::dist_L1(norms, n), laws.L1);
      track_pmf(cw::dist_K(norms, n), laws.K);
      track(cw::expected_K(norms, n), laws.EK);
      for (int j = 1; j <= n; ++j) track_pmf(cw::dist_Rj(norms, n, j), laws.Rj.at(j));
      // Every k with sum_j j k_j <= n.
      std::function<void(int, int, std::map<int, int>&)> rec = [&](int j, int budget, std::map<int, int>& k) {
        if (j > n) {
          std::map<std::int64_t, std::int64_t> arg(k.begin(), k.end());
          track(cw::factorial_moment(norms, n, arg), oracle::factorial_moment(theta, n, k));
          return;
        }
        for (int kj = 0; j * kj <= budget; ++kj) {
          if (kj > 0) k[j] = kj;
          rec(j + 1, budget - j * kj, k);
        }
        k.erase(j);
      };
      std::map<int, int> k;
      rec(1, n, k);
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-10 && secs < 10.0,
          fmt::format("{} presets, {} values, max rel err {:.2e} (tol 1e-10), {:.2f}s (limit 10s)",
                      presets::all().size(), checks, worst, secs)};
}

Outcome ewens_closed_form() {
  const auto t0 = Clock::now();
  const double theta = 2.0;
  const auto norms = cw::compute_norms(cw::build_weights(cw::FamilyParams::ewens(theta), 500), 500);
  double worst = 0.0;
  for (std::size_t n = 1; n <= 500; ++n) {
    const double nd = static_cast<double>(n);
    const double closed = std::lgamma(theta + nd) - std::lgamma(theta) - std::lgamma(nd + 1.0);
    worst = std::max(worst, std::abs(std::expm1(norms.log_h(n) - closed)));
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-8 && secs < 1.0,
          fmt::format("max rel err {:.2e} for n <= 500 (tol 1e-8), {:.3f}s (limit 1s)", worst, secs)};
}

Outcome poisson_fixed_points() {
  const auto params = cw::FamilyParams::asymptotic_ewens(2.0);
  const auto& norms = tables.get(params, 5000);
  const double mean = std::exp(norms.weights().log_theta(1));
  std::vector<double> tv;
  for (std::size_t n : {500u, 1000u, 2000u, 5000u}) {
    tv.push_back(cw::total_variation(cw::dist_Rj(norms, n, 1), cw::poisson_pmf(mean, n)));
  }
  return {strictly_decreasing(tv) && tv.back() <= 0.02,
          fmt::format("TV(R_1, Poisson({:g})) at n = 500, 1000, 2000, 5000: {} (decreasing, last <= 0.02)", mean,
                      join(tv))};
}

Outcome algebraic_gamma_limit() {
  const auto t0 = Clock::now();
  const auto params = cw::FamilyParams::algebraic(1.0);
  const auto& norms = tables.get(params, 20000);
  const auto law = cw::predict(norms.weights(), cw::Statistic::L1());
  std::vector<double> ks;
  for (std::size_t n : {1000u, 5000u, 20000u}) {
    ks.push_back(cw::ks_distance(cw::dist_L1(norms, n), std::sqrt(static_cast<double>(n)),
                                 [&](double s) { return cw::eval_cdf(law, s); }));
  }
  const double secs = seconds_since(t0);
  return {strictly_decreasing(ks) && ks.back() <= 0.05 && secs < 300.0,
          fmt::format("KS(L1/sqrt(n), Gamma(2, 1)) at n = 1e3, 5e3, 2e4: {} (decreasing, last <= 0.05), {:.1f}s",
                      join(ks), secs)};
}

Outcome algebraic_cycle_count() {
  const auto& norms = tables.get(cw::FamilyParams::algebraic(1.0), 20000);
  const double small = cw::expected_K(norms, 1000) / std::sqrt(1000.0);
  const double large = cw::expected_K(norms, 20000) / std::sqrt(20000.0);
  return {large >= 0.85 && large <= 1.15 && std::abs(large - 1.0) < std::abs(small - 1.0),
          fmt::format("E(K)/sqrt(n) = {:.4f} at n = 1e3, {:.4f} at n = 2e4 (band [0.85, 1.15], closer to 1)", small,
                      large)};
}

Outcome saddle_vs_exact() {
  const auto spec = cw::GenFnSpec::algebraic(1.0);
  const auto& norms = tables.get(cw::FamilyParams::algebraic(1.0), 20000);
  std::vector<double> delta;
  for (std::size_t n : {100u, 1000u, 10000u}) {
    delta.push_back(std::abs(cw::asymptotic_hn(spec, cw::solve_saddle(spec, n)) - norms.log_h(n)));
  }
  const bool nonincreasing = delta[1] <= delta[0] && delta[2] <= delta[1];
  return {nonincreasing && delta.back() <= 0.05,
          fmt::format("|ln h_n asymptotic - exact| at n = 1e2, 1e3, 1e4: {} (nonincreasing, last <= 0.05)",
                      join(delta))};
}

Outcome ratio_bounds() {
  const std::size_t n = 10000;
  const auto spec = cw::GenFnSpec::algebraic(1.0);
  const auto& norms = tables.get(cw::FamilyParams::algebraic(1.0), 20000);
  int violations = 0;
  double worst = -1e9;
  for (std::size_t j = 1; j <= 100; ++j) {
    const auto b = cw::ratio_bounds(spec, n, j);
    const double v = norms.log_h(n - j) - norms.log_h(n);
    const double excess = std::max(b.lower - v, v - b.upper);
    worst = std::max(worst, excess);
    if (excess > 0.02) ++violations;
  }
  return {violations == 0,
          fmt::format("n = 1e4, j <= 100: {} violations, largest excess beyond the bounds {:.3e} (slack 0.02)",
                      violations, worst)};
}

Outcome superexp_single_cycle() {
  const auto& norms = tables.get(cw::FamilyParams::superexp_growth(1.5), 400);
  std::vector<double> p;
  for (std::size_t n : {50u, 100u, 200u, 400u}) {
    p.push_back(cw::dist_L1(norms, n).probability_of(static_cast<std::int64_t>(n)));
  }
  bool increasing = true;
  for (std::size_t i = 1; i < p.size(); ++i) increasing &= p[i] > p[i - 1];
  return {increasing && p.back() >= 0.95,
          fmt::format("P(L1 = n) at n = 50, 100, 200, 400: {} (increasing, last >= 0.95)", join(p, "{:.6f}"))};
}

Outcome subexp_parameters() {
  const double g = 1.0 / 3.0;
  const auto params = cw::FamilyParams::subexp_growth(g);
  const auto w = cw::extract_subexp_coeffs(params, 20000);
  std::vector<double> gap;
  for (std::size_t n : {1250u, 2500u, 5000u, 10000u, 20000u}) {
    gap.push_back(std::abs(w.log_theta(n) - std::pow(static_cast<double>(n), g)));
  }
  const auto spec = cw::GenFnSpec::subexp_growth(g);
  const double saddle_gap = std::abs(cw::asymptotic_theta(spec, 9999) - w.log_theta(10000));
  return {gap.back() <= 0.1 && strictly_decreasing(gap) && saddle_gap <= 0.1,
          fmt::format("|ln theta_n - n^(1/3)| at n = 1250..20000 (x2): {} (decreasing, last <= 0.1); "
                      "saddle vs extraction at n = 1e4: {:.4f} (<= 0.1)",
                      join(gap), saddle_gap)};
}

Outcome subexp_decay() {
  const std::size_t n = 20000;
  const auto& norms = tables.get(cw::FamilyParams::subexp_decay_power(2.0), n);
  const auto tail = cw::predict(norms.weights(), cw::Statistic::L1());
  const auto l1 = cw::dist_L1(norms, n);
  double worst = 0.0;
  for (std::size_t m = 0; m <= 10; ++m) {
    const double limit = tail.tail_probabilities[m];
    worst = std::max(worst, std::abs(l1.probability_of(static_cast<std::int64_t>(n - m)) - limit) / limit);
  }
  const double tail_share = tail.param("tail_estimate") / tail.param("sum_h");
  const auto klaw = cw::predict(norms.weights(), cw::Statistic::K());
  const auto k = cw::dist_K(norms, n);
  const double tv = cw::total_variation(k, cw::poisson_pmf(klaw.param("mean"), k.size() + 60, 1));
  return {worst <= 0.02 && tv <= 0.02,
          fmt::format("max_m<=10 |P(L1 = n-m) - h_m/sum h| / P = {:.3e} (<= 0.02, sum h tail beyond J = {} is {:.1e} "
                      "and is estimated analytically); TV(K-1, Poisson({:.6f})) = {:.3e} (<= 0.02)",
                      worst, n, tail_share, klaw.param("mean"), tv)};
}

Outcome sampler_fidelity() {
  const std::size_t n = 1000;
  const auto& norms = tables.get(cw::FamilyParams::ewens(2.0), 10000);
  const auto st = cw::run_batch(norms, n, 100000, 20240601, 1);
  const auto exact = cw::dist_L1(norms, n);
  const double tv = cw::total_variation(cw::histogram_pmf(st.hist_L1, "L1"), exact);
  // Expected TV between an exact sampler's histogram and the true pmf.
  double floor = 0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    const double p = exact.probability(i);
    floor += 0.5 * std::sqrt(2 * p * (1 - p) / (std::numbers::pi * static_cast<double>(st.num_samples)));
  }
  const double ek = cw::expected_K(norms, n);
  const double z = std::abs(st.K.mean - ek) / st.K.standard_error;
  return {tv <= 0.02 && z <= 3.0,
          fmt::format("TV(empirical L1, exact) = {:.4f} (<= 0.02; sampling noise alone gives {:.4f} at 1e5 samples); "
                      "mean K {:.4f} vs exact {:.4f}, {:.2f} SE (<= 3)",
                      tv, floor, st.K.mean, ek, z)};
}

Outcome gem_limit() {
  const std::size_t n = 10000;
  const auto& norms = tables.get(cw::FamilyParams::ewens(2.0), n);
  const auto samples = cw::sample_batch(norms, n, 10000, 20240602);
  std::vector<double> first, second;
  for (const auto& s : samples) {
    const double l1 = static_cast<double>(s.ordered_lengths[0]);
    first.push_back(l1 / static_cast<double>(n));
    second.push_back(s.ordered_lengths.size() > 1 ? static_cast<double>(s.ordered_lengths[1]) / (n - l1) : 1.0);
  }
  const auto beta = cw::predict(norms.weights(), cw::Statistic::L1());
  auto cdf = [&](double s) { return cw::eval_cdf(beta, s); };
  const double ks1 = cw::ks_distance_samples(first, cdf);
  const double ks2 = cw::ks_distance_samples(second, cdf);
  return {ks1 <= 0.03 && ks2 <= 0.03,
          fmt::format("KS(L~1/n, Beta(1,2)) = {:.4f}, KS(L~2/(n-L~1), Beta(1,2)) = {:.4f} (both <= 0.03)", ks1, ks2)};
}

Outcome superexp_decay_means() {
  const double g = 2.0;
  const auto& norms = tables.get(cw::FamilyParams::superexp_decay(g), 20000);
  std::vector<double> ratio;
  std::vector<double> gap;
  for (std::size_t n : {20u, 200u, 2000u, 20000u}) {
    const double exact = cw::log_factorial_moment(norms, n, {{1, 1}});
    ratio.push_back(exact / cw::superexp_decay_ERj_prediction(g, static_cast<double>(n), 1));
    gap.push_back(std::abs(std::log(ratio.back())));
  }
  return {gap.back() <= std::log(2.0) && strictly_decreasing(gap),
          fmt::format("ln E(R_1) / (2 sqrt(log n)) at n = 20, 200, 2000, 20000: {} (last within x2, trending to 1)",
                      join(ratio))};
}

Outcome subexp_concentration() {
  const double g = 1.0 / 3.0;
  const std::size_t n = 20000;
  const auto& norms = tables.get(cw::FamilyParams::subexp_growth(g), n);
  const auto law = cw::predict(norms.weights(), cw::Statistic::L1());
  std::vector<double> ratios;
  double last_mode = 0, last_pred = 0;
  for (std::size_t m : {5000u, 10000u, 20000u}) {
    const auto l1 = cw::dist_L1(norms, m);
    const auto best = std::max_element(l1.log_prob.begin(), l1.log_prob.end()) - l1.log_prob.begin();
    last_mode = static_cast<double>(l1.support[static_cast<std::size_t>(best)]);
    last_pred = law.param("point") * std::pow(std::log(static_cast<double>(m)), law.param("log_power"));
    ratios.push_back(last_mode / last_pred);
  }
  return {ratios.back() >= 0.5 && ratios.back() <= 2.0,
          fmt::format("mode of L1 at n = 2e4 is {:.0f}, B (log n)^3 = {:.1f}, ratio {:.4f} (needs [0.5, 2]); "
                      "ratios at n = 5e3, 1e4, 2e4: {}",
                      last_mode, last_pred, ratios.back(), join(ratios))};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, brute_force_oracle},    {2, ewens_closed_form},     {3, poisson_fixed_points}, {4, algebraic_gamma_limit},
      {5, algebraic_cycle_count}, {6, saddle_vs_exact},       {7, ratio_bounds},         {8, superexp_single_cycle},
      {9, subexp_parameters},     {10, subexp_decay},         {11, sampler_fidelity},    {12, gem_limit},
      {13, superexp_decay_means}, {14, subexp_concentration}};
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::stoi(argv[i]));
  if (wanted.empty()) {
    for (const auto& c : criteria) wanted.insert(c.first);
  }
  int failures = 0;
  for (const auto& [id, run] : criteria) {
    if (!wanted.count(id)) continue;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, fmt::format("threw: {}", e.what())};
    }
    std::printf("criterion %2d: %s  %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}

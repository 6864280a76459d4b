#include "cycleweights/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "cycleweights/errors.hpp"
#include "cycleweights/exact.hpp"
#include "cycleweights/limits.hpp"
#include "cycleweights/montecarlo.hpp"
#include "cycleweights/saddle.hpp"

namespace cycleweights {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

VerifyRow row(std::string claim, std::string statistic, double distance, double tolerance) {
  const RowStatus status = distance <= tolerance ? RowStatus::Pass : RowStatus::Fail;
  return {std::move(claim), std::move(statistic), distance, tolerance, status};
}

VerifyRow unsupported_row(std::string claim, std::string statistic) {
  return {std::move(claim), std::move(statistic), kNaN, kNaN, RowStatus::Unsupported};
}

VerifyRow poisson_r1_row(const NormTable& norms, std::size_t n) {
  const LimitLaw law = predict(norms.weights(), Statistic::Rj(1));
  const Pmf exact = dist_Rj(norms, n, 1);
  const Pmf limit = poisson_pmf(law.param("mean"), n);
  return row(fmt::format("R_1 => Poisson({:.6g}) at n = {}", law.param("mean"), n), "R_1",
             total_variation(exact, limit), 0.02);
}

VerifyRow mode_ratio_row(const NormTable& norms, std::size_t n, double predicted, std::string claim) {
  const Pmf l1 = dist_L1(norms, n);
  const auto best = std::max_element(l1.log_prob.begin(), l1.log_prob.end());
  const double mode = static_cast<double>(l1.support[static_cast<std::size_t>(best - l1.log_prob.begin())]);
  return row(std::move(claim), "L1", std::abs(std::log(mode / predicted)), std::log(2.0));
}

void ewens_rows(const FamilyParams& p, const NormTable& norms, const VerifyOptions& o, std::vector<VerifyRow>& out) {
  const std::size_t n = o.n;
  const LimitLaw beta = predict(norms.weights(), Statistic::L1());
  const double theta = beta.param("theta");
  const Pmf l1 = dist_L1(norms, n);
  out.push_back(row(fmt::format("L1/n => Beta(1, {:g}) at n = {}", theta, n), "L1",
                    ks_distance(l1, static_cast<double>(n), [&](double s) { return eval_cdf(beta, s); }), 0.02));

  const LimitLaw mean_k = predict(norms.weights(), Statistic::K());
  const double ratio = expected_K(norms, n) / eval_mean_prediction(mean_k, static_cast<double>(n));
  out.push_back(row(fmt::format("E_n(K) / ({:g} log n) -> 1 at n = {}", theta, n), "K", std::abs(ratio - 1.0), 0.15));
  out.push_back(poisson_r1_row(norms, n));

  const std::size_t sn = std::min(o.sample_n, norms.size());
  const std::vector<SampleRecord> samples = sample_batch(norms, sn, o.samples, o.seed);
  std::vector<double> first, second;
  for (const SampleRecord& s : samples) {
    const double l1v = static_cast<double>(s.ordered_lengths[0]);
    first.push_back(l1v / static_cast<double>(sn));
    if (s.ordered_lengths.size() > 1) {
      second.push_back(static_cast<double>(s.ordered_lengths[1]) / (static_cast<double>(sn) - l1v));
    } else {
      second.push_back(1.0);
    }
  }
  auto cdf = [&](double s) { return eval_cdf(beta, std::clamp(s, 0.0, 1.0)); };
  out.push_back(row(fmt::format("sampled L~1/n => Beta(1, {:g}) at n = {}, {} samples", theta, sn, o.samples),
                    "LargestCycles", ks_distance_samples(first, cdf), 0.03));
  out.push_back(row(fmt::format("sampled L~2/(n - L~1) => Beta(1, {:g}) at n = {}, {} samples", theta, sn, o.samples),
                    "LargestCycles", ks_distance_samples(second, cdf), 0.03));
  (void)p;
}

void algebraic_rows(const FamilyParams& p, const NormTable& norms, const VerifyOptions& o,
                    std::vector<VerifyRow>& out) {
  const std::size_t n = o.n;
  const LimitLaw gamma_law = predict(norms.weights(), Statistic::L1());
  const double scale = std::pow(static_cast<double>(n), gamma_law.param("scale_exponent"));
  out.push_back(row(fmt::format("L1/n^(1/({:g}+1)) => Gamma at n = {}", p.gamma, n), "L1",
                    ks_distance(dist_L1(norms, n), scale, [&](double s) { return eval_cdf(gamma_law, s); }), 0.05));

  const LimitLaw mean_k = predict(norms.weights(), Statistic::K());
  const double ratio = expected_K(norms, n) / eval_mean_prediction(mean_k, static_cast<double>(n));
  out.push_back(row(fmt::format("E_n(K) / (c n^({:g}/({:g}+1))) -> 1 at n = {}", p.gamma, p.gamma, n), "K",
                    std::abs(ratio - 1.0), 0.15));
  out.push_back(poisson_r1_row(norms, n));

  const GenFnSpec spec = GenFnSpec::algebraic(p.gamma);
  const std::size_t sn = std::min<std::size_t>(n, 10000);
  const SaddleSolution sol = solve_saddle(spec, sn);
  out.push_back(row(fmt::format("saddle-point ln h_n at n = {}", sn), "h_n",
                    std::abs(asymptotic_hn(spec, sol) - norms.log_h(sn)), 0.05));

  double worst = 0.0;
  for (std::size_t j = 1; j <= std::min<std::size_t>(100, sn - 1); ++j) {
    const RatioBounds b = ratio_bounds(spec, sn, j);
    const double v = norms.log_h(sn - j) - norms.log_h(sn);
    worst = std::max({worst, b.lower - v, v - b.upper});
  }
  out.push_back(row(fmt::format("ln(h_(n-j)/h_n) within saddle bounds, j <= 100, n = {}", sn), "h_n",
                    std::max(0.0, worst), 0.02));
}

void subexp_growth_rows(const FamilyParams& p, const NormTable& norms, const VerifyOptions& o,
                        std::vector<VerifyRow>& out) {
  const std::size_t n = o.n;
  const LimitLaw law = predict(norms.weights(), Statistic::L1());
  const double predicted = law.param("point") * std::pow(std::log(static_cast<double>(n)), law.param("log_power"));
  out.push_back(mode_ratio_row(norms, n, predicted,
                               fmt::format("mode of L1 within factor 2 of B (log n)^(1/{:g}) at n = {}", p.gamma, n)));
  out.push_back(unsupported_row("limit law of K", "K"));
  out.push_back(poisson_r1_row(norms, n));

  const GenFnSpec spec = GenFnSpec::subexp_growth(p.gamma);
  const std::size_t tn = std::min<std::size_t>(n, 10000);
  out.push_back(row(fmt::format("saddle-point ln theta_n at n = {}", tn), "theta_n",
                    std::abs(asymptotic_theta(spec, tn - 1) - norms.weights().log_theta(tn)), 0.1));
  out.push_back(row(fmt::format("|ln theta_n - n^{:g}| at n = {}", p.gamma, n), "theta_n",
                    std::abs(norms.weights().log_theta(n) - std::pow(static_cast<double>(n), p.gamma)), 0.1));
}

void superexp_growth_rows(const NormTable& norms, const VerifyOptions& o, std::vector<VerifyRow>& out) {
  const std::size_t n = o.n;
  const Pmf l1 = dist_L1(norms, n);
  out.push_back(row(fmt::format("P_n(L1 = n) -> 1 at n = {}", n), "L1", 1.0 - l1.probability_of(static_cast<std::int64_t>(n)),
                    0.05));
  const Pmf k = dist_K(norms, n);
  out.push_back(row(fmt::format("P_n(K = 1) -> 1 at n = {}", n), "K", 1.0 - k.probability_of(1), 0.05));
}

void decay_rows(const NormTable& norms, const VerifyOptions& o, std::vector<VerifyRow>& out) {
  const std::size_t n = o.n;
  const LimitLaw tail = predict(norms.weights(), Statistic::L1());
  const Pmf l1 = dist_L1(norms, n);
  double worst = 0.0;
  for (std::size_t m = 0; m <= std::min<std::size_t>(10, n - 1); ++m) {
    const double exact = l1.probability_of(static_cast<std::int64_t>(n - m));
    const double limit = tail.tail_probabilities[m];
    worst = std::max(worst, std::abs(exact - limit) / limit);
  }
  out.push_back(row(fmt::format("P_n(L1 = n - m) -> h_m / sum h, m <= 10, n = {}", n), "L1", worst, 0.02));

  const LimitLaw kl = predict(norms.weights(), Statistic::K());
  const Pmf k = dist_K(norms, n);
  const Pmf limit = poisson_pmf(kl.param("mean"), std::max<std::size_t>(k.size() + 40, 60), 1);
  out.push_back(row(fmt::format("K - 1 => Poisson({:.6g}) at n = {}", kl.param("mean"), n), "K",
                    total_variation(k, limit), 0.02));
  out.push_back(poisson_r1_row(norms, n));
}

void superexp_decay_rows(const FamilyParams& p, const NormTable& norms, const VerifyOptions& o,
                         std::vector<VerifyRow>& out) {
  const std::size_t n = o.n;
  const LimitLaw law = predict(norms.weights(), Statistic::L1());
  const double scale = std::pow(std::log(static_cast<double>(n)) / law.param("log_divisor"), law.param("log_power"));
  out.push_back(mode_ratio_row(norms, n, scale,
                               fmt::format("mode of L1 within factor 2 of (log n/({:g}-1))^(1/{:g}) at n = {}",
                                           p.gamma, p.gamma, n)));
  out.push_back(unsupported_row("limit law of K", "K"));
  const LimitLaw rj = predict(norms.weights(), Statistic::Rj(1));
  const double exact = log_factorial_moment(norms, n, {{1, 1}});
  out.push_back(row(fmt::format("ln E_n(R_1) within factor 2 of prediction at n = {}", n), "R_1",
                    std::abs(std::log(exact / eval_mean_prediction(rj, static_cast<double>(n)))), std::log(2.0)));
}

}  // namespace

std::string_view status_name(RowStatus s) {
  switch (s) {
    case RowStatus::Pass: return "pass";
    case RowStatus::Fail: return "fail";
    case RowStatus::Unsupported: return "unsupported";
  }
  return "unknown";
}

std::vector<VerifyRow> verify_family(const FamilyParams& params, const VerifyOptions& options) {
  params.validate();
  std::vector<VerifyRow> out;
  if (params.kind == FamilyKind::Custom) {
    for (const char* stat : {"L1", "K", "R_1"}) out.push_back(unsupported_row("limit law for a custom table", stat));
    return out;
  }
  if (options.n < 2) throw ConfigError("verify needs n >= 2");
  const NormTable norms = compute_norms(build_weights(params, options.n), options.n);
  switch (params.kind) {
    case FamilyKind::Uniform:
    case FamilyKind::Ewens:
    case FamilyKind::AsymptoticEwens: ewens_rows(params, norms, options, out); break;
    case FamilyKind::Algebraic: algebraic_rows(params, norms, options, out); break;
    case FamilyKind::SubExpGrowth: subexp_growth_rows(params, norms, options, out); break;
    case FamilyKind::SuperExpGrowth: superexp_growth_rows(norms, options, out); break;
    case FamilyKind::SubExpDecayPower:
    case FamilyKind::SubExpDecayStretched: decay_rows(norms, options, out); break;
    case FamilyKind::SuperExpDecay: superexp_decay_rows(params, norms, options, out); break;
    case FamilyKind::Custom: break;
  }
  return out;
}

}  // namespace cycleweights

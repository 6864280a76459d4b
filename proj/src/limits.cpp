#include "cycleweights/limits.hpp"

#include <cmath>

#include <fmt/format.h>

#include "cycleweights/errors.hpp"
#include "cycleweights/simd/kernels.hpp"
#include "cycleweights/special.hpp"

namespace cycleweights {

namespace {

std::string gamma_str(double g) { return fmt::format("{:g}", g); }

double theta_over_j(const WeightTable& w, std::size_t j) {
  if (j < 1 || j > w.size()) {
    throw ConfigError(fmt::format("R_j limit needs 1 <= j <= {} (got {})", w.size(), j));
  }
  return std::exp(w.log_theta(j)) / static_cast<double>(j);
}

LimitLaw poisson_rj(const WeightTable& w, std::size_t j) {
  return {LawKind::PoissonLaw, {{"mean", theta_over_j(w, j)}}, fmt::format("R_{}", j), {}};
}

// sum_{m > N} theta_m / m for the decaying families, continuing the closed form.
double decay_tail_sum(const FamilyParams& p, std::size_t N) {
  const double Nd = static_cast<double>(N);
  if (p.kind == FamilyKind::SubExpDecayPower) {
    // Euler-Maclaurin for sum_{m > N} m^{-s}, s = gamma + 1.
    const double s = p.gamma + 1.0;
    return std::pow(Nd, 1.0 - s) / (s - 1.0) - 0.5 * std::pow(Nd, -s) + s * std::pow(Nd, -s - 1.0) / 12.0;
  }
  CompensatedSum sum;
  for (std::size_t m = N + 1; m < N + 100000000; ++m) {
    const double md = static_cast<double>(m);
    const double t = std::exp(-std::pow(md, p.gamma)) / md;
    sum.add(t);
    if (t <= 1e-30 * sum.value() || t == 0.0) break;
  }
  return sum.value();
}

LimitLaw tail_law(const WeightTable& w) {
  const std::size_t N = w.size();
  const NormTable norms = compute_norms(w, N);
  const double log_partial = simd::logsumexp(norms.log_hs());
  const double partial = std::exp(log_partial);
  // h_m ~ C theta_m / m, so sum_{m > N} h_m ~ C * T and C = partial / (1 - T).
  const double T = decay_tail_sum(w.params(), N);
  const double total = partial / (1.0 - T);
  LimitLaw law{LawKind::TailLaw,
               {{"sum_h", total}, {"truncation", static_cast<double>(N)}, {"tail_estimate", total - partial}},
               "n - L1",
               {}};
  law.tail_probabilities.resize(N + 1);
  const double log_total = std::log(total);
  for (std::size_t m = 0; m <= N; ++m) law.tail_probabilities[m] = std::exp(norms.log_h(m) - log_total);
  return law;
}

[[noreturn]] void unsupported(const FamilyParams& p, Statistic stat) {
  throw Unsupported(fmt::format("no limit law for statistic {} in family {}", stat.name(), family_name(p.kind)));
}

}  // namespace

std::string_view law_name(LawKind kind) {
  switch (kind) {
    case LawKind::PointMassAtN: return "point_mass_at_n";
    case LawKind::LogPowerConcentration: return "log_power_concentration";
    case LawKind::GammaLaw: return "gamma";
    case LawKind::BetaLaw: return "beta";
    case LawKind::PoissonLaw: return "poisson";
    case LawKind::PoissonShifted: return "poisson_shifted";
    case LawKind::GEMLaw: return "gem";
    case LawKind::TailLaw: return "tail";
    case LawKind::MeanAsymptotic: return "mean_asymptotic";
  }
  return "unknown";
}

std::string Statistic::name() const {
  switch (kind) {
    case Kind::L1: return "L1";
    case Kind::K: return "K";
    case Kind::Rj: return fmt::format("R_{}", j);
    case Kind::LargestCycles: return "LargestCycles";
  }
  return "unknown";
}

Statistic parse_statistic(std::string_view s) {
  if (s == "L1") return Statistic::L1();
  if (s == "K") return Statistic::K();
  if (s == "LargestCycles") return Statistic::largest_cycles();
  if (s.starts_with("R_") || s.starts_with("Rj")) {
    const std::string digits(s.substr(2));
    if (digits.empty()) return Statistic::Rj(1);
    try {
      std::size_t pos = 0;
      const long v = std::stol(digits, &pos);
      if (pos == digits.size() && v >= 1) return Statistic::Rj(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
    }
  }
  throw ConfigError(fmt::format("unknown statistic '{}'", s));
}

double LimitLaw::param(const std::string& key) const {
  const auto it = params.find(key);
  if (it == params.end()) throw ConfigError(fmt::format("limit law {} has no parameter '{}'", law_name(kind), key));
  return it->second;
}

LimitLaw predict(const WeightTable& weights, Statistic stat) {
  const FamilyParams& p = weights.params();
  const double g = p.gamma;
  using K = Statistic::Kind;
  switch (p.kind) {
    case FamilyKind::SuperExpGrowth:
      switch (stat.kind) {
        case K::L1: return {LawKind::PointMassAtN, {}, "L1/n", {}};
        case K::K: return {LawKind::PoissonShifted, {{"mean", 0.0}, {"shift", 1.0}}, "K", {}};
        case K::Rj: return {LawKind::PoissonLaw, {{"mean", 0.0}}, fmt::format("R_{}", stat.j), {}};
        case K::LargestCycles: return {LawKind::PointMassAtN, {}, "L(1)/n", {}};
      }
      break;
    case FamilyKind::SubExpGrowth:
      switch (stat.kind) {
        case K::L1:
          return {LawKind::LogPowerConcentration,
                  {{"point", std::pow(1.0 - g, -1.0 / g)}, {"log_power", 1.0 / g}, {"log_divisor", 1.0}},
                  fmt::format("L1/(log n)^(1/{})", gamma_str(g)),
                  {}};
        case K::Rj: return poisson_rj(weights, stat.j);
        default: unsupported(p, stat);
      }
      break;
    case FamilyKind::Algebraic:
      switch (stat.kind) {
        case K::L1:
          return {LawKind::GammaLaw,
                  {{"shape", g + 1.0}, {"rate", std::pow(std::tgamma(g + 1.0), 1.0 / (g + 1.0))},
                   {"scale_exponent", 1.0 / (g + 1.0)}},
                  fmt::format("L1/n^(1/({}+1))", gamma_str(g)),
                  {}};
        case K::K:
          return {LawKind::MeanAsymptotic,
                  {{"coefficient", std::pow(std::tgamma(g) / std::pow(g, g), 1.0 / (g + 1.0))},
                   {"exponent", g / (g + 1.0)},
                   {"log_power", 0.0}},
                  "E_n(K)",
                  {}};
        case K::Rj: return poisson_rj(weights, stat.j);
        default: unsupported(p, stat);
      }
      break;
    case FamilyKind::Uniform:
    case FamilyKind::Ewens:
    case FamilyKind::AsymptoticEwens: {
      const double theta = p.kind == FamilyKind::Uniform ? 1.0 : p.theta;
      switch (stat.kind) {
        case K::L1: return {LawKind::BetaLaw, {{"alpha", 1.0}, {"theta", theta}}, "L1/n", {}};
        case K::K:
          return {LawKind::MeanAsymptotic, {{"coefficient", theta}, {"exponent", 0.0}, {"log_power", 1.0}}, "E_n(K)",
                  {}};
        case K::Rj: return poisson_rj(weights, stat.j);
        case K::LargestCycles: return {LawKind::GEMLaw, {{"theta", theta}}, "(L(1), L(2), ...)/n sorted", {}};
      }
      break;
    }
    case FamilyKind::SubExpDecayPower:
    case FamilyKind::SubExpDecayStretched:
      switch (stat.kind) {
        case K::L1: return tail_law(weights);
        case K::K: {
          CompensatedSum lambda;
          for (std::size_t j = 1; j <= weights.size(); ++j) lambda.add(theta_over_j(weights, j));
          return {LawKind::PoissonShifted,
                  {{"mean", lambda.value()},
                   {"shift", 1.0},
                   {"mean_tail_estimate", decay_tail_sum(p, weights.size())}},
                  "K",
                  {}};
        }
        case K::Rj: return poisson_rj(weights, stat.j);
        case K::LargestCycles: return {LawKind::PointMassAtN, {}, "L(1)/n", {}};
      }
      break;
    case FamilyKind::SuperExpDecay:
      switch (stat.kind) {
        case K::L1:
          return {LawKind::LogPowerConcentration,
                  {{"point", 1.0}, {"log_power", 1.0 / g}, {"log_divisor", g - 1.0}},
                  fmt::format("L1/(log n/({}-1))^(1/{})", gamma_str(g), gamma_str(g)),
                  {}};
        case K::Rj:
          return {LawKind::MeanAsymptotic,
                  {{"log_mean", 1.0}, {"gamma", g}, {"j", static_cast<double>(stat.j)}},
                  fmt::format("log E_n(R_{})", stat.j),
                  {}};
        default: unsupported(p, stat);
      }
      break;
    case FamilyKind::Custom: unsupported(p, stat);
  }
  unsupported(p, stat);
}

LimitLaw predict(const FamilyParams& params, Statistic stat, std::size_t N) {
  params.validate();
  if (params.kind == FamilyKind::Custom) unsupported(params, stat);
  const bool needs_table = stat.kind == Statistic::Kind::Rj ||
                           ((params.kind == FamilyKind::SubExpDecayPower ||
                             params.kind == FamilyKind::SubExpDecayStretched) &&
                            (stat.kind == Statistic::Kind::L1 || stat.kind == Statistic::Kind::K));
  const std::size_t size = needs_table ? std::max<std::size_t>(N, stat.kind == Statistic::Kind::Rj ? stat.j : 1)
                                       : (params.kind == FamilyKind::SubExpGrowth ? 2 : 1);
  return predict(build_weights(params, size), stat);
}

double eval_cdf(const LimitLaw& law, double s) {
  if (std::isnan(s)) throw ConfigError("eval_cdf: s is NaN");
  auto outside = [&](double lo, double hi) {
    if (s < lo || s > hi) {
      throw ConfigError(fmt::format("eval_cdf: s = {} outside the support [{}, {}] of {}", s, lo, hi,
                                    law_name(law.kind)));
    }
  };
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (law.kind) {
    case LawKind::PointMassAtN:
      outside(0.0, 1.0);
      return s >= 1.0 ? 1.0 : 0.0;
    case LawKind::LogPowerConcentration:
      outside(0.0, inf);
      return s >= law.param("point") ? 1.0 : 0.0;
    case LawKind::GammaLaw:
      outside(0.0, inf);
      return regularized_gamma_p(law.param("shape"), law.param("rate") * s);
    case LawKind::BetaLaw:
    case LawKind::GEMLaw:
      outside(0.0, 1.0);
      return -std::expm1(law.param("theta") * std::log1p(-s));
    case LawKind::PoissonLaw:
    case LawKind::PoissonShifted: {
      const double shift = law.kind == LawKind::PoissonShifted ? law.param("shift") : 0.0;
      outside(shift, inf);
      const double mean = law.param("mean");
      if (std::isinf(s) || mean == 0.0) return 1.0;
      const double k = std::floor(s - shift);
      return 1.0 - regularized_gamma_p(k + 1.0, mean);
    }
    case LawKind::TailLaw: {
      outside(0.0, inf);
      if (std::isinf(s)) return 1.0;
      const std::size_t last = std::min(static_cast<std::size_t>(std::floor(s)), law.tail_probabilities.size() - 1);
      CompensatedSum sum;
      for (std::size_t m = 0; m <= last; ++m) sum.add(law.tail_probabilities[m]);
      return std::min(1.0, sum.value());
    }
    case LawKind::MeanAsymptotic:
      throw Unsupported("eval_cdf: a mean asymptotic is not a distribution");
  }
  throw Unsupported("eval_cdf: unknown law");
}

double eval_mean_prediction(const LimitLaw& law, double n) {
  if (law.kind != LawKind::MeanAsymptotic) throw ConfigError("eval_mean_prediction needs a mean_asymptotic law");
  if (const auto it = law.params.find("log_mean"); it != law.params.end() && it->second != 0.0) {
    return superexp_decay_ERj_prediction(law.param("gamma"), n, static_cast<std::size_t>(law.param("j")));
  }
  return law.param("coefficient") * std::pow(n, law.param("exponent")) * std::pow(std::log(n), law.param("log_power"));
}

double beta1_inverse_cdf(double theta, double u) { return -std::expm1(std::log1p(-u) / theta); }

std::vector<double> gem_sample(double theta, std::size_t k, CounterStream& rng) {
  if (!(theta > 0.0) || !std::isfinite(theta)) throw ConfigError("gem_sample: theta must be positive");
  std::vector<double> out;
  out.reserve(k);
  double remaining = 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double x = beta1_inverse_cdf(theta, rng.uniform());
    out.push_back(remaining * x);
    remaining *= 1.0 - x;
  }
  return out;
}

double lambda_eval(const WeightTable& weights, double theta, double x) {
  if (!(theta > 0.0)) throw ConfigError("lambda_eval: theta must be positive");
  if (!(x >= 1.0) || !std::isfinite(x)) throw ConfigError(fmt::format("lambda_eval: need finite x >= 1 (got {})", x));
  const double s = 1.0 - 1.0 / x;
  const double log_s = std::log(s);
  const double log_theta = std::log(theta);
  CompensatedSum sum;
  int small = 0;
  for (std::size_t j = 1; j <= weights.size(); ++j) {
    const double jd = static_cast<double>(j);
    const double diff = theta * std::expm1(weights.log_theta(j) - log_theta);
    const double term = s == 0.0 ? 0.0 : diff / jd * std::exp(jd * log_s);
    sum.add(term);
    small = std::abs(term) < 1e-14 ? small + 1 : 0;
    if (small >= 20) return std::exp(sum.value());
  }
  throw NumericError(fmt::format("lambda_eval: series tail not negligible at x = {} with N = {}", x, weights.size()));
}

double superexp_decay_ERj_prediction(double gamma, double n, std::size_t j) {
  if (!(gamma > 1.0)) throw ConfigError("superexp_decay_ERj_prediction: gamma must exceed 1");
  if (!(n >= 3.0)) throw ConfigError("superexp_decay_ERj_prediction: n must be >= 3");
  return static_cast<double>(j) * gamma * std::pow(std::log(n) / (gamma - 1.0), (gamma - 1.0) / gamma);
}

Pmf poisson_pmf(double mean, std::size_t kmax, std::int64_t shift) {
  Pmf pmf;
  pmf.label = fmt::format("Poisson({:g})", mean);
  for (std::size_t k = 0; k <= kmax; ++k) {
    const double kd = static_cast<double>(k);
    pmf.support.push_back(shift + static_cast<std::int64_t>(k));
    if (mean == 0.0) {
      pmf.log_prob.push_back(k == 0 ? 0.0 : kNegInf);
    } else {
      pmf.log_prob.push_back(kd * std::log(mean) - mean - std::lgamma(kd + 1.0));
    }
  }
  return pmf;
}

}  // namespace cycleweights

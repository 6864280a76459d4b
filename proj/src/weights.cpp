#include "cycleweights/weights.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <utility>

#include <fmt/format.h>

#include "cycleweights/errors.hpp"
#include "cycleweights/simd/kernels.hpp"
#include "cycleweights/special.hpp"

namespace cycleweights {

namespace {

constexpr std::array<std::pair<FamilyKind, std::string_view>, 10> kFamilyNames{{
    {FamilyKind::Uniform, "uniform"},
    {FamilyKind::Ewens, "ewens"},
    {FamilyKind::AsymptoticEwens, "asymptotic_ewens"},
    {FamilyKind::Algebraic, "algebraic"},
    {FamilyKind::SubExpGrowth, "subexp_growth"},
    {FamilyKind::SuperExpGrowth, "superexp_growth"},
    {FamilyKind::SubExpDecayPower, "subexp_decay_power"},
    {FamilyKind::SubExpDecayStretched, "subexp_decay_stretched"},
    {FamilyKind::SuperExpDecay, "superexp_decay"},
    {FamilyKind::Custom, "custom"},
}};

void require_gamma(const FamilyParams& p, double lo, double hi, std::string_view range) {
  if (!(p.gamma > lo && p.gamma < hi)) {
    throw ConfigError(fmt::format("family {} requires gamma in {} (got {})", family_name(p.kind), range, p.gamma));
  }
}

}  // namespace

std::string_view family_name(FamilyKind kind) {
  for (const auto& [k, name] : kFamilyNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

FamilyKind parse_family(std::string_view name) {
  for (const auto& [k, n] : kFamilyNames) {
    if (n == name) return k;
  }
  throw ConfigError(fmt::format("unknown family '{}'", name));
}

SubExpParams SubExpParams::from_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw ConfigError(fmt::format("sub-exponential growth requires 0 < gamma < 1 (got {})", gamma));
  }
  SubExpParams p;
  p.b = gamma / (1.0 - gamma);
  p.a = (1.0 - gamma) * std::pow(gamma, gamma / (1.0 - gamma));
  p.c = p.b / 2.0 + 1.0;
  p.A = std::sqrt(2.0 * std::numbers::pi * (p.b + 1.0)) * std::pow(p.a * p.b, -(0.5 - p.c) / (p.b + 1.0));
  return p;
}

void FamilyParams::validate() const {
  if (!std::isfinite(theta) || !std::isfinite(gamma)) {
    throw ConfigError("family parameters must be finite");
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (kind) {
    case FamilyKind::Uniform:
    case FamilyKind::Custom:
      break;
    case FamilyKind::Ewens:
    case FamilyKind::AsymptoticEwens:
      if (!(theta > 0.0)) throw ConfigError(fmt::format("theta must be positive (got {})", theta));
      break;
    case FamilyKind::Algebraic:
    case FamilyKind::SubExpDecayPower:
      require_gamma(*this, 0.0, inf, "(0, inf)");
      break;
    case FamilyKind::SubExpGrowth:
    case FamilyKind::SubExpDecayStretched:
      require_gamma(*this, 0.0, 1.0, "(0, 1)");
      break;
    case FamilyKind::SuperExpGrowth:
    case FamilyKind::SuperExpDecay:
      require_gamma(*this, 1.0, inf, "(1, inf)");
      break;
  }
}

WeightTable::WeightTable(FamilyParams params, std::vector<double> log_theta)
    : params_(std::move(params)) {
  values_.reserve(log_theta.size() + 1);
  values_.push_back(kNegInf);
  values_.insert(values_.end(), log_theta.begin(), log_theta.end());
}

WeightTable build_weights(const FamilyParams& params, std::size_t N) {
  if (N < 1) throw ConfigError("weight table size N must be >= 1");
  params.validate();
  if (params.kind == FamilyKind::SubExpGrowth) return extract_subexp_coeffs(params, N);

  std::vector<double> lt(N);
  const double g = params.gamma;
  for (std::size_t i = 0; i < N; ++i) {
    const double n = static_cast<double>(i + 1);
    double v = 0.0;
    switch (params.kind) {
      case FamilyKind::Uniform: v = 0.0; break;
      case FamilyKind::Ewens: v = std::log(params.theta); break;
      case FamilyKind::AsymptoticEwens: v = std::log(params.theta + 1.0 / n); break;
      case FamilyKind::Algebraic: v = std::lgamma(g + n + 1.0) - std::lgamma(n + 1.0); break;
      case FamilyKind::SuperExpGrowth: v = std::pow(n, g); break;
      case FamilyKind::SubExpDecayPower: v = -g * std::log(n); break;
      case FamilyKind::SubExpDecayStretched:
      case FamilyKind::SuperExpDecay: v = -std::pow(n, g); break;
      case FamilyKind::Custom: {
        if (params.custom_log_weights.size() < N) {
          throw ConfigError(fmt::format("custom weight list has {} entries, need {}",
                                        params.custom_log_weights.size(), N));
        }
        v = params.custom_log_weights[i];
        if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
          throw ConfigError(fmt::format("custom log weight {} is not finite", i + 1));
        }
        break;
      }
      case FamilyKind::SubExpGrowth: break;  // handled above
    }
    if (params.kind != FamilyKind::Custom && !std::isfinite(v)) {
      throw NumericError(fmt::format("log theta_{} is not finite for family {}", i + 1, family_name(params.kind)));
    }
    lt[i] = v;
  }
  return WeightTable(params, std::move(lt));
}

WeightTable extract_subexp_coeffs(const FamilyParams& params, std::size_t N) {
  if (params.kind != FamilyKind::SubExpGrowth) {
    throw ConfigError("extract_subexp_coeffs requires the subexp_growth family");
  }
  if (N < 2) throw ConfigError("extract_subexp_coeffs requires N >= 2");
  params.validate();
  const SubExpParams p = params.derived();

  // exp(a (1-z)^{-b}) = sum f_m z^m with m f_m = sum_{k=1}^m k h_k f_{m-k},
  // h_k = a C(k+b-1, k). Work with w_k = ln(k h_k).
  std::vector<double> w(N);  // w[k-1] = ln(k h_k)
  for (std::size_t k = 1; k <= N; ++k) {
    const double kd = static_cast<double>(k);
    w[k - 1] = std::log(kd) + std::log(p.a) + log_rising_binomial(p.b, kd);
  }
  std::vector<double> log_f(N);
  log_f[0] = p.a;
  for (std::size_t m = 1; m < N; ++m) {
    log_f[m] = -std::log(static_cast<double>(m)) +
               simd::log_convolve({w.data(), m}, {log_f.data(), m});
  }

  std::vector<double> log_c(N);  // coefficients of A (1-z)^{-c}
  const double log_A = std::log(p.A);
  for (std::size_t i = 0; i < N; ++i) log_c[i] = log_A + log_rising_binomial(p.c, static_cast<double>(i));

  std::vector<double> lt(N);
  for (std::size_t n = 1; n <= N; ++n) {
    lt[n - 1] = simd::log_convolve({log_c.data(), n}, {log_f.data(), n});
    if (!std::isfinite(lt[n - 1])) {
      throw NumericError(fmt::format("sub-exponential coefficient {} is not finite", n));
    }
  }
  return WeightTable(params, std::move(lt));
}

}  // namespace cycleweights

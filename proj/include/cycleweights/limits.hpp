#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cycleweights/exact.hpp"
#include "cycleweights/rng.hpp"
#include "cycleweights/weights.hpp"

namespace cycleweights {

enum class LawKind {
  PointMassAtN,           // P(L1 = n) -> 1; limit variable L1/n is 1
  LogPowerConcentration,  // statistic / scale(n) => point
  GammaLaw,               // density a^{shape} x^{shape-1} e^{-a x} / Gamma(shape)
  BetaLaw,                // Beta(1, theta)
  PoissonLaw,             // Poisson(mean)
  PoissonShifted,         // shift + Poisson(mean)
  GEMLaw,                 // stick-breaking GEM(theta), sorted -> Poisson-Dirichlet
  TailLaw,                // n - L1 => m with probability h_m / sum_j h_j
  MeanAsymptotic,         // E_n(statistic) ~ coefficient n^exponent (log n)^log_power
};

std::string_view law_name(LawKind kind);

struct Statistic {
  enum class Kind { L1, K, Rj, LargestCycles };
  Kind kind = Kind::L1;
  std::size_t j = 1;  // for Rj

  static Statistic L1() { return {Kind::L1, 1}; }
  static Statistic K() { return {Kind::K, 1}; }
  static Statistic Rj(std::size_t j) { return {Kind::Rj, j}; }
  static Statistic largest_cycles() { return {Kind::LargestCycles, 1}; }

  std::string name() const;
};

/// Inverse of Statistic::name ("L1", "K", "R_3", "LargestCycles").
Statistic parse_statistic(std::string_view s);

struct LimitLaw {
  LawKind kind = LawKind::PointMassAtN;
  std::map<std::string, double> params;
  std::string rescale;
  /// TailLaw only: probabilities of n - L1 = 0, 1, ..., J.
  std::vector<double> tail_probabilities;

  double param(const std::string& key) const;
};

/// Limit law of `stat` for the weight family of `weights`. Family constants
/// that need actual weights (theta_j / j, sums over h_j) use the table, so it
/// should be as long as the desired truncation. Throws Unsupported for pairs
/// with no known law.
LimitLaw predict(const WeightTable& weights, Statistic stat);

/// Convenience overload: builds weights of length N (only when needed).
LimitLaw predict(const FamilyParams& params, Statistic stat, std::size_t N = 20000);

/// CDF P(X <= s) of the limit variable. Throws ConfigError when s lies outside
/// the support closure, Unsupported for MeanAsymptotic.
double eval_cdf(const LimitLaw& law, double s);

/// Evaluates a MeanAsymptotic prediction at n. For the super-exponential decay
/// R_j law the returned value is the predicted ln E_n(R_j).
double eval_mean_prediction(const LimitLaw& law, double n);

/// First k stick-breaking lengths of GEM(theta).
std::vector<double> gem_sample(double theta, std::size_t k, CounterStream& rng);

/// Inverse-CDF draw of Beta(1, theta) from a uniform u in [0, 1).
double beta1_inverse_cdf(double theta, double u);

/// Lambda(x) = exp sum_j (theta_j - theta)/j s^j with s = 1 - 1/x, x >= 1.
double lambda_eval(const WeightTable& weights, double theta, double x);

/// j gamma (ln n / (gamma - 1))^{(gamma-1)/gamma}: predicted ln E_n(R_j) for
/// theta_n = exp(-n^gamma), gamma > 1.
double superexp_decay_ERj_prediction(double gamma, double n, std::size_t j);

/// sup_s |F(s) - G(s)| between the law of X/scale (X with pmf `pmf`) and a
/// continuous CDF, checking both sides of every jump.
template <class Cdf>
double ks_distance(const Pmf& pmf, double scale, Cdf&& cdf) {
  double below = 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    const double g = cdf(static_cast<double>(pmf.support[i]) / scale);
    const double above = below + pmf.probability(i);
    worst = std::max({worst, std::abs(below - g), std::abs(above - g)});
    below = above;
  }
  return worst;
}

/// One-sample Kolmogorov-Smirnov statistic of `samples` (any order) against
/// a continuous CDF.
template <class Cdf>
double ks_distance_samples(std::vector<double> samples, Cdf&& cdf) {
  std::sort(samples.begin(), samples.end());
  const double m = static_cast<double>(samples.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double g = cdf(samples[i]);
    worst = std::max({worst, std::abs(static_cast<double>(i + 1) / m - g), std::abs(g - static_cast<double>(i) / m)});
  }
  return worst;
}

/// Poisson(mean) pmf on {shift, ..., shift + kmax} as a Pmf.
Pmf poisson_pmf(double mean, std::size_t kmax, std::int64_t shift = 0);

}  // namespace cycleweights

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cycleweights {

enum class FamilyKind {
  Uniform,
  Ewens,
  AsymptoticEwens,
  Algebraic,
  SubExpGrowth,
  SuperExpGrowth,
  SubExpDecayPower,
  SubExpDecayStretched,
  SuperExpDecay,
  Custom,
};

std::string_view family_name(FamilyKind kind);

/// Inverse of family_name; throws ConfigError on an unknown name.
FamilyKind parse_family(std::string_view name);

/// Parameters (A, a, b, c) of the generating function
/// G(z) = A (1-z)^{-c} exp(a (1-z)^{-b}) whose shifted coefficients grow like
/// exp(n^gamma), 0 < gamma < 1.
struct SubExpParams {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double A = 0.0;

  static SubExpParams from_gamma(double gamma);
};

struct FamilyParams {
  FamilyKind kind = FamilyKind::Uniform;
  double theta = 1.0;  // Ewens limit
  double gamma = 1.0;  // regime exponent
  std::vector<double> custom_log_weights;  // log theta_1, log theta_2, ...

  static FamilyParams uniform() { return {FamilyKind::Uniform, 1.0, 1.0, {}}; }
  static FamilyParams ewens(double theta) { return {FamilyKind::Ewens, theta, 1.0, {}}; }
  static FamilyParams asymptotic_ewens(double theta) { return {FamilyKind::AsymptoticEwens, theta, 1.0, {}}; }
  static FamilyParams algebraic(double gamma) { return {FamilyKind::Algebraic, 1.0, gamma, {}}; }
  static FamilyParams subexp_growth(double gamma) { return {FamilyKind::SubExpGrowth, 1.0, gamma, {}}; }
  static FamilyParams superexp_growth(double gamma) { return {FamilyKind::SuperExpGrowth, 1.0, gamma, {}}; }
  static FamilyParams subexp_decay_power(double gamma) { return {FamilyKind::SubExpDecayPower, 1.0, gamma, {}}; }
  static FamilyParams subexp_decay_stretched(double gamma) {
    return {FamilyKind::SubExpDecayStretched, 1.0, gamma, {}};
  }
  static FamilyParams superexp_decay(double gamma) { return {FamilyKind::SuperExpDecay, 1.0, gamma, {}}; }
  static FamilyParams custom(std::vector<double> log_weights) {
    return {FamilyKind::Custom, 1.0, 1.0, std::move(log_weights)};
  }

  /// Throws ConfigError when theta/gamma are non-finite or outside the
  /// family's admissible range.
  void validate() const;

  /// Only meaningful for SubExpGrowth.
  SubExpParams derived() const { return SubExpParams::from_gamma(gamma); }
};

/// theta_1..theta_N in natural-log space. Immutable once built.
class WeightTable {
 public:
  /// `log_theta` holds ln theta_1 .. ln theta_N.
  WeightTable(FamilyParams params, std::vector<double> log_theta);

  std::size_t size() const { return values_.size() - 1; }
  const FamilyParams& params() const { return params_; }

  /// ln theta_n, 1 <= n <= size().
  double log_theta(std::size_t n) const { return values_[n]; }

  /// ln theta_1 .. ln theta_m as a contiguous view.
  std::span<const double> log_thetas(std::size_t m) const { return {values_.data() + 1, m}; }
  std::span<const double> log_thetas() const { return log_thetas(size()); }

 private:
  FamilyParams params_;
  std::vector<double> values_;  // values_[0] unused (-inf)
};

WeightTable build_weights(const FamilyParams& params, std::size_t N);

/// Exact Taylor coefficients theta_n = [z^{n-1}] A (1-z)^{-c} exp(a (1-z)^{-b}),
/// computed in log space with the exponential-of-series recurrence.
WeightTable extract_subexp_coeffs(const FamilyParams& params, std::size_t N);

}  // namespace cycleweights

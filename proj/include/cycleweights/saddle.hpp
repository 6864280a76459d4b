#pragma once

#include <cstddef>
#include <limits>
#include <optional>

#include "cycleweights/weights.hpp"

namespace cycleweights {

enum class GenFnKind { AlgebraicClosedForm, SubExpGrowthClosedForm, SeriesTruncated };

/// A generating function I_mu(z) = sum_n n^mu theta_n z^n, either in closed
/// form or as a truncated series over a weight table.
class GenFnSpec {
 public:
  static GenFnSpec algebraic(double gamma);
  static GenFnSpec subexp_growth(double gamma);
  /// Radius defaults from the family: +inf for super-exponential decay, 1
  /// otherwise.
  static GenFnSpec series(WeightTable weights, std::optional<double> radius = std::nullopt);

  GenFnKind kind() const { return kind_; }
  double gamma() const { return gamma_; }
  double radius() const { return radius_; }
  const SubExpParams& subexp() const { return subexp_; }
  const WeightTable& series_weights() const { return *series_; }

 private:
  GenFnKind kind_ = GenFnKind::SeriesTruncated;
  double gamma_ = 1.0;
  double radius_ = 1.0;
  SubExpParams subexp_{};
  std::optional<WeightTable> series_;
};

/// I_mu(r) for mu in {-1, 0, 1, 2}.
///
/// For SubExpGrowthClosedForm the theta_n are the shifted coefficients of
/// G_theta, so I_0(z) = z G_theta(z) and I_{-1}(z) = int_0^z G_theta.
double eval_Imu(const GenFnSpec& spec, int mu, double r);

/// alpha(r) = r (log G_theta)'(r) and its derivative; SubExpGrowthClosedForm only.
double subexp_alpha(const GenFnSpec& spec, double r);
double subexp_alpha_prime(const GenFnSpec& spec, double r);

struct SaddleSolution {
  std::size_t n = 0;
  double r = 0.0;
  double I_m1 = 0.0;
  double I_0 = 0.0;
  double I_1 = 0.0;
  double residual = 0.0;  // I_0(r) - n (alpha(r) - n for the G_theta saddle)
};

/// Solves I_0(r) = n (alpha(rho) = n for SubExpGrowthClosedForm): bisection to
/// width 1e-6, then safeguarded Newton to |residual| <= 1e-9 n.
SaddleSolution solve_saddle(const GenFnSpec& spec, std::size_t n);

/// ln h_n ~ I_{-1}(r_n) - n ln r_n - (1/2) ln(2 pi I_1(r_n)).
double asymptotic_hn(const GenFnSpec& spec, const SaddleSolution& sol);

/// ln theta_{n+1} ~ ln G_theta(rho_n) - (n + 1/2) ln rho_n - (1/2) ln(2 pi alpha'(rho_n)).
double asymptotic_theta(const GenFnSpec& spec, std::size_t n);

/// ln of the lower and upper bounds on h_{n-j}/h_n from the saddle points at
/// n and n-j.
struct RatioBounds {
  double lower = 0.0;
  double upper = 0.0;
};
RatioBounds ratio_bounds(const GenFnSpec& spec, std::size_t n, std::size_t j);

}  // namespace cycleweights

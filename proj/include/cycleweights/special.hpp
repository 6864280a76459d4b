#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace cycleweights {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(exp(x) + exp(y)), exact for -inf operands.
inline double log_add(double x, double y) {
  if (x < y) std::swap(x, y);
  if (y == kNegInf) return x;
  return x + std::log1p(std::exp(y - x));
}

/// log C(k + x - 1, k) = log Gamma(k + x) - log Gamma(x) - log k!, the
/// coefficient of z^k in (1 - z)^{-x}. Requires x > 0, k >= 0.
double log_rising_binomial(double x, double k);

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
/// Series for x < a + 1, Lentz continued fraction for Q otherwise.
double regularized_gamma_p(double a, double x);

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace cycleweights

#include "cycleweights/special.hpp"

#include <fmt/format.h>

#include "cycleweights/errors.hpp"

namespace cycleweights {

double log_rising_binomial(double x, double k) {
  if (!(x > 0.0) || !(k >= 0.0)) {
    throw ConfigError(fmt::format("log_rising_binomial: need x > 0, k >= 0 (x={}, k={})", x, k));
  }
  if (k == 0.0) return 0.0;
  return std::lgamma(k + x) - std::lgamma(x) - std::lgamma(k + 1.0);
}

namespace {

constexpr int kMaxIter = 10000;
constexpr double kEps = 1e-16;

double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxIter; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) {
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  throw NumericError("regularized_gamma_p: series did not converge");
}

double gamma_q_continued_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) {
      return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
    }
  }
  throw NumericError("regularized_gamma_p: continued fraction did not converge");
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) {
    throw ConfigError(fmt::format("regularized_gamma_p: need a > 0, x >= 0 (a={}, x={})", a, x));
  }
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_continued_fraction(a, x);
}

}  // namespace cycleweights

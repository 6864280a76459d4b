#include "cycleweights/simd/kernels.hpp"

#include <cassert>
#include <cmath>
#include <limits>

namespace cycleweights::simd::scalar {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double logsumexp(std::span<const double> x) {
  double m = kNegInf;
  for (double v : x) {
    if (v > m) m = v;
  }
  if (m == kNegInf) return kNegInf;
  if (std::isinf(m)) return m;
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

double log_convolve(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  const std::size_t m = a.size();
  const double* br = b.data() + m;  // br[-1-i] == b[m-1-i]
  double mx = kNegInf;
  for (std::size_t i = 0; i < m; ++i) {
    const double v = a[i] + br[-1 - static_cast<std::ptrdiff_t>(i)];
    if (v > mx) mx = v;
  }
  if (mx == kNegInf) return kNegInf;
  if (std::isinf(mx)) return mx;
  double s = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    s += std::exp(a[i] + br[-1 - static_cast<std::ptrdiff_t>(i)] - mx);
  }
  return mx + std::log(s);
}

}  // namespace cycleweights::simd::scalar

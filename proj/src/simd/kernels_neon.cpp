// aarch64 variant; NEON is baseline there so no runtime check is needed.

#include "cycleweights/simd/kernels.hpp"

#include <arm_neon.h>

#include <cassert>
#include <cmath>
#include <limits>

namespace cycleweights::simd::neon {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Same reduction and Pade form as the AVX2 kernel.
inline float64x2_t exp_nonpositive(float64x2_t x) {
  const float64x2_t lo = vdupq_n_f64(-708.0);
  const uint64x2_t underflow = vcltq_f64(x, lo);
  x = vmaxq_f64(x, lo);

  const float64x2_t k = vrndnq_f64(vmulq_n_f64(x, 1.4426950408889634073599));
  float64x2_t r = vfmsq_f64(x, k, vdupq_n_f64(6.93145751953125E-1));
  r = vfmsq_f64(r, k, vdupq_n_f64(1.42860682030941723212E-6));

  const float64x2_t rr = vmulq_f64(r, r);
  float64x2_t p = vdupq_n_f64(1.26177193074810590878E-4);
  p = vfmaq_f64(vdupq_n_f64(3.02994407707441961300E-2), p, rr);
  p = vfmaq_f64(vdupq_n_f64(9.99999999999999999910E-1), p, rr);
  p = vmulq_f64(p, r);
  float64x2_t q = vdupq_n_f64(3.00198505138664455042E-6);
  q = vfmaq_f64(vdupq_n_f64(2.52448340349684104192E-3), q, rr);
  q = vfmaq_f64(vdupq_n_f64(2.27265548208155028766E-1), q, rr);
  q = vfmaq_f64(vdupq_n_f64(2.00000000000000000009E0), q, rr);
  float64x2_t e = vdivq_f64(p, vsubq_f64(q, p));
  e = vfmaq_f64(vdupq_n_f64(1.0), vdupq_n_f64(2.0), e);

  int64x2_t k64 = vcvtq_s64_f64(k);
  k64 = vshlq_n_s64(vaddq_s64(k64, vdupq_n_s64(1023)), 52);
  e = vmulq_f64(e, vreinterpretq_f64_s64(k64));
  return vreinterpretq_f64_u64(vbicq_u64(vreinterpretq_u64_f64(e), underflow));
}

}  // namespace

double logsumexp(std::span<const double> x) {
  const std::size_t m = x.size();
  const double* p = x.data();
  std::size_t i = 0;
  float64x2_t vmax = vdupq_n_f64(kNegInf);
  for (; i + 2 <= m; i += 2) vmax = vmaxq_f64(vmax, vld1q_f64(p + i));
  double mx = vmaxvq_f64(vmax);
  for (; i < m; ++i) {
    if (p[i] > mx) mx = p[i];
  }
  if (mx == kNegInf) return kNegInf;
  if (std::isinf(mx) || std::isnan(mx)) return mx;

  const float64x2_t shift = vdupq_n_f64(mx);
  float64x2_t acc = vdupq_n_f64(0.0);
  for (i = 0; i + 2 <= m; i += 2) {
    acc = vaddq_f64(acc, exp_nonpositive(vsubq_f64(vld1q_f64(p + i), shift)));
  }
  double s = vaddvq_f64(acc);
  for (; i < m; ++i) s += std::exp(p[i] - mx);
  return mx + std::log(s);
}

double log_convolve(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  const std::size_t m = a.size();
  const double* pa = a.data();
  const double* pb = b.data();

  std::size_t i = 0;
  float64x2_t vmax = vdupq_n_f64(kNegInf);
  for (; i + 2 <= m; i += 2) {
    const float64x2_t rb = vextq_f64(vld1q_f64(pb + (m - 2 - i)), vld1q_f64(pb + (m - 2 - i)), 1);
    vmax = vmaxq_f64(vmax, vaddq_f64(vld1q_f64(pa + i), rb));
  }
  double mx = vmaxvq_f64(vmax);
  const std::size_t tail = i;
  for (; i < m; ++i) {
    const double v = pa[i] + pb[m - 1 - i];
    if (v > mx) mx = v;
  }
  if (mx == kNegInf) return kNegInf;
  if (std::isinf(mx) || std::isnan(mx)) return mx;

  const float64x2_t shift = vdupq_n_f64(mx);
  float64x2_t acc = vdupq_n_f64(0.0);
  for (i = 0; i < tail; i += 2) {
    const float64x2_t rb = vextq_f64(vld1q_f64(pb + (m - 2 - i)), vld1q_f64(pb + (m - 2 - i)), 1);
    acc = vaddq_f64(acc, exp_nonpositive(vsubq_f64(vaddq_f64(vld1q_f64(pa + i), rb), shift)));
  }
  double s = vaddvq_f64(acc);
  for (i = tail; i < m; ++i) s += std::exp(pa[i] + pb[m - 1 - i] - mx);
  return mx + std::log(s);
}

}  // namespace cycleweights::simd::neon

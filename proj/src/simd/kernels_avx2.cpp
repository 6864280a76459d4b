// Compiled with -mavx2 -mfma; only called after a runtime CPU check.

#include "cycleweights/simd/kernels.hpp"

#include <immintrin.h>

#include <cassert>
#include <cmath>
#include <limits>

namespace cycleweights::simd::avx2 {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// exp(x) for x in [-708, 0]; lanes below -708 return 0. Cephes-style range
// reduction x = k ln2 + r followed by a (3,3) Pade form for exp(r), ~1 ulp.
inline __m256d exp_nonpositive(__m256d x) {
  const __m256d lo = _mm256_set1_pd(-708.0);
  const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  x = _mm256_max_pd(lo, x);  // NaN lanes stay NaN

  const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634073599)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, _mm256_set1_pd(6.93145751953125E-1), x);
  r = _mm256_fnmadd_pd(k, _mm256_set1_pd(1.42860682030941723212E-6), r);

  const __m256d rr = _mm256_mul_pd(r, r);
  __m256d p = _mm256_set1_pd(1.26177193074810590878E-4);
  p = _mm256_fmadd_pd(p, rr, _mm256_set1_pd(3.02994407707441961300E-2));
  p = _mm256_fmadd_pd(p, rr, _mm256_set1_pd(9.99999999999999999910E-1));
  p = _mm256_mul_pd(p, r);
  __m256d q = _mm256_set1_pd(3.00198505138664455042E-6);
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.52448340349684104192E-3));
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.27265548208155028766E-1));
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.00000000000000000009E0));
  __m256d e = _mm256_div_pd(p, _mm256_sub_pd(q, p));
  e = _mm256_fmadd_pd(_mm256_set1_pd(2.0), e, _mm256_set1_pd(1.0));

  // 2^k with k in [-1022, 0]: build the exponent field directly.
  const __m128i k32 = _mm256_cvtpd_epi32(k);
  __m256i k64 = _mm256_cvtepi32_epi64(k32);
  k64 = _mm256_slli_epi64(_mm256_add_epi64(k64, _mm256_set1_epi64x(1023)), 52);
  e = _mm256_mul_pd(e, _mm256_castsi256_pd(k64));
  return _mm256_andnot_pd(underflow, e);
}

inline double hmax(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d m = _mm_max_pd(lo, hi);
  m = _mm_max_sd(m, _mm_unpackhi_pd(m, m));
  return _mm_cvtsd_f64(m);
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d s = _mm_add_pd(lo, hi);
  s = _mm_add_sd(s, _mm_unpackhi_pd(s, s));
  return _mm_cvtsd_f64(s);
}

// Reversed load: lanes (b[j+3], b[j+2], b[j+1], b[j]).
inline __m256d load_reversed(const double* p) {
  return _mm256_permute4x64_pd(_mm256_loadu_pd(p), 0x1B);
}

}  // namespace

double logsumexp(std::span<const double> x) {
  const std::size_t m = x.size();
  const double* p = x.data();
  std::size_t i = 0;
  __m256d vmax = _mm256_set1_pd(kNegInf);
  for (; i + 4 <= m; i += 4) vmax = _mm256_max_pd(vmax, _mm256_loadu_pd(p + i));
  double mx = hmax(vmax);
  for (; i < m; ++i) {
    if (p[i] > mx) mx = p[i];
  }
  if (mx == kNegInf) return kNegInf;
  if (std::isinf(mx) || std::isnan(mx)) return mx;

  const __m256d shift = _mm256_set1_pd(mx);
  __m256d acc = _mm256_setzero_pd();
  for (i = 0; i + 4 <= m; i += 4) {
    acc = _mm256_add_pd(acc, exp_nonpositive(_mm256_sub_pd(_mm256_loadu_pd(p + i), shift)));
  }
  double s = hsum(acc);
  for (; i < m; ++i) s += std::exp(p[i] - mx);
  return mx + std::log(s);
}

double log_convolve(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  const std::size_t m = a.size();
  const double* pa = a.data();
  const double* pb = b.data();

  std::size_t i = 0;
  __m256d vmax = _mm256_set1_pd(kNegInf);
  for (; i + 4 <= m; i += 4) {
    const __m256d v = _mm256_add_pd(_mm256_loadu_pd(pa + i), load_reversed(pb + (m - 4 - i)));
    vmax = _mm256_max_pd(vmax, v);
  }
  double mx = hmax(vmax);
  const std::size_t tail = i;
  for (; i < m; ++i) {
    const double v = pa[i] + pb[m - 1 - i];
    if (v > mx) mx = v;
  }
  if (mx == kNegInf) return kNegInf;
  if (std::isinf(mx) || std::isnan(mx)) return mx;

  const __m256d shift = _mm256_set1_pd(mx);
  __m256d acc = _mm256_setzero_pd();
  for (i = 0; i < tail; i += 4) {
    const __m256d v = _mm256_add_pd(_mm256_loadu_pd(pa + i), load_reversed(pb + (m - 4 - i)));
    acc = _mm256_add_pd(acc, exp_nonpositive(_mm256_sub_pd(v, shift)));
  }
  double s = hsum(acc);
  for (i = tail; i < m; ++i) s += std::exp(pa[i] + pb[m - 1 - i] - mx);
  return mx + std::log(s);
}

}  // namespace cycleweights::simd::avx2

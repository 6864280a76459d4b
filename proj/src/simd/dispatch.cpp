#include <atomic>
#include <cstdlib>
#include <string>

#include "cycleweights/errors.hpp"
#include "cycleweights/simd/kernels.hpp"

namespace cycleweights::simd {

namespace {

bool cpu_has_avx2() {
#if defined(CYCLEWEIGHTS_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend detect() {
  if (const char* env = std::getenv("CYCLEWEIGHTS_SIMD"); env != nullptr && std::string(env) == "scalar") {
    return Backend::Scalar;
  }
#if defined(CYCLEWEIGHTS_HAVE_NEON)
  return Backend::Neon;
#else
  return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar;
#endif
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> b{detect()};
  return b;
}

}  // namespace

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
  }
  return "unknown";
}

std::vector<Backend> available_backends() {
  std::vector<Backend> out{Backend::Scalar};
  if (cpu_has_avx2()) out.push_back(Backend::Avx2);
#if defined(CYCLEWEIGHTS_HAVE_NEON)
  out.push_back(Backend::Neon);
#endif
  return out;
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void force_backend(Backend b) {
  for (Backend a : available_backends()) {
    if (a == b) {
      current().store(b, std::memory_order_relaxed);
      return;
    }
  }
  throw ConfigError("SIMD backend not available: " + std::string(backend_name(b)));
}

double logsumexp(std::span<const double> x) {
  switch (active_backend()) {
#if defined(CYCLEWEIGHTS_HAVE_AVX2)
    case Backend::Avx2: return avx2::logsumexp(x);
#endif
#if defined(CYCLEWEIGHTS_HAVE_NEON)
    case Backend::Neon: return neon::logsumexp(x);
#endif
    default: return scalar::logsumexp(x);
  }
}

double log_convolve(std::span<const double> a, std::span<const double> b) {
  switch (active_backend()) {
#if defined(CYCLEWEIGHTS_HAVE_AVX2)
    case Backend::Avx2: return avx2::log_convolve(a, b);
#endif
#if defined(CYCLEWEIGHTS_HAVE_NEON)
    case Backend::Neon: return neon::log_convolve(a, b);
#endif
    default: return scalar::log_convolve(a, b);
  }
}

}  // namespace cycleweights::simd

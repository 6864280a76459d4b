#pragma once

// Log-space reduction kernels used by every O(N^2) recursion in the library.
//
// Each kernel has a portable scalar reference and, where the target supports
// it, an AVX2 (x86-64) or NEON (aarch64) variant. The active variant is chosen
// once at first use from the CPU features; CYCLEWEIGHTS_SIMD=scalar forces the
// reference path. All variants agree to ~1e-15 relative in linear space.

#include <span>
#include <string_view>
#include <vector>

namespace cycleweights::simd {

enum class Backend { Scalar, Avx2, Neon };

std::string_view backend_name(Backend b);

/// Backends compiled into this binary and supported by the running CPU.
std::vector<Backend> available_backends();

Backend active_backend();

/// Overrides the dispatch choice (tests and benchmarks). Throws ConfigError if
/// `b` is not available.
void force_backend(Backend b);

/// log(sum_i exp(x[i])). Entries equal to -inf contribute nothing; returns
/// -inf for an empty or all -inf input.
double logsumexp(std::span<const double> x);

/// log(sum_i exp(a[i] + b[m-1-i])) with m = a.size() == b.size(): the value at
/// lag m of the log-space convolution of two sequences.
double log_convolve(std::span<const double> a, std::span<const double> b);

namespace scalar {
double logsumexp(std::span<const double> x);
double log_convolve(std::span<const double> a, std::span<const double> b);
}  // namespace scalar

#if defined(CYCLEWEIGHTS_HAVE_AVX2)
namespace avx2 {
double logsumexp(std::span<const double> x);
double log_convolve(std::span<const double> a, std::span<const double> b);
}  // namespace avx2
#endif

#if defined(CYCLEWEIGHTS_HAVE_NEON)
namespace neon {
double logsumexp(std::span<const double> x);
double log_convolve(std::span<const double> a, std::span<const double> b);
}  // namespace neon
#endif

}  // namespace cycleweights::simd

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cycleweights/exact.hpp"
#include "cycleweights/rng.hpp"

namespace cycleweights {

struct SampleRecord {
  CycleType cycle_type;
  std::vector<std::int64_t> ordered_lengths;  // in order of discovery, first = cycle of index 1
  std::vector<std::int64_t> sorted_lengths;   // nonincreasing
  std::int64_t K = 0;
};

/// Exact draw of a cycle type: repeatedly pick the length l of the cycle
/// containing the smallest remaining index with probability
/// theta_l h_{m-l} / (m h_m), then continue on m - l indices.
SampleRecord sample_cycle_type(const NormTable& norms, std::size_t n, CounterStream& rng);

/// Linear-scan inverse-CDF draw. Throws NumericError when the pmf mass is
/// more than 1e-10 away from one.
std::int64_t inverse_cdf_draw(const Pmf& pmf, CounterStream& rng);

/// Samples 0..num_samples-1, sample i drawn from stream (seed, i). The result
/// does not depend on `threads` (0 = hardware concurrency).
std::vector<SampleRecord> sample_batch(const NormTable& norms, std::size_t n, std::size_t num_samples,
                                       std::uint64_t seed, unsigned threads = 0);

struct MomentEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

struct BatchStats {
  std::size_t n = 0;
  std::size_t num_samples = 0;
  std::uint64_t seed = 0;
  std::size_t j_max = 0;
  /// Empty unless the batch is degenerate (e.g. no samples).
  std::string error;

  /// Empirical pmfs indexed by value (0..n).
  std::vector<double> hist_L1;
  std::vector<double> hist_K;
  std::vector<std::vector<double>> hist_Rj;  // hist_Rj[j-1], j = 1..j_max

  MomentEstimate L1;
  MomentEstimate K;
  std::vector<MomentEstimate> Rj;

  /// FNV-1a hash of every sample's ordered lengths, in sample order.
  std::uint64_t digest = 0;
};

BatchStats summarize(const std::vector<SampleRecord>& samples, std::size_t n, std::uint64_t seed, std::size_t j_max);

BatchStats run_batch(const NormTable& norms, std::size_t n, std::size_t num_samples, std::uint64_t seed,
                     std::size_t j_max, unsigned threads = 0);

/// Empirical pmf of a histogram as a Pmf over its nonzero entries.
Pmf histogram_pmf(const std::vector<double>& hist, std::string label);

}  // namespace cycleweights

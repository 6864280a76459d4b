#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cycleweights/weights.hpp"

namespace cycleweights {

/// Cycle counts r_j > 0 of a permutation of n; sum_j j r_j == n.
struct CycleType {
  std::int64_t n = 0;
  std::map<std::int64_t, std::int64_t> counts;

  std::int64_t num_cycles() const;

  /// Throws ConfigError unless the sum rule holds and all entries are positive.
  void validate() const;

  bool operator==(const CycleType&) const = default;
};

/// Probability mass function stored as log-probabilities over an integer
/// support, sorted ascending.
struct Pmf {
  std::vector<std::int64_t> support;
  std::vector<double> log_prob;
  std::string label;

  std::size_t size() const { return support.size(); }
  double probability(std::size_t i) const;
  /// P(X = k); 0 when k is not in the support.
  double probability_of(std::int64_t k) const;
  /// log of the total mass (0 for a normalized pmf).
  double log_total() const;
  double mean() const;
};

/// ln h_0 .. ln h_N for a weight table.
class NormTable {
 public:
  NormTable(WeightTable weights, std::vector<double> log_h);

  std::size_t size() const { return log_h_.size() - 1; }
  const WeightTable& weights() const { return weights_; }
  double log_h(std::size_t n) const { return log_h_[n]; }
  std::span<const double> log_hs() const { return log_h_; }

  /// max_n |h_n - (1/n) sum_j theta_j h_{n-j}| / h_n, recomputed with the
  /// scalar reference kernel.
  double max_recursion_residual() const;

 private:
  WeightTable weights_;
  std::vector<double> log_h_;
};

/// h_n = (1/n) sum_{j=1}^n theta_j h_{n-j}, h_0 = 1, in log space.
NormTable compute_norms(const WeightTable& weights, std::size_t N);

/// P(L1 = j) = theta_j h_{n-j} / (n h_n), j = 1..n.
Pmf dist_L1(const NormTable& norms, std::size_t n);

double expected_K(const NormTable& norms, std::size_t n);

/// ln E_n(prod_j (R_j)_[k_j]); -inf when the moment is zero.
double log_factorial_moment(const NormTable& norms, std::size_t n, const std::map<std::int64_t, std::int64_t>& k);
double factorial_moment(const NormTable& norms, std::size_t n, const std::map<std::int64_t, std::int64_t>& k);

/// Exact pmf of R_j on {0..floor(n/j)}. Uses the marked generating function
/// G_h(z,u) = exp((u-1) theta_j z^j / j) G_h(z): P(R_j = k) is
/// (theta_j/j)^k / k! * g_{n-jk} / h_n with g the normalizations of the
/// weights with theta_j removed, all terms positive.
Pmf dist_Rj(const NormTable& norms, std::size_t n, std::size_t j);

/// Alternating inclusion-exclusion evaluation of the same pmf, used as an
/// independent cross-check. `reliable[k]` is false where cancellation exceeds
/// a factor 1e12 between the largest term and the result, or where the
/// cancellation times the rounding error of the log terms exceeds 1e-10.
struct InclusionExclusionPmf {
  Pmf pmf;
  std::vector<bool> reliable;
};
InclusionExclusionPmf dist_Rj_inclusion_exclusion(const NormTable& norms, std::size_t n, std::size_t j);

struct DistKOptions {
  /// Upper bound on inner log-sum-exp terms before giving up.
  double work_budget = 5e10;
  /// Stop after level k once P(K=k) < this, the pmf is decreasing and the
  /// captured mass is within 1e-13 of one.
  double tail_probability = 1e-20;
};

/// Exact pmf of the number of cycles K, by the marked recursion
/// n h_n^(k) = sum_j theta_j h_{n-j}^(k-1). The support is truncated once the
/// remaining levels are negligible (see DistKOptions).
Pmf dist_K(const NormTable& norms, std::size_t n, const DistKOptions& options = {});

/// Total variation distance between two pmfs (missing support = 0).
double total_variation(const Pmf& a, const Pmf& b);

}  // namespace cycleweights

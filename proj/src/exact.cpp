#include "cycleweights/exact.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "cycleweights/errors.hpp"
#include "cycleweights/simd/kernels.hpp"
#include "cycleweights/special.hpp"

namespace cycleweights {

namespace {

// ln h_0..ln h_n for weights given as ln theta_1..ln theta_n.
std::vector<double> norm_recursion(std::span<const double> log_theta, std::size_t n) {
  std::vector<double> lh(n + 1, kNegInf);
  lh[0] = 0.0;
  for (std::size_t m = 1; m <= n; ++m) {
    lh[m] = -std::log(static_cast<double>(m)) + simd::log_convolve(log_theta.first(m), {lh.data(), m});
  }
  return lh;
}

void require_n(const NormTable& norms, std::size_t n, std::string_view what) {
  if (n < 1 || n > norms.size()) {
    throw ConfigError(fmt::format("{}: n = {} outside [1, {}]", what, n, norms.size()));
  }
  if (norms.log_h(n) == kNegInf) {
    throw NumericError(fmt::format("{}: h_{} = 0, the measure is undefined", what, n));
  }
}

}  // namespace

std::int64_t CycleType::num_cycles() const {
  std::int64_t k = 0;
  for (const auto& [len, count] : counts) k += count;
  return k;
}

void CycleType::validate() const {
  std::int64_t total = 0;
  for (const auto& [len, count] : counts) {
    if (len < 1 || count < 1) throw ConfigError("cycle type entries must be positive");
    total += len * count;
  }
  if (total != n) throw ConfigError(fmt::format("cycle type violates sum rule: {} != {}", total, n));
}

double Pmf::probability(std::size_t i) const { return std::exp(log_prob[i]); }

double Pmf::probability_of(std::int64_t k) const {
  const auto it = std::lower_bound(support.begin(), support.end(), k);
  if (it == support.end() || *it != k) return 0.0;
  return probability(static_cast<std::size_t>(it - support.begin()));
}

double Pmf::log_total() const { return simd::scalar::logsumexp(log_prob); }

double Pmf::mean() const {
  CompensatedSum s;
  for (std::size_t i = 0; i < size(); ++i) s.add(static_cast<double>(support[i]) * probability(i));
  return s.value();
}

NormTable::NormTable(WeightTable weights, std::vector<double> log_h)
    : weights_(std::move(weights)), log_h_(std::move(log_h)) {}

double NormTable::max_recursion_residual() const {
  double worst = 0.0;
  const auto lt = weights_.log_thetas();
  for (std::size_t n = 1; n <= size(); ++n) {
    const double re = -std::log(static_cast<double>(n)) + simd::scalar::log_convolve(lt.first(n), {log_h_.data(), n});
    if (re == kNegInf && log_h_[n] == kNegInf) continue;
    worst = std::max(worst, std::abs(std::expm1(re - log_h_[n])));
  }
  return worst;
}

NormTable compute_norms(const WeightTable& weights, std::size_t N) {
  if (N > weights.size()) {
    throw ConfigError(fmt::format("compute_norms: N = {} exceeds weight table size {}", N, weights.size()));
  }
  std::vector<double> lh = norm_recursion(weights.log_thetas(N), N);
  const bool custom = weights.params().kind == FamilyKind::Custom;
  for (std::size_t n = 1; n <= N; ++n) {
    if (std::isnan(lh[n]) || lh[n] == std::numeric_limits<double>::infinity()) {
      throw NumericError(fmt::format("log h_{} overflowed; N is too large for this family", n));
    }
    if (lh[n] == kNegInf && !custom) {
      throw NumericError(fmt::format("h_{} vanished for a family with positive weights", n));
    }
  }
  return NormTable(weights, std::move(lh));
}

Pmf dist_L1(const NormTable& norms, std::size_t n) {
  require_n(norms, n, "dist_L1");
  const auto& w = norms.weights();
  const double base = std::log(static_cast<double>(n)) + norms.log_h(n);
  Pmf pmf;
  pmf.label = "L1";
  pmf.support.resize(n);
  pmf.log_prob.resize(n);
  for (std::size_t j = 1; j <= n; ++j) {
    pmf.support[j - 1] = static_cast<std::int64_t>(j);
    pmf.log_prob[j - 1] = w.log_theta(j) + norms.log_h(n - j) - base;
  }
  return pmf;
}

double expected_K(const NormTable& norms, std::size_t n) {
  require_n(norms, n, "expected_K");
  const auto& w = norms.weights();
  std::vector<double> terms(n);
  for (std::size_t j = 1; j <= n; ++j) {
    terms[j - 1] = w.log_theta(j) - std::log(static_cast<double>(j)) + norms.log_h(n - j);
  }
  return std::exp(simd::logsumexp(terms) - norms.log_h(n));
}

double log_factorial_moment(const NormTable& norms, std::size_t n, const std::map<std::int64_t, std::int64_t>& k) {
  require_n(norms, n, "factorial_moment");
  std::int64_t used = 0;
  double lv = 0.0;
  for (const auto& [j, kj] : k) {
    if (j < 1 || kj < 0) throw ConfigError("factorial_moment: need j >= 1 and k_j >= 0");
    if (kj == 0) continue;
    if (static_cast<std::size_t>(j) > n) throw ConfigError("factorial_moment: sum of j k_j exceeds n");
    used += j * kj;
    lv += static_cast<double>(kj) *
          (norms.weights().log_theta(static_cast<std::size_t>(j)) - std::log(static_cast<double>(j)));
  }
  if (used > static_cast<std::int64_t>(n)) {
    throw ConfigError(fmt::format("factorial_moment: sum of j k_j = {} exceeds n = {}", used, n));
  }
  if (lv == kNegInf) return kNegInf;
  return lv + norms.log_h(n - static_cast<std::size_t>(used)) - norms.log_h(n);
}

double factorial_moment(const NormTable& norms, std::size_t n, const std::map<std::int64_t, std::int64_t>& k) {
  return std::exp(log_factorial_moment(norms, n, k));
}

Pmf dist_Rj(const NormTable& norms, std::size_t n, std::size_t j) {
  require_n(norms, n, "dist_Rj");
  if (j < 1 || j > n) throw ConfigError(fmt::format("dist_Rj: j = {} outside [1, {}]", j, n));
  const auto& w = norms.weights();

  std::vector<double> without_j(w.log_thetas(n).begin(), w.log_thetas(n).end());
  without_j[j - 1] = kNegInf;
  const std::vector<double> lg = norm_recursion(without_j, n);

  const double mark = w.log_theta(j) - std::log(static_cast<double>(j));
  const std::size_t kmax = n / j;
  Pmf pmf;
  pmf.label = fmt::format("R_{}", j);
  pmf.support.resize(kmax + 1);
  pmf.log_prob.resize(kmax + 1);
  for (std::size_t k = 0; k <= kmax; ++k) {
    pmf.support[k] = static_cast<std::int64_t>(k);
    const double kd = static_cast<double>(k);
    const double marked = k == 0 ? 0.0 : kd * mark;
    pmf.log_prob[k] = marked - std::lgamma(kd + 1.0) + lg[n - j * k] - norms.log_h(n);
  }
  return pmf;
}

InclusionExclusionPmf dist_Rj_inclusion_exclusion(const NormTable& norms, std::size_t n, std::size_t j) {
  require_n(norms, n, "dist_Rj_inclusion_exclusion");
  if (j < 1 || j > n) throw ConfigError(fmt::format("dist_Rj: j = {} outside [1, {}]", j, n));
  const double mark = norms.weights().log_theta(j) - std::log(static_cast<double>(j));
  const std::size_t kmax = n / j;

  InclusionExclusionPmf out;
  out.pmf.label = fmt::format("R_{}", j);
  out.reliable.assign(kmax + 1, true);
  std::vector<double> terms;
  std::vector<double> magnitudes;
  for (std::size_t k = 0; k <= kmax; ++k) {
    out.pmf.support.push_back(static_cast<std::int64_t>(k));
    if (mark == kNegInf) {
      out.pmf.log_prob.push_back(k == 0 ? 0.0 : kNegInf);
      continue;
    }
    terms.clear();
    magnitudes.clear();
    for (std::size_t i = 0; k + i <= kmax; ++i) {
      const double ki = static_cast<double>(k + i);
      const double lg = std::lgamma(static_cast<double>(k) + 1.0) + std::lgamma(static_cast<double>(i) + 1.0);
      const double lh = norms.log_h(n - j * (k + i));
      terms.push_back(ki * mark - lg + lh - norms.log_h(n));
      // Size of the pieces entering the log term, which sets its absolute rounding error.
      magnitudes.push_back(std::max({1.0, std::abs(ki * mark), lg, std::abs(lh), std::abs(norms.log_h(n))}));
    }
    const double top = *std::max_element(terms.begin(), terms.end());
    CompensatedSum s;
    double error = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const double t = std::exp(terms[i] - top);
      s.add(i % 2 == 0 ? t : -t);
      error += t * 1e-14 * magnitudes[i];
    }
    const double scaled = s.value();
    // Cancellation amplifies the rounding error of the individual terms.
    const double error_estimate = scaled > 0.0 ? error / scaled : 1.0;
    if (!(scaled > 1e-12) || error_estimate > 1e-10) out.reliable[k] = false;
    out.pmf.log_prob.push_back(scaled > 0.0 ? top + std::log(scaled) : kNegInf);
  }
  return out;
}

Pmf dist_K(const NormTable& norms, std::size_t n, const DistKOptions& options) {
  require_n(norms, n, "dist_K");
  const auto lt = norms.weights().log_thetas(n);
  const double log_hn = norms.log_h(n);

  std::vector<double> prev(n + 1, kNegInf);
  std::vector<double> cur(n + 1, kNegInf);
  prev[0] = 0.0;

  Pmf pmf;
  pmf.label = "K";
  double work = 0.0;
  double captured = 0.0;
  double last_p = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double span = static_cast<double>(n - k + 1);
    work += span * (span + 1.0) / 2.0;
    if (work > options.work_budget) {
      throw NumericError(fmt::format("dist_K: work budget {:g} exceeded at level {} (n = {})",
                                     options.work_budget, k, n));
    }
    std::fill(cur.begin(), cur.begin() + static_cast<std::ptrdiff_t>(k), kNegInf);
    for (std::size_t m = k; m <= n; ++m) {
      const std::size_t len = m - k + 1;
      cur[m] = -std::log(static_cast<double>(m)) + simd::log_convolve(lt.first(len), {prev.data() + (k - 1), len});
    }
    const double lp = cur[n] - log_hn;
    pmf.support.push_back(static_cast<std::int64_t>(k));
    pmf.log_prob.push_back(lp);
    const double p = std::exp(lp);
    captured += p;
    if (k > 1 && p < options.tail_probability && p < last_p && captured > 1.0 - 1e-13) break;
    last_p = p;
    std::swap(prev, cur);
  }
  return pmf;
}

double total_variation(const Pmf& a, const Pmf& b) {
  CompensatedSum s;
  std::size_t i = 0;
  std::size_t k = 0;
  while (i < a.size() || k < b.size()) {
    if (k == b.size() || (i < a.size() && a.support[i] < b.support[k])) {
      s.add(a.probability(i++));
    } else if (i == a.size() || b.support[k] < a.support[i]) {
      s.add(b.probability(k++));
    } else {
      s.add(std::abs(a.probability(i++) - b.probability(k++)));
    }
  }
  return 0.5 * s.value();
}

}  // namespace cycleweights

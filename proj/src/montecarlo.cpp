#include "cycleweights/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>

#include <fmt/format.h>

#include "cycleweights/errors.hpp"
#include "cycleweights/special.hpp"

namespace cycleweights {

namespace {

constexpr double kMassTolerance = 1e-10;
constexpr std::size_t kMaxSamples = 100'000'000;

std::int64_t draw_length(const NormTable& norms, std::size_t m, double u) {
  const WeightTable& w = norms.weights();
  const double log_norm = std::log(static_cast<double>(m)) + norms.log_h(m);
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t l = 1; l <= m; ++l) {
    const double lp = w.log_theta(l) + norms.log_h(m - l) - log_norm;
    if (lp == kNegInf) continue;
    cumulative += std::exp(lp);
    last_positive = l;
    if (u < cumulative) return static_cast<std::int64_t>(l);
  }
  if (last_positive == 0 || std::abs(cumulative - 1.0) > kMassTolerance) {
    throw NumericError(fmt::format("inconsistent norms table: cycle-length pmf at m = {} has mass {}", m, cumulative));
  }
  return static_cast<std::int64_t>(last_positive);
}

double sample_sd(double sum, double sum_sq, double count) {
  if (count < 2.0) return 0.0;
  const double mean = sum / count;
  return std::sqrt(std::max(0.0, (sum_sq - count * mean * mean) / (count - 1.0)));
}

}  // namespace

SampleRecord sample_cycle_type(const NormTable& norms, std::size_t n, CounterStream& rng) {
  if (n < 1 || n > norms.size()) {
    throw ConfigError(fmt::format("sample_cycle_type: n = {} outside 1..{}", n, norms.size()));
  }
  if (norms.log_h(n) == kNegInf) throw ConfigError(fmt::format("sample_cycle_type: h_{} = 0", n));
  SampleRecord rec;
  rec.cycle_type.n = static_cast<std::int64_t>(n);
  std::size_t m = n;
  while (m > 0) {
    const std::int64_t l = draw_length(norms, m, rng.uniform());
    rec.ordered_lengths.push_back(l);
    ++rec.cycle_type.counts[l];
    m -= static_cast<std::size_t>(l);
  }
  rec.K = static_cast<std::int64_t>(rec.ordered_lengths.size());
  rec.sorted_lengths = rec.ordered_lengths;
  std::sort(rec.sorted_lengths.begin(), rec.sorted_lengths.end(), std::greater<>());
  rec.cycle_type.validate();
  return rec;
}

std::int64_t inverse_cdf_draw(const Pmf& pmf, CounterStream& rng) {
  if (pmf.size() == 0) throw ConfigError("inverse_cdf_draw: empty pmf");
  const double total = std::exp(pmf.log_total());
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw NumericError(fmt::format("inverse_cdf_draw: pmf mass {} is not normalized", total));
  }
  const double u = rng.uniform();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    if (pmf.log_prob[i] == kNegInf) continue;
    cumulative += std::exp(pmf.log_prob[i]);
    last_positive = i;
    if (u < cumulative) return pmf.support[i];
  }
  return pmf.support[last_positive];
}

std::vector<SampleRecord> sample_batch(const NormTable& norms, std::size_t n, std::size_t num_samples,
                                       std::uint64_t seed, unsigned threads) {
  if (num_samples > kMaxSamples) {
    throw ConfigError(fmt::format("sample budget exceeded: {} > {}", num_samples, kMaxSamples));
  }
  if (n < 1 || n > norms.size()) throw ConfigError(fmt::format("sample_batch: n = {} outside 1..{}", n, norms.size()));
  std::vector<SampleRecord> out(num_samples);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, num_samples)));

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      CounterStream rng(seed, i);
      out[i] = sample_cycle_type(norms, n, rng);
    }
  };
  if (threads <= 1) {
    work(0, num_samples);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> failures(threads);
  const std::size_t chunk = (num_samples + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = std::min(num_samples, t * chunk);
    const std::size_t end = std::min(num_samples, begin + chunk);
    pool.emplace_back([&, t, begin, end] {
      try {
        work(begin, end);
      } catch (...) {
        failures[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return out;
}

BatchStats summarize(const std::vector<SampleRecord>& samples, std::size_t n, std::uint64_t seed, std::size_t j_max) {
  BatchStats st;
  st.n = n;
  st.num_samples = samples.size();
  st.seed = seed;
  st.j_max = j_max;
  st.digest = 14695981039346656037ull;
  if (samples.empty()) {
    st.error = "no samples";
    return st;
  }
  st.hist_L1.assign(n + 1, 0.0);
  st.hist_K.assign(n + 1, 0.0);
  st.hist_Rj.assign(j_max, std::vector<double>(n + 1, 0.0));

  double sum_l1 = 0, sq_l1 = 0, sum_k = 0, sq_k = 0;
  std::vector<double> sum_r(j_max, 0.0), sq_r(j_max, 0.0);
  auto mix = [&](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      st.digest ^= (v >> (8 * b)) & 0xffu;
      st.digest *= 1099511628211ull;
    }
  };
  for (const SampleRecord& rec : samples) {
    const auto l1 = static_cast<double>(rec.ordered_lengths.front());
    const auto k = static_cast<double>(rec.K);
    st.hist_L1[static_cast<std::size_t>(rec.ordered_lengths.front())] += 1.0;
    st.hist_K[static_cast<std::size_t>(rec.K)] += 1.0;
    sum_l1 += l1;
    sq_l1 += l1 * l1;
    sum_k += k;
    sq_k += k * k;
    for (std::size_t j = 1; j <= j_max; ++j) {
      const auto it = rec.cycle_type.counts.find(static_cast<std::int64_t>(j));
      const std::int64_t r = it == rec.cycle_type.counts.end() ? 0 : it->second;
      st.hist_Rj[j - 1][static_cast<std::size_t>(r)] += 1.0;
      sum_r[j - 1] += static_cast<double>(r);
      sq_r[j - 1] += static_cast<double>(r * r);
    }
    mix(rec.ordered_lengths.size());
    for (std::int64_t l : rec.ordered_lengths) mix(static_cast<std::uint64_t>(l));
  }
  const double count = static_cast<double>(samples.size());
  const double root = std::sqrt(count);
  auto normalize = [count](std::vector<double>& h) {
    for (double& v : h) v /= count;
  };
  normalize(st.hist_L1);
  normalize(st.hist_K);
  for (auto& h : st.hist_Rj) normalize(h);
  st.L1 = {sum_l1 / count, sample_sd(sum_l1, sq_l1, count) / root};
  st.K = {sum_k / count, sample_sd(sum_k, sq_k, count) / root};
  for (std::size_t j = 0; j < j_max; ++j) st.Rj.push_back({sum_r[j] / count, sample_sd(sum_r[j], sq_r[j], count) / root});
  return st;
}

BatchStats run_batch(const NormTable& norms, std::size_t n, std::size_t num_samples, std::uint64_t seed,
                     std::size_t j_max, unsigned threads) {
  if (j_max > n) throw ConfigError(fmt::format("j_max = {} exceeds n = {}", j_max, n));
  return summarize(sample_batch(norms, n, num_samples, seed, threads), n, seed, j_max);
}

Pmf histogram_pmf(const std::vector<double>& hist, std::string label) {
  Pmf pmf;
  pmf.label = std::move(label);
  for (std::size_t k = 0; k < hist.size(); ++k) {
    if (hist[k] <= 0.0) continue;
    pmf.support.push_back(static_cast<std::int64_t>(k));
    pmf.log_prob.push_back(std::log(hist[k]));
  }
  return pmf;
}

}  // namespace cycleweights

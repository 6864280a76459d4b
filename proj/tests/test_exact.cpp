#include <cmath>
#include <map>

#include <gtest/gtest.h>

#include "cycleweights/errors.hpp"
#include "cycleweights/exact.hpp"
#include "oracle.hpp"
#include "presets.hpp"

namespace cw = cycleweights;

namespace {

void expect_rel(double got, long double want, double tol, const std::string& what) {
  const double w = static_cast<double>(want);
  EXPECT_LE(std::abs(got - w), tol * std::abs(w) + 1e-300) << what << " got " << got << " want " << w;
}

// Every pmf value, including zeros, compared against an oracle map.
void expect_pmf(const cw::Pmf& pmf, const std::map<int, long double>& want, const std::string& what) {
  double total = 0;
  for (std::size_t i = 0; i < pmf.size(); ++i) total += pmf.probability(i);
  EXPECT_NEAR(total, 1.0, 1e-10) << what;
  for (const auto& [k, p] : want) expect_rel(pmf.probability_of(k), p, 1e-10, what + " k=" + std::to_string(k));
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    if (!want.count(static_cast<int>(pmf.support[i]))) {
      EXPECT_EQ(pmf.probability(i), 0.0) << what << " unexpected k=" << pmf.support[i];
    }
  }
}

// Enumerates every k with sum_j j k_j <= n.
void for_each_moment(int n, int j, std::map<int, int>& k, int budget, const std::function<void(const std::map<int, int>&)>& f) {
  if (j > n) {
    f(k);
    return;
  }
  for (int kj = 0; j * kj <= budget; ++kj) {
    if (kj > 0) k[j] = kj;
    for_each_moment(n, j + 1, k, budget - j * kj, f);
  }
  k.erase(j);
}

}  // namespace

TEST(ExactOracle, AllFamiliesSmallN) {
  for (const auto& params : presets::all()) {
    const std::string fam(cw::family_name(params.kind));
    const auto w = cw::build_weights(params, 8);
    const auto norms = cw::compute_norms(w, 8);
    EXPECT_EQ(norms.log_h(0), 0.0);
    const auto theta = oracle::linear_weights(w, 8);
    for (int n = 1; n <= 8; ++n) {
      const std::string tag = fam + " n=" + std::to_string(n);
      const auto laws = oracle::laws(theta, n);
      expect_rel(std::exp(norms.log_h(n)), laws.h, 1e-10, tag + " h_n");
      expect_pmf(cw::dist_L1(norms, n), laws.L1, tag + " L1");
      expect_pmf(cw::dist_K(norms, n), laws.K, tag + " K");
      expect_rel(cw::expected_K(norms, n), laws.EK, 1e-10, tag + " E(K)");
      for (int j = 1; j <= n; ++j) {
        expect_pmf(cw::dist_Rj(norms, n, j), laws.Rj.at(j), tag + " R_" + std::to_string(j));
      }
      std::map<int, int> k;
      for_each_moment(n, 1, k, n, [&](const std::map<int, int>& km) {
        std::map<std::int64_t, std::int64_t> arg(km.begin(), km.end());
        const long double want = oracle::factorial_moment(theta, n, km);
        const double got = cw::factorial_moment(norms, n, arg);
        if (want == 0.0L) {
          EXPECT_EQ(got, 0.0) << tag;
        } else {
          expect_rel(got, want, 1e-10, tag + " factorial moment");
        }
      });
    }
  }
}

TEST(ExactOracle, EnumerationMatchesPermutationCount) {
  // With all theta_j = 1 the cycle-type weights are (number of permutations)/n!.
  const std::vector<long double> ones(7, 1.0L);
  long double total = 0;
  for (const auto& t : oracle::enumerate_cycle_types(ones, 6)) total += t.weight;
  EXPECT_NEAR(static_cast<double>(total), 1.0, 1e-15);
  EXPECT_EQ(oracle::enumerate_cycle_types(ones, 6).size(), 11u);  // partitions of 6
}

TEST(Exact, EwensClosedForm) {
  const double theta = 2.0;
  const auto norms = cw::compute_norms(cw::build_weights(cw::FamilyParams::ewens(theta), 500), 500);
  double log_rising = 0.0;  // ln of h_n by h_n = h_{n-1} (theta + n - 1)/n
  for (std::size_t n = 1; n <= 500; ++n) {
    const double nd = static_cast<double>(n);
    log_rising += std::log((theta + nd - 1.0) / nd);
    const double closed = std::lgamma(theta + nd) - std::lgamma(theta) - std::lgamma(nd + 1.0);
    EXPECT_NEAR(norms.log_h(n), closed, 1e-8) << n;
    EXPECT_NEAR(norms.log_h(n), log_rising, 1e-8) << n;
  }
}

TEST(Exact, DocumentedSmallValues) {
  const auto uni = cw::compute_norms(cw::build_weights(cw::FamilyParams::uniform(), 10), 10);
  for (std::size_t n = 0; n <= 10; ++n) EXPECT_NEAR(uni.log_h(n), 0.0, 1e-14);
  EXPECT_NEAR(cw::expected_K(uni, 3), 11.0 / 6.0, 1e-14);
  const auto k3 = cw::dist_K(uni, 3);
  EXPECT_NEAR(k3.probability_of(1), 2.0 / 6.0, 1e-14);
  EXPECT_NEAR(k3.probability_of(2), 3.0 / 6.0, 1e-14);
  EXPECT_NEAR(k3.probability_of(3), 1.0 / 6.0, 1e-14);
  const auto r1 = cw::dist_Rj(uni, 2, 1);
  EXPECT_NEAR(r1.probability_of(0), 0.5, 1e-15);
  EXPECT_EQ(r1.probability_of(1), 0.0);
  EXPECT_NEAR(r1.probability_of(2), 0.5, 1e-15);

  const auto ew = cw::compute_norms(cw::build_weights(cw::FamilyParams::ewens(2.0), 2), 2);
  EXPECT_NEAR(std::exp(ew.log_h(2)), 3.0, 1e-14);
  EXPECT_NEAR(cw::dist_L1(ew, 2).probability_of(1), 2.0 / 3.0, 1e-14);
  EXPECT_NEAR(cw::expected_K(ew, 2), 5.0 / 3.0, 1e-14);
  EXPECT_NEAR(cw::factorial_moment(ew, 2, {{2, 1}}), 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(cw::factorial_moment(ew, 2, {}), 1.0, 1e-15);
  EXPECT_NEAR(cw::dist_K(ew, 2).probability_of(1), 1.0 / 3.0, 1e-14);
}

TEST(Exact, SumRuleInExpectation) {
  for (const auto& params : presets::all()) {
    if (params.kind == cw::FamilyKind::Custom) continue;
    const auto norms = cw::compute_norms(cw::build_weights(params, 300), 300);
    for (std::size_t n : {1u, 17u, 300u}) {
      double s = 0;
      for (std::size_t j = 1; j <= n; ++j) s += j * cw::factorial_moment(norms, n, {{static_cast<std::int64_t>(j), 1}});
      EXPECT_NEAR(s, static_cast<double>(n), 1e-9 * n) << cw::family_name(params.kind) << " n=" << n;
    }
  }
}

TEST(Exact, RjMeanAndExtremeJ) {
  const auto norms = cw::compute_norms(cw::build_weights(cw::FamilyParams::algebraic(1.0), 200), 200);
  for (std::size_t j : {1u, 3u, 50u}) {
    EXPECT_NEAR(cw::dist_Rj(norms, 200, j).mean(), cw::factorial_moment(norms, 200, {{static_cast<std::int64_t>(j), 1}}),
                1e-10);
  }
  const auto rn = cw::dist_Rj(norms, 200, 200);
  const double p1 = std::exp(norms.weights().log_theta(200) - std::log(200.0) - norms.log_h(200));
  EXPECT_NEAR(rn.probability_of(1), p1, 1e-12);
  EXPECT_NEAR(rn.probability_of(0), 1.0 - p1, 1e-12);
}

TEST(Exact, InclusionExclusionAgreesWithFactorizedPmf) {
  for (const auto& params : presets::all()) {
    if (params.kind == cw::FamilyKind::Custom) continue;
    const auto norms = cw::compute_norms(cw::build_weights(params, 200), 200);
    for (std::size_t n : {20u, 200u}) {
      for (std::size_t j : {1u, 2u, 7u}) {
        const auto marked = cw::dist_Rj(norms, n, j);
        const auto ie = cw::dist_Rj_inclusion_exclusion(norms, n, j);
        double tv = 0, covered = 0;
        for (std::size_t i = 0; i < ie.pmf.size(); ++i) {
          if (!ie.reliable[i]) continue;
          tv += 0.5 * std::abs(ie.pmf.probability(i) - marked.probability_of(ie.pmf.support[i]));
          covered += marked.probability_of(ie.pmf.support[i]);
        }
        EXPECT_LE(tv, 1e-8) << cw::family_name(params.kind) << " n=" << n << " j=" << j;
        // Mild families must not hide behind the reliability flag.
        if (params.kind == cw::FamilyKind::Uniform || params.kind == cw::FamilyKind::Ewens ||
            params.kind == cw::FamilyKind::Algebraic) {
          EXPECT_GE(covered, 0.99) << cw::family_name(params.kind) << " n=" << n << " j=" << j;
        }
      }
    }
  }
}

TEST(Exact, ResidualOfRecursionIsTiny) {
  const auto norms = cw::compute_norms(cw::build_weights(cw::FamilyParams::algebraic(1.0), 2000), 2000);
  EXPECT_LT(norms.max_recursion_residual(), 1e-12);
}

TEST(Exact, CustomZerosGiveZeroNorms) {
  const double ninf = -std::numeric_limits<double>::infinity();
  // Only 2-cycles allowed: h_n = 0 for odd n.
  const auto norms = cw::compute_norms(cw::build_weights(cw::FamilyParams::custom({ninf, 0.0, ninf, ninf, ninf}), 5), 5);
  EXPECT_EQ(norms.log_h(1), ninf);
  EXPECT_EQ(norms.log_h(3), ninf);
  EXPECT_NEAR(std::exp(norms.log_h(4)), 1.0 / 8.0, 1e-15);  // 3 fixed-point-free involutions / 4!
  EXPECT_THROW(cw::dist_L1(norms, 3), cw::NumericError);
}

TEST(Exact, ErrorsOnBadArguments) {
  const auto norms = cw::compute_norms(cw::build_weights(cw::FamilyParams::uniform(), 10), 10);
  EXPECT_THROW(cw::dist_L1(norms, 11), cw::ConfigError);
  EXPECT_THROW(cw::dist_L1(norms, 0), cw::ConfigError);
  EXPECT_THROW(cw::dist_Rj(norms, 5, 6), cw::ConfigError);
  EXPECT_THROW(cw::factorial_moment(norms, 5, {{2, 3}}), cw::ConfigError);
  EXPECT_THROW(cw::compute_norms(cw::build_weights(cw::FamilyParams::uniform(), 10), 11), cw::ConfigError);
  cw::CycleType bad{5, {{2, 1}, {1, 2}}};
  EXPECT_THROW(bad.validate(), cw::ConfigError);
  cw::CycleType good{5, {{2, 1}, {1, 3}}};
  EXPECT_NO_THROW(good.validate());
  EXPECT_EQ(good.num_cycles(), 4);
}

TEST(Exact, OverflowIsReported) {
  // ln h_2 = ln(theta_1^2/2 + theta_2/2) is beyond the double range.
  EXPECT_THROW(cw::compute_norms(cw::build_weights(cw::FamilyParams::custom({1e308, 1.7e308}), 2), 2), cw::NumericError);
}

TEST(Exact, DistKLargeNMatchesMean) {
  const auto norms = cw::compute_norms(cw::build_weights(cw::FamilyParams::ewens(2.0), 3000), 3000);
  const auto k = cw::dist_K(norms, 3000);
  EXPECT_NEAR(k.mean(), cw::expected_K(norms, 3000), 1e-9);
  EXPECT_NEAR(std::exp(k.log_total()), 1.0, 1e-12);
}

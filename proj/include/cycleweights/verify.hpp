#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cycleweights/weights.hpp"

namespace cycleweights {

enum class RowStatus { Pass, Fail, Unsupported };

std::string_view status_name(RowStatus s);

struct VerifyRow {
  std::string claim;
  std::string statistic;
  double distance = 0.0;  // NaN for unsupported rows
  double tolerance = 0.0;
  RowStatus status = RowStatus::Unsupported;
};

struct VerifyOptions {
  std::size_t n = 20000;  // largest n used for exact comparisons
  std::size_t samples = 10000;
  std::size_t sample_n = 10000;  // n used for sampled comparisons
  std::uint64_t seed = 1;
};

/// Compares exact finite-n quantities with the family's limit laws. Pairs with
/// no known law come back as Unsupported rows, never as failures.
std::vector<VerifyRow> verify_family(const FamilyParams& params, const VerifyOptions& options);

}  // namespace cycleweights

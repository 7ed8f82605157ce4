#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dds/odd.hpp"
#include "dds/types.hpp"

namespace dds {

struct BoundInputs {
  double p_hat = 0.0;  // observed incorrect-classification rate
  long n = 0;          // test-set size
  double delta = 0.0;  // confidence parameter
};

/// Upper bound on the true error rate at confidence 1−δ:
/// p̂ + sqrt(2·p̂·ln(1/δ)/n) + 2·ln(1/δ)/n.
/// Valid under the assumption that the samples are i.i.d.
double test_bound(const BoundInputs& in);
double test_bound(double p_hat, long n, double delta);

/// Smallest n with test_bound(p_hat, n, delta) <= target_upper.
long required_test_size(double p_hat, double target_upper, double delta);

/// REC 39: no content digest may appear in more than one split.
std::vector<Finding> check_disjoint(const Manifest& m);

/// REC 43: groups must not span splits; augmented items stay with their parent.
std::vector<Finding> check_group_integrity(const Manifest& m);

struct LeakagePair {
  std::string item_a;  // lexicographically smaller id
  std::string item_b;
  int distance = 0;  // 0 = exact simhash match

  bool operator==(const LeakagePair&) const = default;
  auto operator<=>(const LeakagePair&) const = default;
};

/// Cross-split pairs at Hamming distance <= max_distance over simhash64,
/// found by a banded index (complete for max_distance <= bands−1 by
/// pigeonhole) and verified by exact distance.
std::vector<LeakagePair> near_duplicate_leakage(const Manifest& m, int max_distance,
                                                int bands);

/// Items lacking simhash64 (skipped by the banded index).
long count_missing_simhash(const Manifest& m);

/// REC 42: flags ODD levels that nearly determine a label while that label
/// is not nearly dominant globally.
std::vector<Finding> bias_scan(const Manifest& m, const OddSchema& schema,
                               double purity_threshold, long min_support);

}  // namespace dds

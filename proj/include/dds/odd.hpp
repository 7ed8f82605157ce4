#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dds/types.hpp"

namespace dds {

enum class DimKind { categorical, ordinal, numeric };

std::string to_string(DimKind k);

struct OddDimension {
  std::string name;
  DimKind kind = DimKind::categorical;
  std::vector<std::string> levels;       // categorical / ordinal
  double lo = 0.0, hi = 0.0;             // numeric
  std::vector<double> bins;              // optional numeric bin edges
};

struct OddSchema {
  std::vector<OddDimension> dimensions;
  std::string currency_notes;

  const OddDimension* find(const std::string& name) const;
};

OddSchema load_odd_schema(std::istream& in);
OddSchema odd_schema_from_json(const Json& j);

/// REC 3 structural validity of the declared ODD.
std::vector<Finding> validate_schema(const OddSchema& schema);

enum class MissingDimPolicy { warn, fail };

/// REC 4 / REC 7: every item's odd values resolve against the schema;
/// missing dimensions reported per policy (default warn).
std::vector<Finding> check_traceability(const Manifest& m, const OddSchema& schema,
                                        MissingDimPolicy missing = MissingDimPolicy::warn);

struct CoverageTable {
  struct DimCoverage {
    std::vector<std::string> dims;  // one or two dimension names
    std::map<std::string, long> cells;
    long total = 0;
  };
  std::vector<DimCoverage> per_dims;
  long min_count_threshold = 0;
};

/// REC 5: cell counts per requested dimension (or pair); numeric dimensions
/// are binned by the schema's edges. Untraceable items are excluded.
std::pair<CoverageTable, std::vector<Finding>> coverage(
    const Manifest& m, const OddSchema& schema,
    const std::vector<std::vector<std::string>>& dims, long min_count);

struct ExpectedDistribution {
  std::map<std::string, std::map<std::string, double>> dims;
};

ExpectedDistribution load_expected_distribution(std::istream& in);

/// ½·Σ|p−q| over the union of supports; p and q need not share keys.
double tv_distance(const std::map<std::string, double>& p,
                   const std::map<std::string, double>& q);

/// REC 6: total variation between observed split proportions and the
/// declared operational distribution, per dimension.
std::vector<Finding> proportion_check(const Manifest& m, Split split,
                                      const ExpectedDistribution& expected,
                                      double tv_threshold);

}  // namespace dds

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dds/types.hpp"

namespace dds {

enum class RuleKind { unique, same_object_same_value, in_set, in_range, implies };

std::string to_string(RuleKind k);

struct ConsistencyRule {
  std::string rule_id;
  RuleKind kind = RuleKind::unique;
  // unique / in_set / in_range
  std::string field;
  // same_object_same_value
  std::string object_key_field;
  std::string value_field;
  // in_set
  std::vector<Json> allowed;
  // in_range
  double lo = 0.0, hi = 0.0;
  // implies: field_a == value_a  =>  field_b in allowed_b
  std::string field_a;
  Json value_a;
  std::string field_b;
  std::vector<Json> allowed_b;
};

std::vector<ConsistencyRule> load_rules(std::istream& in);

/// Resolves a rule field name against an item: builtin fields (id, digest,
/// source_id, split, group_id, label), then attrs, then odd values.
std::optional<Json> get_field(const DataItem& item, const std::string& name);

/// REC 14/15/16. Throws UnknownField when a rule names a field that exists
/// on no item and is not a builtin.
std::vector<Finding> check_rules(const Manifest& m, const AnnotationSet& a,
                                 const std::vector<ConsistencyRule>& rules);

/// REC 17: one value kind and one unit tag per attribute across sources.
std::vector<Finding> check_representation(const Manifest& m);

struct DuplicateGroup {
  std::string digest;
  std::vector<std::string> item_ids;  // sorted, size >= 2

  bool operator==(const DuplicateGroup&) const = default;
};

/// Groups of items sharing a content digest (repeats are legal; the
/// rationale is what needs review).
std::vector<DuplicateGroup> group_exact_duplicates(const Manifest& m);

/// Duplicate groups rendered as rec 15 findings (warn when any exist).
std::vector<Finding> duplicate_findings(const std::vector<DuplicateGroup>& groups);

struct OutlierPolicy {
  std::vector<std::string> fields;
  double threshold = 3.5;
  double rel_epsilon = 1e-9;
};

/// REC 12: modified z-score (0.6745·|x−m|/MAD) flags, warn only.
std::vector<Finding> detect_outliers(const Manifest& m, const OutlierPolicy& policy);

}  // namespace dds

#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dds/types.hpp"

namespace dds {

enum class AuditAction { add, modify, remove };

std::string to_string(AuditAction a);

struct AuditLogEntry {
  std::string ts;
  std::string user;
  AuditAction action = AuditAction::add;
  std::vector<std::string> item_ids;
  std::string justification;
  std::string prev_digest;

  bool operator==(const AuditLogEntry&) const = default;
};

std::vector<AuditLogEntry> load_audit_log(std::istream& in);
void serialize_audit_log(const std::vector<AuditLogEntry>& log, std::ostream& out);

/// Canonical bytes hashed into the next entry's prev_digest: the entry as a
/// JSON object, keys sorted, no insignificant whitespace, UTF-8.
std::string canonical_entry_bytes(const AuditLogEntry& e);

/// Convenience for building well-chained logs (fixtures, tooling).
std::vector<AuditLogEntry> chain_entries(std::vector<AuditLogEntry> entries);

/// Answers the item's byte content, or nullopt when unavailable.
using ContentResolver =
    std::function<std::optional<std::string>(const std::string& item_id)>;

/// REC 22/23: recompute each item's digest from resolved content.
std::vector<Finding> verify_item_digests(const Manifest& m,
                                         const ContentResolver& resolver);

/// REC 19: chain, attribution, justification, timestamp monotonicity.
std::vector<Finding> verify_audit_chain(const std::vector<AuditLogEntry>& log);

struct SealCommitment {
  Split split = Split::test;
  std::uint64_t item_count = 0;
  std::string commitment;
  std::string sealed_at;

  bool operator==(const SealCommitment&) const = default;
};

/// REC 40 commit-then-reveal: digest over the split's lexicographically
/// sorted item digests, each followed by a single newline.
SealCommitment seal_split(const Manifest& m, Split split,
                          const std::string& sealed_at);

Finding verify_seal(const Manifest& m, const SealCommitment& c);

SealCommitment load_seal(std::istream& in);
void serialize_seal(const SealCommitment& c, std::ostream& out);

}  // namespace dds

#include "dds/integrity.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "dds/digest.hpp"
#include "dds/errors.hpp"

namespace dds {

std::string to_string(AuditAction a) {
  switch (a) {
    case AuditAction::add: return "add";
    case AuditAction::modify: return "modify";
    case AuditAction::remove: return "remove";
  }
  return "modify";
}

namespace {

AuditAction action_from_string(const std::string& s, long lineno) {
  if (s == "add") return AuditAction::add;
  if (s == "modify") return AuditAction::modify;
  if (s == "remove") return AuditAction::remove;
  throw ParseError(lineno, "unknown audit action: " + s);
}

Json entry_to_json(const AuditLogEntry& e) {
  Json j = Json::object();
  j["ts"] = e.ts;
  j["user"] = e.user;
  j["action"] = to_string(e.action);
  j["item_ids"] = e.item_ids;
  j["justification"] = e.justification;
  j["prev_digest"] = e.prev_digest;
  return j;
}

}  // namespace

std::vector<AuditLogEntry> load_audit_log(std::istream& in) {
  std::vector<AuditLogEntry> out;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw ParseError(lineno, "invalid JSON object");
    AuditLogEntry e;
    try {
      e.ts = j.at("ts").get<std::string>();
      e.user = j.at("user").get<std::string>();
      e.action = action_from_string(j.at("action").get<std::string>(), lineno);
      e.item_ids = j.at("item_ids").get<std::vector<std::string>>();
      e.justification = j.at("justification").get<std::string>();
      e.prev_digest = j.at("prev_digest").get<std::string>();
    } catch (const Json::exception& ex) {
      throw ParseError(lineno, ex.what());
    }
    if (!is_utc_timestamp(e.ts))
      throw ParseError(lineno, "ts must be UTC ISO-8601 with seconds");
    out.push_back(std::move(e));
  }
  return out;
}

void serialize_audit_log(const std::vector<AuditLogEntry>& log, std::ostream& out) {
  for (const auto& e : log) out << entry_to_json(e).dump() << '\n';
}

std::string canonical_entry_bytes(const AuditLogEntry& e) {
  // nlohmann objects iterate in key order; dump() is compact.
  return entry_to_json(e).dump();
}

std::vector<AuditLogEntry> chain_entries(std::vector<AuditLogEntry> entries) {
  std::string prev = zero_digest();
  for (auto& e : entries) {
    e.prev_digest = prev;
    prev = digest_of(canonical_entry_bytes(e));
  }
  return entries;
}

std::vector<Finding> verify_item_digests(const Manifest& m,
                                         const ContentResolver& resolver) {
  std::vector<Finding> out;
  std::vector<std::string> missing;
  std::vector<std::string> mismatched;
  for (const auto& it : m.items) {
    auto content = resolver(it.id);
    if (!content) {
      missing.push_back(it.id);
      continue;
    }
    if (digest_of(*content) != it.digest) mismatched.push_back(it.id);
  }
  for (const auto& id : mismatched)
    out.push_back(make_finding(22, Status::fail,
                               "recomputed digest differs from recorded digest",
                               {id}));
  for (const auto& id : missing)
    out.push_back(make_finding(22, Status::fail, "content unavailable", {id}));
  if (mismatched.empty() && missing.empty())
    out.push_back(make_finding(22, Status::pass, "all item digests verified", {},
                               {{"items", double(m.items.size())}}));
  // REC 23: the post-transmission check is the same verification, summarized.
  if (mismatched.empty() && missing.empty())
    out.push_back(make_finding(23, Status::pass,
                               "dataset integrity verified against content"));
  else
    out.push_back(make_finding(
        23, Status::fail,
        std::to_string(mismatched.size() + missing.size()) +
            " item(s) failed integrity verification",
        {}, {{"mismatched", double(mismatched.size())},
             {"unavailable", double(missing.size())}}));
  return out;
}

std::vector<Finding> verify_audit_chain(const std::vector<AuditLogEntry>& log) {
  if (log.empty())
    return {make_finding(19, Status::warn, "no modification history")};
  std::vector<Finding> out;
  std::string expected = zero_digest();
  bool ok = true;
  for (std::size_t i = 0; i < log.size(); ++i) {
    const auto& e = log[i];
    if (e.prev_digest != expected) {
      out.push_back(make_finding(19, Status::fail,
                                 "chain broken at index " + std::to_string(i)));
      ok = false;
      break;
    }
    if (e.user.empty()) {
      out.push_back(make_finding(19, Status::fail,
                                 "entry " + std::to_string(i) + " has empty user"));
      ok = false;
    }
    if (e.justification.empty()) {
      out.push_back(make_finding(
          19, Status::fail, "entry " + std::to_string(i) + " lacks justification"));
      ok = false;
    }
    if (i > 0 && e.ts < log[i - 1].ts) {
      out.push_back(make_finding(
          19, Status::fail,
          "timestamps not monotone at index " + std::to_string(i)));
      ok = false;
    }
    expected = digest_of(canonical_entry_bytes(e));
  }
  if (ok)
    out.push_back(make_finding(19, Status::pass,
                               "audit chain verified", {},
                               {{"entries", double(log.size())}}));
  return out;
}

SealCommitment seal_split(const Manifest& m, Split split,
                          const std::string& sealed_at) {
  std::vector<std::string> digests;
  for (const auto& it : m.items)
    if (it.split == split) digests.push_back(it.digest);
  if (digests.empty()) throw EmptySplit(to_string(split));
  std::sort(digests.begin(), digests.end());
  std::string bytes;
  for (const auto& d : digests) {
    bytes += d;
    bytes += '\n';
  }
  SealCommitment c;
  c.split = split;
  c.item_count = digests.size();
  c.commitment = digest_of(bytes);
  c.sealed_at = sealed_at;
  return c;
}

Finding verify_seal(const Manifest& m, const SealCommitment& c) {
  std::uint64_t count = 0;
  for (const auto& it : m.items)
    if (it.split == c.split) ++count;
  if (count != c.item_count)
    return make_finding(40, Status::fail,
                        "item count mismatch: sealed " +
                            std::to_string(c.item_count) + ", manifest has " +
                            std::to_string(count),
                        {}, {{"sealed_count", double(c.item_count)},
                             {"manifest_count", double(count)}});
  SealCommitment recomputed = seal_split(m, c.split, c.sealed_at);
  if (recomputed.commitment != c.commitment)
    return make_finding(40, Status::fail, "seal commitment mismatch");
  return make_finding(40, Status::pass,
                      "seal verified for split " + to_string(c.split), {},
                      {{"item_count", double(c.item_count)}});
}

SealCommitment load_seal(std::istream& in) {
  Json j = Json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw ParseError(1, "seal file must be a JSON object");
  SealCommitment c;
  try {
    auto sp = split_from_string(j.at("split").get<std::string>());
    if (!sp) throw ParseError(1, "unknown split in seal");
    c.split = *sp;
    c.item_count = j.at("item_count").get<std::uint64_t>();
    c.commitment = j.at("commitment").get<std::string>();
    c.sealed_at = j.at("sealed_at").get<std::string>();
  } catch (const Json::exception& ex) {
    throw ParseError(1, ex.what());
  }
  if (c.item_count == 0) throw ParseError(1, "seal item_count must be positive");
  if (!is_valid_digest(c.commitment)) throw ParseError(1, "malformed commitment");
  return c;
}

void serialize_seal(const SealCommitment& c, std::ostream& out) {
  Json j = Json::object();
  j["split"] = to_string(c.split);
  j["item_count"] = c.item_count;
  j["commitment"] = c.commitment;
  j["sealed_at"] = c.sealed_at;
  out << j.dump() << '\n';
}

}  // namespace dds

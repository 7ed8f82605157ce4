#include "dds/types.hpp"

namespace dds {

std::string to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::validation: return "validation";
    case Split::test: return "test";
    case Split::unassigned: return "unassigned";
  }
  return "unassigned";
}

std::optional<Split> split_from_string(const std::string& s) {
  if (s == "train") return Split::train;
  if (s == "validation") return Split::validation;
  if (s == "test") return Split::test;
  if (s == "unassigned") return Split::unassigned;
  return std::nullopt;
}

std::string to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::warn: return "warn";
    case Status::fail: return "fail";
    case Status::manual_pending: return "manual_pending";
    case Status::attested_pass: return "attested_pass";
    case Status::attested_fail: return "attested_fail";
    case Status::not_applicable: return "not_applicable";
  }
  return "fail";
}

std::optional<Status> status_from_string(const std::string& s) {
  if (s == "pass") return Status::pass;
  if (s == "warn") return Status::warn;
  if (s == "fail") return Status::fail;
  if (s == "manual_pending") return Status::manual_pending;
  if (s == "attested_pass") return Status::attested_pass;
  if (s == "attested_fail") return Status::attested_fail;
  if (s == "not_applicable") return Status::not_applicable;
  return std::nullopt;
}

int severity(Status s) {
  switch (s) {
    case Status::fail: return 6;
    case Status::attested_fail: return 5;
    case Status::manual_pending: return 4;
    case Status::warn: return 3;
    case Status::not_applicable: return 2;
    case Status::attested_pass: return 1;
    case Status::pass: return 0;
  }
  return 6;
}

Status worst(Status a, Status b) { return severity(a) >= severity(b) ? a : b; }

Finding make_finding(int rec, Status st, std::string msg,
                     std::vector<std::string> evidence,
                     std::map<std::string, double> metrics) {
  return Finding{rec, st, std::move(msg), std::move(evidence), std::move(metrics)};
}

const DataItem* Manifest::find(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &items[it->second];
}

void Manifest::rebuild_index() {
  index_.clear();
  index_.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) index_.emplace(items[i].id, i);
}

std::string to_string(AnnotationMethod m) {
  return m == AnnotationMethod::manual ? "manual" : "automatic";
}

std::string to_string(AttestationStatus s) {
  switch (s) {
    case AttestationStatus::attested_pass: return "attested_pass";
    case AttestationStatus::attested_fail: return "attested_fail";
    case AttestationStatus::not_applicable: return "not_applicable";
  }
  return "attested_fail";
}

Status to_status(AttestationStatus s) {
  switch (s) {
    case AttestationStatus::attested_pass: return Status::attested_pass;
    case AttestationStatus::attested_fail: return Status::attested_fail;
    case AttestationStatus::not_applicable: return Status::not_applicable;
  }
  return Status::attested_fail;
}

bool is_utc_timestamp(const std::string& s) {
  // YYYY-MM-DDThh:mm:ssZ
  if (s.size() != 20 || s[4] != '-' || s[7] != '-' || s[10] != 'T' ||
      s[13] != ':' || s[16] != ':' || s[19] != 'Z')
    return false;
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u, 11u, 12u, 14u, 15u, 17u, 18u})
    if (!digit(s[i])) return false;
  auto two = [&](std::size_t i) { return (s[i] - '0') * 10 + (s[i + 1] - '0'); };
  int mo = two(5), d = two(8), h = two(11), mi = two(14), sec = two(17);
  return mo >= 1 && mo <= 12 && d >= 1 && d <= 31 && h <= 23 && mi <= 59 && sec <= 60;
}

}  // namespace dds

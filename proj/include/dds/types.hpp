#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace dds {

using Json = nlohmann::json;

enum class Split { train, validation, test, unassigned };

std::string to_string(Split s);
std::optional<Split> split_from_string(const std::string& s);

enum class Status {
  pass,
  warn,
  fail,
  manual_pending,
  attested_pass,
  attested_fail,
  not_applicable,
};

std::string to_string(Status s);
std::optional<Status> status_from_string(const std::string& s);

/// Larger value = worse. Order (worst to best):
/// fail > attested_fail > manual_pending > warn > not_applicable > attested_pass > pass.
int severity(Status s);
Status worst(Status a, Status b);

struct Finding {
  int rec_id = 0;
  Status status = Status::pass;
  std::string message;
  std::vector<std::string> evidence;
  std::map<std::string, double> metrics;

  bool operator==(const Finding&) const = default;
};

Finding make_finding(int rec, Status st, std::string msg,
                     std::vector<std::string> evidence = {},
                     std::map<std::string, double> metrics = {});

struct SourceDecl {
  std::string source_id;
  std::string description;
  std::string acquisition_config_version;

  bool operator==(const SourceDecl&) const = default;
};

struct ManifestHeader {
  std::string schema_version;
  std::string dataset_id;
  std::string created;  // UTC ISO-8601, seconds precision
  std::vector<SourceDecl> sources;

  bool operator==(const ManifestHeader&) const = default;
};

struct TransformStep {
  std::string op_name;
  Json params = Json::object();
  std::string tool_version;

  bool operator==(const TransformStep&) const = default;
};

struct Lineage {
  std::optional<std::string> raw_uri;
  bool is_raw = true;
  std::vector<TransformStep> transforms;

  bool operator==(const Lineage&) const = default;
};

struct DataItem {
  std::string id;
  std::string digest;  // "sha256:" + 64 lowercase hex
  std::string source_id;
  Split split = Split::unassigned;
  std::optional<std::string> group_id;
  std::map<std::string, Json> odd;
  Lineage lineage;
  bool ambiguous = false;
  std::optional<std::uint64_t> simhash64;
  std::optional<std::string> label;
  std::map<std::string, Json> attrs;

  bool operator==(const DataItem&) const = default;
};

struct Manifest {
  ManifestHeader header;
  std::vector<DataItem> items;

  const DataItem* find(const std::string& id) const;
  void rebuild_index();

  bool operator==(const Manifest& o) const {
    return header == o.header && items == o.items;
  }

 private:
  std::unordered_map<std::string, std::size_t> index_;
};

enum class AnnotationMethod { manual, automatic };

std::string to_string(AnnotationMethod m);

struct AnnotationRecord {
  std::string item_id;
  std::string annotator;
  std::string label;
  std::string at;  // UTC ISO-8601
  long seq = 0;
  long storage_index = 0;
  AnnotationMethod method = AnnotationMethod::manual;

  bool operator==(const AnnotationRecord&) const = default;
};

struct AnnotationSet {
  std::vector<AnnotationRecord> records;

  bool operator==(const AnnotationSet&) const = default;
};

enum class AttestationStatus { attested_pass, attested_fail, not_applicable };

std::string to_string(AttestationStatus s);
Status to_status(AttestationStatus s);

struct AttestationRecord {
  int rec_id = 0;
  AttestationStatus status = AttestationStatus::attested_pass;
  std::string by;
  std::string date;
  std::string note;

  bool operator==(const AttestationRecord&) const = default;
};

/// Strict "YYYY-MM-DDThh:mm:ssZ" (seconds precision, Zulu only).
bool is_utc_timestamp(const std::string& s);

}  // namespace dds

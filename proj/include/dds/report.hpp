#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "dds/types.hpp"

namespace dds {

inline constexpr int kRecCount = 44;
inline constexpr const char* kToolVersion = "dds-gate 1.0.0";
inline constexpr const char* kReportSchemaVersion = "dds-report/1";

enum class RecMode { automated, attested, hybrid };

std::string to_string(RecMode m);

struct RecInfo {
  int id;
  RecMode mode;
  const char* title;
};

const std::array<RecInfo, kRecCount>& rec_registry();
const RecInfo& rec_info(int rec_id);

struct ReportEntry {
  int rec_id = 0;
  RecMode mode = RecMode::automated;
  Status status = Status::manual_pending;
  std::string message;
  std::vector<std::string> evidence;
  std::map<std::string, double> metrics;
  // Hybrid entries keep both halves visible.
  std::optional<Status> automated_status;
  std::optional<Status> attested_status;
  std::optional<AttestationRecord> attestation;

  bool operator==(const ReportEntry&) const = default;
};

struct ComplianceReport {
  std::string dataset_id;
  std::string generated_at;
  std::string tool_version = kToolVersion;
  std::vector<ReportEntry> entries;  // exactly 44, ordered by rec_id
  std::map<std::string, long> summary;
  int exit_code = 0;
  bool lenient = false;

  bool operator==(const ComplianceReport&) const = default;
};

/// Merges automated findings and manual attestations into a total map over
/// REC 1–44. Missing evidence on either side becomes manual_pending.
ComplianceReport assemble(const std::vector<Finding>& findings,
                          const std::vector<AttestationRecord>& attestations,
                          const std::string& dataset_id,
                          const std::string& generated_at, bool lenient = false);

enum class ReportFormat { json, text };

/// json is canonical: sorted keys, metrics at fixed 9-decimal formatting,
/// byte-identical across runs and platforms for equal reports.
std::string render(const ComplianceReport& report, ReportFormat format);

/// Fixed-point float formatting used in the canonical rendering.
std::string format_metric(double v);

std::vector<Finding> findings_from_json(const Json& j);
Json findings_to_json(const std::vector<Finding>& findings);

}  // namespace dds

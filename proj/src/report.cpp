#include "dds/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "dds/errors.hpp"

namespace dds {

std::string to_string(RecMode m) {
  switch (m) {
    case RecMode::automated: return "automated";
    case RecMode::attested: return "attested";
    case RecMode::hybrid: return "hybrid";
  }
  return "automated";
}

const std::array<RecInfo, kRecCount>& rec_registry() {
  static const std::array<RecInfo, kRecCount> registry = {{
      {1, RecMode::attested, "Acquisition chain fidelity"},
      {2, RecMode::attested, "Validation on operational acquisition chain"},
      {3, RecMode::attested, "ODD definition and provenance"},
      {4, RecMode::automated, "ODD traceability of items"},
      {5, RecMode::automated, "Coverage of operational situations"},
      {6, RecMode::automated, "Operational proportions"},
      {7, RecMode::hybrid, "ODD condition completeness"},
      {8, RecMode::automated, "Data regenerability"},
      {9, RecMode::automated, "Acquisition configuration management"},
      {10, RecMode::attested, "Acquisition chain deltas quantified"},
      {11, RecMode::attested, "Processing degradation quantified"},
      {12, RecMode::automated, "Outlier screening"},
      {13, RecMode::attested, "Source reliability assessment"},
      {14, RecMode::automated, "Consistency constraints declared"},
      {15, RecMode::automated, "Consistency constraints verified"},
      {16, RecMode::automated, "Object attribute consistency"},
      {17, RecMode::automated, "Uniform value representation"},
      {18, RecMode::attested, "Role-based access control"},
      {19, RecMode::automated, "Modification audit trail"},
      {20, RecMode::attested, "Write-access protocol"},
      {21, RecMode::attested, "Modification notifications"},
      {22, RecMode::automated, "Content integrity digests"},
      {23, RecMode::automated, "Post-transmission integrity check"},
      {24, RecMode::attested, "Bias-aware dataset specification"},
      {25, RecMode::attested, "Post-acquisition compliance check"},
      {26, RecMode::attested, "Expert label accuracy review"},
      {27, RecMode::automated, "Consistent object labelling"},
      {28, RecMode::hybrid, "Expert ambiguity review"},
      {29, RecMode::automated, "Label consistency and accuracy"},
      {30, RecMode::attested, "Expert-led label correction"},
      {31, RecMode::automated, "Manual labelling of ambiguous data"},
      {32, RecMode::attested, "Automatic labelling workflow assessment"},
      {33, RecMode::attested, "Annotator ability assessment"},
      {34, RecMode::attested, "Validated annotation instructions"},
      {35, RecMode::hybrid, "Annotation audit sample size"},
      {36, RecMode::automated, "Identical-label run check"},
      {37, RecMode::automated, "Randomized annotation assignment"},
      {38, RecMode::automated, "Annotation attribution"},
      {39, RecMode::automated, "Train/test disjointness"},
      {40, RecMode::hybrid, "Test-set secrecy commitment"},
      {41, RecMode::attested, "Train/test team information flow"},
      {42, RecMode::automated, "Automated bias detection"},
      {43, RecMode::automated, "Cross-split redundancy avoidance"},
      {44, RecMode::automated, "Test-set size bound"},
  }};
  return registry;
}

const RecInfo& rec_info(int rec_id) {
  if (rec_id < 1 || rec_id > kRecCount)
    throw RegistryViolation("rec_id out of range: " + std::to_string(rec_id));
  return rec_registry()[std::size_t(rec_id - 1)];
}

ComplianceReport assemble(const std::vector<Finding>& findings,
                          const std::vector<AttestationRecord>& attestations,
                          const std::string& dataset_id,
                          const std::string& generated_at, bool lenient) {
  std::array<std::vector<const Finding*>, kRecCount> per_rec_findings{};
  for (const auto& f : findings) {
    const RecInfo& info = rec_info(f.rec_id);
    if (info.mode == RecMode::attested)
      throw RegistryViolation("finding for purely attested REC " +
                              std::to_string(f.rec_id));
    per_rec_findings[std::size_t(f.rec_id - 1)].push_back(&f);
  }
  std::array<std::vector<const AttestationRecord*>, kRecCount> per_rec_att{};
  for (const auto& a : attestations) {
    const RecInfo& info = rec_info(a.rec_id);
    if (info.mode == RecMode::automated)
      throw RegistryViolation("attestation for purely automated REC " +
                              std::to_string(a.rec_id));
    per_rec_att[std::size_t(a.rec_id - 1)].push_back(&a);
  }

  ComplianceReport report;
  report.dataset_id = dataset_id;
  report.generated_at = generated_at;
  report.lenient = lenient;

  for (const RecInfo& info : rec_registry()) {
    ReportEntry e;
    e.rec_id = info.id;
    e.mode = info.mode;

    auto fs = per_rec_findings[std::size_t(info.id - 1)];
    std::sort(fs.begin(), fs.end(), [](const Finding* a, const Finding* b) {
      if (severity(a->status) != severity(b->status))
        return severity(a->status) > severity(b->status);
      if (a->message != b->message) return a->message < b->message;
      return a->evidence < b->evidence;
    });
    std::optional<Status> automated;
    if (!fs.empty()) {
      automated = fs.front()->status;
      std::vector<std::string> msgs;
      for (const Finding* f : fs) {
        automated = worst(*automated, f->status);
        if (std::find(msgs.begin(), msgs.end(), f->message) == msgs.end())
          msgs.push_back(f->message);
        for (const auto& ev : f->evidence) e.evidence.push_back(ev);
        for (const auto& [k, v] : f->metrics) e.metrics.emplace(k, v);
      }
      std::sort(e.evidence.begin(), e.evidence.end());
      e.evidence.erase(std::unique(e.evidence.begin(), e.evidence.end()),
                       e.evidence.end());
      std::string joined;
      for (const auto& msg : msgs) {
        if (!joined.empty()) joined += "; ";
        joined += msg;
      }
      e.message = joined;
    }

    const auto& as = per_rec_att[std::size_t(info.id - 1)];
    std::optional<Status> attested;
    if (!as.empty()) {
      const AttestationRecord* worst_att = as.front();
      for (const AttestationRecord* a : as)
        if (severity(to_status(a->status)) > severity(to_status(worst_att->status)))
          worst_att = a;
      attested = to_status(worst_att->status);
      e.attestation = *worst_att;
    }

    switch (info.mode) {
      case RecMode::automated:
        e.status = automated.value_or(Status::manual_pending);
        if (!automated) e.message = "check not run";
        e.automated_status = e.status;
        break;
      case RecMode::attested:
        e.status = attested.value_or(Status::manual_pending);
        if (!attested) e.message = "attestation missing";
        e.attested_status = e.status;
        break;
      case RecMode::hybrid: {
        Status a_half = automated.value_or(Status::manual_pending);
        Status t_half = attested.value_or(Status::manual_pending);
        e.automated_status = a_half;
        e.attested_status = t_half;
        e.status = worst(a_half, t_half);
        if (!automated)
          e.message = e.message.empty() ? "check not run" : e.message;
        if (!attested)
          e.message += (e.message.empty() ? "" : "; ") + std::string("attestation missing");
        break;
      }
    }
    report.entries.push_back(std::move(e));
  }

  for (Status s : {Status::pass, Status::warn, Status::fail, Status::manual_pending,
                   Status::attested_pass, Status::attested_fail,
                   Status::not_applicable})
    report.summary[to_string(s)] = 0;
  Status worst_status = Status::pass;
  for (const auto& e : report.entries) {
    ++report.summary[to_string(e.status)];
    worst_status = worst(worst_status, e.status);
  }
  bool blocking = report.summary["fail"] > 0 || report.summary["attested_fail"] > 0 ||
                  (!lenient && report.summary["manual_pending"] > 0);
  report.exit_code = blocking ? 1 : 0;
  return report;
}

std::string format_metric(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9f", v);
  return buf;
}

namespace {

void write_json_string(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

std::string render_json(const ComplianceReport& r) {
  std::string out;
  out += "{\"dataset_id\":";
  write_json_string(out, r.dataset_id);
  out += ",\"entries\":[";
  bool first_entry = true;
  for (const auto& e : r.entries) {
    if (!first_entry) out += ',';
    first_entry = false;
    out += "{\"attestation\":";
    if (e.attestation) {
      out += "{\"by\":";
      write_json_string(out, e.attestation->by);
      out += ",\"date\":";
      write_json_string(out, e.attestation->date);
      out += ",\"note\":";
      write_json_string(out, e.attestation->note);
      out += ",\"rec_id\":" + std::to_string(e.attestation->rec_id);
      out += ",\"status\":";
      write_json_string(out, to_string(e.attestation->status));
      out += '}';
    } else {
      out += "null";
    }
    out += ",\"attested_status\":";
    if (e.attested_status)
      write_json_string(out, to_string(*e.attested_status));
    else
      out += "null";
    out += ",\"automated_status\":";
    if (e.automated_status)
      write_json_string(out, to_string(*e.automated_status));
    else
      out += "null";
    out += ",\"evidence\":[";
    for (std::size_t i = 0; i < e.evidence.size(); ++i) {
      if (i) out += ',';
      write_json_string(out, e.evidence[i]);
    }
    out += "],\"message\":";
    write_json_string(out, e.message);
    out += ",\"metrics\":{";
    bool first_metric = true;
    for (const auto& [k, v] : e.metrics) {
      if (!first_metric) out += ',';
      first_metric = false;
      write_json_string(out, k);
      out += ':';
      out += format_metric(v);
    }
    out += "},\"mode\":";
    write_json_string(out, to_string(e.mode));
    out += ",\"rec_id\":" + std::to_string(e.rec_id);
    out += ",\"status\":";
    write_json_string(out, to_string(e.status));
    out += ",\"title\":";
    write_json_string(out, rec_info(e.rec_id).title);
    out += '}';
  }
  out += "],\"exit_code\":" + std::to_string(r.exit_code);
  out += ",\"generated_at\":";
  write_json_string(out, r.generated_at);
  out += ",\"lenient\":";
  out += r.lenient ? "true" : "false";
  out += ",\"schema_version\":";
  write_json_string(out, kReportSchemaVersion);
  out += ",\"summary\":{";
  bool first_sum = true;
  for (const auto& [k, v] : r.summary) {
    if (!first_sum) out += ',';
    first_sum = false;
    write_json_string(out, k);
    out += ':' + std::to_string(v);
  }
  out += "},\"tool_version\":";
  write_json_string(out, r.tool_version);
  out += "}\n";
  return out;
}

const char* glyph(Status s) {
  switch (s) {
    case Status::pass: return "[ok]";
    case Status::attested_pass: return "[ok*]";
    case Status::warn: return "[warn]";
    case Status::not_applicable: return "[n/a]";
    case Status::manual_pending: return "[pending]";
    case Status::fail: return "[FAIL]";
    case Status::attested_fail: return "[FAIL*]";
  }
  return "[?]";
}

std::string render_text(const ComplianceReport& r) {
  std::ostringstream os;
  os << "Compliance report for " << r.dataset_id << " (" << r.tool_version << ")\n";
  os << "Generated: " << r.generated_at << "\n\n";
  for (const auto& e : r.entries) {
    char rec[8];
    std::snprintf(rec, sizeof(rec), "REC %2d", e.rec_id);
    os << rec << "  " << glyph(e.status) << "  " << rec_info(e.rec_id).title;
    if (!e.message.empty()) os << " — " << e.message;
    os << '\n';
  }
  os << "\nSummary:";
  for (const auto& [k, v] : r.summary)
    if (v > 0) os << ' ' << k << '=' << v;
  os << "\nExit code: " << r.exit_code << '\n';
  return os.str();
}

}  // namespace

std::string render(const ComplianceReport& report, ReportFormat format) {
  return format == ReportFormat::json ? render_json(report) : render_text(report);
}

Json findings_to_json(const std::vector<Finding>& findings) {
  Json arr = Json::array();
  for (const auto& f : findings) {
    Json j = Json::object();
    j["rec_id"] = f.rec_id;
    j["status"] = to_string(f.status);
    j["message"] = f.message;
    j["evidence"] = f.evidence;
    Json metrics = Json::object();
    for (const auto& [k, v] : f.metrics) metrics[k] = v;
    j["metrics"] = metrics;
    arr.push_back(std::move(j));
  }
  return arr;
}

std::vector<Finding> findings_from_json(const Json& j) {
  if (!j.is_array()) throw ParseError(1, "findings file must be a JSON array");
  std::vector<Finding> out;
  for (const auto& fj : j) {
    Finding f;
    try {
      f.rec_id = fj.at("rec_id").get<int>();
      auto st = status_from_string(fj.at("status").get<std::string>());
      if (!st) throw ParseError(1, "unknown finding status");
      f.status = *st;
      f.message = fj.at("message").get<std::string>();
      if (fj.contains("evidence"))
        f.evidence = fj.at("evidence").get<std::vector<std::string>>();
      if (fj.contains("metrics"))
        for (auto it = fj.at("metrics").begin(); it != fj.at("metrics").end(); ++it)
          f.metrics[it.key()] = it.value().get<double>();
    } catch (const Json::exception& ex) {
      throw ParseError(1, ex.what());
    }
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace dds

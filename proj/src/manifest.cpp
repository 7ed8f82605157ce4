#include "dds/manifest.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_set>

#include "dds/digest.hpp"
#include "dds/errors.hpp"

namespace dds {
namespace {

constexpr const char* kSupportedSchemaVersion = "dds-manifest/1";

std::string rstrip(std::string s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.pop_back();
  return s;
}

Json parse_line(const std::string& line, long lineno) {
  Json j = Json::parse(line, nullptr, false);
  if (j.is_discarded()) throw ParseError(lineno, "invalid JSON");
  if (!j.is_object()) throw ParseError(lineno, "expected a JSON object");
  return j;
}

void require_keys(const Json& j, long lineno, const std::set<std::string>& required,
                  const std::set<std::string>& optional) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!required.count(it.key()) && !optional.count(it.key()))
      throw ParseError(lineno, "unknown field: " + it.key());
  }
  for (const auto& k : required)
    if (!j.contains(k)) throw ParseError(lineno, "missing field: " + k);
}

std::string get_string(const Json& j, const char* key, long lineno) {
  if (!j.at(key).is_string())
    throw ParseError(lineno, std::string(key) + " must be a string");
  return j.at(key).get<std::string>();
}

std::string get_timestamp(const Json& j, const char* key, long lineno) {
  std::string s = get_string(j, key, lineno);
  if (!is_utc_timestamp(s))
    throw ParseError(lineno, std::string(key) +
                                 " must be UTC ISO-8601 with seconds (got " + s + ")");
  return s;
}

ManifestHeader parse_header(const Json& j, long lineno) {
  require_keys(j, lineno, {"schema_version", "dataset_id", "created", "sources"}, {});
  ManifestHeader h;
  h.schema_version = get_string(j, "schema_version", lineno);
  if (h.schema_version != kSupportedSchemaVersion)
    throw SchemaVersionUnsupported(h.schema_version);
  h.dataset_id = get_string(j, "dataset_id", lineno);
  if (h.dataset_id.empty()) throw ParseError(lineno, "dataset_id must be non-empty");
  h.created = get_timestamp(j, "created", lineno);
  if (!j.at("sources").is_array())
    throw ParseError(lineno, "sources must be an array");
  std::unordered_set<std::string> seen;
  for (const auto& sj : j.at("sources")) {
    if (!sj.is_object()) throw ParseError(lineno, "source must be an object");
    require_keys(sj, lineno, {"source_id"},
                 {"description", "acquisition_config_version"});
    SourceDecl s;
    s.source_id = get_string(sj, "source_id", lineno);
    if (s.source_id.empty()) throw ParseError(lineno, "source_id must be non-empty");
    if (!seen.insert(s.source_id).second)
      throw ParseError(lineno, "duplicate source_id: " + s.source_id);
    if (sj.contains("description")) s.description = get_string(sj, "description", lineno);
    if (sj.contains("acquisition_config_version"))
      s.acquisition_config_version = get_string(sj, "acquisition_config_version", lineno);
    h.sources.push_back(std::move(s));
  }
  return h;
}

Lineage parse_lineage(const Json& j, long lineno) {
  if (!j.is_object()) throw ParseError(lineno, "lineage must be an object");
  require_keys(j, lineno, {"is_raw"}, {"raw_uri", "transforms"});
  Lineage l;
  if (!j.at("is_raw").is_boolean())
    throw ParseError(lineno, "lineage.is_raw must be a boolean");
  l.is_raw = j.at("is_raw").get<bool>();
  if (j.contains("raw_uri")) l.raw_uri = get_string(j, "raw_uri", lineno);
  if (j.contains("transforms")) {
    if (!j.at("transforms").is_array())
      throw ParseError(lineno, "lineage.transforms must be an array");
    for (const auto& tj : j.at("transforms")) {
      if (!tj.is_object()) throw ParseError(lineno, "transform must be an object");
      require_keys(tj, lineno, {"op_name"}, {"params", "tool_version"});
      TransformStep t;
      t.op_name = get_string(tj, "op_name", lineno);
      if (tj.contains("params")) {
        if (!tj.at("params").is_object())
          throw ParseError(lineno, "transform params must be an object");
        t.params = tj.at("params");
      }
      if (tj.contains("tool_version"))
        t.tool_version = get_string(tj, "tool_version", lineno);
      l.transforms.push_back(std::move(t));
    }
  }
  return l;
}

DataItem parse_item(const Json& j, long lineno) {
  require_keys(j, lineno, {"id", "digest", "source_id", "split"},
               {"group_id", "odd", "lineage", "ambiguous", "simhash64", "label",
                "attrs"});
  DataItem it;
  it.id = get_string(j, "id", lineno);
  if (it.id.empty()) throw ParseError(lineno, "item id must be non-empty");
  it.digest = get_string(j, "digest", lineno);
  if (!is_valid_digest(it.digest))
    throw ParseError(lineno, "malformed digest: " + it.digest);
  it.source_id = get_string(j, "source_id", lineno);
  auto sp = split_from_string(get_string(j, "split", lineno));
  if (!sp) throw ParseError(lineno, "unknown split: " + get_string(j, "split", lineno));
  it.split = *sp;
  if (j.contains("group_id")) it.group_id = get_string(j, "group_id", lineno);
  if (j.contains("odd")) {
    if (!j.at("odd").is_object()) throw ParseError(lineno, "odd must be an object");
    for (auto kv = j.at("odd").begin(); kv != j.at("odd").end(); ++kv)
      it.odd.emplace(kv.key(), kv.value());
  }
  if (j.contains("lineage")) it.lineage = parse_lineage(j.at("lineage"), lineno);
  if (j.contains("ambiguous")) {
    if (!j.at("ambiguous").is_boolean())
      throw ParseError(lineno, "ambiguous must be a boolean");
    it.ambiguous = j.at("ambiguous").get<bool>();
  }
  if (j.contains("simhash64")) {
    const auto& v = j.at("simhash64");
    if (!v.is_number_unsigned() && !v.is_number_integer())
      throw ParseError(lineno, "simhash64 must be an unsigned integer");
    if (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)
      throw ParseError(lineno, "simhash64 must be non-negative");
    it.simhash64 = v.get<std::uint64_t>();
  }
  if (j.contains("label")) it.label = get_string(j, "label", lineno);
  if (j.contains("attrs")) {
    if (!j.at("attrs").is_object()) throw ParseError(lineno, "attrs must be an object");
    for (auto kv = j.at("attrs").begin(); kv != j.at("attrs").end(); ++kv)
      it.attrs.emplace(kv.key(), kv.value());
  }
  return it;
}

}  // namespace

Manifest load_manifest(std::istream& in) {
  Manifest m;
  std::string line;
  long lineno = 0;
  bool have_header = false;
  std::unordered_set<std::string> source_ids;
  std::unordered_set<std::string> item_ids;
  while (std::getline(in, line)) {
    ++lineno;
    line = rstrip(line);
    if (line.empty()) continue;
    Json j = parse_line(line, lineno);
    if (!have_header) {
      m.header = parse_header(j, lineno);
      for (const auto& s : m.header.sources) source_ids.insert(s.source_id);
      have_header = true;
      continue;
    }
    DataItem it = parse_item(j, lineno);
    if (!item_ids.insert(it.id).second) throw DuplicateId(it.id);
    if (!source_ids.count(it.source_id)) throw UnknownSource(it.id, it.source_id);
    m.items.push_back(std::move(it));
  }
  if (!have_header) throw ParseError(1, "missing header line");
  m.rebuild_index();
  return m;
}

namespace {

Json lineage_to_json(const Lineage& l) {
  Json j = Json::object();
  j["is_raw"] = l.is_raw;
  if (l.raw_uri) j["raw_uri"] = *l.raw_uri;
  if (!l.transforms.empty()) {
    Json arr = Json::array();
    for (const auto& t : l.transforms) {
      Json tj = Json::object();
      tj["op_name"] = t.op_name;
      if (!t.params.empty()) tj["params"] = t.params;
      if (!t.tool_version.empty()) tj["tool_version"] = t.tool_version;
      arr.push_back(std::move(tj));
    }
    j["transforms"] = std::move(arr);
  }
  return j;
}

}  // namespace

void serialize_manifest(const Manifest& m, std::ostream& out) {
  Json h = Json::object();
  h["schema_version"] = m.header.schema_version;
  h["dataset_id"] = m.header.dataset_id;
  h["created"] = m.header.created;
  h["sources"] = Json::array();
  for (const auto& s : m.header.sources) {
    Json sj = Json::object();
    sj["source_id"] = s.source_id;
    if (!s.description.empty()) sj["description"] = s.description;
    if (!s.acquisition_config_version.empty())
      sj["acquisition_config_version"] = s.acquisition_config_version;
    h["sources"].push_back(std::move(sj));
  }
  out << h.dump() << '\n';
  for (const auto& it : m.items) {
    Json j = Json::object();
    j["id"] = it.id;
    j["digest"] = it.digest;
    j["source_id"] = it.source_id;
    j["split"] = to_string(it.split);
    if (it.group_id) j["group_id"] = *it.group_id;
    if (!it.odd.empty()) {
      Json o = Json::object();
      for (const auto& [k, v] : it.odd) o[k] = v;
      j["odd"] = std::move(o);
    }
    if (!it.lineage.is_raw || it.lineage.raw_uri || !it.lineage.transforms.empty())
      j["lineage"] = lineage_to_json(it.lineage);
    if (it.ambiguous) j["ambiguous"] = true;
    if (it.simhash64) j["simhash64"] = *it.simhash64;
    if (it.label) j["label"] = *it.label;
    if (!it.attrs.empty()) {
      Json a = Json::object();
      for (const auto& [k, v] : it.attrs) a[k] = v;
      j["attrs"] = std::move(a);
    }
    out << j.dump() << '\n';
  }
}

AnnotationSet load_annotations(std::istream& in) {
  AnnotationSet set;
  std::string line;
  long lineno = 0;
  std::set<std::pair<std::string, std::string>> seen;
  while (std::getline(in, line)) {
    ++lineno;
    line = rstrip(line);
    if (line.empty()) continue;
    Json j = parse_line(line, lineno);
    require_keys(j, lineno,
                 {"item_id", "annotator", "label", "at", "seq", "storage_index",
                  "method"},
                 {});
    AnnotationRecord r;
    r.item_id = get_string(j, "item_id", lineno);
    r.annotator = get_string(j, "annotator", lineno);
    r.label = get_string(j, "label", lineno);
    r.at = get_timestamp(j, "at", lineno);
    if (!j.at("seq").is_number_integer() || j.at("seq").get<long>() < 0)
      throw ParseError(lineno, "seq must be a non-negative integer");
    r.seq = j.at("seq").get<long>();
    if (!j.at("storage_index").is_number_integer() ||
        j.at("storage_index").get<long>() < 0)
      throw ParseError(lineno, "storage_index must be a non-negative integer");
    r.storage_index = j.at("storage_index").get<long>();
    std::string method = get_string(j, "method", lineno);
    if (method == "manual")
      r.method = AnnotationMethod::manual;
    else if (method == "automatic")
      r.method = AnnotationMethod::automatic;
    else
      throw ParseError(lineno, "unknown method: " + method);
    if (!seen.emplace(r.annotator, r.item_id).second)
      throw DuplicateAnnotation(r.annotator, r.item_id);
    set.records.push_back(std::move(r));
  }
  return set;
}

void serialize_annotations(const AnnotationSet& a, std::ostream& out) {
  for (const auto& r : a.records) {
    Json j = Json::object();
    j["item_id"] = r.item_id;
    j["annotator"] = r.annotator;
    j["label"] = r.label;
    j["at"] = r.at;
    j["seq"] = r.seq;
    j["storage_index"] = r.storage_index;
    j["method"] = to_string(r.method);
    out << j.dump() << '\n';
  }
}

std::vector<AttestationRecord> load_attestations(std::istream& in) {
  Json j = Json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_array())
    throw ParseError(1, "attestations file must be a JSON array");
  std::vector<AttestationRecord> out;
  long idx = 0;
  for (const auto& aj : j) {
    ++idx;
    if (!aj.is_object()) throw ParseError(idx, "attestation must be an object");
    require_keys(aj, idx, {"rec_id", "status", "by", "date"}, {"note"});
    AttestationRecord r;
    if (!aj.at("rec_id").is_number_integer())
      throw ParseError(idx, "rec_id must be an integer");
    r.rec_id = aj.at("rec_id").get<int>();
    if (r.rec_id < 1 || r.rec_id > 44)
      throw ParseError(idx, "rec_id out of range 1-44");
    std::string st = get_string(aj, "status", idx);
    if (st == "attested_pass")
      r.status = AttestationStatus::attested_pass;
    else if (st == "attested_fail")
      r.status = AttestationStatus::attested_fail;
    else if (st == "not_applicable")
      r.status = AttestationStatus::not_applicable;
    else
      throw ParseError(idx, "unknown attestation status: " + st);
    r.by = get_string(aj, "by", idx);
    if (r.by.empty()) throw ParseError(idx, "attestation 'by' must be non-empty");
    r.date = get_timestamp(aj, "date", idx);
    if (aj.contains("note")) r.note = get_string(aj, "note", idx);
    if (r.note.empty() && r.status != AttestationStatus::attested_pass)
      throw ParseError(idx, "note required for attested_fail / not_applicable");
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Finding> check_lineage(const Manifest& m) {
  std::vector<Finding> out;
  std::vector<std::string> rec8_bad;
  std::vector<std::string> rec8_msgs;
  for (const auto& it : m.items) {
    const Lineage& l = it.lineage;
    if (l.is_raw && !l.transforms.empty()) {
      rec8_bad.push_back(it.id);
      rec8_msgs.push_back(it.id + ": raw item carries transforms");
      continue;
    }
    if (!l.is_raw && (!l.raw_uri || l.transforms.empty())) {
      rec8_bad.push_back(it.id);
      rec8_msgs.push_back(it.id + ": not regenerable (missing raw_uri or transforms)");
      continue;
    }
    for (const auto& t : l.transforms) {
      if (t.params.contains("parent_id")) {
        const auto& p = t.params.at("parent_id");
        if (!p.is_string() || m.find(p.get<std::string>()) == nullptr) {
          rec8_bad.push_back(it.id);
          rec8_msgs.push_back(it.id + ": dangling parent");
          break;
        }
      }
    }
  }
  if (rec8_bad.empty()) {
    out.push_back(make_finding(8, Status::pass,
                               "all items raw or regenerable from recorded lineage"));
  } else {
    std::string msg = "lineage incomplete for " + std::to_string(rec8_bad.size()) +
                      " item(s): " + rec8_msgs.front();
    out.push_back(make_finding(8, Status::fail, msg, rec8_bad));
  }
  std::vector<std::string> rec9_bad;
  for (const auto& s : m.header.sources)
    if (s.acquisition_config_version.empty()) rec9_bad.push_back(s.source_id);
  if (rec9_bad.empty())
    out.push_back(make_finding(9, Status::pass,
                               "all sources carry an acquisition_config_version"));
  else
    out.push_back(make_finding(9, Status::fail,
                               "sources lacking acquisition_config_version", rec9_bad));
  return out;
}

std::vector<Finding> check_annotation_traceability(const AnnotationSet& a) {
  std::vector<std::string> bad;
  for (const auto& r : a.records)
    if (r.annotator.empty()) bad.push_back(r.item_id);
  std::sort(bad.begin(), bad.end());
  if (bad.empty())
    return {make_finding(38, Status::pass,
                         "all annotations traceable to an annotator",
                         {}, {{"records", double(a.records.size())}})};
  return {make_finding(38, Status::fail,
                       "annotations with empty annotator", bad,
                       {{"count", double(bad.size())}})};
}

}  // namespace dds

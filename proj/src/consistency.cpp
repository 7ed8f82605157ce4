#include "dds/consistency.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <set>

#include "dds/errors.hpp"

namespace dds {

std::string to_string(RuleKind k) {
  switch (k) {
    case RuleKind::unique: return "unique";
    case RuleKind::same_object_same_value: return "same_object_same_value";
    case RuleKind::in_set: return "in_set";
    case RuleKind::in_range: return "in_range";
    case RuleKind::implies: return "implies";
  }
  return "unique";
}

std::vector<ConsistencyRule> load_rules(std::istream& in) {
  Json j = Json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_array())
    throw ParseError(1, "rules file must be a JSON array");
  std::vector<ConsistencyRule> rules;
  std::set<std::string> ids;
  long idx = 0;
  for (const auto& rj : j) {
    ++idx;
    if (!rj.is_object()) throw ParseError(idx, "rule must be an object");
    ConsistencyRule r;
    try {
      r.rule_id = rj.at("rule_id").get<std::string>();
      std::string kind = rj.at("kind").get<std::string>();
      if (kind == "unique") {
        r.kind = RuleKind::unique;
        r.field = rj.at("field").get<std::string>();
      } else if (kind == "same_object_same_value") {
        r.kind = RuleKind::same_object_same_value;
        r.object_key_field = rj.at("object_key_field").get<std::string>();
        r.value_field = rj.at("value_field").get<std::string>();
      } else if (kind == "in_set") {
        r.kind = RuleKind::in_set;
        r.field = rj.at("field").get<std::string>();
        for (const auto& v : rj.at("allowed")) r.allowed.push_back(v);
      } else if (kind == "in_range") {
        r.kind = RuleKind::in_range;
        r.field = rj.at("field").get<std::string>();
        r.lo = rj.at("lo").get<double>();
        r.hi = rj.at("hi").get<double>();
      } else if (kind == "implies") {
        r.kind = RuleKind::implies;
        r.field_a = rj.at("field_a").get<std::string>();
        r.value_a = rj.at("value_a");
        r.field_b = rj.at("field_b").get<std::string>();
        for (const auto& v : rj.at("allowed_b")) r.allowed_b.push_back(v);
      } else {
        throw ParseError(idx, "unknown rule kind: " + kind);
      }
    } catch (const Json::exception& ex) {
      throw ParseError(idx, ex.what());
    }
    if (!ids.insert(r.rule_id).second)
      throw ParseError(idx, "duplicate rule_id: " + r.rule_id);
    rules.push_back(std::move(r));
  }
  return rules;
}

std::optional<Json> get_field(const DataItem& item, const std::string& name) {
  if (name == "id") return Json(item.id);
  if (name == "digest") return Json(item.digest);
  if (name == "source_id") return Json(item.source_id);
  if (name == "split") return Json(to_string(item.split));
  if (name == "group_id")
    return item.group_id ? std::optional<Json>(Json(*item.group_id)) : std::nullopt;
  if (name == "label")
    return item.label ? std::optional<Json>(Json(*item.label)) : std::nullopt;
  if (auto it = item.attrs.find(name); it != item.attrs.end()) return it->second;
  if (auto it = item.odd.find(name); it != item.odd.end()) return it->second;
  return std::nullopt;
}

namespace {

bool is_builtin_field(const std::string& name) {
  return name == "id" || name == "digest" || name == "source_id" ||
         name == "split" || name == "group_id" || name == "label";
}

void validate_field(const Manifest& m, const std::string& rule_id,
                    const std::string& field) {
  if (is_builtin_field(field)) return;
  for (const auto& it : m.items)
    if (it.attrs.count(field) || it.odd.count(field)) return;
  throw UnknownField(rule_id, field);
}

int rec_of(RuleKind k) {
  return k == RuleKind::same_object_same_value ? 16 : 15;
}

}  // namespace

std::vector<Finding> check_rules(const Manifest& m, const AnnotationSet&,
                                 const std::vector<ConsistencyRule>& rules) {
  for (const auto& r : rules) {
    switch (r.kind) {
      case RuleKind::unique:
      case RuleKind::in_set:
      case RuleKind::in_range:
        validate_field(m, r.rule_id, r.field);
        break;
      case RuleKind::same_object_same_value:
        validate_field(m, r.rule_id, r.object_key_field);
        validate_field(m, r.rule_id, r.value_field);
        break;
      case RuleKind::implies:
        validate_field(m, r.rule_id, r.field_a);
        validate_field(m, r.rule_id, r.field_b);
        break;
    }
  }

  std::vector<Finding> out;
  for (const auto& r : rules) {
    std::vector<std::string> offenders;
    std::string detail;
    switch (r.kind) {
      case RuleKind::unique: {
        std::map<std::string, std::vector<std::string>> by_value;
        for (const auto& it : m.items)
          if (auto v = get_field(it, r.field)) by_value[v->dump()].push_back(it.id);
        for (const auto& [value, ids] : by_value)
          if (ids.size() > 1) {
            for (const auto& id : ids) offenders.push_back(id);
            if (detail.empty()) detail = "value " + value + " repeats";
          }
        break;
      }
      case RuleKind::same_object_same_value: {
        std::map<std::string, std::map<std::string, std::vector<std::string>>> objs;
        for (const auto& it : m.items) {
          auto key = get_field(it, r.object_key_field);
          auto val = get_field(it, r.value_field);
          if (key && val) objs[key->dump()][val->dump()].push_back(it.id);
        }
        for (const auto& [obj, values] : objs)
          if (values.size() > 1) {
            std::string vs;
            for (const auto& [v, ids] : values) {
              if (!vs.empty()) vs += " vs ";
              vs += v;
              for (const auto& id : ids) offenders.push_back(id);
            }
            if (detail.empty()) detail = "object " + obj + " has " + vs;
          }
        break;
      }
      case RuleKind::in_set: {
        for (const auto& it : m.items)
          if (auto v = get_field(it, r.field))
            if (std::find(r.allowed.begin(), r.allowed.end(), *v) == r.allowed.end()) {
              offenders.push_back(it.id);
              if (detail.empty()) detail = it.id + " has " + v->dump();
            }
        break;
      }
      case RuleKind::in_range: {
        for (const auto& it : m.items)
          if (auto v = get_field(it, r.field)) {
            if (!v->is_number()) {
              offenders.push_back(it.id);
              if (detail.empty()) detail = it.id + ": non-numeric value";
              continue;
            }
            double x = v->get<double>();
            if (x < r.lo || x > r.hi) {
              offenders.push_back(it.id);
              if (detail.empty()) detail = it.id + " has " + v->dump();
            }
          }
        break;
      }
      case RuleKind::implies: {
        for (const auto& it : m.items) {
          auto a = get_field(it, r.field_a);
          if (!a || *a != r.value_a) continue;
          auto b = get_field(it, r.field_b);
          if (!b || std::find(r.allowed_b.begin(), r.allowed_b.end(), *b) ==
                        r.allowed_b.end()) {
            offenders.push_back(it.id);
            if (detail.empty())
              detail = it.id + ": " + r.field_b + " = " + (b ? b->dump() : "absent");
          }
        }
        break;
      }
    }
    std::sort(offenders.begin(), offenders.end());
    offenders.erase(std::unique(offenders.begin(), offenders.end()), offenders.end());
    int rec = rec_of(r.kind);
    if (offenders.empty())
      out.push_back(make_finding(rec, Status::pass,
                                 "rule " + r.rule_id + " satisfied"));
    else
      out.push_back(make_finding(rec, Status::fail,
                                 "rule " + r.rule_id + " violated: " + detail,
                                 offenders,
                                 {{"violations", double(offenders.size())}}));
  }
  if (!rules.empty())
    out.push_back(make_finding(14, Status::pass,
                               std::to_string(rules.size()) +
                                   " consistency rule(s) declared and evaluated"));
  return out;
}

namespace {

// (kind, unit) pair of an attribute value. Unit-tagged values are objects
// of exactly {value, unit}.
std::pair<std::string, std::string> variant_of(const Json& v) {
  if (v.is_object() && v.size() == 2 && v.contains("value") && v.contains("unit") &&
      v.at("unit").is_string()) {
    auto inner = variant_of(v.at("value"));
    return {inner.first, v.at("unit").get<std::string>()};
  }
  if (v.is_number()) return {"number", ""};
  if (v.is_string()) return {"string", ""};
  if (v.is_boolean()) return {"boolean", ""};
  if (v.is_array()) return {"array", ""};
  if (v.is_object()) return {"object", ""};
  return {"null", ""};
}

}  // namespace

std::vector<Finding> check_representation(const Manifest& m) {
  // attribute -> variant -> sources using it
  std::map<std::string, std::map<std::pair<std::string, std::string>,
                                 std::set<std::string>>>
      table;
  for (const auto& it : m.items)
    for (const auto& [name, v] : it.attrs)
      table[name][variant_of(v)].insert(it.source_id);

  std::vector<Finding> out;
  for (const auto& [name, variants] : table) {
    std::set<std::string> kinds;
    std::set<std::string> units;
    for (const auto& [variant, _] : variants) {
      kinds.insert(variant.first);
      if (!variant.second.empty()) units.insert(variant.second);
    }
    if (kinds.size() > 1 || units.size() > 1) {
      std::vector<std::string> evidence;
      for (const auto& [variant, sources] : variants)
        for (const auto& s : sources)
          evidence.push_back(s + "=" + variant.first +
                             (variant.second.empty() ? "" : ":" + variant.second));
      out.push_back(make_finding(
          17, Status::fail,
          "attribute " + name + " uses inconsistent representations across sources",
          evidence));
    }
  }
  if (out.empty())
    out.push_back(make_finding(17, Status::pass,
                               "attribute representations consistent across sources"));
  return out;
}

std::vector<DuplicateGroup> group_exact_duplicates(const Manifest& m) {
  std::map<std::string, std::vector<std::string>> by_digest;
  for (const auto& it : m.items) by_digest[it.digest].push_back(it.id);
  std::vector<DuplicateGroup> out;
  for (auto& [digest, ids] : by_digest) {
    if (ids.size() < 2) continue;
    std::sort(ids.begin(), ids.end());
    out.push_back({digest, std::move(ids)});
  }
  return out;  // map iteration keeps digest order deterministic
}

std::vector<Finding> duplicate_findings(const std::vector<DuplicateGroup>& groups) {
  if (groups.empty())
    return {make_finding(15, Status::pass, "no repeated content digests")};
  std::vector<Finding> out;
  for (const auto& g : groups)
    out.push_back(make_finding(
        15, Status::warn,
        "repeated content (" + std::to_string(g.item_ids.size()) +
            " items share a digest); rationale for the repeats must be checked",
        g.item_ids));
  return out;
}

std::vector<Finding> detect_outliers(const Manifest& m, const OutlierPolicy& policy) {
  std::vector<Finding> out;
  for (const auto& field : policy.fields) {
    std::vector<std::pair<double, std::string>> values;
    for (const auto& it : m.items) {
      auto f = it.attrs.find(field);
      if (f != it.attrs.end() && f->second.is_number())
        values.emplace_back(f->second.get<double>(), it.id);
    }
    if (values.size() < 5) {
      out.push_back(make_finding(12, Status::warn,
                                 "field " + field +
                                     " has fewer than 5 numeric values; outlier "
                                     "check skipped",
                                 {}, {{"values", double(values.size())}}));
      continue;
    }
    auto median_of = [](std::vector<double> xs) {
      std::sort(xs.begin(), xs.end());
      std::size_t n = xs.size();
      return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
    };
    std::vector<double> xs;
    xs.reserve(values.size());
    for (const auto& [x, _] : values) xs.push_back(x);
    double med = median_of(xs);
    std::vector<double> devs;
    devs.reserve(xs.size());
    for (double x : xs) devs.push_back(std::abs(x - med));
    double mad = median_of(devs);

    std::vector<std::string> flagged;
    for (const auto& [x, id] : values) {
      bool flag;
      if (mad > 0.0) {
        flag = 0.6745 * std::abs(x - med) / mad > policy.threshold;
      } else {
        flag = std::abs(x - med) > policy.rel_epsilon * std::max(1.0, std::abs(med));
      }
      if (flag) flagged.push_back(id);
    }
    std::sort(flagged.begin(), flagged.end());
    if (flagged.empty())
      out.push_back(make_finding(12, Status::pass,
                                 "no outliers flagged for field " + field, {},
                                 {{"median", med}, {"mad", mad}}));
    else
      out.push_back(make_finding(
          12, Status::warn,
          "outliers flagged for field " + field + " (review, not auto-removed)",
          flagged,
          {{"median", med}, {"mad", mad}, {"flagged", double(flagged.size())}}));
  }
  if (out.empty())
    out.push_back(make_finding(12, Status::pass, "no outlier fields configured"));
  return out;
}

}  // namespace dds

#include "dds/odd.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <set>
#include <sstream>

#include "dds/errors.hpp"

namespace dds {

std::string to_string(DimKind k) {
  switch (k) {
    case DimKind::categorical: return "categorical";
    case DimKind::ordinal: return "ordinal";
    case DimKind::numeric: return "numeric";
  }
  return "categorical";
}

const OddDimension* OddSchema::find(const std::string& name) const {
  for (const auto& d : dimensions)
    if (d.name == name) return &d;
  return nullptr;
}

OddSchema odd_schema_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("dimensions") || !j.at("dimensions").is_array())
    throw ParseError(1, "ODD schema must be an object with a dimensions array");
  OddSchema schema;
  if (j.contains("currency_notes"))
    schema.currency_notes = j.at("currency_notes").get<std::string>();
  for (const auto& dj : j.at("dimensions")) {
    OddDimension d;
    try {
      d.name = dj.at("name").get<std::string>();
      std::string kind = dj.at("kind").get<std::string>();
      if (kind == "categorical")
        d.kind = DimKind::categorical;
      else if (kind == "ordinal")
        d.kind = DimKind::ordinal;
      else if (kind == "numeric")
        d.kind = DimKind::numeric;
      else
        throw ParseError(1, "unknown dimension kind: " + kind);
      if (d.kind == DimKind::numeric) {
        d.lo = dj.at("range").at(0).get<double>();
        d.hi = dj.at("range").at(1).get<double>();
        if (dj.contains("bins")) d.bins = dj.at("bins").get<std::vector<double>>();
      } else {
        d.levels = dj.at("levels").get<std::vector<std::string>>();
      }
    } catch (const Json::exception& ex) {
      throw ParseError(1, ex.what());
    }
    schema.dimensions.push_back(std::move(d));
  }
  return schema;
}

OddSchema load_odd_schema(std::istream& in) {
  Json j = Json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ParseError(1, "ODD schema is not valid JSON");
  return odd_schema_from_json(j);
}

std::vector<Finding> validate_schema(const OddSchema& schema) {
  std::vector<Finding> out;
  std::set<std::string> names;
  for (const auto& d : schema.dimensions) {
    if (!names.insert(d.name).second)
      out.push_back(make_finding(3, Status::fail,
                                 "duplicate dimension: " + d.name, {d.name}));
    if (d.kind == DimKind::numeric) {
      if (!(d.lo < d.hi))
        out.push_back(make_finding(3, Status::fail,
                                   "numeric range must satisfy lo < hi for " + d.name,
                                   {d.name}));
      if (!d.bins.empty()) {
        bool increasing = std::is_sorted(d.bins.begin(), d.bins.end()) &&
                          std::adjacent_find(d.bins.begin(), d.bins.end()) ==
                              d.bins.end();
        bool in_range = d.bins.front() >= d.lo && d.bins.back() <= d.hi;
        if (!increasing || !in_range || d.bins.size() < 2)
          out.push_back(make_finding(
              3, Status::fail,
              "bin edges must be strictly increasing within range for " + d.name,
              {d.name}));
      }
    } else {
      if (d.levels.empty())
        out.push_back(make_finding(3, Status::fail,
                                   "dimension " + d.name + " has no levels",
                                   {d.name}));
      std::set<std::string> lv(d.levels.begin(), d.levels.end());
      if (lv.size() != d.levels.size())
        out.push_back(make_finding(3, Status::fail,
                                   "dimension " + d.name + " has duplicate levels",
                                   {d.name}));
    }
  }
  if (out.empty())
    out.push_back(make_finding(3, Status::pass, "ODD schema is structurally valid",
                               {}, {{"dimensions", double(schema.dimensions.size())}}));
  return out;
}

namespace {

// nullopt = traceable; otherwise the violation text.
std::optional<std::string> trace_value(const OddDimension& d, const Json& v) {
  if (d.kind == DimKind::numeric) {
    if (!v.is_number()) return "value is not numeric";
    double x = v.get<double>();
    if (x < d.lo || x > d.hi) return "value outside declared range";
    return std::nullopt;
  }
  if (!v.is_string()) return "value is not a string level";
  const std::string s = v.get<std::string>();
  if (std::find(d.levels.begin(), d.levels.end(), s) == d.levels.end())
    return "value not in levels";
  return std::nullopt;
}

std::string format_number(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

// Cell label of an item's value on a dimension; nullopt when untraceable.
std::optional<std::string> cell_of(const OddDimension& d, const Json& v) {
  if (trace_value(d, v)) return std::nullopt;
  if (d.kind != DimKind::numeric) return v.get<std::string>();
  double x = v.get<double>();
  std::vector<double> edges = d.bins;
  if (edges.size() < 2) edges = {d.lo, d.hi};
  // [e_i, e_{i+1}), last bin closed on the right
  std::size_t n = edges.size() - 1;
  for (std::size_t i = 0; i < n; ++i) {
    bool last = i + 1 == n;
    if (x >= edges[i] && (x < edges[i + 1] || (last && x <= edges[i + 1])))
      return "[" + format_number(edges[i]) + "," + format_number(edges[i + 1]) +
             (last ? "]" : ")");
  }
  return std::nullopt;  // outside the binned region
}

}  // namespace

std::vector<Finding> check_traceability(const Manifest& m, const OddSchema& schema,
                                        MissingDimPolicy missing) {
  std::vector<std::string> bad;
  std::vector<std::string> bad_msgs;
  std::vector<std::string> incomplete;
  for (const auto& it : m.items) {
    for (const auto& [k, v] : it.odd) {
      const OddDimension* d = schema.find(k);
      if (!d) {
        bad.push_back(it.id);
        bad_msgs.push_back(it.id + ": " + k + " is not a schema dimension");
        continue;
      }
      if (auto why = trace_value(*d, v)) {
        bad.push_back(it.id);
        bad_msgs.push_back(it.id + ": " + k + ": " + *why);
      }
    }
    for (const auto& d : schema.dimensions)
      if (!it.odd.count(d.name)) {
        incomplete.push_back(it.id + ": missing " + d.name);
        break;
      }
  }
  std::vector<Finding> out;
  if (bad.empty())
    out.push_back(make_finding(4, Status::pass, "all items traceable to the ODD",
                               {}, {{"items", double(m.items.size())}}));
  else
    out.push_back(make_finding(4, Status::fail,
                               "items not traceable to the ODD: " + bad_msgs.front(),
                               bad, {{"count", double(bad.size())}}));
  if (incomplete.empty())
    out.push_back(make_finding(7, Status::pass,
                               "every item values every ODD dimension"));
  else
    out.push_back(make_finding(
        7, missing == MissingDimPolicy::warn ? Status::warn : Status::fail,
        "items missing ODD dimensions", incomplete,
        {{"count", double(incomplete.size())}}));
  return out;
}

std::pair<CoverageTable, std::vector<Finding>> coverage(
    const Manifest& m, const OddSchema& schema,
    const std::vector<std::vector<std::string>>& dims, long min_count) {
  CoverageTable table;
  table.min_count_threshold = min_count;
  std::vector<Finding> out;
  long skipped = 0;
  for (const auto& names : dims) {
    std::vector<const OddDimension*> ds;
    for (const auto& n : names) {
      const OddDimension* d = schema.find(n);
      if (!d) throw UnknownDimension(n);
      ds.push_back(d);
    }
    CoverageTable::DimCoverage cov;
    cov.dims = names;
    for (const auto& it : m.items) {
      std::string key;
      bool ok = true;
      for (std::size_t i = 0; i < ds.size(); ++i) {
        auto odd_it = it.odd.find(names[i]);
        if (odd_it == it.odd.end()) { ok = false; break; }
        auto cell = cell_of(*ds[i], odd_it->second);
        if (!cell) { ok = false; ++skipped; break; }
        if (i) key += " x ";
        key += *cell;
      }
      if (!ok) continue;
      ++cov.cells[key];
      ++cov.total;
    }
    std::string dim_label = names.size() == 1 ? names[0] : names[0] + " x " + names[1];
    // Declared cells with zero items still violate min_count.
    if (ds.size() == 1 && ds[0]->kind != DimKind::numeric)
      for (const auto& lv : ds[0]->levels) cov.cells.try_emplace(lv, 0);
    for (const auto& [cell, count] : cov.cells) {
      if (count < min_count)
        out.push_back(make_finding(
            5, Status::fail,
            "cell (" + dim_label + ", " + cell + ") has " + std::to_string(count) +
                " item(s), below min_count " + std::to_string(min_count),
            {cell}, {{"count", double(count)}}));
    }
    table.per_dims.push_back(std::move(cov));
  }
  if (out.empty())
    out.push_back(make_finding(5, Status::pass,
                               "all requested coverage cells meet min_count", {},
                               {{"min_count", double(min_count)}}));
  return {std::move(table), std::move(out)};
}

ExpectedDistribution load_expected_distribution(std::istream& in) {
  Json j = Json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw ParseError(1, "expected distribution must be a JSON object");
  ExpectedDistribution e;
  for (auto dim = j.begin(); dim != j.end(); ++dim) {
    if (!dim.value().is_object())
      throw ParseError(1, "expected distribution per dimension must be an object");
    double sum = 0.0;
    for (auto lv = dim.value().begin(); lv != dim.value().end(); ++lv) {
      double p = lv.value().get<double>();
      if (p < 0.0) throw ParseError(1, "probabilities must be non-negative");
      e.dims[dim.key()][lv.key()] = p;
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw ParseError(1, "probabilities for " + dim.key() + " sum to " +
                              std::to_string(sum) + ", expected 1");
  }
  return e;
}

double tv_distance(const std::map<std::string, double>& p,
                   const std::map<std::string, double>& q) {
  double acc = 0.0;
  for (const auto& [k, v] : p) {
    auto it = q.find(k);
    acc += std::abs(v - (it == q.end() ? 0.0 : it->second));
  }
  for (const auto& [k, v] : q)
    if (!p.count(k)) acc += v;
  return 0.5 * acc;
}

std::vector<Finding> proportion_check(const Manifest& m, Split split,
                                      const ExpectedDistribution& expected,
                                      double tv_threshold) {
  std::vector<const DataItem*> in_split;
  for (const auto& it : m.items)
    if (it.split == split) in_split.push_back(&it);
  if (in_split.empty()) throw EmptySplit(to_string(split));

  std::vector<Finding> out;
  for (const auto& [dim, probs] : expected.dims) {
    std::map<std::string, double> counts;
    long total = 0;
    for (const auto* it : in_split) {
      auto f = it->odd.find(dim);
      if (f == it->odd.end()) continue;
      std::string level =
          f->second.is_string() ? f->second.get<std::string>() : f->second.dump();
      ++counts[level];
      ++total;
    }
    if (total == 0) throw UnknownDimension(dim);
    std::map<std::string, double> observed;
    std::vector<std::string> outside;
    for (const auto& [level, c] : counts) {
      observed[level] = c / double(total);
      if (!probs.count(level)) outside.push_back(level);
    }
    double tv = tv_distance(observed, probs);
    std::string worst_level;
    double worst_dev = -1.0;
    for (const auto& [level, p] : probs) {
      auto it = observed.find(level);
      double dev = std::abs((it == observed.end() ? 0.0 : it->second) - p);
      if (dev > worst_dev) { worst_dev = dev; worst_level = level; }
    }
    for (const auto& [level, f] : observed)
      if (!probs.count(level) && f > worst_dev) { worst_dev = f; worst_level = level; }
    if (!outside.empty()) {
      out.push_back(make_finding(
          6, Status::fail,
          dim + ": level outside expected support: " + outside.front(), outside,
          {{"tv_distance", tv}}));
    } else if (tv > tv_threshold) {
      out.push_back(make_finding(
          6, Status::fail,
          dim + ": observed proportions drift from expected (worst level: " +
              worst_level + ")",
          {worst_level}, {{"tv_distance", tv}, {"tv_threshold", tv_threshold}}));
    } else {
      out.push_back(make_finding(
          6, Status::pass, dim + ": proportions within tolerance", {},
          {{"tv_distance", tv}, {"tv_threshold", tv_threshold}}));
    }
  }
  return out;
}

}  // namespace dds

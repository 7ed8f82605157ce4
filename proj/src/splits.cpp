#include "dds/splits.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

#include "dds/errors.hpp"

namespace dds {

double test_bound(const BoundInputs& in) {
  if (!(in.p_hat >= 0.0 && in.p_hat <= 1.0))
    throw InvalidParameter("p_hat must be in [0,1]");
  if (in.n < 1) throw InvalidParameter("n must be a positive integer");
  if (!(in.delta > 0.0 && in.delta < 1.0))
    throw InvalidParameter("delta must be in (0,1)");
  const double log_term = std::log(1.0 / in.delta);
  const double n = double(in.n);
  return in.p_hat + std::sqrt(2.0 * in.p_hat * log_term / n) + 2.0 * log_term / n;
}

double test_bound(double p_hat, long n, double delta) {
  return test_bound(BoundInputs{p_hat, n, delta});
}

long required_test_size(double p_hat, double target_upper, double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw InvalidParameter("delta must be in (0,1)");
  if (!(p_hat >= 0.0 && p_hat <= 1.0))
    throw InvalidParameter("p_hat must be in [0,1]");
  if (!(target_upper > p_hat))
    throw InvalidParameter("target_upper must exceed p_hat (bound is unreachable)");
  // The bound decreases strictly in n toward p_hat, so double until feasible
  // then binary-search the minimum.
  long hi = 1;
  while (test_bound(p_hat, hi, delta) > target_upper) {
    if (hi > (1L << 60)) throw InvalidParameter("required size overflows");
    hi *= 2;
  }
  long lo = hi / 2;  // infeasible (or 0)
  while (hi - lo > 1) {
    long mid = lo + (hi - lo) / 2;
    if (test_bound(p_hat, mid, delta) <= target_upper)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

std::vector<Finding> check_disjoint(const Manifest& m) {
  // digest -> split -> first item id carrying it
  std::map<std::string, std::map<Split, std::string>> seen;
  std::vector<std::string> unassigned;
  for (const auto& it : m.items) {
    if (it.split == Split::unassigned) {
      unassigned.push_back(it.id);
      continue;
    }
    seen[it.digest].emplace(it.split, it.id);
  }
  std::vector<Finding> out;
  for (const auto& [digest, by_split] : seen) {
    if (by_split.size() < 2) continue;
    std::vector<std::string> ids;
    std::string splits_text;
    for (const auto& [split, id] : by_split) {
      ids.push_back(id);
      if (!splits_text.empty()) splits_text += "/";
      splits_text += to_string(split);
    }
    out.push_back(make_finding(39, Status::fail,
                               "identical content in " + splits_text, ids));
  }
  if (out.empty())
    out.push_back(make_finding(39, Status::pass, "splits share no content digest"));
  if (!unassigned.empty())
    out.push_back(make_finding(39, Status::warn,
                               "items with unassigned split", unassigned));
  return out;
}

std::vector<Finding> check_group_integrity(const Manifest& m) {
  std::map<std::string, std::set<Split>> group_splits;
  for (const auto& it : m.items)
    if (it.group_id && it.split != Split::unassigned)
      group_splits[*it.group_id].insert(it.split);
  std::vector<Finding> out;
  for (const auto& [group, splits] : group_splits) {
    if (splits.size() < 2) continue;
    std::string text;
    for (Split s : splits) {
      if (!text.empty()) text += "/";
      text += to_string(s);
    }
    out.push_back(make_finding(43, Status::fail,
                               "group " + group + " spans splits " + text, {group}));
  }
  for (const auto& it : m.items) {
    for (const auto& t : it.lineage.transforms) {
      if (!t.params.contains("parent_id")) continue;
      const auto& p = t.params.at("parent_id");
      if (!p.is_string()) continue;
      const DataItem* parent = m.find(p.get<std::string>());
      if (parent && parent->split != it.split)
        out.push_back(make_finding(
            43, Status::fail,
            "augmentation crosses split: " + it.id + " (" + to_string(it.split) +
                ") derived from " + parent->id + " (" + to_string(parent->split) + ")",
            {it.id, parent->id}));
    }
  }
  if (out.empty())
    out.push_back(make_finding(43, Status::pass,
                               "groups and augmentations confined to one split"));
  return out;
}

long count_missing_simhash(const Manifest& m) {
  long n = 0;
  for (const auto& it : m.items)
    if (!it.simhash64) ++n;
  return n;
}

std::vector<LeakagePair> near_duplicate_leakage(const Manifest& m, int max_distance,
                                                int bands) {
  if (bands < 1 || 64 % bands != 0)
    throw InvalidBanding("bands must divide 64");
  if (max_distance < 0 || max_distance >= bands)
    throw InvalidBanding(
        "max_distance must be < bands (pigeonhole completeness requires it)");

  struct Entry {
    std::uint64_t hash;
    std::uint32_t idx;
  };
  std::vector<Entry> entries;
  entries.reserve(m.items.size());
  for (std::uint32_t i = 0; i < m.items.size(); ++i) {
    const auto& it = m.items[i];
    if (it.simhash64 && it.split != Split::unassigned)
      entries.push_back({*it.simhash64, i});
  }

  const int width = 64 / bands;
  const std::uint64_t mask =
      width == 64 ? ~0ull : ((std::uint64_t(1) << width) - 1);

  std::set<std::pair<std::uint32_t, std::uint32_t>> candidates;
  for (int b = 0; b < bands; ++b) {
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets;
    for (const auto& e : entries)
      buckets[(e.hash >> (b * width)) & mask].push_back(e.idx);
    for (const auto& [_, bucket] : buckets) {
      if (bucket.size() < 2) continue;
      for (std::size_t i = 0; i < bucket.size(); ++i)
        for (std::size_t j = i + 1; j < bucket.size(); ++j) {
          std::uint32_t a = bucket[i], c = bucket[j];
          if (m.items[a].split == m.items[c].split) continue;
          candidates.emplace(std::min(a, c), std::max(a, c));
        }
    }
  }

  std::vector<LeakagePair> out;
  for (const auto& [a, b] : candidates) {
    int dist = std::popcount(*m.items[a].simhash64 ^ *m.items[b].simhash64);
    if (dist > max_distance) continue;
    const std::string& ia = m.items[a].id;
    const std::string& ib = m.items[b].id;
    if (ia <= ib)
      out.push_back({ia, ib, dist});
    else
      out.push_back({ib, ia, dist});
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Finding> bias_scan(const Manifest& m, const OddSchema& schema,
                               double purity_threshold, long min_support) {
  std::map<std::string, long> global_counts;
  long labelled = 0;
  for (const auto& it : m.items)
    if (it.label) {
      ++global_counts[*it.label];
      ++labelled;
    }
  if (labelled == 0) throw MissingLabels();

  std::vector<Finding> out;
  for (const auto& d : schema.dimensions) {
    // level -> label -> count, over labelled items
    std::map<std::string, std::map<std::string, long>> table;
    for (const auto& it : m.items) {
      if (!it.label) continue;
      auto f = it.odd.find(d.name);
      if (f == it.odd.end()) continue;
      std::string level =
          f->second.is_string() ? f->second.get<std::string>() : f->second.dump();
      ++table[level][*it.label];
    }
    for (const auto& [level, by_label] : table) {
      long support = 0;
      for (const auto& [_, c] : by_label) support += c;
      if (support < min_support) continue;
      for (const auto& [label, c] : by_label) {
        double cond = double(c) / double(support);
        double global = double(global_counts[label]) / double(labelled);
        if (cond >= purity_threshold && global < purity_threshold)
          out.push_back(make_finding(
              42, Status::fail,
              "ODD level " + d.name + "=" + level + " nearly determines label " +
                  label,
              {d.name + "=" + level, label},
              {{"conditional_frequency", cond},
               {"global_frequency", global},
               {"support", double(support)}}));
      }
    }
  }
  if (out.empty())
    out.push_back(make_finding(42, Status::pass,
                               "no ODD level nearly determines a label", {},
                               {{"labelled_items", double(labelled)}}));
  return out;
}

}  // namespace dds

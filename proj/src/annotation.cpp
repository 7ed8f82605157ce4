#include "dds/annotation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "dds/errors.hpp"
#include "dds/splits.hpp"

namespace dds {

SamplePlan audit_sample_plan(long population, double delta, double target_bound) {
  if (!(delta > 0.0 && delta < 1.0))
    throw InvalidParameter("delta must be in (0,1)");
  if (!(target_bound > 0.0 && target_bound < 1.0))
    throw InvalidParameter("target_bound must be in (0,1)");
  if (population < 1) throw InvalidParameter("population must be >= 1");
  // Smallest n with 2·ln(1/δ)/n <= target; start from the closed form and
  // nudge for floating-point edges.
  long n = static_cast<long>(std::ceil(2.0 * std::log(1.0 / delta) / target_bound));
  if (n < 1) n = 1;
  while (n > 1 && test_bound(0.0, n - 1, delta) <= target_bound) --n;
  while (test_bound(0.0, n, delta) > target_bound) ++n;
  if (n > population) return {population, true};
  return {n, false};
}

AgreementResult agreement(const AnnotationSet& a) {
  std::map<std::string, std::map<std::string, std::string>> labels;  // annotator -> item -> label
  for (const auto& r : a.records) labels[r.annotator][r.item_id] = r.label;
  std::vector<std::string> annotators;
  for (const auto& [name, _] : labels) annotators.push_back(name);

  AgreementResult result;
  for (std::size_t i = 0; i < annotators.size(); ++i) {
    for (std::size_t j = i + 1; j < annotators.size(); ++j) {
      const auto& la = labels[annotators[i]];
      const auto& lb = labels[annotators[j]];
      long shared = 0, agree = 0;
      std::map<std::string, long> ma, mb;
      for (const auto& [item, label_a] : la) {
        auto it = lb.find(item);
        if (it == lb.end()) continue;
        ++shared;
        if (label_a == it->second) ++agree;
        ++ma[label_a];
        ++mb[it->second];
      }
      if (shared == 0) continue;
      PairAgreement pa;
      pa.annotator_a = annotators[i];
      pa.annotator_b = annotators[j];
      pa.n_shared = shared;
      pa.p_o = double(agree) / double(shared);
      double pe = 0.0;
      for (const auto& [label, ca] : ma) {
        auto it = mb.find(label);
        if (it != mb.end())
          pe += (double(ca) / shared) * (double(it->second) / shared);
      }
      pa.p_e = pe;
      if (pe >= 1.0) {
        // Both annotators constant and equal; p_o = 1, agreement is total.
        pa.kappa = 1.0;
        pa.degenerate_marginals = true;
      } else {
        pa.kappa = (pa.p_o - pe) / (1.0 - pe);
      }
      result.pairs.push_back(std::move(pa));
    }
  }
  if (result.pairs.empty()) throw InsufficientOverlap();
  double sum = 0.0;
  for (const auto& p : result.pairs) sum += p.kappa;
  result.mean_kappa = sum / double(result.pairs.size());
  return result;
}

std::vector<Finding> check_object_label_consistency(const Manifest& m,
                                                    const AnnotationSet& a,
                                                    const std::string& object_key) {
  bool key_exists = false;
  for (const auto& it : m.items)
    if (it.attrs.count(object_key)) { key_exists = true; break; }
  if (!key_exists) throw UnknownField("object_label_consistency", object_key);

  std::map<std::string, std::vector<std::string>> item_labels;  // item -> labels
  for (const auto& r : a.records) item_labels[r.item_id].push_back(r.label);

  std::map<std::string, std::map<std::string, std::vector<std::string>>> objects;
  for (const auto& it : m.items) {
    auto key = it.attrs.find(object_key);
    if (key == it.attrs.end()) continue;
    std::string obj = key->second.is_string() ? key->second.get<std::string>()
                                              : key->second.dump();
    if (it.label) {
      objects[obj][*it.label].push_back(it.id);
    } else if (auto li = item_labels.find(it.id); li != item_labels.end()) {
      for (const auto& label : li->second) objects[obj][label].push_back(it.id);
    }
  }
  std::vector<Finding> out;
  long checked = 0;
  for (const auto& [obj, by_label] : objects) {
    ++checked;
    if (by_label.size() <= 1) continue;
    std::vector<std::string> evidence;
    std::string labels_text;
    for (const auto& [label, ids] : by_label) {
      if (!labels_text.empty()) labels_text += " vs ";
      labels_text += label;
      for (const auto& id : ids) evidence.push_back(id);
    }
    std::sort(evidence.begin(), evidence.end());
    evidence.erase(std::unique(evidence.begin(), evidence.end()), evidence.end());
    out.push_back(make_finding(27, Status::fail,
                               "object " + obj + " labelled inconsistently: " +
                                   labels_text,
                               evidence));
  }
  if (out.empty())
    out.push_back(make_finding(27, Status::pass,
                               "objects labelled consistently", {},
                               {{"objects", double(checked)}}));
  return out;
}

std::vector<Finding> check_ambiguity_handling(const Manifest& m,
                                              const AnnotationSet& a,
                                              bool rec28_attested) {
  std::map<std::string, bool> has_manual;   // ambiguous item -> any manual record
  std::map<std::string, bool> has_any;
  for (const auto& it : m.items)
    if (it.ambiguous) { has_manual[it.id] = false; has_any[it.id] = false; }
  for (const auto& r : a.records) {
    auto it = has_any.find(r.item_id);
    if (it == has_any.end()) continue;
    it->second = true;
    if (r.method == AnnotationMethod::manual) has_manual[r.item_id] = true;
  }
  std::vector<Finding> out;
  std::vector<std::string> auto_only;
  for (const auto& [id, any] : has_any)
    if (any && !has_manual[id]) auto_only.push_back(id);
  if (has_any.empty()) {
    out.push_back(make_finding(31, Status::pass, "no ambiguous items declared"));
    out.push_back(make_finding(28, Status::pass,
                               "no ambiguous items declared; nothing to review"));
    return out;
  }
  if (auto_only.empty())
    out.push_back(make_finding(31, Status::pass,
                               "ambiguous items carry manual annotations", {},
                               {{"ambiguous_items", double(has_any.size())}}));
  else
    out.push_back(make_finding(31, Status::fail,
                               "ambiguous items labelled only automatically",
                               auto_only));
  if (rec28_attested)
    out.push_back(make_finding(28, Status::pass,
                               "ambiguous items present and expert review attested"));
  else
    out.push_back(make_finding(28, Status::warn,
                               "ambiguous items present but no expert-review "
                               "attestation recorded"));
  return out;
}

double longest_run_p_value(const std::vector<double>& probs, long length,
                           long run_at_least) {
  if (run_at_least <= 1) return 1.0;
  if (run_at_least > length) return 0.0;
  std::vector<double> p;
  for (double x : probs)
    if (x > 0.0) p.push_back(x);
  if (p.size() <= 1) return 1.0;  // degenerate null: run of n certain
  // P(longest run < L) via states (label, current run length 1..L-1).
  const long L = run_at_least;
  const std::size_t k = p.size();
  std::vector<std::vector<double>> state(k, std::vector<double>(L - 1, 0.0));
  for (std::size_t j = 0; j < k; ++j) state[j][0] = p[j];
  for (long pos = 1; pos < length; ++pos) {
    double total = 0.0;
    std::vector<double> per_label(k, 0.0);
    for (std::size_t j = 0; j < k; ++j)
      for (long r = 0; r < L - 1; ++r) {
        per_label[j] += state[j][r];
        total += state[j][r];
      }
    std::vector<std::vector<double>> next(k, std::vector<double>(L - 1, 0.0));
    for (std::size_t j = 0; j < k; ++j) {
      next[j][0] = (total - per_label[j]) * p[j];
      for (long r = 1; r < L - 1; ++r) next[j][r] = state[j][r - 1] * p[j];
    }
    state.swap(next);
  }
  double below = 0.0;
  for (const auto& row : state)
    for (double v : row) below += v;
  double tail = 1.0 - below;
  return std::clamp(tail, 0.0, 1.0);
}

double longest_run_p_value_mc(const std::vector<double>& probs, long length,
                              long run_at_least, std::uint64_t seed, long draws) {
  if (run_at_least <= 1) return 1.0;
  if (run_at_least > length) return 0.0;
  std::vector<double> cdf;
  double acc = 0.0;
  for (double x : probs) { acc += x; cdf.push_back(acc); }
  if (!cdf.empty()) cdf.back() = 1.0;
  std::mt19937_64 rng(seed);
  auto draw_label = [&]() {
    double u = double(rng() >> 11) * 0x1.0p-53;
    return std::size_t(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
  };
  long hits = 0;
  for (long d = 0; d < draws; ++d) {
    std::size_t last = draw_label();
    long run = 1;
    bool hit = run >= run_at_least;
    for (long pos = 1; pos < length && !hit; ++pos) {
      std::size_t cur = draw_label();
      run = (cur == last) ? run + 1 : 1;
      last = cur;
      if (run >= run_at_least) hit = true;
    }
    if (hit) ++hits;
  }
  return double(hits) / double(draws);
}

RunTestResult run_length_test(const AnnotationSet& a, const std::string& annotator,
                              std::uint64_t seed) {
  std::vector<std::pair<long, std::string>> seq;
  for (const auto& r : a.records)
    if (r.annotator == annotator) seq.emplace_back(r.seq, r.label);
  if (seq.size() < 2)
    throw InsufficientData("annotator " + annotator + " has fewer than 2 records");
  std::sort(seq.begin(), seq.end());

  long longest = 1, run = 1;
  std::map<std::string, long> counts;
  ++counts[seq[0].second];
  for (std::size_t i = 1; i < seq.size(); ++i) {
    ++counts[seq[i].second];
    if (seq[i].second == seq[i - 1].second)
      ++run;
    else
      run = 1;
    longest = std::max(longest, run);
  }
  const long m = long(seq.size());
  std::vector<double> probs;
  for (const auto& [_, c] : counts) probs.push_back(double(c) / double(m));

  RunTestResult res;
  res.annotator = annotator;
  res.longest_run = longest;
  res.sequence_length = m;
  res.seed = seed;
  // The exact dynamic program is cheap at any length, so it is used in all
  // regimes; the method tag still reflects the k^m <= 2^20 enumeration
  // boundary for reporting. Monte Carlo remains available for cross-checks.
  res.method = RunTestMethod::exhaustive;
  res.draws = 0;
  res.p_value = longest_run_p_value(probs, m, longest);
  return res;
}

Finding run_length_finding(const RunTestResult& r, double p_threshold) {
  std::map<std::string, double> metrics = {
      {"longest_run", double(r.longest_run)},
      {"sequence_length", double(r.sequence_length)},
      {"p_value", r.p_value}};
  if (r.p_value < p_threshold)
    return make_finding(36, Status::fail,
                        "annotator " + r.annotator +
                            ": improbably long run of identical labels",
                        {r.annotator}, metrics);
  return make_finding(36, Status::pass,
                      "annotator " + r.annotator + ": label runs unremarkable",
                      {r.annotator}, metrics);
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
    double avg = 0.5 * (double(i) + double(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(average_ranks(x), average_ranks(y));
}

RandomnessResult assignment_randomness(const AnnotationSet& a,
                                       const std::string& annotator,
                                       std::uint64_t seed, long permutations,
                                       double rho_threshold, double p_threshold) {
  std::vector<double> seqs, stores;
  for (const auto& r : a.records)
    if (r.annotator == annotator) {
      seqs.push_back(double(r.seq));
      stores.push_back(double(r.storage_index));
    }
  RandomnessResult res;
  res.annotator = annotator;
  res.n = long(seqs.size());
  if (res.n < 10) {
    res.rho = 0.0;
    res.p_value = 1.0;
    res.finding = make_finding(
        37, Status::warn,
        "annotator " + annotator + ": insufficient data for randomness test",
        {annotator}, {{"records", double(res.n)}});
    return res;
  }
  std::vector<double> rx = average_ranks(seqs);
  std::vector<double> ry = average_ranks(stores);
  res.rho = pearson(rx, ry);

  // Permuting ranks leaves both variances unchanged, so each permutation
  // only needs the cross term.
  const std::size_t n = rx.size();
  double mean = 0.0;
  for (double v : rx) mean += v;
  mean /= double(n);
  std::vector<double> dx(n), dy(n);
  double sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dx[i] = rx[i] - mean;
    sxx += dx[i] * dx[i];
  }
  double mean_y = 0.0;
  for (double v : ry) mean_y += v;
  mean_y /= double(n);
  for (std::size_t i = 0; i < n; ++i) {
    dy[i] = ry[i] - mean_y;
    syy += dy[i] * dy[i];
  }
  const double norm = std::sqrt(sxx * syy);
  std::mt19937_64 rng(seed);
  auto bounded = [&rng](std::uint64_t bound) {
    return std::uint64_t((unsigned __int128)(rng()) * bound >> 64);
  };
  long extreme = 0;
  const double target = std::abs(res.rho) - 1e-12;
  if (norm > 0.0) {
    for (long p = 0; p < permutations; ++p) {
      // In a descending Fisher-Yates pass, dy[i] is final once visited, so
      // the cross term accumulates in the same loop.
      double sxy = 0.0;
      for (std::size_t i = n - 1; i > 0; --i) {
        std::size_t j = bounded(i + 1);
        std::swap(dy[i], dy[j]);
        sxy += dx[i] * dy[i];
      }
      sxy += dx[0] * dy[0];
      if (std::abs(sxy / norm) >= target) ++extreme;
    }
  } else {
    extreme = permutations;
  }
  res.p_value = double(extreme + 1) / double(permutations + 1);

  std::map<std::string, double> metrics = {
      {"rho", res.rho}, {"p_value", res.p_value}, {"records", double(res.n)}};
  if (std::abs(res.rho) > rho_threshold && res.p_value < p_threshold)
    res.finding = make_finding(37, Status::fail,
                               "annotator " + annotator +
                                   ": assignment order correlates with storage order",
                               {annotator}, metrics);
  else
    res.finding = make_finding(37, Status::pass,
                               "annotator " + annotator +
                                   ": assignment order uncorrelated with storage",
                               {annotator}, metrics);
  return res;
}

}  // namespace dds

// Acceptance gate: one criterion per invocation, "acceptance <1-10>".
// Prints a single pass/fail line and exits nonzero on failure.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dds/annotation.hpp"
#include "dds/cli.hpp"
#include "dds/consistency.hpp"
#include "dds/digest.hpp"
#include "dds/integrity.hpp"
#include "dds/manifest.hpp"
#include "dds/odd.hpp"
#include "dds/report.hpp"
#include "dds/splits.hpp"

namespace fs = std::filesystem;
using namespace dds;

namespace {

int failures = 0;

void expect(bool ok, const std::string& what) {
  if (!ok) {
    ++failures;
    std::fprintf(stderr, "  FAILED: %s\n", what.c_str());
  }
}

struct GateRun {
  int code = 0;
  std::string output;
};

GateRun run_gate(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  GateRun r;
  r.code = run_cli(args, out, err);
  r.output = out.str();
  if (!err.str().empty()) std::fprintf(stderr, "  gate stderr: %s", err.str().c_str());
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spit(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("dds_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// ---------------------------------------------------------------------------
// End-to-end fixture: a clean 60-item dataset with every input the gate takes.
// defect 0 = golden; 1..8 plant exactly one violation each.

struct FixturePaths {
  fs::path manifest, odd, annotations, attestations, audit_log, rules, expected,
      seal, config, content_dir, report;
};

const char* kCreated = "2024-03-01T00:00:00Z";

FixturePaths build_fixture(const fs::path& dir, int defect) {
  FixturePaths p;
  p.manifest = dir / "manifest.jsonl";
  p.odd = dir / "odd.json";
  p.annotations = dir / "annotations.jsonl";
  p.attestations = dir / "attestations.json";
  p.audit_log = dir / "audit_log.jsonl";
  p.rules = dir / "rules.json";
  p.expected = dir / "expected.json";
  p.seal = dir / "seal.json";
  p.config = dir / "config.json";
  p.content_dir = dir / "content";
  p.report = dir / "report.json";
  fs::create_directories(p.content_dir);

  const int n = 60;  // 40 train, 20 test
  Manifest m;
  m.header.schema_version = "dds-manifest/1";
  m.header.dataset_id = "acceptance_ds";
  m.header.created = kCreated;
  m.header.sources.push_back({"cam_a", "front camera", "acq-2.1"});
  m.header.sources.push_back({"cam_b", "rear camera", "acq-2.1"});

  std::map<std::string, std::string> contents;
  std::mt19937_64 rng(101);
  for (int i = 0; i < n; ++i) {
    char idbuf[16];
    std::snprintf(idbuf, sizeof(idbuf), "item_%03d", i);
    DataItem it;
    it.id = idbuf;
    it.source_id = i % 2 ? "cam_b" : "cam_a";
    it.split = i < 40 ? Split::train : Split::test;
    it.odd["weather"] = i % 2 ? "wet" : "dry";
    it.odd["light"] = (i / 2) % 2 ? "night" : "day";
    it.lineage.is_raw = true;
    it.lineage.raw_uri = "s3://raw/" + it.id;
    it.label = (i % 3 == 0) ? "green" : "red";
    it.simhash64 = rng();
    it.attrs["signal_id"] = "sig_" + std::to_string(i);
    it.attrs["person_id"] = "p_" + std::to_string(i);
    it.attrs["birthday"] = "1990-01-0" + std::to_string(1 + i % 9);
    it.attrs["temperature"] = 20.0 + i % 5;
    it.attrs["speed_kmh"] = 100 + i % 50;
    if (i == 10) it.ambiguous = true;
    contents[it.id] = "payload for " + it.id;
    m.items.push_back(std::move(it));
  }

  // Planted defects (before digests, seal, and annotations are derived).
  if (defect == 1) contents["item_050"] = contents["item_001"];  // REC 39
  if (defect == 2) {                                             // REC 43
    m.items[20].group_id = "sess_x";
    m.items[45].group_id = "sess_x";
  }
  if (defect == 3) {  // REC 16
    m.items[5].attrs["person_id"] = "p_dup";
    m.items[5].attrs["birthday"] = "1990-01-01";
    m.items[7].attrs["person_id"] = "p_dup";
    m.items[7].attrs["birthday"] = "1991-05-05";
  }
  if (defect == 4) m.items[12].attrs["temperature"] = "21C";   // REC 17
  if (defect == 7) m.items[3].odd["weather"] = "foggy";        // REC 4

  for (auto& it : m.items) {
    it.digest = digest_of(contents[it.id]);
    spit(p.content_dir / it.id, contents[it.id]);
  }
  m.rebuild_index();

  {
    std::ofstream out(p.manifest, std::ios::binary);
    serialize_manifest(m, out);
  }

  AnnotationSet ann;
  const char* annotators[] = {"ann_a", "ann_b", "ann_c"};
  for (int a = 0; a < 3; ++a) {
    std::vector<long> storage(n);
    for (int i = 0; i < n; ++i) storage[i] = i;
    std::mt19937_64 arng(200 + a);
    std::shuffle(storage.begin(), storage.end(), arng);
    for (int i = 0; i < n; ++i) {
      AnnotationRecord r;
      r.item_id = m.items[i].id;
      r.annotator = annotators[a];
      r.label = *m.items[i].label;
      r.at = kCreated;
      r.seq = i;
      r.storage_index = (defect == 6 && a == 2) ? i : storage[i];  // REC 37
      r.method = AnnotationMethod::manual;
      ann.records.push_back(std::move(r));
    }
  }
  if (defect == 5)  // REC 38
    ann.records.push_back(
        {"item_000", "", "green", kCreated, 60, 60, AnnotationMethod::manual});
  {
    std::ofstream out(p.annotations, std::ios::binary);
    serialize_annotations(ann, out);
  }

  Json attestations = Json::array();
  for (const RecInfo& info : rec_registry())
    if (info.mode != RecMode::automated)
      attestations.push_back(Json{{"rec_id", info.id},
                                  {"status", "attested_pass"},
                                  {"by", "qa_lead"},
                                  {"date", "2024-03-02T00:00:00Z"},
                                  {"note", "reviewed"}});
  spit(p.attestations, attestations.dump(2) + "\n");

  auto log = chain_entries(
      {{"2024-03-01T08:00:00Z", "eve", AuditAction::add, {"item_000"},
        "initial import", ""},
       {"2024-03-01T09:00:00Z", "eve", AuditAction::modify, {"item_010"},
        "flagged as ambiguous", ""}});
  if (defect == 8) log[1].prev_digest = zero_digest();  // REC 19
  {
    std::ofstream out(p.audit_log, std::ios::binary);
    serialize_audit_log(log, out);
  }

  spit(p.odd, R"({
  "dimensions": [
    {"name": "weather", "kind": "categorical", "levels": ["dry", "wet"]},
    {"name": "light", "kind": "categorical", "levels": ["day", "night"]}
  ]
}
)");
  spit(p.rules, R"([
  {"rule_id": "unique_ids", "kind": "unique", "field": "id"},
  {"rule_id": "speed_range", "kind": "in_range", "field": "speed_kmh", "lo": 0, "hi": 320},
  {"rule_id": "one_birthday", "kind": "same_object_same_value",
   "object_key_field": "person_id", "value_field": "birthday"},
  {"rule_id": "weather_set", "kind": "in_set", "field": "weather",
   "allowed": ["dry", "wet", "foggy"]}
]
)");
  spit(p.expected, R"({
  "weather": {"dry": 0.5, "wet": 0.5},
  "light": {"day": 0.5, "night": 0.5}
}
)");
  spit(p.config, R"({"sample_target": 0.2}
)");

  SealCommitment seal = seal_split(m, Split::test, kCreated);
  {
    std::ofstream out(p.seal, std::ios::binary);
    serialize_seal(seal, out);
  }
  return p;
}

GateRun run_fixture(const FixturePaths& p) {
  return run_gate({"check",
                   "--manifest", p.manifest.string(),
                   "--odd", p.odd.string(),
                   "--annotations", p.annotations.string(),
                   "--attestations", p.attestations.string(),
                   "--audit-log", p.audit_log.string(),
                   "--rules", p.rules.string(),
                   "--expected", p.expected.string(),
                   "--content-dir", p.content_dir.string(),
                   "--seal", p.seal.string(),
                   "--config", p.config.string(),
                   "--all",
                   "--min-count", "1",
                   "--target-bound", "0.5",
                   "--object-key", "signal_id",
                   "--format", "json",
                   "--out", p.report.string()});
}

std::map<int, std::string> statuses_of(const fs::path& report) {
  Json j = Json::parse(slurp(report));
  std::map<int, std::string> out;
  for (const auto& e : j.at("entries"))
    out[e.at("rec_id").get<int>()] = e.at("status").get<std::string>();
  return out;
}

bool blocking(const std::string& status) {
  return status == "fail" || status == "attested_fail" ||
         status == "manual_pending";
}

// ---------------------------------------------------------------------------

long double bound_ref(long double p_hat, long n, long double delta) {
  long double lt = std::log(1.0L / delta);
  return p_hat + std::sqrt(2.0L * p_hat * lt / (long double)n) +
         2.0L * lt / (long double)n;
}

double enumerate_run_tail(const std::vector<double>& probs, long length,
                          long run_at_least) {
  if (run_at_least <= 1) return 1.0;
  const std::size_t k = probs.size();
  std::vector<std::size_t> seq(length, 0);
  long double tail = 0.0;
  while (true) {
    long double w = 1.0;
    long run = 1, longest = 1;
    for (long i = 0; i < length; ++i) {
      w *= probs[seq[i]];
      if (i > 0) {
        run = (seq[i] == seq[i - 1]) ? run + 1 : 1;
        longest = std::max(longest, run);
      }
    }
    if (longest >= run_at_least) tail += w;
    long pos = length - 1;
    while (pos >= 0 && seq[pos] == k - 1) seq[pos--] = 0;
    if (pos < 0) break;
    ++seq[pos];
  }
  return double(tail);
}

void criterion_1() {
  auto t0 = std::chrono::steady_clock::now();
  double b1 = test_bound(0.0, 1000, 0.05);
  double b2 = test_bound(0.01, 10000, 0.01);
  auto t1 = std::chrono::steady_clock::now();
  expect(std::abs(b1 - 0.005991465) <= 1e-9, "test_bound(0,1000,0.05)");
  expect(std::abs(b2 - 0.01395589) <= 1e-7, "test_bound(0.01,10000,0.01)");
  expect(std::abs(b1 - double(bound_ref(0.0L, 1000, 0.05L))) <= 1e-15,
         "independent evaluation, case 1");
  expect(std::abs(b2 - double(bound_ref(0.01L, 10000, 0.01L))) <= 1e-12,
         "independent evaluation, case 2");
  double us = std::chrono::duration<double, std::micro>(t1 - t0).count();
  expect(us < 1000.0, "runtime under 1 ms");
}

void criterion_2() {
  auto t0 = std::chrono::steady_clock::now();
  expect(required_test_size(0.0, 0.001, 0.05) == 5992, "spot value 5992");
  std::mt19937_64 rng(7);
  auto uni = [&](double lo, double hi) {
    return lo + (hi - lo) * (double(rng() >> 11) * 0x1.0p-53);
  };
  for (int trial = 0; trial < 1000; ++trial) {
    double p = uni(0.0, 0.2);
    double delta = uni(0.001, 0.2);
    double target = p + uni(1e-6, 0.1);
    long n = required_test_size(p, target, delta);
    bool minimal = test_bound(p, n, delta) <= target &&
                   (n == 1 || test_bound(p, n - 1, delta) > target);
    if (!minimal) {
      expect(false, "minimality at trial " + std::to_string(trial));
      return;
    }
  }
  auto t1 = std::chrono::steady_clock::now();
  double s = std::chrono::duration<double>(t1 - t0).count();
  expect(s < 1.0, "runtime under 1 s");
}

void criterion_3() {
  expect(std::abs(longest_run_p_value({0.5, 0.5}, 4, 3) - 6.0 / 16.0) == 0.0,
         "m=4 k=2 run>=3 equals 6/16 exactly");
  for (std::size_t k = 2; k <= 3; ++k) {
    std::vector<std::vector<double>> prob_sets;
    prob_sets.push_back(std::vector<double>(k, 1.0 / double(k)));
    std::vector<double> skew(k);
    double sum = 0.0;
    for (std::size_t j = 0; j < k; ++j) { skew[j] = double(j + 1); sum += skew[j]; }
    for (auto& x : skew) x /= sum;
    prob_sets.push_back(skew);
    for (long m = 2; m <= 12; ++m)
      for (long L = 2; L <= m; ++L)
        for (const auto& probs : prob_sets) {
          double dp = longest_run_p_value(probs, m, L);
          double brute = enumerate_run_tail(probs, m, L);
          if (std::abs(dp - brute) > 1e-12) {
            expect(false, "mismatch at k=" + std::to_string(k) +
                              " m=" + std::to_string(m) + " L=" + std::to_string(L));
            return;
          }
        }
  }
}

void criterion_4() {
  auto kappa_of = [](const std::vector<std::string>& la,
                     const std::vector<std::string>& lb) {
    AnnotationSet s;
    for (std::size_t i = 0; i < la.size(); ++i) {
      std::string id = "i" + std::to_string(i);
      s.records.push_back({id, "a", la[i], kCreated, long(i), long(i),
                           AnnotationMethod::manual});
      s.records.push_back({id, "b", lb[i], kCreated, long(i), long(i),
                           AnnotationMethod::manual});
    }
    return agreement(s).pairs.at(0).kappa;
  };

  std::vector<std::string> half = {"x", "x", "x", "y", "y", "y"};
  expect(std::abs(kappa_of(half, half) - 1.0) <= 1e-12, "perfect agreement");

  std::vector<std::string> la, lb;
  for (int i = 0; i < 10; ++i) {
    la.push_back(i < 5 ? "x" : "y");
    std::string b = la.back();
    if (i == 4) b = "y";
    if (i == 9) b = "x";
    lb.push_back(b);
  }
  expect(std::abs(kappa_of(la, lb) - 0.6) <= 1e-12, "4/4/2 table gives 0.6");

  std::mt19937_64 rng(13);
  const std::vector<std::string> names = {"u", "v", "w"};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> a(25), b(25);
    for (int i = 0; i < 25; ++i) {
      a[i] = int(rng() % 3);
      b[i] = (rng() % 3 == 0) ? int(rng() % 3) : a[i];
    }
    std::vector<int> perm = {0, 1, 2};
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::string> pa, pb, ra, rb;
    for (int i = 0; i < 25; ++i) {
      pa.push_back(names[a[i]]);
      pb.push_back(names[b[i]]);
      ra.push_back(names[perm[a[i]]]);
      rb.push_back(names[perm[b[i]]]);
    }
    if (std::abs(kappa_of(pa, pb) - kappa_of(ra, rb)) > 1e-12) {
      expect(false, "renaming invariance at trial " + std::to_string(trial));
      return;
    }
  }
}

void criterion_5() {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    Manifest m;
    m.header.schema_version = "dds-manifest/1";
    m.header.dataset_id = "leak";
    m.header.created = kCreated;
    m.header.sources.push_back({"s", "", "v1"});
    const int n = 1500 + int(rng() % 500);
    for (int i = 0; i < n; ++i) {
      DataItem it;
      it.id = "n" + std::to_string(100000 + i);
      it.digest = digest_of(it.id);
      it.source_id = "s";
      it.split = (i % 4 == 0) ? Split::test : Split::train;
      it.simhash64 = rng();
      m.items.push_back(std::move(it));
    }
    // Plant 5 cross-split pairs at Hamming distance <= 3.
    std::vector<LeakagePair> planted;
    for (int pair = 0; pair < 5; ++pair) {
      int train_idx = 1 + 4 * (int(rng() % (n / 4 - 1)));
      int test_idx = 4 * pair;
      std::uint64_t h = *m.items[train_idx].simhash64;
      int flips = int(rng() % 4);
      for (int f = 0; f < flips; ++f) h ^= (1ull << (rng() % 64));
      m.items[test_idx].simhash64 = h;
    }
    m.rebuild_index();

    // Quadratic oracle.
    std::vector<LeakagePair> brute;
    for (std::size_t i = 0; i < m.items.size(); ++i)
      for (std::size_t j = i + 1; j < m.items.size(); ++j) {
        const auto& a = m.items[i];
        const auto& b = m.items[j];
        if (a.split == b.split) continue;
        int dist = int(std::popcount(*a.simhash64 ^ *b.simhash64));
        if (dist > 3) continue;
        if (a.id <= b.id)
          brute.push_back({a.id, b.id, dist});
        else
          brute.push_back({b.id, a.id, dist});
      }
    std::sort(brute.begin(), brute.end());

    auto t0 = std::chrono::steady_clock::now();
    auto banded = near_duplicate_leakage(m, 3, 4);
    auto t1 = std::chrono::steady_clock::now();
    if (banded != brute) {
      expect(false, "set mismatch at seed " + std::to_string(seed));
      return;
    }
    expect(brute.size() >= 5, "planted pairs present at seed " + std::to_string(seed));
    double s = std::chrono::duration<double>(t1 - t0).count();
    if (s >= 5.0) {
      expect(false, "fixture exceeded 5 s at seed " + std::to_string(seed));
      return;
    }
  }
}

void criterion_6() {
  Manifest m;
  m.header.schema_version = "dds-manifest/1";
  m.header.dataset_id = "integrity";
  m.header.created = kCreated;
  m.header.sources.push_back({"s", "", "v1"});
  std::map<std::string, std::string> contents;
  for (int i = 0; i < 1000; ++i) {
    DataItem it;
    it.id = "c" + std::to_string(10000 + i);
    it.source_id = "s";
    it.split = (i % 5 == 0) ? Split::test : Split::train;
    contents[it.id] = "blob " + std::to_string(i) + " payload";
    it.digest = digest_of(contents[it.id]);
    m.items.push_back(std::move(it));
  }
  m.rebuild_index();

  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 100; ++trial) {
    const DataItem& victim = m.items[rng() % m.items.size()];
    auto mutated = contents;
    std::string& blob = mutated[victim.id];
    blob[rng() % blob.size()] ^= char(1 + rng() % 255);
    auto resolver = [&](const std::string& id) -> std::optional<std::string> {
      auto it = mutated.find(id);
      if (it == mutated.end()) return std::nullopt;
      return it->second;
    };
    std::vector<std::string> flagged;
    for (const auto& f : verify_item_digests(m, resolver))
      if (f.rec_id == 22 && f.status == Status::fail)
        for (const auto& id : f.evidence) flagged.push_back(id);
    if (flagged != std::vector<std::string>{victim.id}) {
      expect(false, "mutation " + std::to_string(trial) + " not isolated to " +
                        victim.id);
      return;
    }
  }

  SealCommitment seal = seal_split(m, Split::test, kCreated);
  expect(verify_seal(m, seal).status == Status::pass, "seal round trip");
  for (int trial = 0; trial < 20; ++trial) {
    Manifest tampered = m;
    std::size_t idx;
    do {
      idx = rng() % tampered.items.size();
    } while (tampered.items[idx].split != Split::test);
    tampered.items[idx].digest = digest_of("tampered " + std::to_string(trial));
    if (verify_seal(tampered, seal).status != Status::fail) {
      expect(false, "seal missed digest change at trial " + std::to_string(trial));
      return;
    }
  }
}

void criterion_7() {
  Manifest m;
  m.header.schema_version = "dds-manifest/1";
  m.header.dataset_id = "tv";
  m.header.created = kCreated;
  m.header.sources.push_back({"s", "", "v1"});
  auto add = [&](int count, const char* level) {
    for (int i = 0; i < count; ++i) {
      DataItem it;
      it.id = "t" + std::to_string(m.items.size());
      it.digest = digest_of(it.id);
      it.source_id = "s";
      it.split = Split::test;
      it.odd["fog"] = level;
      m.items.push_back(std::move(it));
    }
  };
  add(60, "strong");
  add(25, "low");
  add(15, "no");
  m.rebuild_index();
  ExpectedDistribution e;
  e.dims["fog"] = {{"strong", 0.5}, {"low", 0.3}, {"no", 0.2}};
  auto fs = proportion_check(m, Split::test, e, 0.05);
  bool found = false;
  for (const auto& f : fs)
    if (f.rec_id == 6 && f.metrics.count("tv_distance")) {
      found = true;
      expect(std::abs(f.metrics.at("tv_distance") - 0.10) <= 1e-12,
             "TV = 0.10 on the 60/25/15 fixture");
    }
  expect(found, "tv_distance metric reported");

  Manifest exact;
  exact.header = m.header;
  auto add_exact = [&](int count, const char* level) {
    for (int i = 0; i < count; ++i) {
      DataItem it;
      it.id = "e" + std::to_string(exact.items.size());
      it.digest = digest_of(it.id);
      it.source_id = "s";
      it.split = Split::test;
      it.odd["fog"] = level;
      exact.items.push_back(std::move(it));
    }
  };
  add_exact(50, "strong");
  add_exact(30, "low");
  add_exact(20, "no");
  exact.rebuild_index();
  for (const auto& f : proportion_check(exact, Split::test, e, 0.05))
    if (f.rec_id == 6 && f.metrics.count("tv_distance"))
      expect(f.metrics.at("tv_distance") == 0.0, "TV = 0 on exact match");
}

void criterion_8() {
  fs::path dir = fresh_dir("report_determinism");
  FixturePaths p = build_fixture(dir, 0);
  GateRun r1 = run_fixture(p);
  std::string first = slurp(p.report);
  GateRun r2 = run_fixture(p);
  std::string second = slurp(p.report);
  expect(r1.code == r2.code, "exit codes agree");
  expect(!first.empty(), "report emitted");
  expect(first == second, "canonical JSON byte-identical across runs");
  Json j = Json::parse(first);
  expect(j.at("entries").size() == 44, "exactly 44 REC entries");
  std::set<int> ids;
  for (const auto& e : j.at("entries")) ids.insert(e.at("rec_id").get<int>());
  expect(ids.size() == 44 && *ids.begin() == 1 && *ids.rbegin() == 44,
         "entries cover REC 1-44");
}

void criterion_9() {
  fs::path dir = fresh_dir("gate_golden");
  FixturePaths golden = build_fixture(dir, 0);
  GateRun g = run_fixture(golden);
  expect(g.code == 0, "golden fixture exits 0");
  auto golden_status = statuses_of(golden.report);
  for (const auto& [rec, st] : golden_status)
    expect(!blocking(st), "golden REC " + std::to_string(rec) + " is " + st);

  const std::map<int, int> defect_rec = {{1, 39}, {2, 43}, {3, 16}, {4, 17},
                                         {5, 38}, {6, 37}, {7, 4},  {8, 19}};
  for (const auto& [defect, rec] : defect_rec) {
    fs::path ddir = fresh_dir("gate_defect_" + std::to_string(defect));
    FixturePaths p = build_fixture(ddir, defect);
    GateRun r = run_fixture(p);
    expect(r.code == 1, "defect " + std::to_string(defect) + " exits 1");
    auto status = statuses_of(p.report);
    expect(status[rec] == "fail", "defect " + std::to_string(defect) +
                                      " fails REC " + std::to_string(rec) +
                                      " (got " + status[rec] + ")");
    for (const auto& [other, st] : status)
      if (other != rec && blocking(st))
        expect(false, "defect " + std::to_string(defect) + " regressed REC " +
                          std::to_string(other) + " to " + st);
  }
}

void criterion_10() {
  fs::path dir = fresh_dir("scale");
  const int n = 100000;
  Manifest m;
  m.header.schema_version = "dds-manifest/1";
  m.header.dataset_id = "scale_ds";
  m.header.created = kCreated;
  m.header.sources.push_back({"s", "", "v1"});
  std::mt19937_64 rng(3);
  m.items.reserve(n);
  for (int i = 0; i < n; ++i) {
    DataItem it;
    it.id = "s" + std::to_string(1000000 + i);
    it.digest = digest_of(it.id);
    it.source_id = "s";
    it.split = (i % 5 == 0) ? Split::test : Split::train;
    it.odd["weather"] = (rng() % 2) ? "wet" : "dry";
    it.odd["light"] = (rng() % 2) ? "night" : "day";
    it.lineage.is_raw = true;
    it.lineage.raw_uri = "s3://raw/" + it.id;
    it.label = (rng() % 2) ? "red" : "green";
    it.simhash64 = rng();
    m.items.push_back(std::move(it));
  }
  m.rebuild_index();
  fs::path manifest_path = dir / "manifest.jsonl";
  {
    std::ofstream out(manifest_path, std::ios::binary);
    serialize_manifest(m, out);
  }

  AnnotationSet ann;
  ann.records.reserve(n + 300);
  const char* annotators[] = {"ann_a", "ann_b", "ann_c"};
  for (int a = 0; a < 3; ++a) {
    long lo = a * (n / 3), hi = (a + 1) * (n / 3);
    long count = hi - lo + 100;  // 100 shared items for agreement
    std::vector<long> storage(count);
    for (long i = 0; i < count; ++i) storage[i] = i;
    std::mt19937_64 arng(300 + a);
    std::shuffle(storage.begin(), storage.end(), arng);
    long seq = 0;
    auto push = [&](long item_idx) {
      ann.records.push_back({m.items[item_idx].id, annotators[a],
                             *m.items[item_idx].label, kCreated, seq,
                             storage[seq], AnnotationMethod::manual});
      ++seq;
    };
    for (long i = 0; i < 100; ++i) push(i);
    for (long i = std::max(lo, 100L); i < hi; ++i) push(i);
  }
  fs::path ann_path = dir / "annotations.jsonl";
  {
    std::ofstream out(ann_path, std::ios::binary);
    serialize_annotations(ann, out);
  }
  fs::path odd_path = dir / "odd.json";
  spit(odd_path, R"({
  "dimensions": [
    {"name": "weather", "kind": "categorical", "levels": ["dry", "wet"]},
    {"name": "light", "kind": "categorical", "levels": ["day", "night"]}
  ]
}
)");

  auto t0 = std::chrono::steady_clock::now();
  GateRun r = run_gate({"check",
                        "--manifest", manifest_path.string(),
                        "--odd", odd_path.string(),
                        "--annotations", ann_path.string(),
                        "--all",
                        "--format", "json",
                        "--out", (dir / "report.json").string()});
  auto t1 = std::chrono::steady_clock::now();
  double s = std::chrono::duration<double>(t1 - t0).count();
  std::fprintf(stderr, "  scale run: %.2f s\n", s);
  expect(r.code == 0 || r.code == 1, "gate completed without usage error");
  expect(s < 10.0, "check --all under 10 s on 100k items");
  Json j = Json::parse(slurp(dir / "report.json"));
  expect(j.at("entries").size() == 44, "scale report is total");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: acceptance <criterion 1-10>\n");
    return 2;
  }
  int c = std::atoi(argv[1]);
  const char* names[] = {
      "bound arithmetic",          "bound inversion minimality",
      "run-test oracle equivalence", "kappa hand cases",
      "leakage oracle equivalence",  "integrity sensitivity",
      "tv distance",                 "report totality and determinism",
      "end-to-end gate",             "scale"};
  switch (c) {
    case 1: criterion_1(); break;
    case 2: criterion_2(); break;
    case 3: criterion_3(); break;
    case 4: criterion_4(); break;
    case 5: criterion_5(); break;
    case 6: criterion_6(); break;
    case 7: criterion_7(); break;
    case 8: criterion_8(); break;
    case 9: criterion_9(); break;
    case 10: criterion_10(); break;
    default:
      std::fprintf(stderr, "usage: acceptance <criterion 1-10>\n");
      return 2;
  }
  std::printf("criterion %d (%s): %s\n", c, names[c - 1],
              failures == 0 ? "pass" : "FAIL");
  return failures == 0 ? 0 : 1;
}

#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include "dds/errors.hpp"
#include "dds/splits.hpp"
#include "test_util.hpp"

using namespace dds;
using namespace dds::test;

namespace {

// Independent evaluation of the bound in long double, term by term.
long double bound_ref(long double p_hat, long n, long double delta) {
  long double lt = std::log(1.0L / delta);
  return p_hat + std::sqrt(2.0L * p_hat * lt / (long double)n) +
         2.0L * lt / (long double)n;
}

std::vector<LeakagePair> brute_force_pairs(const Manifest& m, int max_distance) {
  std::vector<LeakagePair> out;
  for (std::size_t i = 0; i < m.items.size(); ++i)
    for (std::size_t j = i + 1; j < m.items.size(); ++j) {
      const auto& a = m.items[i];
      const auto& b = m.items[j];
      if (!a.simhash64 || !b.simhash64) continue;
      if (a.split == Split::unassigned || b.split == Split::unassigned) continue;
      if (a.split == b.split) continue;
      int dist = std::popcount(*a.simhash64 ^ *b.simhash64);
      if (dist > max_distance) continue;
      if (a.id <= b.id)
        out.push_back({a.id, b.id, dist});
      else
        out.push_back({b.id, a.id, dist});
    }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("test_bound frozen values") {
  CHECK(test_bound(0.0, 1000, 0.05) == doctest::Approx(0.005991465).epsilon(1e-9));
  CHECK(test_bound(0.01, 10000, 0.01) == doctest::Approx(0.01395589).epsilon(1e-7));
  CHECK(test_bound(0.0, 1000, 0.05) ==
        doctest::Approx(double(bound_ref(0.0L, 1000, 0.05L))).epsilon(1e-15));
}

TEST_CASE("test_bound matches an independent evaluation on random inputs") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    double p = double(rng() % 1000) / 2000.0;  // [0, 0.5)
    long n = 10 + long(rng() % 100000);
    double delta = 0.001 + 0.4 * (double(rng() % 1000) / 1000.0);
    CHECK(test_bound(p, n, delta) ==
          doctest::Approx(double(bound_ref(p, n, delta))).epsilon(1e-12));
  }
}

TEST_CASE("test_bound is monotone: decreasing in n, increasing in p and delta^-1") {
  CHECK(test_bound(0.01, 2000, 0.05) < test_bound(0.01, 1000, 0.05));
  CHECK(test_bound(0.02, 1000, 0.05) > test_bound(0.01, 1000, 0.05));
  CHECK(test_bound(0.01, 1000, 0.01) > test_bound(0.01, 1000, 0.05));
  CHECK(test_bound(0.01, 1000, 0.05) > 0.01);  // always exceeds p_hat
}

TEST_CASE("test_bound input validation") {
  CHECK_THROWS_AS(test_bound(-0.1, 100, 0.05), InvalidParameter);
  CHECK_THROWS_AS(test_bound(1.1, 100, 0.05), InvalidParameter);
  CHECK_THROWS_AS(test_bound(0.1, 0, 0.05), InvalidParameter);
  CHECK_THROWS_AS(test_bound(0.1, 100, 0.0), InvalidParameter);
  CHECK_THROWS_AS(test_bound(0.1, 100, 1.0), InvalidParameter);
}

TEST_CASE("required_test_size frozen values") {
  CHECK(required_test_size(0.0, 0.001, 0.05) == 5992);
  CHECK(required_test_size(0.02, 0.03, 0.05) == 2237);
}

TEST_CASE("required_test_size inverts test_bound minimally") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 1000; ++trial) {
    double p = double(rng() % 1000) / 5000.0;  // [0, 0.2)
    double delta = 0.001 + 0.3 * (double(rng() % 1000) / 1000.0);
    double target = p + 0.001 + 0.1 * (double(rng() % 1000) / 1000.0);
    long n = required_test_size(p, target, delta);
    CHECK(test_bound(p, n, delta) <= target);
    if (n > 1) CHECK(test_bound(p, n - 1, delta) > target);
  }
}

TEST_CASE("required_test_size rejects unreachable targets") {
  CHECK_THROWS_AS(required_test_size(0.05, 0.05, 0.05), InvalidParameter);
  CHECK_THROWS_AS(required_test_size(0.05, 0.01, 0.05), InvalidParameter);
}

TEST_CASE("check_disjoint passes clean splits and flags shared digests") {
  Manifest ok = manifest_of({item("a", Split::train), item("b", Split::test)});
  CHECK(has_rec(check_disjoint(ok), 39, Status::pass));

  DataItem tr = item("tr", Split::train);
  DataItem te = item("te", Split::test);
  te.digest = tr.digest;
  Manifest leaky = manifest_of({tr, te, item("c", Split::validation)});
  auto fs = check_disjoint(leaky);
  const Finding* f = find_rec(fs, 39, Status::fail);
  REQUIRE(f != nullptr);
  CHECK(f->evidence == std::vector<std::string>{"tr", "te"});
}

TEST_CASE("check_disjoint warns about unassigned items") {
  Manifest m = manifest_of({item("a", Split::train), item("u", Split::unassigned)});
  auto fs = check_disjoint(m);
  const Finding* f = find_rec(fs, 39, Status::warn);
  REQUIRE(f != nullptr);
  CHECK(f->evidence == std::vector<std::string>{"u"});
}

TEST_CASE("group integrity flags groups spanning splits") {
  DataItem a = item("a", Split::train);
  a.group_id = "session_1";
  DataItem b = item("b", Split::test);
  b.group_id = "session_1";
  DataItem c = item("c", Split::train);
  c.group_id = "session_2";
  Manifest m = manifest_of({a, b, c});
  auto fs = check_group_integrity(m);
  const Finding* f = find_rec(fs, 43, Status::fail);
  REQUIRE(f != nullptr);
  CHECK(f->evidence == std::vector<std::string>{"session_1"});

  b.split = Split::train;
  Manifest ok = manifest_of({a, b, c});
  CHECK(has_rec(check_group_integrity(ok), 43, Status::pass));
}

TEST_CASE("group integrity flags augmentations crossing splits") {
  DataItem parent = item("orig", Split::train);
  DataItem aug = item("aug", Split::test);
  TransformStep t;
  t.op_name = "rotate";
  t.params = Json{{"parent_id", "orig"}, {"degrees", 15}};
  aug.lineage.transforms.push_back(t);
  Manifest m = manifest_of({parent, aug});
  auto fs = check_group_integrity(m);
  const Finding* f = find_rec(fs, 43, Status::fail);
  REQUIRE(f != nullptr);
  CHECK(f->evidence == std::vector<std::string>{"aug", "orig"});

  aug.split = Split::train;
  Manifest ok = manifest_of({parent, aug});
  CHECK(has_rec(check_group_integrity(ok), 43, Status::pass));
}

TEST_CASE("near-duplicate leakage basics") {
  DataItem a = item("a", Split::train);
  a.simhash64 = 0xDEADBEEF12345678ull;
  DataItem b = item("b", Split::test);
  b.simhash64 = 0xDEADBEEF12345679ull;  // distance 1
  DataItem c = item("c", Split::test);
  c.simhash64 = ~0xDEADBEEF12345678ull;  // distance 64
  Manifest m = manifest_of({a, b, c});
  auto pairs = near_duplicate_leakage(m, 3, 4);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0] == LeakagePair{"a", "b", 1});
}

TEST_CASE("same-split near duplicates are not leakage") {
  DataItem a = item("a", Split::train);
  a.simhash64 = 42;
  DataItem b = item("b", Split::train);
  b.simhash64 = 42;
  Manifest m = manifest_of({a, b});
  CHECK(near_duplicate_leakage(m, 3, 4).empty());
}

TEST_CASE("banding parameters are validated") {
  Manifest m = manifest_of({item("a", Split::train)});
  CHECK_THROWS_AS(near_duplicate_leakage(m, 3, 5), InvalidBanding);
  CHECK_THROWS_AS(near_duplicate_leakage(m, 4, 4), InvalidBanding);
  CHECK_THROWS_AS(near_duplicate_leakage(m, -1, 4), InvalidBanding);
}

TEST_CASE("banded index matches the quadratic oracle on seeded fixtures") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(seed);
    std::vector<DataItem> items;
    std::vector<std::uint64_t> base;
    for (int i = 0; i < 40; ++i) base.push_back(rng());
    for (int i = 0; i < 120; ++i) {
      Split s = (i % 3 == 0) ? Split::test : Split::train;
      DataItem it = item("n" + std::to_string(1000 + i), s);
      // Mostly perturbations of a few base hashes so collisions are common.
      std::uint64_t h = base[rng() % base.size()];
      int flips = int(rng() % 5);
      for (int f = 0; f < flips; ++f) h ^= (1ull << (rng() % 64));
      it.simhash64 = h;
      if (rng() % 10 == 0) it.simhash64.reset();
      items.push_back(std::move(it));
    }
    Manifest m = manifest_of(std::move(items));
    for (int d : {0, 1, 3}) {
      CAPTURE(seed);
      CAPTURE(d);
      CHECK(near_duplicate_leakage(m, d, 4) == brute_force_pairs(m, d));
    }
    CHECK(near_duplicate_leakage(m, 7, 8) == brute_force_pairs(m, 7));
  }
}

TEST_CASE("count_missing_simhash") {
  DataItem a = item("a");
  a.simhash64 = 1;
  Manifest m = manifest_of({a, item("b"), item("c")});
  CHECK(count_missing_simhash(m) == 2);
}

TEST_CASE("bias scan flags a near-deterministic ODD level") {
  OddSchema schema;
  schema.dimensions.push_back(
      {"location", DimKind::categorical, {"tunnel", "station"}});
  std::vector<DataItem> items;
  auto add = [&](int n, const char* level, const char* label) {
    for (int i = 0; i < n; ++i) {
      DataItem it = item("b" + std::to_string(items.size()));
      it.odd["location"] = level;
      it.label = label;
      items.push_back(std::move(it));
    }
  };
  // In tunnels the label is always "red"; globally "red" is about half.
  add(40, "tunnel", "red");
  add(35, "station", "green");
  add(5, "station", "red");
  Manifest m = manifest_of(std::move(items));
  auto fs = bias_scan(m, schema, 0.99, 30);
  const Finding* f = find_rec(fs, 42, Status::fail);
  REQUIRE(f != nullptr);
  CHECK(f->evidence == std::vector<std::string>{"location=tunnel", "red"});
  CHECK(f->metrics.at("conditional_frequency") == doctest::Approx(1.0));
  CHECK(f->metrics.at("support") == 40.0);

  // Below min_support the same pattern is not reported.
  CHECK(has_rec(bias_scan(m, schema, 0.99, 50), 42, Status::pass));
}

TEST_CASE("bias scan ignores globally dominant labels") {
  OddSchema schema;
  schema.dimensions.push_back(
      {"location", DimKind::categorical, {"tunnel", "station"}});
  std::vector<DataItem> items;
  for (int i = 0; i < 80; ++i) {
    DataItem it = item("g" + std::to_string(i));
    it.odd["location"] = i % 2 ? "tunnel" : "station";
    it.label = "red";  // dominant everywhere, so no conditional signal
    items.push_back(std::move(it));
  }
  Manifest m = manifest_of(std::move(items));
  CHECK(has_rec(bias_scan(m, schema, 0.99, 30), 42, Status::pass));
}

TEST_CASE("bias scan requires labels") {
  OddSchema schema;
  schema.dimensions.push_back({"location", DimKind::categorical, {"tunnel"}});
  Manifest m = manifest_of({item("a")});
  CHECK_THROWS_AS(bias_scan(m, schema, 0.99, 30), MissingLabels);
}

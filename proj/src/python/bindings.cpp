#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "dds/annotation.hpp"
#include "dds/cli.hpp"
#include "dds/digest.hpp"
#include "dds/manifest.hpp"
#include "dds/odd.hpp"
#include "dds/report.hpp"
#include "dds/splits.hpp"

namespace py = pybind11;

namespace {

double kappa_from_labels(const std::vector<std::string>& a,
                         const std::vector<std::string>& b) {
  if (a.size() != b.size() || a.empty())
    throw py::value_error("label lists must be non-empty and equal-length");
  dds::AnnotationSet set;
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::string item = "item_" + std::to_string(i);
    set.records.push_back({item, "a", a[i], "1970-01-01T00:00:00Z", long(i), long(i),
                           dds::AnnotationMethod::manual});
    set.records.push_back({item, "b", b[i], "1970-01-01T00:00:00Z", long(i), long(i),
                           dds::AnnotationMethod::manual});
  }
  return dds::agreement(set).pairs.front().kappa;
}

std::vector<std::tuple<std::string, std::string, int>> near_duplicates(
    const std::vector<std::tuple<std::string, std::string, std::uint64_t>>& items,
    int max_distance, int bands) {
  dds::Manifest m;
  m.header.schema_version = "dds-manifest/1";
  m.header.dataset_id = "py";
  m.header.created = "1970-01-01T00:00:00Z";
  m.header.sources.push_back({"src", "", "v1"});
  for (const auto& [id, split, hash] : items) {
    dds::DataItem it;
    it.id = id;
    it.digest = dds::digest_of(id);
    it.source_id = "src";
    auto sp = dds::split_from_string(split);
    if (!sp) throw py::value_error("unknown split: " + split);
    it.split = *sp;
    it.simhash64 = hash;
    m.items.push_back(std::move(it));
  }
  m.rebuild_index();
  std::vector<std::tuple<std::string, std::string, int>> out;
  for (const auto& p : dds::near_duplicate_leakage(m, max_distance, bands))
    out.emplace_back(p.item_a, p.item_b, p.distance);
  return out;
}

std::string check_report(const std::string& manifest_path,
                         const std::vector<std::string>& extra_args) {
  std::vector<std::string> args = {"check", "--manifest", manifest_path,
                                   "--format", "json"};
  for (const auto& a : extra_args) args.push_back(a);
  std::ostringstream out, err;
  int rc = dds::run_cli(args, out, err);
  if (rc == 2) throw py::value_error(err.str());
  return out.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "dds-gate core operations";

  m.def("test_bound",
        [](double p_hat, long n, double delta) {
          return dds::test_bound(p_hat, n, delta);
        },
        py::arg("p_hat"), py::arg("n"), py::arg("delta"),
        "Upper bound on the true error rate at confidence 1-delta.");
  m.def("required_test_size", &dds::required_test_size, py::arg("p_hat"),
        py::arg("target_upper"), py::arg("delta"),
        "Smallest test-set size meeting the bound.");
  m.def("audit_sample_plan",
        [](long population, double delta, double target) {
          auto plan = dds::audit_sample_plan(population, delta, target);
          return py::make_tuple(plan.n, plan.capped);
        },
        py::arg("population"), py::arg("delta"), py::arg("target_bound"));
  m.def("cohen_kappa", &kappa_from_labels, py::arg("labels_a"), py::arg("labels_b"),
        "Cohen's kappa between two aligned label lists.");
  m.def("longest_run_p_value", &dds::longest_run_p_value, py::arg("probs"),
        py::arg("length"), py::arg("run_at_least"),
        "Exact tail probability of the longest identical-label run.");
  m.def("tv_distance", &dds::tv_distance, py::arg("p"), py::arg("q"),
        "Total variation distance between two discrete distributions.");
  m.def("near_duplicate_pairs", &near_duplicates, py::arg("items"),
        py::arg("max_distance") = 3, py::arg("bands") = 4,
        "Cross-split near-duplicate pairs from (id, split, simhash64) tuples.");
  m.def("sha256_digest", [](py::bytes b) { return dds::digest_of(std::string(b)); },
        "Algorithm-prefixed content digest of raw bytes.");
  m.def("check", &check_report, py::arg("manifest_path"),
        py::arg("extra_args") = std::vector<std::string>{},
        "Run the gate on a manifest; returns the canonical JSON report.");
}

#include "dds/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "dds/annotation.hpp"
#include "dds/consistency.hpp"
#include "dds/errors.hpp"
#include "dds/integrity.hpp"
#include "dds/manifest.hpp"
#include "dds/odd.hpp"
#include "dds/report.hpp"
#include "dds/splits.hpp"

namespace dds {
namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DdsError("cannot open " + path);
  return in;
}

void load_config_file(const std::string& path, GateConfig& cfg) {
  auto in = open_input(path);
  Json j = Json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw DdsError("config file must be a JSON object: " + path);
  auto num = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  num("min_count", cfg.min_count);
  num("tv_threshold", cfg.tv_threshold);
  if (j.contains("missing_dim_fail"))
    cfg.missing_dim_fail = j.at("missing_dim_fail").get<bool>();
  if (j.contains("outlier_fields"))
    cfg.outlier_fields = j.at("outlier_fields").get<std::vector<std::string>>();
  num("outlier_threshold", cfg.outlier_threshold);
  if (j.contains("object_key")) cfg.object_key = j.at("object_key").get<std::string>();
  num("min_kappa", cfg.min_kappa);
  num("run_p_threshold", cfg.run_p_threshold);
  num("rho_threshold", cfg.rho_threshold);
  num("randomness_p_threshold", cfg.randomness_p_threshold);
  num("seed", cfg.seed);
  num("max_distance", cfg.max_distance);
  num("bands", cfg.bands);
  num("purity_threshold", cfg.purity_threshold);
  num("min_support", cfg.min_support);
  num("delta", cfg.delta);
  num("target_bound", cfg.target_bound);
  num("sample_delta", cfg.sample_delta);
  num("sample_target", cfg.sample_target);
}

struct CheckInputs {
  Manifest manifest;
  std::optional<OddSchema> schema;
  std::optional<AnnotationSet> annotations;
  std::vector<AttestationRecord> attestations;
  std::optional<std::vector<AuditLogEntry>> audit_log;
  std::optional<std::vector<ConsistencyRule>> rules;
  std::optional<ExpectedDistribution> expected;
  std::optional<SealCommitment> seal;
  std::string content_dir;
};

ContentResolver directory_resolver(const std::string& dir) {
  return [dir](const std::string& id) -> std::optional<std::string> {
    std::ifstream in(dir + "/" + id, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  };
}

void run_integrity_checks(const CheckInputs& in, const GateConfig&,
                          std::vector<Finding>& findings) {
  if (!in.content_dir.empty()) {
    auto fs = verify_item_digests(in.manifest, directory_resolver(in.content_dir));
    findings.insert(findings.end(), fs.begin(), fs.end());
  }
  if (in.audit_log) {
    auto fs = verify_audit_chain(*in.audit_log);
    findings.insert(findings.end(), fs.begin(), fs.end());
  }
  if (in.seal) findings.push_back(verify_seal(in.manifest, *in.seal));
}

void run_odd_checks(const CheckInputs& in, const GateConfig& cfg,
                    std::vector<Finding>& findings) {
  if (!in.schema) return;
  auto trace = check_traceability(in.manifest, *in.schema,
                                  cfg.missing_dim_fail ? MissingDimPolicy::fail
                                                       : MissingDimPolicy::warn);
  findings.insert(findings.end(), trace.begin(), trace.end());
  std::vector<std::vector<std::string>> dims;
  for (const auto& d : in.schema->dimensions) dims.push_back({d.name});
  auto [table, cov] = coverage(in.manifest, *in.schema, dims, cfg.min_count);
  findings.insert(findings.end(), cov.begin(), cov.end());
  if (in.expected) {
    auto props =
        proportion_check(in.manifest, Split::test, *in.expected, cfg.tv_threshold);
    findings.insert(findings.end(), props.begin(), props.end());
  }
}

void run_consistency_checks(const CheckInputs& in, const GateConfig& cfg,
                            std::vector<Finding>& findings) {
  if (in.rules) {
    AnnotationSet empty;
    auto fs = check_rules(in.manifest, in.annotations ? *in.annotations : empty,
                          *in.rules);
    findings.insert(findings.end(), fs.begin(), fs.end());
  }
  auto rep = check_representation(in.manifest);
  findings.insert(findings.end(), rep.begin(), rep.end());
  auto dup = duplicate_findings(group_exact_duplicates(in.manifest));
  findings.insert(findings.end(), dup.begin(), dup.end());
  OutlierPolicy policy;
  policy.fields = cfg.outlier_fields;
  policy.threshold = cfg.outlier_threshold;
  auto outl = detect_outliers(in.manifest, policy);
  findings.insert(findings.end(), outl.begin(), outl.end());
}

void run_annotation_checks(const CheckInputs& in, const GateConfig& cfg,
                           std::vector<Finding>& findings) {
  if (!in.annotations) return;
  const AnnotationSet& ann = *in.annotations;
  auto trace = check_annotation_traceability(ann);
  findings.insert(findings.end(), trace.begin(), trace.end());

  try {
    AgreementResult agr = agreement(ann);
    Status st = agr.mean_kappa >= cfg.min_kappa ? Status::pass : Status::fail;
    findings.push_back(make_finding(
        29, st,
        st == Status::pass
            ? "inter-annotator agreement meets the configured minimum"
            : "inter-annotator agreement below the configured minimum",
        {},
        {{"mean_kappa", agr.mean_kappa},
         {"pairs", double(agr.pairs.size())},
         {"min_kappa", cfg.min_kappa}}));
  } catch (const InsufficientOverlap&) {
    findings.push_back(make_finding(
        29, Status::warn, "no annotator pair shares items; agreement not computable"));
  }

  if (!cfg.object_key.empty()) {
    auto fs = check_object_label_consistency(in.manifest, ann, cfg.object_key);
    findings.insert(findings.end(), fs.begin(), fs.end());
  }

  bool rec28_attested = false;
  for (const auto& a : in.attestations)
    if (a.rec_id == 28 && a.status == AttestationStatus::attested_pass)
      rec28_attested = true;
  auto amb = check_ambiguity_handling(in.manifest, ann, rec28_attested);
  findings.insert(findings.end(), amb.begin(), amb.end());

  std::set<std::string> annotators;
  std::set<std::string> annotated_items;
  for (const auto& r : ann.records) {
    annotators.insert(r.annotator);
    annotated_items.insert(r.item_id);
  }
  // Per-annotator tests are independent and the permutation test is the
  // most expensive check in the gate, so they run concurrently; results are
  // appended in annotator order to keep the report deterministic.
  std::vector<std::future<std::pair<Finding, Finding>>> futures;
  for (const auto& name : annotators)
    futures.push_back(std::async(std::launch::async, [&ann, &cfg, name] {
      Finding run;
      try {
        run = run_length_finding(run_length_test(ann, name, cfg.seed),
                                 cfg.run_p_threshold);
      } catch (const InsufficientData&) {
        run = make_finding(36, Status::warn,
                           "annotator " + name + ": too few records for run test",
                           {name});
      }
      Finding rand = assignment_randomness(ann, name, cfg.seed, 10000,
                                           cfg.rho_threshold,
                                           cfg.randomness_p_threshold)
                         .finding;
      return std::make_pair(std::move(run), std::move(rand));
    }));
  for (auto& f : futures) {
    auto [run, rand] = f.get();
    findings.push_back(std::move(run));
    findings.push_back(std::move(rand));
  }

  if (!annotated_items.empty()) {
    SamplePlan plan = audit_sample_plan(long(annotated_items.size()),
                                        cfg.sample_delta, cfg.sample_target);
    if (plan.capped)
      findings.push_back(make_finding(
          35, Status::warn,
          "population smaller than statistically required sample", {},
          {{"sample_size", double(plan.n)},
           {"population", double(annotated_items.size())}}));
    else
      findings.push_back(make_finding(
          35, Status::pass, "audit sample plan computed", {},
          {{"sample_size", double(plan.n)},
           {"population", double(annotated_items.size())},
           {"delta", cfg.sample_delta},
           {"target_bound", cfg.sample_target}}));
  }
}

void run_splits_checks(const CheckInputs& in, const GateConfig& cfg,
                       std::vector<Finding>& findings) {
  auto disj = check_disjoint(in.manifest);
  findings.insert(findings.end(), disj.begin(), disj.end());
  auto grp = check_group_integrity(in.manifest);
  findings.insert(findings.end(), grp.begin(), grp.end());

  long missing = count_missing_simhash(in.manifest);
  if (missing < long(in.manifest.items.size())) {
    auto pairs = near_duplicate_leakage(in.manifest, cfg.max_distance, cfg.bands);
    for (const auto& p : pairs)
      findings.push_back(make_finding(
          43, Status::fail,
          "near-duplicate content crosses splits (Hamming distance " +
              std::to_string(p.distance) + ")",
          {p.item_a, p.item_b}, {{"distance", double(p.distance)}}));
    if (pairs.empty())
      findings.push_back(make_finding(43, Status::pass,
                                      "no near-duplicate leakage across splits", {},
                                      {{"max_distance", double(cfg.max_distance)}}));
  }
  if (missing > 0)
    findings.push_back(make_finding(
        43, Status::warn,
        std::to_string(missing) + " item(s) lack simhash64 and were skipped by "
                                  "the near-duplicate index"));

  if (in.schema) {
    try {
      auto bias =
          bias_scan(in.manifest, *in.schema, cfg.purity_threshold, cfg.min_support);
      findings.insert(findings.end(), bias.begin(), bias.end());
    } catch (const MissingLabels&) {
      findings.push_back(
          make_finding(42, Status::warn, "no labelled items; bias scan skipped"));
    }
  }

  long test_n = 0;
  bool test_has_groups = false;
  for (const auto& it : in.manifest.items)
    if (it.split == Split::test) {
      ++test_n;
      if (it.group_id) test_has_groups = true;
    }
  if (test_n == 0) {
    findings.push_back(make_finding(44, Status::fail, "test split is empty"));
  } else {
    double bound = test_bound(0.0, test_n, cfg.delta);
    long needed = required_test_size(0.0, cfg.target_bound, cfg.delta);
    std::string caution =
        test_has_groups
            ? "; caution: test items carry group_ids, correlated items may "
              "inflate effective confidence"
            : "";
    std::map<std::string, double> metrics = {{"test_size", double(test_n)},
                                             {"bound_at_zero_error", bound},
                                             {"required_size", double(needed)},
                                             {"delta", cfg.delta},
                                             {"target_bound", cfg.target_bound}};
    if (bound <= cfg.target_bound)
      findings.push_back(make_finding(
          44, Status::pass,
          "test split large enough for the configured error bound" + caution, {},
          metrics));
    else
      findings.push_back(make_finding(
          44, Status::fail,
          "test split too small for the configured error bound (needs " +
              std::to_string(needed) + ")" + caution,
          {}, metrics));
  }
}

int write_output(const std::string& text, const std::string& out_path,
                 std::ostream& out, std::ostream& err) {
  if (out_path.empty()) {
    out << text;
    return 0;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) {
    err << "cannot write " << out_path << "\n";
    return 2;
  }
  f << text;
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"dds-gate: dataset certification gate"};
  app.require_subcommand(1);

  GateConfig cfg;
  std::string config_path;
  if (const char* env = std::getenv("DDS_CONFIG")) config_path = env;
  for (std::size_t i = 0; i + 1 < args.size(); ++i)
    if (args[i] == "--config") config_path = args[i + 1];
  try {
    if (!config_path.empty()) load_config_file(config_path, cfg);
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return 2;
  }

  std::string manifest_path, odd_path, annotations_path, attestations_path;
  std::string audit_log_path, rules_path, expected_path, content_dir, seal_path;
  std::string out_path, format = "text", generated_at, split_name = "test";
  std::string findings_path, dataset_id_flag;
  bool all = false, lenient = false;
  bool grp_integrity = false, grp_consistency = false, grp_annotation = false,
       grp_splits = false;
  double size_delta = 0.05, size_target = 0.0, size_p_hat = 0.0;
  long size_n = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file (or DDS_CONFIG)");
    sub->add_option("--format", format, "report format: json or text")
        ->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--out", out_path, "output path (default stdout)");
    sub->add_flag("--lenient", lenient,
                  "manual_pending entries do not block the gate");
    sub->add_option("--generated-at", generated_at,
                    "report timestamp (default: manifest created)");
  };

  CLI::App* validate = app.add_subcommand("validate", "parse inputs, report errors");
  validate->add_option("--manifest", manifest_path)->required();
  validate->add_option("--annotations", annotations_path);
  validate->add_option("--odd", odd_path);
  validate->add_option("--rules", rules_path);
  validate->add_option("--attestations", attestations_path);
  validate->add_option("--audit-log", audit_log_path);
  validate->add_option("--config", config_path);

  CLI::App* check = app.add_subcommand("check", "run check groups and report");
  check->add_option("--manifest", manifest_path)->required();
  check->add_option("--odd", odd_path, "ODD schema (selects the ODD check group)");
  check->add_option("--annotations", annotations_path);
  check->add_option("--attestations", attestations_path);
  check->add_option("--audit-log", audit_log_path);
  check->add_option("--rules", rules_path);
  check->add_option("--expected", expected_path, "expected distribution file");
  check->add_option("--content-dir", content_dir, "directory of item contents");
  check->add_option("--seal", seal_path, "seal file to verify");
  check->add_flag("--all", all, "run every group with available inputs");
  check->add_flag("--integrity", grp_integrity);
  check->add_flag("--consistency", grp_consistency);
  check->add_flag("--annotation", grp_annotation);
  check->add_flag("--splits", grp_splits);
  check->add_option("--max-distance", cfg.max_distance);
  check->add_option("--bands", cfg.bands);
  check->add_option("--purity-threshold", cfg.purity_threshold);
  check->add_option("--min-support", cfg.min_support);
  check->add_option("--min-count", cfg.min_count);
  check->add_option("--tv-threshold", cfg.tv_threshold);
  check->add_option("--delta", cfg.delta);
  check->add_option("--target-bound", cfg.target_bound);
  check->add_option("--object-key", cfg.object_key);
  check->add_option("--seed", cfg.seed);
  add_common(check);

  CLI::App* seal_cmd = app.add_subcommand("seal", "commit to a split's contents");
  seal_cmd->add_option("--manifest", manifest_path)->required();
  seal_cmd->add_option("--split", split_name);
  seal_cmd->add_option("--out", out_path);
  seal_cmd->add_option("--sealed-at", generated_at);
  seal_cmd->add_option("--config", config_path);

  CLI::App* verify_seal_cmd =
      app.add_subcommand("verify-seal", "check a split against its seal");
  verify_seal_cmd->add_option("--manifest", manifest_path)->required();
  verify_seal_cmd->add_option("--seal", seal_path)->required();
  verify_seal_cmd->add_option("--config", config_path);

  CLI::App* size_cmd =
      app.add_subcommand("size", "test-set size bound calculator");
  size_cmd->add_option("--delta", size_delta)->required();
  size_cmd->add_option("--target", size_target);
  size_cmd->add_option("--p-hat", size_p_hat);
  size_cmd->add_option("--n", size_n, "evaluate the bound at this size");
  size_cmd->add_option("--config", config_path);

  CLI::App* report_cmd =
      app.add_subcommand("report", "merge saved findings and attestations");
  report_cmd->add_option("--findings", findings_path)->required();
  report_cmd->add_option("--attestations", attestations_path);
  report_cmd->add_option("--dataset-id", dataset_id_flag);
  add_common(report_cmd);

  std::vector<const char*> argv;
  argv.push_back("dds");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (size_cmd->parsed()) {
      if (size_n > 0) {
        out << format_metric(test_bound(size_p_hat, size_n, size_delta)) << "\n";
      } else if (size_target > 0.0) {
        out << required_test_size(size_p_hat, size_target, size_delta) << "\n";
      } else {
        err << "usage error: size requires --target or --n\n";
        return 2;
      }
      return 0;
    }

    if (validate->parsed()) {
      auto mi = open_input(manifest_path);
      Manifest m = load_manifest(mi);
      out << "manifest ok: " << m.items.size() << " item(s)\n";
      if (!annotations_path.empty()) {
        auto ai = open_input(annotations_path);
        AnnotationSet a = load_annotations(ai);
        out << "annotations ok: " << a.records.size() << " record(s)\n";
      }
      if (!odd_path.empty()) {
        auto oi = open_input(odd_path);
        OddSchema schema = load_odd_schema(oi);
        auto fs = validate_schema(schema);
        bool ok = true;
        for (const auto& f : fs)
          if (f.status == Status::fail) {
            err << "odd schema: " << f.message << "\n";
            ok = false;
          }
        if (!ok) return 2;
        out << "odd schema ok: " << schema.dimensions.size() << " dimension(s)\n";
      }
      if (!rules_path.empty()) {
        auto ri = open_input(rules_path);
        out << "rules ok: " << load_rules(ri).size() << " rule(s)\n";
      }
      if (!attestations_path.empty()) {
        auto ti = open_input(attestations_path);
        out << "attestations ok: " << load_attestations(ti).size() << " record(s)\n";
      }
      if (!audit_log_path.empty()) {
        auto li = open_input(audit_log_path);
        out << "audit log ok: " << load_audit_log(li).size() << " entry(ies)\n";
      }
      return 0;
    }

    if (seal_cmd->parsed()) {
      auto mi = open_input(manifest_path);
      Manifest m = load_manifest(mi);
      auto sp = split_from_string(split_name);
      if (!sp) {
        err << "usage error: unknown split " << split_name << "\n";
        return 2;
      }
      std::string sealed_at = generated_at.empty() ? m.header.created : generated_at;
      SealCommitment c = seal_split(m, *sp, sealed_at);
      std::ostringstream os;
      serialize_seal(c, os);
      return write_output(os.str(), out_path, out, err);
    }

    if (verify_seal_cmd->parsed()) {
      auto mi = open_input(manifest_path);
      Manifest m = load_manifest(mi);
      auto si = open_input(seal_path);
      SealCommitment c = load_seal(si);
      Finding f = verify_seal(m, c);
      out << to_string(f.status) << ": " << f.message << "\n";
      return f.status == Status::pass ? 0 : 1;
    }

    if (report_cmd->parsed()) {
      auto fi = open_input(findings_path);
      Json fj = Json::parse(fi, nullptr, false);
      if (fj.is_discarded()) throw DdsError("findings file is not valid JSON");
      std::vector<Finding> findings = findings_from_json(fj);
      std::vector<AttestationRecord> attestations;
      if (!attestations_path.empty()) {
        auto ti = open_input(attestations_path);
        attestations = load_attestations(ti);
      }
      std::string gen = generated_at.empty() ? "1970-01-01T00:00:00Z" : generated_at;
      ComplianceReport rep =
          assemble(findings, attestations,
                   dataset_id_flag.empty() ? "unknown" : dataset_id_flag, gen,
                   lenient);
      int rc = write_output(
          render(rep, format == "json" ? ReportFormat::json : ReportFormat::text),
          out_path, out, err);
      return rc != 0 ? rc : rep.exit_code;
    }

    // check
    CheckInputs in;
    {
      auto mi = open_input(manifest_path);
      in.manifest = load_manifest(mi);
    }
    if (!odd_path.empty()) {
      auto oi = open_input(odd_path);
      OddSchema schema = load_odd_schema(oi);
      for (const auto& f : validate_schema(schema))
        if (f.status == Status::fail)
          throw DdsError("invalid ODD schema: " + f.message);
      in.schema = std::move(schema);
    }
    if (!annotations_path.empty()) {
      auto ai = open_input(annotations_path);
      in.annotations = load_annotations(ai);
    }
    if (!attestations_path.empty()) {
      auto ti = open_input(attestations_path);
      in.attestations = load_attestations(ti);
    }
    if (!audit_log_path.empty()) {
      auto li = open_input(audit_log_path);
      in.audit_log = load_audit_log(li);
    }
    if (!rules_path.empty()) {
      auto ri = open_input(rules_path);
      in.rules = load_rules(ri);
    }
    if (!expected_path.empty()) {
      auto ei = open_input(expected_path);
      in.expected = load_expected_distribution(ei);
    }
    if (!seal_path.empty()) {
      auto si = open_input(seal_path);
      in.seal = load_seal(si);
    }
    in.content_dir = content_dir;

    bool explicit_groups =
        grp_integrity || grp_consistency || grp_annotation || grp_splits ||
        in.schema.has_value();
    bool run_all = all || !explicit_groups;

    std::vector<Finding> findings;
    {
      auto fs = check_lineage(in.manifest);
      findings.insert(findings.end(), fs.begin(), fs.end());
    }
    if (run_all || grp_integrity) run_integrity_checks(in, cfg, findings);
    if (run_all || in.schema) run_odd_checks(in, cfg, findings);
    if (run_all || grp_consistency) run_consistency_checks(in, cfg, findings);
    if (run_all || grp_annotation) run_annotation_checks(in, cfg, findings);
    if (run_all || grp_splits) run_splits_checks(in, cfg, findings);

    std::string gen = generated_at;
    if (gen.empty())
      if (const char* env = std::getenv("DDS_GENERATED_AT")) gen = env;
    if (gen.empty()) gen = in.manifest.header.created;

    ComplianceReport rep = assemble(findings, in.attestations,
                                    in.manifest.header.dataset_id, gen, lenient);
    int rc = write_output(
        render(rep, format == "json" ? ReportFormat::json : ReportFormat::text),
        out_path, out, err);
    return rc != 0 ? rc : rep.exit_code;
  } catch (const DdsError& ex) {
    err << "error: " << ex.what() << "\n";
    return 2;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return 2;
  }
}

}  // namespace dds

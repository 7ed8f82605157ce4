#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dds/types.hpp"

namespace dds {

struct SamplePlan {
  long n = 0;
  bool capped = false;  // population smaller than statistically required
};

/// REC 35 sizing via the REC 44 bound at p̂ = 0:
/// smallest n with 2·ln(1/δ)/n ≤ target_bound, capped at the population.
SamplePlan audit_sample_plan(long population, double delta, double target_bound);

struct PairAgreement {
  std::string annotator_a;
  std::string annotator_b;
  long n_shared = 0;
  double p_o = 0.0;
  double p_e = 0.0;
  double kappa = 0.0;
  bool degenerate_marginals = false;  // p_e == 1, reported as kappa = 1
};

struct AgreementResult {
  std::vector<PairAgreement> pairs;
  double mean_kappa = 0.0;
};

/// Pairwise Cohen's kappa over shared items; chance agreement from the two
/// annotators' marginal label frequencies on the shared set.
AgreementResult agreement(const AnnotationSet& a);

/// REC 27: one object of interest, one label.
std::vector<Finding> check_object_label_consistency(const Manifest& m,
                                                    const AnnotationSet& a,
                                                    const std::string& object_key);

/// REC 31 (ambiguous data labelled manually) and the automated half of
/// REC 28 (ambiguities reviewed by experts, evidenced by attestation).
std::vector<Finding> check_ambiguity_handling(const Manifest& m,
                                              const AnnotationSet& a,
                                              bool rec28_attested);

enum class RunTestMethod { exhaustive, monte_carlo };

struct RunTestResult {
  std::string annotator;
  long longest_run = 0;
  long sequence_length = 0;
  double p_value = 1.0;
  RunTestMethod method = RunTestMethod::exhaustive;
  std::uint64_t seed = 0;
  long draws = 0;
};

/// P(longest run >= run_at_least) for an i.i.d. sequence of the given length
/// with the given label probabilities. Exact (dynamic program over run states).
double longest_run_p_value(const std::vector<double>& probs, long length,
                           long run_at_least);

/// Same tail probability, estimated by seeded Monte Carlo.
double longest_run_p_value_mc(const std::vector<double>& probs, long length,
                              long run_at_least, std::uint64_t seed, long draws);

/// REC 36: longest run of identical consecutive labels in the annotator's
/// seq order, against the null of i.i.d. draws from the annotator's own
/// empirical label frequencies.
RunTestResult run_length_test(const AnnotationSet& a, const std::string& annotator,
                              std::uint64_t seed);

Finding run_length_finding(const RunTestResult& r, double p_threshold = 0.01);

/// Spearman rank correlation with average ranks for ties.
double spearman_rho(const std::vector<double>& x, const std::vector<double>& y);

struct RandomnessResult {
  std::string annotator;
  long n = 0;
  double rho = 0.0;
  double p_value = 1.0;
  Finding finding;
};

/// REC 37: correlation between annotation order (seq) and storage order,
/// permutation-tested at a fixed seed.
RandomnessResult assignment_randomness(const AnnotationSet& a,
                                       const std::string& annotator,
                                       std::uint64_t seed = 0,
                                       long permutations = 10000,
                                       double rho_threshold = 0.5,
                                       double p_threshold = 0.01);

}  // namespace dds

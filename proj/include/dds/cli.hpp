#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dds {

/// Gate configuration: JSON config file (DDS_CONFIG or --config), with CLI
/// flags taking precedence.
struct GateConfig {
  long min_count = 30;
  double tv_threshold = 0.05;
  bool missing_dim_fail = false;
  std::vector<std::string> outlier_fields;
  double outlier_threshold = 3.5;
  std::string object_key;
  double min_kappa = 0.6;
  double run_p_threshold = 0.01;
  double rho_threshold = 0.5;
  double randomness_p_threshold = 0.01;
  std::uint64_t seed = 0;
  int max_distance = 3;
  int bands = 4;
  double purity_threshold = 0.99;
  long min_support = 30;
  double delta = 0.05;
  double target_bound = 0.01;
  double sample_delta = 0.05;
  double sample_target = 0.01;
};

/// Entry point shared by the dds binary and in-process tests.
/// args excludes argv[0]. Returns the process exit code (0/1/2).
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace dds

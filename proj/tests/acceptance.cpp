// SPDX-License-Identifier: Apache-2.0
//
// Acceptance criteria, one PASS/FAIL line each. Exit status is nonzero when
// any criterion fails.

#include "ssrs/harness/validation.hpp"

#include <iostream>

int main(int argc, char** argv) {
  using namespace ssrs::harness;
  const std::string filter = argc > 1 ? argv[1] : "";

  // Criterion numbering follows the acceptance list; ordering trends share 7.
  const std::vector<std::pair<std::string, std::string>> labels = {
      {"quadform_oracle", "1"},          {"lse_sandwich", "2"},
      {"kkt_gradient", "3"},             {"fixed_point_residual", "4"},
      {"block_solve_equivalence", "5"},  {"convergence_speed", "6"},
      {"ordering_rsma_vs_sdma", "7a"},   {"ordering_eavesdroppers", "7b"},
      {"ordering_angular_separation", "7c"}, {"ordering_kappa", "7d"},
      {"expectation_ratio_approx", "8"}, {"channel_statistics", "9"},
      {"determinism", "10"},
  };
  auto label = [&](const std::string& name) {
    for (const auto& [n, l] : labels)
      if (n == name) return l;
    return std::string("?");
  };

  bool all = true;
  for (const auto& r : run_validation(validation_suite(), filter)) {
    std::cout << "[" << label(r.name) << "] " << format_check(r) << std::endl;
    all = all && r.pass;
  }
  return all ? 0 : 1;
}

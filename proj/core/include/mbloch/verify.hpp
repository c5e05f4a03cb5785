#pragma once

// Acceptance suite: ten property checks over the whole library, each made
// of named measurements compared against pinned bounds.

#include <string>
#include <vector>

namespace mbloch {

struct Measurement {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool at_most = true;  // value <= bound, otherwise value >= bound
  bool pass = false;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;  // one line, the first failing measurement or a summary
  std::vector<Measurement> checks;
};

/// All criteria, or the listed ids only.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& only = {});

CriterionResult check_formulation_equivalence();  // 1
CriterionResult check_conservation();             // 2
CriterionResult check_beta_constraint();          // 3
CriterionResult check_casimir();                  // 4
CriterionResult check_lax_pair();                 // 5
CriterionResult check_potential_spectrum();       // 6
CriterionResult check_neumann_limit();            // 7
CriterionResult check_sine_gordon();              // 8
CriterionResult check_reduced_sphere();           // 9
CriterionResult check_round_trips();              // 10

/// One "PASS|FAIL [id] name: detail" line per criterion, each followed by
/// its indented measurements.
std::string format_results(const std::vector<CriterionResult>& results, bool verbose = true);

}  // namespace mbloch

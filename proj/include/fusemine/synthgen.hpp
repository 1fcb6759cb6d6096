#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fusemine/model.hpp"
#include "fusemine/table.hpp"

namespace fusemine {

// The ten fused attributes in merge order (theory, practice, online).
const std::vector<std::string>& fused_attribute_names();
// The ten fused attributes as Low/Medium/High nominals.
std::vector<AttributeSpec> discretized_inputs();
AttributeSpec status_spec();

// IF Moodle.Quiz = High THEN Pass, ..., ELSE Pass over discretized_inputs().
RuleList default_ruleset();
Model default_ruleset_model();

struct CohortSpec {
  std::size_t n_students = 57;
  std::vector<std::size_t> class_counts = {19, 17, 21};  // Pass, Fail, Dropout
  double noise = 0.0;
  // Nominal equality rules over discretized_inputs().
  RuleList ruleset = default_ruleset();
  // One weight per rule plus a final entry for students that match no rule
  // and fall to the default class. Empty: equal weights per class, 0 for
  // the default-only entry.
  std::vector<double> rule_weights;
  std::size_t theory_sessions = 15;
  std::size_t practice_sessions = 10;
  std::size_t practicals = 5;
  std::uint64_t seed = 1;

  // Throws InvalidParams.
  void validate() const;
  // n_students and class_counts multiplied by `factor`.
  CohortSpec scaled(std::size_t factor) const;
  // n students, class counts split in the current proportions by largest
  // remainder (ties go to the earlier class).
  CohortSpec resized(std::size_t n) const;
};

// A cohort on which PART's best-leaf order recovers the planted list in its
// original wording: mostly Pass, R2 the largest rule, and some Pass
// students matching no rule at all.
CohortSpec showcase_spec(std::uint64_t seed = 1);

struct Cohort {
  SourceBundle raw;           // theory, practice, online, exam
  DataTable truth;            // id, Planted (class before noise), Status
  std::vector<Encoded> fused;  // per student (id order), fused_attribute_names() order
  std::vector<std::size_t> planted;
  std::vector<std::size_t> labels;  // after noise
};

// Throws InfeasibleRuleset when some class (or weighted rule) has no cell
// that satisfies it while violating every other class's rules.
Cohort generate(const CohortSpec& spec);

}  // namespace fusemine

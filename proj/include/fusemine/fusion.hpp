#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fusemine/learners.hpp"
#include "fusemine/model.hpp"
#include "fusemine/parallel.hpp"
#include "fusemine/table.hpp"
#include "json.hpp"

namespace fusemine {

enum class Approach { MergeAll, SelectBest, Ensemble, EnsembleSelect };

inline constexpr std::array<Approach, 4> kAllApproaches = {
    Approach::MergeAll, Approach::SelectBest, Approach::Ensemble, Approach::EnsembleSelect};

// Tags: merge, select, ensemble, ensemble-select.
std::string_view to_string(Approach a);
// Throws InvalidParams.
Approach parse_approach(std::string_view tag);
std::string_view display_name(Approach a);

bool is_ensemble(Approach a);
bool uses_selection(Approach a);

enum class CombinationRule { AverageOfProbabilities };

struct FusionConfig {
  Approach approach = Approach::MergeAll;
  // Per-source vote weights. Missing sources weigh 1.
  std::map<std::string, double, std::less<>> weights;
  CombinationRule rule = CombinationRule::AverageOfProbabilities;

  double weight_of(std::string_view source) const;
  // Throws InvalidParams for non-positive weights or weights naming
  // sources that are not in `sources`.
  void validate(std::span<const std::string> sources) const;
  nlohmann::json to_json() const;
  static FusionConfig from_json(const nlohmann::json& doc);
};

// Parses "1,1,2" against the given source order. Throws InvalidParams.
std::map<std::string, double, std::less<>> parse_weights(std::string_view text,
                                                         std::span<const std::string> sources);

// Weighted average of class distributions: sum(w_s * p_s) / sum(w_s).
// Throws LengthMismatch when counts or widths disagree and InvalidParams for
// non-positive weights.
std::vector<double> vote_predict(std::span<const std::vector<double>> dists,
                                 std::span<const double> weights);

struct VoteMember {
  std::string source;
  double weight = 1.0;
  Model model;
};

class VoteModel {
 public:
  VoteModel() = default;
  explicit VoteModel(std::vector<VoteMember> members,
                     CombinationRule rule = CombinationRule::AverageOfProbabilities);

  const std::vector<VoteMember>& members() const { return members_; }
  CombinationRule rule() const { return rule_; }
  std::size_t num_classes() const;
  const AttributeSpec& class_spec() const;

  // One instance part per member, each in that member's input order.
  // Throws SchemaMismatch when the parts do not line up with the members.
  std::vector<double> distribution(std::span<const std::vector<Value>> parts) const;
  // Every member reads its inputs by name from the same table.
  std::vector<std::vector<double>> distributions(const DataTable& table) const;
  // One table per member.
  std::vector<std::vector<double>> distributions(std::span<const DataTable> tables) const;
  std::vector<std::size_t> predictions(const DataTable& table) const;

  friend bool operator==(const VoteModel& a, const VoteModel& b);

 private:
  std::vector<VoteMember> members_;
  CombinationRule rule_ = CombinationRule::AverageOfProbabilities;
};

// Sections headed by source name and weight, each holding the member's
// render_rules() text.
std::string render_vote(const VoteModel& vote);
nlohmann::json vote_to_json(const VoteModel& vote);
VoteModel vote_from_json(const nlohmann::json& doc);

using FittedModel = std::variant<Model, VoteModel>;

std::vector<std::vector<double>> fitted_distributions(const FittedModel& m, const DataTable& table);
std::string render_fitted(const FittedModel& m);
nlohmann::json fitted_to_json(const FittedModel& m);
// Accepts documents written by model_to_json as well.
FittedModel fitted_from_json(const nlohmann::json& doc);

// Merged dataset for the naive approaches; the exam source is left out.
inline constexpr std::string_view kMergedName = "merged";

// Which datasets an approach trains on and which attributes each keeps.
struct ApproachPlan {
  Approach approach = Approach::MergeAll;
  // "merged" for the naive approaches, else the input source names.
  std::vector<std::string> datasets;
  // Kept input names per dataset, in original order.
  std::map<std::string, std::vector<std::string>, std::less<>> attributes;
  std::map<std::string, double, std::less<>> weights;

  nlohmann::json to_json() const;
};

// Id-free dataset of one input source plus the class column.
DataTable source_dataset(const SourceBundle& bundle, std::string_view source);

// Runs CFS where the approach calls for it. An empty CFS subset keeps the
// single attribute with the highest class SU so a learner always has input.
ApproachPlan plan_approach(const FusionConfig& config, const SourceBundle& bundle,
                           Execution exec = Execution::Parallel);

// Datasets named in the plan, reduced to the planned attributes. Rows follow
// student id order in every dataset.
std::vector<DataTable> plan_datasets(const ApproachPlan& plan, const SourceBundle& bundle);

// One model per dataset; an ensemble plan wraps them in a VoteModel.
FittedModel fit_plan(const ApproachPlan& plan, std::span<const DataTable> datasets,
                     Algorithm algorithm, const LearnerParams& params, std::uint64_t seed);

struct ApproachResult {
  ApproachPlan plan;
  std::vector<DataTable> datasets;
  FittedModel model;
};

ApproachResult run_approach(const FusionConfig& config, const SourceBundle& bundle,
                            Algorithm algorithm, const LearnerParams& params = {},
                            std::uint64_t seed = 1, Execution exec = Execution::Parallel);

}  // namespace fusemine

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fusemine/fusion.hpp"
#include "fusemine/learners.hpp"
#include "fusemine/parallel.hpp"
#include "fusemine/preprocess.hpp"
#include "fusemine/table.hpp"
#include "json.hpp"

namespace fusemine {

enum class Variant { Numeric, Discretized };

inline constexpr std::array<Variant, 2> kAllVariants = {Variant::Numeric, Variant::Discretized};

// Tags: numeric, discretized.
std::string_view to_string(Variant v);
// Throws InvalidParams.
Variant parse_variant(std::string_view tag);

struct FoldPlan {
  std::size_t k = 10;
  std::uint64_t seed = 1;
  std::vector<std::vector<std::size_t>> folds;  // held-out rows, ascending

  std::vector<std::size_t> test_rows(std::size_t fold) const { return folds[fold]; }
  std::vector<std::size_t> train_rows(std::size_t fold) const;
};

// Rows are shuffled within each class, classes are laid end to end in index
// order and positions are dealt round-robin to folds. Throws TooFewRows when
// some class has no rows or k exceeds the row count, InvalidParams for k < 2.
FoldPlan stratified_kfold(std::span<const std::size_t> labels, std::size_t num_classes, std::size_t k,
                          std::uint64_t seed);
FoldPlan stratified_kfold(const DataTable& dataset, std::size_t k, std::uint64_t seed);

// 100 * correct / total. Throws LengthMismatch, TooFewRows when empty.
double accuracy(std::span<const std::size_t> predictions, std::span<const std::size_t> truth);

// Mann-Whitney AUC with midranks. Throws SingleClassTruth when every label
// is positive or every label is negative.
double auc_binary(std::span<const double> scores, std::span<const bool> positive);

struct AucReport {
  double weighted = 0.0;
  // Empty where the class is absent from the truth or makes up all of it.
  std::vector<std::optional<double>> per_class;
  std::vector<double> prevalence;
};

// One-vs-rest AUC per class, averaged with class prevalence as weights over
// the classes where it is defined. Throws SingleClassTruth when no class
// has a defined AUC and LengthMismatch on ragged input.
AucReport auc_weighted(const std::vector<std::vector<double>>& dists, std::span<const std::size_t> truth);

// Numeric and discretized bundles of one cohort. `fused` (session-fused,
// labelled, not yet normalized) is only needed for fold-local refitting.
struct ExperimentData {
  SourceBundle numeric;
  SourceBundle discretized;
  std::optional<SourceBundle> fused;
  PreprocessConfig preprocess;

  const SourceBundle& variant(Variant v) const { return v == Variant::Numeric ? numeric : discretized; }
  static ExperimentData from_raw(const SourceBundle& raw, const PreprocessConfig& config = {});
};

struct CvOptions {
  std::size_t k = 10;
  std::uint64_t seed = 1;
  // Mean of per-fold accuracies instead of pooling every held-out prediction.
  bool mean_of_folds = false;
  // Run CFS on each training portion instead of once on all rows.
  bool fold_local_selection = false;
  // Refit normalization and binning on each training portion. Also on when
  // the data's PreprocessConfig asks for fold_local_refit.
  bool fold_local_preprocess = false;
  LearnerParams learner;

  void validate() const;
};

struct EvaluationRow {
  Algorithm algorithm = Algorithm::C45;
  double accuracy_pct = 0.0;
  double auc = 0.0;  // NaN when undefined
  std::vector<std::optional<double>> class_auc;
  std::vector<std::vector<std::size_t>> confusion;  // [truth][predicted]
  std::map<std::string, double, std::less<>> weights;  // ensemble approaches only
};

EvaluationRow cross_validate(const FusionConfig& config, Algorithm algorithm, const ExperimentData& data,
                             Variant variant, const CvOptions& options = {});

struct WeightSearchResult {
  std::map<std::string, double, std::less<>> weights;
  double accuracy_pct = 0.0;
  // Every assignment tried, in enumeration order, with its accuracy.
  std::vector<std::pair<std::vector<double>, double>> evaluated;
};

// Tries every assignment of `grid` values to the input sources (first source
// varying slowest) under cross-validation and keeps the most accurate. Ties
// go to the all-ones assignment, then to the earliest in enumeration order.
// Base models are trained once per fold; only the vote is recomputed per
// assignment. Throws InvalidParams for fewer than two sources, an empty or
// non-positive grid, or a non-ensemble approach.
WeightSearchResult weight_search(const FusionConfig& config, Algorithm algorithm, const ExperimentData& data,
                                 Variant variant, const CvOptions& options = {},
                                 std::span<const double> grid = std::array<double, 2>{1.0, 2.0});

struct EvaluationReport {
  Approach approach = Approach::MergeAll;
  Variant variant = Variant::Numeric;
  std::uint64_t seed = 1;
  std::vector<EvaluationRow> rows;
  double mean_accuracy = 0.0;
  double mean_auc = 0.0;  // NaN when any row's AUC is undefined

  void recompute_averages();
};

struct GridOptions {
  std::vector<Algorithm> algorithms{kAllAlgorithms.begin(), kAllAlgorithms.end()};
  std::vector<Approach> approaches{kAllApproaches.begin(), kAllApproaches.end()};
  std::vector<Variant> variants{kAllVariants.begin(), kAllVariants.end()};
  CvOptions cv;
  std::map<std::string, double, std::less<>> weights;
  bool weight_search = false;
  Execution exec = Execution::Parallel;
};

struct BestCell {
  Approach approach = Approach::MergeAll;
  Variant variant = Variant::Numeric;
  Algorithm algorithm = Algorithm::C45;
  double accuracy_pct = 0.0;
  double auc = 0.0;
};

struct GridReport {
  std::vector<EvaluationReport> tables;  // approach-major, then variant
  BestCell best;
};

// Every cell derives its own seeds, so the serial and parallel paths agree.
GridReport run_experiment_grid(const ExperimentData& data, const GridOptions& options = {});

// Report row labels: J48, REPTree, Randomtree, Jrip, PART, Nnge.
std::string_view display_name(Algorithm a);

// approach,variant,algorithm,accuracy_pct,auc with 4 decimals.
std::string report_csv(const GridReport& report);
// One block per approach with the variants side by side and an Avg. row.
std::string render_tables(const GridReport& report);
// Averages per approach and variant.
std::string render_summary(const GridReport& report);
nlohmann::json report_to_json(const GridReport& report);

}  // namespace fusemine

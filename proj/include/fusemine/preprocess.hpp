#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fusemine/table.hpp"
#include "json.hpp"

namespace fusemine {

// Class labels in index order.
inline const std::vector<std::string> kStatusLabels = {"Pass", "Fail", "Dropout"};
inline constexpr std::size_t kPass = 0;
inline constexpr std::size_t kFail = 1;
inline constexpr std::size_t kDropout = 2;
inline constexpr std::string_view kStatusName = "Status";

struct NormalizationParams {
  double min = 0.0;
  double max = 0.0;

  // Constant columns (min == max) map to 0.
  double apply(double x) const { return max > min ? (x - min) / (max - min) : 0.0; }
};

// Throws EmptyColumn when no value is present.
NormalizationParams fit_min_max(std::span<const Value> column);
std::vector<Value> apply_min_max(std::span<const Value> column, const NormalizationParams& p);
std::pair<std::vector<Value>, NormalizationParams> min_max_normalize(std::span<const Value> column);

struct BinningParams {
  std::size_t n_bins = 3;
  std::vector<std::string> labels = {"Low", "Medium", "High"};
  double min = 0.0;
  double max = 0.0;

  // Interior cut points min + i*(max-min)/n_bins for i = 1..n_bins-1.
  std::vector<double> boundaries() const;
  // Half-open bins, the top one closed; out-of-range values clamp.
  std::size_t bin_of(double v) const;
  void validate() const;
};

BinningParams fit_equal_width(std::span<const Value> column, std::size_t n_bins = 3,
                              std::vector<std::string> labels = {"Low", "Medium", "High"});
std::vector<Value> equal_width_discretize(std::span<const Value> column, const BinningParams& p);

struct ClassRule {
  double pass_threshold = 5.0;
  void validate() const;
};

// Absent score -> Dropout, score >= threshold -> Pass, otherwise Fail.
std::size_t label_class(std::optional<double> exam_score, const ClassRule& rule);

// Collapses `<Attr>.s<k>` column groups: numeric by mean, nominal by mode
// (ties go to the smallest label index). Other columns pass through.
DataTable fuse_sessions(const DataTable& table);

// Caps values above the q-quantile (nearest rank). Not part of the default
// pipeline; available for outlier-heavy columns such as connection time.
std::vector<Value> winsorize_upper(std::span<const Value> column, double quantile = 0.99);

struct AnonymizeResult {
  SourceBundle bundle;
  DataTable mapping;  // original_id (id), anonymous_id
};

AnonymizeResult anonymize(const SourceBundle& bundle, std::uint64_t seed);

struct PreprocessConfig {
  std::size_t n_bins = 3;
  std::vector<std::string> bin_labels = {"Low", "Medium", "High"};
  double pass_threshold = 5.0;
  std::uint64_t seed = 1;
  bool fold_local_refit = false;

  static PreprocessConfig from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
  void validate() const;
};

struct ColumnParams {
  NormalizationParams normalization;
  BinningParams binning;
};

// Fitted per-source, per-column parameters.
struct PreprocessParams {
  std::map<std::string, std::map<std::string, ColumnParams>> columns;
  ClassRule class_rule;
  nlohmann::json to_json() const;
};

struct PreprocessResult {
  SourceBundle numeric;
  SourceBundle discretized;
  PreprocessParams params;
};

// Session fusion for every source and exam-score labelling. Tables come back
// sorted by id so row i is the same student in every source.
SourceBundle fuse_bundle(const SourceBundle& raw, const ClassRule& rule);

// Fits normalization and binning on the given rows of a fused bundle.
PreprocessParams fit_preprocess(const SourceBundle& fused, std::span<const std::size_t> rows,
                                const PreprocessConfig& config);
std::pair<SourceBundle, SourceBundle> apply_preprocess(const SourceBundle& fused,
                                                       const PreprocessParams& params);

PreprocessResult preprocess_bundle(const SourceBundle& raw, const PreprocessConfig& config);

}  // namespace fusemine

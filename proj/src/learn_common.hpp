#pragma once

// Shared machinery for the learners. Not installed.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fusemine/learners.hpp"
#include "fusemine/model.hpp"

namespace fusemine::detail {

using Rows = std::vector<std::size_t>;

struct TrainData {
  std::vector<AttributeSpec> inputs;
  AttributeSpec cls;
  std::vector<double> medians;
  std::vector<Encoded> X;
  std::vector<std::size_t> y;
  std::size_t k = 0;

  bool nominal(std::size_t a) const { return inputs[a].is_nominal(); }
  // Nominal categories including the missing one.
  std::size_t categories(std::size_t a) const { return inputs[a].labels.size() + 1; }
  std::size_t dims() const { return inputs.size(); }
  Rows all_rows() const;
};

// Drops rows with a missing class. Throws SchemaMismatch without a nominal class.
TrainData prepare(const DataTable& dataset);

std::vector<double> class_counts(const TrainData& d, std::span<const std::size_t> rows);
double entropy_bits(std::span<const double> counts);
double total(std::span<const double> counts);
// Ties go to the smallest index.
std::size_t argmax(std::span<const double> counts);

// Assigns each row to one of `folds` folds, stratified by class. Rows are
// ordered by a seeded hash of their content, so the assignment does not
// depend on the order rows arrive in.
std::vector<std::size_t> content_folds(const TrainData& d, std::span<const std::size_t> rows,
                                       std::size_t folds, std::uint64_t seed);

// Upper confidence-limit correction of C4.5's pessimistic error estimate.
double add_errs(double n, double e, double cf);
// Training errors of a leaf plus the pessimistic correction.
double estimated_errors(std::span<const double> counts, double cf);

struct Split {
  std::size_t attr = 0;
  bool numeric = false;
  double threshold = 0.0;
  double gain = 0.0;
  double split_info = 0.0;
  std::vector<std::size_t> branch_values;  // nominal only
  std::vector<Rows> parts;                  // one per branch
};

// Branches for every label plus the missing category when it occurs. Valid
// when at least two branches hold >= min_branch rows.
std::optional<Split> nominal_split(const TrainData& d, std::span<const std::size_t> rows,
                                   std::size_t a, double min_branch);
// Best binary threshold by information gain, both sides >= min_side. With
// mdl_correction the gain is reduced by log2(#candidate cuts)/N.
std::optional<Split> numeric_split(const TrainData& d, std::span<const std::size_t> rows,
                                   std::size_t a, double min_side, bool mdl_correction);

// C4.5 split choice: gain ratio among splits whose gain reaches the average.
std::optional<Split> c45_select(const TrainData& d, std::span<const std::size_t> rows,
                                std::size_t min_obj);

// Tree under construction.
struct BuildNode {
  std::vector<double> counts;
  std::vector<double> hold;  // pruning-set counts (reptree)
  bool leaf = true;
  bool expanded = true;  // partial trees leave some children unexpanded
  std::size_t attr = 0;
  bool numeric = false;
  double threshold = 0.0;
  std::vector<std::size_t> branch_values;
  std::vector<BuildNode> kids;
  std::vector<Condition> branch_conditions() const;
};

void make_leaf(BuildNode& n);
BuildNode node_from_split(std::vector<double> counts, const Split& s);
DecisionTree flatten(const BuildNode& root, std::size_t k);

// Coverage counts by first match over every training row.
void fill_rule_counts(RuleList& list, const TrainData& d);

DecisionTree train_c45(const TrainData& d, const C45Params& p);
DecisionTree train_reptree(const TrainData& d, const RepTreeParams& p, std::uint64_t seed);
DecisionTree train_randomtree(const TrainData& d, const RandomTreeParams& p, std::uint64_t seed);
RuleList train_ripper(const TrainData& d, const RipperParams& p, std::uint64_t seed);
RuleList train_part(const TrainData& d, const PartParams& p);
ExemplarSet train_nnge(const TrainData& d, const NngeParams& p);

}  // namespace fusemine::detail

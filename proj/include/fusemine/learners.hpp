#pragma once

#include <cstdint>

#include "fusemine/model.hpp"
#include "fusemine/table.hpp"
#include "json.hpp"

namespace fusemine {

struct C45Params {
  double confidence = 0.25;
  std::size_t min_obj = 2;
  bool prune = true;
};

struct RepTreeParams {
  std::size_t min_num = 2;
  std::size_t num_folds = 3;  // one fold is held out for pruning
  bool prune = true;
  int max_depth = -1;
};

struct RandomTreeParams {
  std::size_t k = 0;  // 0: ceil(log2(d) + 1)
  std::size_t min_num = 1;
  int max_depth = -1;
};

struct RipperParams {
  std::size_t num_folds = 3;  // one fold is the pruning set
  double min_coverage = 2.0;
  std::size_t optimizations = 1;
  bool prune = true;
};

struct PartParams {
  double confidence = 0.25;
  std::size_t min_obj = 2;
};

struct NngeParams {
  std::size_t attempts = 5;  // nearest same-class exemplars tried for generalization
  std::size_t mi_bins = 5;   // bins for numeric attributes in the mutual-information weights
};

struct LearnerParams {
  C45Params c45;
  RepTreeParams reptree;
  RandomTreeParams randomtree;
  RipperParams ripper;
  PartParams part;
  NngeParams nnge;

  // Throws InvalidParams.
  void validate() const;
  nlohmann::json to_json(Algorithm a) const;
  // Reads per-algorithm objects keyed by tag; absent keys keep defaults.
  static LearnerParams from_json(const nlohmann::json& doc);
};

// Deterministic given (dataset, params, seed). Rows with a missing class are
// ignored. A dataset with a single class yields a constant rule-list model
// flagged as degenerate. Throws TooFewRows for an empty dataset and
// SchemaMismatch when the class attribute is absent.
Model train(Algorithm algorithm, const DataTable& dataset, const LearnerParams& params = {},
            std::uint64_t seed = 1);

}  // namespace fusemine

#include <fmt/format.h>

#include "fusemine/errors.hpp"
#include "fusemine/learners.hpp"
#include "learn_common.hpp"

namespace fusemine {

void LearnerParams::validate() const {
  auto check = [](bool ok, const char* what) {
    if (!ok) throw InvalidParams(what);
  };
  check(c45.confidence > 0.0 && c45.confidence <= 0.5, "c45.confidence must be in (0, 0.5]");
  check(c45.min_obj >= 1, "c45.min_obj must be >= 1");
  check(reptree.min_num >= 1, "reptree.min_num must be >= 1");
  check(reptree.num_folds >= 2, "reptree.num_folds must be >= 2");
  check(randomtree.min_num >= 1, "randomtree.min_num must be >= 1");
  check(ripper.num_folds >= 2, "ripper.num_folds must be >= 2");
  check(ripper.min_coverage >= 0.0, "ripper.min_coverage must be >= 0");
  check(part.confidence > 0.0 && part.confidence <= 0.5, "part.confidence must be in (0, 0.5]");
  check(part.min_obj >= 1, "part.min_obj must be >= 1");
  check(nnge.attempts >= 1, "nnge.attempts must be >= 1");
  check(nnge.mi_bins >= 1, "nnge.mi_bins must be >= 1");
}

nlohmann::json LearnerParams::to_json(Algorithm a) const {
  switch (a) {
    case Algorithm::C45:
      return {{"confidence", c45.confidence}, {"min_obj", c45.min_obj}, {"prune", c45.prune}};
    case Algorithm::RepTree:
      return {{"min_num", reptree.min_num}, {"num_folds", reptree.num_folds},
              {"prune", reptree.prune}, {"max_depth", reptree.max_depth}};
    case Algorithm::RandomTree:
      return {{"k", randomtree.k}, {"min_num", randomtree.min_num}, {"max_depth", randomtree.max_depth}};
    case Algorithm::Ripper:
      return {{"num_folds", ripper.num_folds}, {"min_coverage", ripper.min_coverage},
              {"optimizations", ripper.optimizations}, {"prune", ripper.prune}};
    case Algorithm::Part:
      return {{"confidence", part.confidence}, {"min_obj", part.min_obj}};
    case Algorithm::Nnge:
      return {{"attempts", nnge.attempts}, {"mi_bins", nnge.mi_bins}};
  }
  return nlohmann::json::object();
}

LearnerParams LearnerParams::from_json(const nlohmann::json& doc) {
  LearnerParams p;
  if (!doc.is_object()) throw InvalidParams("learner params must be a JSON object");
  try {
    auto get = [](const nlohmann::json& o, const char* key, auto& field) {
      if (o.contains(key)) field = o.at(key).get<std::decay_t<decltype(field)>>();
    };
    for (const auto& [tag, o] : doc.items()) {
      switch (parse_algorithm(tag)) {
        case Algorithm::C45:
          get(o, "confidence", p.c45.confidence);
          get(o, "min_obj", p.c45.min_obj);
          get(o, "prune", p.c45.prune);
          break;
        case Algorithm::RepTree:
          get(o, "min_num", p.reptree.min_num);
          get(o, "num_folds", p.reptree.num_folds);
          get(o, "prune", p.reptree.prune);
          get(o, "max_depth", p.reptree.max_depth);
          break;
        case Algorithm::RandomTree:
          get(o, "k", p.randomtree.k);
          get(o, "min_num", p.randomtree.min_num);
          get(o, "max_depth", p.randomtree.max_depth);
          break;
        case Algorithm::Ripper:
          get(o, "num_folds", p.ripper.num_folds);
          get(o, "min_coverage", p.ripper.min_coverage);
          get(o, "optimizations", p.ripper.optimizations);
          get(o, "prune", p.ripper.prune);
          break;
        case Algorithm::Part:
          get(o, "confidence", p.part.confidence);
          get(o, "min_obj", p.part.min_obj);
          break;
        case Algorithm::Nnge:
          get(o, "attempts", p.nnge.attempts);
          get(o, "mi_bins", p.nnge.mi_bins);
          break;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidParams(std::string("learner params: ") + e.what());
  }
  p.validate();
  return p;
}

Model train(Algorithm algorithm, const DataTable& dataset, const LearnerParams& params,
            std::uint64_t seed) {
  params.validate();
  const auto d = detail::prepare(dataset);
  if (d.y.empty()) throw TooFewRows("training data has no labelled rows");

  ModelMeta meta;
  meta.algorithm = algorithm;
  meta.seed = seed;
  meta.params = params.to_json(algorithm);

  const auto counts = detail::class_counts(d, d.all_rows());
  std::size_t present = 0;
  for (double c : counts) present += c > 0 ? 1 : 0;
  if (present < 2) {
    RuleList constant;
    constant.default_class = detail::argmax(counts);
    constant.default_counts = counts;
    meta.degenerate = true;
    meta.notes.push_back("single class in training data; constant model");
    return Model(d.inputs, d.cls, d.medians, std::move(constant), std::move(meta));
  }

  Structure s;
  switch (algorithm) {
    case Algorithm::C45: s = detail::train_c45(d, params.c45); break;
    case Algorithm::RepTree: s = detail::train_reptree(d, params.reptree, seed); break;
    case Algorithm::RandomTree: s = detail::train_randomtree(d, params.randomtree, seed); break;
    case Algorithm::Ripper:
      s = detail::train_ripper(d, params.ripper, seed);
      meta.notes.push_back(fmt::format("{} optimization pass(es)", params.ripper.optimizations));
      break;
    case Algorithm::Part: s = detail::train_part(d, params.part); break;
    case Algorithm::Nnge:
      s = detail::train_nnge(d, params.nnge);
      meta.notes.push_back("order-sensitive: exemplars depend on training row order");
      break;
  }
  return Model(d.inputs, d.cls, d.medians, std::move(s), std::move(meta));
}

}  // namespace fusemine

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fusemine/table.hpp"
#include "json.hpp"

namespace fusemine {

enum class Algorithm { C45, RepTree, RandomTree, Ripper, Part, Nnge };

inline constexpr std::array<Algorithm, 6> kAllAlgorithms = {
    Algorithm::C45, Algorithm::RepTree, Algorithm::RandomTree,
    Algorithm::Ripper, Algorithm::Part, Algorithm::Nnge};

// Tags: c45, reptree, randomtree, ripper, part, nnge.
std::string_view to_string(Algorithm a);
// Throws InvalidParams for an unknown tag.
Algorithm parse_algorithm(std::string_view tag);

// Instances are encoded as one double per input attribute: nominal values
// by label index (missing is the extra index labels.size()), numeric values
// as-is (missing replaced by the training median).
using Encoded = std::vector<double>;

enum class CondOp { Eq, Le, Gt };

struct Condition {
  std::size_t attr = 0;  // position among the model's inputs
  CondOp op = CondOp::Eq;
  double value = 0.0;  // label index for Eq, threshold otherwise

  bool matches(const Encoded& x) const {
    switch (op) {
      case CondOp::Eq: return x[attr] == value;
      case CondOp::Le: return x[attr] <= value;
      case CondOp::Gt: return x[attr] > value;
    }
    return false;
  }
  friend bool operator==(const Condition&, const Condition&) = default;
};

struct Rule {
  std::vector<Condition> conditions;
  std::size_t cls = 0;
  std::vector<double> counts;  // training instances that fire this rule, per class

  bool matches(const Encoded& x) const {
    for (const auto& c : conditions)
      if (!c.matches(x)) return false;
    return true;
  }
  friend bool operator==(const Rule&, const Rule&) = default;
};

// Ordered decision list; the default rule fires when nothing else does.
struct RuleList {
  std::vector<Rule> rules;
  std::size_t default_class = 0;
  std::vector<double> default_counts;
  friend bool operator==(const RuleList&, const RuleList&) = default;
};

struct TreeNode {
  std::vector<double> counts;  // training class counts reaching the node
  std::size_t label = 0;       // predicted class
  std::vector<double> dist;    // counts used for the distribution (nearest non-empty ancestor)
  std::optional<std::size_t> attr;  // empty for leaves
  bool numeric = false;
  double threshold = 0.0;
  // Numeric: {<= threshold, > threshold}. Nominal: one child per branch value.
  std::vector<std::size_t> children;
  std::vector<std::size_t> branch_values;  // nominal only, parallel to children

  bool is_leaf() const { return !attr.has_value(); }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  std::size_t num_leaves() const;
  std::size_t size() const { return nodes.size(); }
  // Index of the leaf (or stuck internal node) reached by x.
  std::size_t route(const Encoded& x) const;
  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

// Axis-aligned hyperrectangle. Numeric attributes carry [lo, hi]; nominal
// attributes carry the set of admitted label indices.
struct Exemplar {
  std::size_t cls = 0;
  std::vector<double> lo, hi;
  std::vector<std::vector<std::size_t>> values;  // sorted, nominal only
  std::size_t members = 1;
  friend bool operator==(const Exemplar&, const Exemplar&) = default;
};

struct ExemplarSet {
  std::vector<Exemplar> exemplars;
  std::vector<double> weights;  // per-attribute distance weights
  std::vector<double> ranges;   // numeric ranges for distance normalization
  std::vector<bool> nominal;    // per attribute
  friend bool operator==(const ExemplarSet&, const ExemplarSet&) = default;
};

using Structure = std::variant<DecisionTree, RuleList, ExemplarSet>;

struct ModelMeta {
  std::optional<Algorithm> algorithm;  // empty for parsed rule lists
  std::uint64_t seed = 0;
  nlohmann::json params = nlohmann::json::object();
  bool degenerate = false;
  std::vector<std::string> notes;
};

class Model {
 public:
  Model() = default;
  Model(std::vector<AttributeSpec> inputs, AttributeSpec cls, std::vector<double> medians,
        Structure structure, ModelMeta meta);

  const std::vector<AttributeSpec>& inputs() const { return inputs_; }
  const AttributeSpec& class_spec() const { return cls_; }
  std::size_t num_classes() const { return cls_.labels.size(); }
  const std::vector<double>& medians() const { return medians_; }
  const Structure& structure() const { return structure_; }
  const ModelMeta& meta() const { return meta_; }

  // Values are in the model's input order. Throws SchemaMismatch.
  Encoded encode(std::span<const Value> instance) const;
  std::vector<double> distribution(std::span<const Value> instance) const;
  std::vector<double> distribution_encoded(const Encoded& x) const;
  std::size_t predict(std::span<const Value> instance) const;

  // Maps model inputs onto table columns by name and kind. Throws SchemaMismatch.
  std::vector<std::size_t> column_map(const DataTable& table) const;
  std::vector<Value> project(const DataTable& table, std::size_t row,
                             std::span<const std::size_t> map) const;
  std::vector<std::vector<double>> distributions(const DataTable& table) const;
  std::vector<std::size_t> predictions(const DataTable& table) const;

  friend bool operator==(const Model& a, const Model& b) {
    return a.inputs_ == b.inputs_ && a.cls_ == b.cls_ && a.medians_ == b.medians_ &&
           a.structure_ == b.structure_;
  }

 private:
  std::vector<AttributeSpec> inputs_;
  AttributeSpec cls_;
  std::vector<double> medians_;
  Structure structure_;
  ModelMeta meta_;
};

// Laplace estimate (c + 1) / (n + k).
std::vector<double> laplace(std::span<const double> counts);

// Human-readable IF-THEN text. Rule lists end with `ELSE <class>` and
// `Number of Rules : N`; trees with `Number of Leaves: N` and
// `Size of the tree : N`.
std::string render_rules(const Model& model);

// Reads the rule-list dialect back. With a schema, names and labels resolve
// against it; without one, the schema is inferred from the text (labels in
// order of first appearance, numeric attributes from <= / > tests).
// Throws SyntaxError(line).
Model parse_rules(std::string_view text, const std::vector<AttributeSpec>& inputs,
                  const AttributeSpec& cls);
Model parse_rules(std::string_view text);

// The rule or root-to-leaf path that decides an instance, rendered as text.
std::string explain_instance(const Model& model, std::span<const Value> instance);

nlohmann::json model_to_json(const Model& model);
Model model_from_json(const nlohmann::json& doc);

}  // namespace fusemine

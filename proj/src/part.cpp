#include <algorithm>
#include <numeric>

#include "learn_common.hpp"

namespace fusemine::detail {

namespace {

// Partial C4.5 tree: children are expanded in order of increasing entropy
// and expansion stops at the first child that does not end up a leaf.
BuildNode build_partial(const TrainData& d, const Rows& rows, const PartParams& p) {
  BuildNode leaf;
  leaf.counts = class_counts(d, rows);
  auto split = c45_select(d, rows, p.min_obj);
  if (!split) return leaf;

  BuildNode n = node_from_split(leaf.counts, *split);
  const std::size_t m = split->parts.size();
  n.kids.resize(m);
  std::vector<double> h(m);
  for (std::size_t i = 0; i < m; ++i) {
    n.kids[i].counts = class_counts(d, split->parts[i]);
    n.kids[i].expanded = false;
    h[i] = entropy_bits(n.kids[i].counts);
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return h[a] < h[b]; });

  bool all_leaves = true;
  for (auto i : order) {
    n.kids[i] = build_partial(d, split->parts[i], p);
    if (!n.kids[i].leaf) {
      all_leaves = false;
      break;
    }
  }
  if (all_leaves) {
    double tree_errors = 0.0;
    for (const auto& kid : n.kids) tree_errors += estimated_errors(kid.counts, p.confidence);
    if (estimated_errors(n.counts, p.confidence) <= tree_errors + 1e-6) make_leaf(n);
  }
  return n;
}

struct LeafPick {
  double coverage = -1.0;
  std::vector<Condition> path;
  std::vector<double> counts;
};

void best_leaf(const BuildNode& n, std::vector<Condition>& path, LeafPick& best) {
  if (n.leaf) {
    const double cov = total(n.counts);
    if (n.expanded && cov > 0 && cov > best.coverage) best = {cov, path, n.counts};
    return;
  }
  const auto conds = n.branch_conditions();
  for (std::size_t i = 0; i < n.kids.size(); ++i) {
    path.push_back(conds[i]);
    best_leaf(n.kids[i], path, best);
    path.pop_back();
  }
}

}  // namespace

RuleList train_part(const TrainData& d, const PartParams& p) {
  RuleList list;
  Rows remaining = d.all_rows();
  bool have_default = false;
  while (!remaining.empty()) {
    const BuildNode root = build_partial(d, remaining, p);
    if (root.leaf) {
      list.default_class = argmax(root.counts);
      have_default = true;
      break;
    }
    LeafPick pick;
    std::vector<Condition> path;
    best_leaf(root, path, pick);
    Rule rule;
    rule.conditions = pick.path;
    rule.cls = argmax(pick.counts);
    Rows rest;
    for (auto r : remaining)
      if (!rule.matches(d.X[r])) rest.push_back(r);
    if (rest.size() == remaining.size()) break;  // cannot happen for a non-empty leaf
    list.rules.push_back(std::move(rule));
    remaining = std::move(rest);
  }
  if (!have_default) list.default_class = argmax(class_counts(d, d.all_rows()));
  fill_rule_counts(list, d);
  return list;
}

}  // namespace fusemine::detail

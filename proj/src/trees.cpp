#include <algorithm>
#include <cmath>

#include "fusemine/random.hpp"
#include "learn_common.hpp"

namespace fusemine::detail {

namespace {

// --- c45 -------------------------------------------------------------------

BuildNode grow_c45(const TrainData& d, const Rows& rows, const C45Params& p) {
  auto counts = class_counts(d, rows);
  auto split = c45_select(d, rows, p.min_obj);
  if (!split) {
    BuildNode leaf;
    leaf.counts = std::move(counts);
    return leaf;
  }
  BuildNode n = node_from_split(std::move(counts), *split);
  for (const auto& part : split->parts) n.kids.push_back(grow_c45(d, part, p));
  return n;
}

double training_errors(const BuildNode& n) {
  if (n.leaf) return total(n.counts) - (total(n.counts) > 0 ? n.counts[argmax(n.counts)] : 0.0);
  double e = 0.0;
  for (const auto& k : n.kids) e += training_errors(k);
  return e;
}

void collapse(BuildNode& n) {
  if (n.leaf) return;
  const double leaf_errors = total(n.counts) - n.counts[argmax(n.counts)];
  if (training_errors(n) >= leaf_errors - 1e-3) {
    make_leaf(n);
    return;
  }
  for (auto& k : n.kids) collapse(k);
}

double estimated_tree_errors(const BuildNode& n, double cf) {
  if (n.leaf) return estimated_errors(n.counts, cf);
  double e = 0.0;
  for (const auto& k : n.kids) e += estimated_tree_errors(k, cf);
  return e;
}

void prune_c45(BuildNode& n, double cf) {
  if (n.leaf) return;
  for (auto& k : n.kids) prune_c45(k, cf);
  const double leaf = estimated_errors(n.counts, cf);
  const double tree = estimated_tree_errors(n, cf);
  if (leaf <= tree + 0.1) make_leaf(n);
}

// --- shared by reptree and randomtree --------------------------------------

std::optional<Split> gain_split(const TrainData& d, const Rows& rows, std::size_t a, double min_num) {
  return d.nominal(a) ? nominal_split(d, rows, a, min_num) : numeric_split(d, rows, a, min_num, false);
}

bool stop_here(const std::vector<double>& counts, double n, double min_num, int max_depth, int depth) {
  if (n < 2.0 * min_num) return true;
  if (counts[argmax(counts)] == n) return true;
  return max_depth >= 0 && depth >= max_depth;
}

// --- reptree ---------------------------------------------------------------

BuildNode grow_rep(const TrainData& d, const Rows& rows, const RepTreeParams& p, int depth) {
  BuildNode leaf;
  leaf.counts = class_counts(d, rows);
  const double min_num = static_cast<double>(p.min_num);
  if (stop_here(leaf.counts, static_cast<double>(rows.size()), min_num, p.max_depth, depth)) return leaf;
  std::optional<Split> best;
  for (std::size_t a = 0; a < d.dims(); ++a) {
    auto s = gain_split(d, rows, a, min_num);
    if (s && s->gain > 1e-12 && (!best || s->gain > best->gain + 1e-12)) best = std::move(s);
  }
  if (!best) return leaf;
  BuildNode n = node_from_split(leaf.counts, *best);
  for (const auto& part : best->parts) n.kids.push_back(grow_rep(d, part, p, depth + 1));
  return n;
}

void route_holdout(BuildNode& n, const Encoded& x, std::size_t cls) {
  n.hold[cls] += 1.0;
  if (n.leaf) return;
  if (n.numeric) {
    route_holdout(n.kids[x[n.attr] <= n.threshold ? 0 : 1], x, cls);
    return;
  }
  auto it = std::find(n.branch_values.begin(), n.branch_values.end(), static_cast<std::size_t>(x[n.attr]));
  if (it != n.branch_values.end())
    route_holdout(n.kids[static_cast<std::size_t>(it - n.branch_values.begin())], x, cls);
}

void zero_holdout(BuildNode& n, std::size_t k) {
  n.hold.assign(k, 0.0);
  for (auto& kid : n.kids) zero_holdout(kid, k);
}

// Returns pruning-set errors of the (possibly pruned) subtree.
double reduced_error_prune(BuildNode& n, std::size_t parent_label) {
  const std::size_t label = total(n.counts) > 0 ? argmax(n.counts) : parent_label;
  const double leaf_errors = total(n.hold) - n.hold[label];
  if (n.leaf) return leaf_errors;
  double tree_errors = 0.0;
  for (auto& kid : n.kids) tree_errors += reduced_error_prune(kid, label);
  if (leaf_errors <= tree_errors) {
    make_leaf(n);
    return leaf_errors;
  }
  return tree_errors;
}

void backfit(BuildNode& n) {
  for (std::size_t c = 0; c < n.counts.size(); ++c) n.counts[c] += n.hold[c];
  for (auto& kid : n.kids) backfit(kid);
}

// --- randomtree ------------------------------------------------------------

BuildNode grow_random(const TrainData& d, const Rows& rows, const RandomTreeParams& p, std::size_t k,
                      Rng& rng, int depth) {
  BuildNode leaf;
  leaf.counts = class_counts(d, rows);
  const double min_num = static_cast<double>(p.min_num);
  if (stop_here(leaf.counts, static_cast<double>(rows.size()), min_num, p.max_depth, depth)) return leaf;

  std::vector<std::size_t> order(d.dims());
  for (std::size_t a = 0; a < order.size(); ++a) order[a] = a;
  shuffle(std::span<std::size_t>(order), rng);

  // Draw k attributes; keep drawing while none has positive gain.
  std::optional<Split> best;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i >= k && best) break;
    auto s = gain_split(d, rows, order[i], min_num);
    if (!s || !(s->gain > 1e-12)) continue;
    if (!best || s->gain > best->gain + 1e-12 ||
        (std::abs(s->gain - best->gain) <= 1e-12 && s->attr < best->attr))
      best = std::move(s);
  }
  if (!best) return leaf;
  BuildNode n = node_from_split(leaf.counts, *best);
  for (const auto& part : best->parts) n.kids.push_back(grow_random(d, part, p, k, rng, depth + 1));
  return n;
}

}  // namespace

DecisionTree train_c45(const TrainData& d, const C45Params& p) {
  auto root = grow_c45(d, d.all_rows(), p);
  if (p.prune) {
    collapse(root);
    prune_c45(root, p.confidence);
  }
  return flatten(root, d.k);
}

DecisionTree train_reptree(const TrainData& d, const RepTreeParams& p, std::uint64_t seed) {
  const auto rows = d.all_rows();
  Rows grow, hold;
  if (p.prune && rows.size() >= p.num_folds) {
    const auto fold = content_folds(d, rows, p.num_folds, seed);
    for (std::size_t i = 0; i < rows.size(); ++i) (fold[i] == 0 ? hold : grow).push_back(rows[i]);
  } else {
    grow = rows;
  }
  auto root = grow_rep(d, grow, p, 0);
  if (p.prune && !hold.empty()) {
    zero_holdout(root, d.k);
    for (auto r : hold) route_holdout(root, d.X[r], d.y[r]);
    reduced_error_prune(root, argmax(root.counts));
    backfit(root);
  }
  return flatten(root, d.k);
}

DecisionTree train_randomtree(const TrainData& d, const RandomTreeParams& p, std::uint64_t seed) {
  std::size_t k = p.k;
  if (k == 0) k = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(std::max<std::size_t>(d.dims(), 1))) + 1.0));
  k = std::clamp<std::size_t>(k, 1, std::max<std::size_t>(d.dims(), 1));
  Rng rng(seed);
  return flatten(grow_random(d, d.all_rows(), p, k, rng, 0), d.k);
}

}  // namespace fusemine::detail

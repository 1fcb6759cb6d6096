#include "learn_common.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "fusemine/errors.hpp"
#include "fusemine/random.hpp"

namespace fusemine::detail {

Rows TrainData::all_rows() const {
  Rows r(y.size());
  std::iota(r.begin(), r.end(), 0);
  return r;
}

TrainData prepare(const DataTable& dataset) {
  auto cc = dataset.class_column();
  if (!cc) throw SchemaMismatch("training data needs a class attribute");
  TrainData d;
  d.cls = dataset.specs()[*cc];
  if (!d.cls.is_nominal()) throw SchemaMismatch("class attribute must be nominal");
  d.k = d.cls.labels.size();
  const auto inputs = dataset.input_columns();
  for (auto c : inputs) d.inputs.push_back(dataset.specs()[c]);

  d.medians.assign(inputs.size(), 0.0);
  for (std::size_t a = 0; a < inputs.size(); ++a) {
    if (!d.inputs[a].is_numeric()) continue;
    std::vector<double> v;
    for (std::size_t r = 0; r < dataset.num_rows(); ++r) {
      const auto& x = dataset.at(r, inputs[a]);
      if (x.is_numeric() && !dataset.at(r, *cc).is_missing()) v.push_back(x.as_numeric());
    }
    if (v.empty()) continue;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    d.medians[a] = v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2.0;
  }

  for (std::size_t r = 0; r < dataset.num_rows(); ++r) {
    const auto& cv = dataset.at(r, *cc);
    if (cv.is_missing()) continue;
    Encoded x(inputs.size());
    for (std::size_t a = 0; a < inputs.size(); ++a) {
      const auto& v = dataset.at(r, inputs[a]);
      if (v.is_missing())
        x[a] = d.nominal(a) ? static_cast<double>(d.inputs[a].labels.size()) : d.medians[a];
      else
        x[a] = d.nominal(a) ? static_cast<double>(v.as_nominal()) : v.as_numeric();
    }
    d.X.push_back(std::move(x));
    d.y.push_back(cv.as_nominal());
  }
  return d;
}

std::vector<double> class_counts(const TrainData& d, std::span<const std::size_t> rows) {
  std::vector<double> c(d.k, 0.0);
  for (auto r : rows) c[d.y[r]] += 1.0;
  return c;
}

double total(std::span<const double> counts) { return std::accumulate(counts.begin(), counts.end(), 0.0); }

double entropy_bits(std::span<const double> counts) {
  const double n = total(counts);
  if (n <= 0) return 0.0;
  double h = 0.0;
  for (double c : counts)
    if (c > 0) h -= c / n * std::log2(c / n);
  return h;
}

std::size_t argmax(std::span<const double> counts) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < counts.size(); ++i)
    if (counts[i] > counts[best]) best = i;
  return best;
}

std::vector<std::size_t> content_folds(const TrainData& d, std::span<const std::size_t> rows,
                                       std::size_t folds, std::uint64_t seed) {
  struct Keyed {
    std::uint64_t hash;
    std::size_t pos;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::uint64_t h = splitmix64(seed);
    for (double v : d.X[rows[i]]) h = splitmix64(h ^ std::bit_cast<std::uint64_t>(v));
    h = splitmix64(h ^ d.y[rows[i]]);
    keyed.push_back({h, i});
  }
  // Equal hashes fall back to content; identical rows are interchangeable.
  std::sort(keyed.begin(), keyed.end(), [&](const Keyed& a, const Keyed& b) {
    if (a.hash != b.hash) return a.hash < b.hash;
    const auto ra = rows[a.pos], rb = rows[b.pos];
    if (d.y[ra] != d.y[rb]) return d.y[ra] < d.y[rb];
    return d.X[ra] < d.X[rb];
  });
  std::vector<std::size_t> fold(rows.size(), 0);
  std::size_t next = 0;
  for (std::size_t c = 0; c < d.k; ++c)
    for (const auto& kv : keyed)
      if (d.y[rows[kv.pos]] == c) {
        fold[kv.pos] = next;
        next = (next + 1) % folds;
      }
  return fold;
}

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_inverse(double p) {
  double lo = -10.0, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = (lo + hi) / 2.0;
    (normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return (lo + hi) / 2.0;
}

}  // namespace

double add_errs(double n, double e, double cf) {
  if (cf > 0.5) return 0.0;
  if (e < 1.0) {
    const double base = n * (1.0 - std::pow(cf, 1.0 / n));
    if (e == 0.0) return base;
    return base + e * (add_errs(n, 1.0, cf) - base);
  }
  if (e + 0.5 >= n) return std::max(n - e, 0.0);
  static thread_local double cached_cf = -1.0, cached_z = 0.0;
  if (cf != cached_cf) {
    cached_cf = cf;
    cached_z = normal_inverse(1.0 - cf);
  }
  const double z = cached_z;
  const double f = (e + 0.5) / n;
  const double r =
      (f + z * z / (2.0 * n) + z * std::sqrt(f / n - f * f / n + z * z / (4.0 * n * n))) /
      (1.0 + z * z / n);
  return r * n - e;
}

double estimated_errors(std::span<const double> counts, double cf) {
  const double n = total(counts);
  if (n <= 0) return 0.0;
  const double e = n - counts[argmax(counts)];
  return e + add_errs(n, e, cf);
}

// ---------------------------------------------------------------------------

std::optional<Split> nominal_split(const TrainData& d, std::span<const std::size_t> rows,
                                   std::size_t a, double min_branch) {
  const std::size_t cats = d.categories(a);
  std::vector<Rows> parts(cats);
  for (auto r : rows) parts[static_cast<std::size_t>(d.X[r][a])].push_back(r);
  std::size_t big = 0;
  for (const auto& p : parts)
    if (static_cast<double>(p.size()) >= min_branch) ++big;
  if (big < 2) return std::nullopt;

  Split s;
  s.attr = a;
  const double n = static_cast<double>(rows.size());
  const auto parent = class_counts(d, rows);
  double cond = 0.0;
  std::vector<double> sizes;
  for (std::size_t v = 0; v < cats; ++v) {
    // The missing category only gets a branch when it occurs.
    if (v + 1 == cats && parts[v].empty()) continue;
    const auto cc = class_counts(d, parts[v]);
    cond += static_cast<double>(parts[v].size()) / n * entropy_bits(cc);
    sizes.push_back(static_cast<double>(parts[v].size()));
    s.branch_values.push_back(v);
    s.parts.push_back(std::move(parts[v]));
  }
  s.gain = entropy_bits(parent) - cond;
  s.split_info = entropy_bits(sizes);
  return s;
}

std::optional<Split> numeric_split(const TrainData& d, std::span<const std::size_t> rows,
                                   std::size_t a, double min_side, bool mdl_correction) {
  Rows sorted(rows.begin(), rows.end());
  std::sort(sorted.begin(), sorted.end(), [&](std::size_t l, std::size_t r) {
    return d.X[l][a] < d.X[r][a] || (d.X[l][a] == d.X[r][a] && l < r);
  });
  const std::size_t n = sorted.size();
  if (n < 2) return std::nullopt;
  const auto parent = class_counts(d, sorted);
  const double h = entropy_bits(parent);
  std::vector<double> left(d.k, 0.0), right = parent;
  double best_gain = -1.0;
  std::size_t best_i = 0, candidates = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    left[d.y[sorted[i]]] += 1.0;
    right[d.y[sorted[i]]] -= 1.0;
    if (!(d.X[sorted[i]][a] < d.X[sorted[i + 1]][a])) continue;
    const double nl = static_cast<double>(i + 1), nr = static_cast<double>(n - i - 1);
    if (nl < min_side || nr < min_side) continue;
    ++candidates;
    const double g = h - (nl * entropy_bits(left) + nr * entropy_bits(right)) / static_cast<double>(n);
    if (g > best_gain + 1e-12) {
      best_gain = g;
      best_i = i;
    }
  }
  if (candidates == 0) return std::nullopt;

  Split s;
  s.attr = a;
  s.numeric = true;
  const double lo = d.X[sorted[best_i]][a], hi = d.X[sorted[best_i + 1]][a];
  s.threshold = lo + (hi - lo) / 2.0;
  if (!(s.threshold < hi)) s.threshold = lo;
  s.gain = best_gain;
  if (mdl_correction) s.gain -= std::log2(static_cast<double>(candidates)) / static_cast<double>(n);
  s.parts.resize(2);
  for (auto r : sorted) s.parts[d.X[r][a] <= s.threshold ? 0 : 1].push_back(r);
  // Keep the original relative order inside each part.
  for (auto& p : s.parts) std::sort(p.begin(), p.end());
  const double nl = static_cast<double>(s.parts[0].size()), nr = static_cast<double>(s.parts[1].size());
  std::vector<double> sizes = {nl, nr};
  s.split_info = entropy_bits(sizes);
  return s;
}

std::optional<Split> c45_select(const TrainData& d, std::span<const std::size_t> rows,
                                std::size_t min_obj) {
  const double n = static_cast<double>(rows.size());
  const auto counts = class_counts(d, rows);
  if (n < 2.0 * static_cast<double>(min_obj) || counts[argmax(counts)] == n) return std::nullopt;

  const double min_split = std::clamp(0.1 * n / static_cast<double>(d.k),
                                      static_cast<double>(min_obj), 25.0);
  std::vector<Split> valid;
  double sum_gain = 0.0;
  for (std::size_t a = 0; a < d.dims(); ++a) {
    auto s = d.nominal(a) ? nominal_split(d, rows, a, static_cast<double>(min_obj))
                          : numeric_split(d, rows, a, min_split, true);
    if (!s || !(s->gain > 0.0)) continue;
    sum_gain += s->gain;
    valid.push_back(std::move(*s));
  }
  if (valid.empty()) return std::nullopt;
  const double avg = sum_gain / static_cast<double>(valid.size());
  std::optional<std::size_t> best;
  double best_ratio = 0.0;
  for (std::size_t i = 0; i < valid.size(); ++i) {
    const auto& s = valid[i];
    if (s.gain < avg - 1e-3 || s.split_info <= 0.0) continue;
    const double ratio = s.gain / s.split_info;
    if (!best || ratio > best_ratio + 1e-12) {
      best = i;
      best_ratio = ratio;
    }
  }
  if (!best) return std::nullopt;
  return std::move(valid[*best]);
}

// ---------------------------------------------------------------------------

std::vector<Condition> BuildNode::branch_conditions() const {
  std::vector<Condition> out;
  if (numeric) {
    out.push_back({attr, CondOp::Le, threshold});
    out.push_back({attr, CondOp::Gt, threshold});
  } else {
    for (auto v : branch_values) out.push_back({attr, CondOp::Eq, static_cast<double>(v)});
  }
  return out;
}

void make_leaf(BuildNode& n) {
  n.leaf = true;
  n.kids.clear();
  n.branch_values.clear();
}

BuildNode node_from_split(std::vector<double> counts, const Split& s) {
  BuildNode n;
  n.counts = std::move(counts);
  n.leaf = false;
  n.attr = s.attr;
  n.numeric = s.numeric;
  n.threshold = s.threshold;
  n.branch_values = s.branch_values;
  return n;
}

namespace {

std::size_t flatten_into(const BuildNode& b, const std::vector<double>& parent_dist,
                         std::size_t parent_label, DecisionTree& t) {
  const std::size_t at = t.nodes.size();
  t.nodes.emplace_back();
  TreeNode n;
  n.counts = b.counts;
  if (total(b.counts) > 0) {
    n.dist = b.counts;
    n.label = argmax(b.counts);
  } else {
    n.dist = parent_dist;
    n.label = parent_label;
  }
  if (!b.leaf) {
    n.attr = b.attr;
    n.numeric = b.numeric;
    n.threshold = b.threshold;
    n.branch_values = b.branch_values;
  }
  const auto dist = n.dist;
  const auto label = n.label;
  t.nodes[at] = n;
  if (!b.leaf) {
    std::vector<std::size_t> children;
    for (const auto& kid : b.kids) children.push_back(flatten_into(kid, dist, label, t));
    t.nodes[at].children = std::move(children);
  }
  return at;
}

}  // namespace

DecisionTree flatten(const BuildNode& root, std::size_t k) {
  DecisionTree t;
  flatten_into(root, std::vector<double>(k, 0.0), 0, t);
  return t;
}

void fill_rule_counts(RuleList& list, const TrainData& d) {
  for (auto& r : list.rules) r.counts.assign(d.k, 0.0);
  list.default_counts.assign(d.k, 0.0);
  for (std::size_t i = 0; i < d.y.size(); ++i) {
    bool fired = false;
    for (auto& r : list.rules)
      if (r.matches(d.X[i])) {
        r.counts[d.y[i]] += 1.0;
        fired = true;
        break;
      }
    if (!fired) list.default_counts[d.y[i]] += 1.0;
  }
}

}  // namespace fusemine::detail

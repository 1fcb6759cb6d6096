#include "fusemine/feature_select.hpp"

#include <algorithm>
#include <cmath>
#include <list>
#include <map>
#include <set>

#include "fusemine/errors.hpp"

namespace fusemine {

namespace {

double entropy_of_counts(std::span<const double> counts, double total) {
  if (total <= 0) return 0.0;
  double h = 0.0;
  for (double c : counts)
    if (c > 0) h -= c / total * std::log2(c / total);
  return h;
}

std::size_t num_codes(std::span<const std::size_t> codes) {
  return codes.empty() ? 0 : *std::max_element(codes.begin(), codes.end()) + 1;
}

}  // namespace

double entropy(std::span<const std::size_t> codes) {
  std::vector<double> counts(num_codes(codes), 0.0);
  for (auto c : codes) counts[c] += 1.0;
  return entropy_of_counts(counts, static_cast<double>(codes.size()));
}

double symmetrical_uncertainty(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  if (a.size() != b.size()) throw LengthMismatch("symmetrical_uncertainty: columns differ in length");
  const double ha = entropy(a), hb = entropy(b);
  if (ha + hb <= 0.0) return 0.0;
  const std::size_t nb = num_codes(b);
  std::vector<double> joint(num_codes(a) * nb, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) joint[a[i] * nb + b[i]] += 1.0;
  const double hab = entropy_of_counts(joint, static_cast<double>(a.size()));
  const double su = 2.0 * (ha + hb - hab) / (ha + hb);
  return std::clamp(su, 0.0, 1.0);
}

// ---------------------------------------------------------------------------

namespace {

struct Labeled {
  double x;
  std::size_t y;
};

void mdl_split(std::span<const Labeled> s, std::size_t num_classes, std::vector<double>& cuts) {
  const std::size_t n = s.size();
  if (n < 2) return;
  std::vector<double> total(num_classes, 0.0);
  for (const auto& p : s) total[p.y] += 1.0;
  const double h = entropy_of_counts(total, static_cast<double>(n));

  std::vector<double> left(num_classes, 0.0), right = total;
  double best_e = std::numeric_limits<double>::infinity();
  std::size_t best_i = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    left[s[i].y] += 1.0;
    right[s[i].y] -= 1.0;
    if (s[i].x == s[i + 1].x) continue;
    const double nl = static_cast<double>(i + 1), nr = static_cast<double>(n - i - 1);
    const double e = (nl * entropy_of_counts(left, nl) + nr * entropy_of_counts(right, nr)) /
                     static_cast<double>(n);
    if (e < best_e) {
      best_e = e;
      best_i = i;
    }
  }
  if (!std::isfinite(best_e)) return;

  std::vector<double> l(num_classes, 0.0), r(num_classes, 0.0);
  for (std::size_t i = 0; i < n; ++i) (i <= best_i ? l : r)[s[i].y] += 1.0;
  const double nl = static_cast<double>(best_i + 1), nr = static_cast<double>(n - best_i - 1);
  const double hl = entropy_of_counts(l, nl), hr = entropy_of_counts(r, nr);
  auto present = [](const std::vector<double>& c) {
    return static_cast<double>(std::count_if(c.begin(), c.end(), [](double v) { return v > 0; }));
  };
  const double k = present(total), k1 = present(l), k2 = present(r);
  const double gain = h - best_e;
  const double delta = std::log2(std::pow(3.0, k) - 2.0) - (k * h - k1 * hl - k2 * hr);
  const double threshold = (std::log2(static_cast<double>(n) - 1.0) + delta) / static_cast<double>(n);
  if (!(gain > threshold)) return;

  cuts.push_back((s[best_i].x + s[best_i + 1].x) / 2.0);
  mdl_split(s.subspan(0, best_i + 1), num_classes, cuts);
  mdl_split(s.subspan(best_i + 1), num_classes, cuts);
}

}  // namespace

std::vector<double> mdl_cut_points(std::span<const Value> column, std::span<const std::size_t> cls) {
  if (column.size() != cls.size()) throw LengthMismatch("mdl_cut_points: column and class differ");
  std::vector<Labeled> pts;
  for (std::size_t i = 0; i < column.size(); ++i)
    if (column[i].is_numeric()) pts.push_back({column[i].as_numeric(), cls[i]});
  std::stable_sort(pts.begin(), pts.end(), [](const Labeled& a, const Labeled& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  std::vector<double> cuts;
  mdl_split(pts, num_codes(cls), cuts);
  std::sort(cuts.begin(), cuts.end());
  return cuts;
}

Codes encode_for_su(const AttributeSpec& spec, std::span<const Value> column,
                    std::span<const std::size_t> cls) {
  Codes out(column.size());
  if (spec.is_nominal()) {
    for (std::size_t i = 0; i < column.size(); ++i)
      out[i] = column[i].is_nominal() ? column[i].as_nominal() : spec.labels.size();
    return out;
  }
  auto cuts = mdl_cut_points(column, cls);
  if (cuts.empty()) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& v : column)
      if (v.is_numeric()) {
        lo = std::min(lo, v.as_numeric());
        hi = std::max(hi, v.as_numeric());
      }
    if (hi > lo)
      for (int i = 1; i < 10; ++i) cuts.push_back(lo + (hi - lo) * i / 10.0);
  }
  for (std::size_t i = 0; i < column.size(); ++i) {
    if (!column[i].is_numeric()) {
      out[i] = cuts.size() + 1;
      continue;
    }
    const double x = column[i].as_numeric();
    out[i] = static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), x) - cuts.begin());
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct EncodedDataset {
  std::vector<Codes> features;
  Codes cls;
};

EncodedDataset encode_dataset(const DataTable& dataset) {
  auto cc = dataset.class_column();
  if (!cc) throw SchemaMismatch("feature selection needs a class attribute");
  const auto& cspec = dataset.specs()[*cc];
  if (!cspec.is_nominal()) throw SchemaMismatch("class attribute must be nominal");
  EncodedDataset enc;
  enc.cls.resize(dataset.num_rows());
  for (std::size_t r = 0; r < dataset.num_rows(); ++r) {
    const auto& v = dataset.at(r, *cc);
    enc.cls[r] = v.is_nominal() ? v.as_nominal() : cspec.labels.size();
  }
  for (auto c : dataset.input_columns())
    enc.features.push_back(encode_for_su(dataset.specs()[c], dataset.column(c), enc.cls));
  return enc;
}

}  // namespace

SuMatrix compute_su_matrix(const DataTable& dataset, Execution exec) {
  const auto enc = encode_dataset(dataset);
  const std::size_t n = enc.features.size();
  SuMatrix su(n);

  // Flattened upper triangle plus the class column: item k < n is (k, class),
  // the rest are feature pairs.
  std::vector<std::pair<std::size_t, std::size_t>> items;
  for (std::size_t i = 0; i < n; ++i) items.emplace_back(i, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) items.emplace_back(i, j);
  std::vector<double> values(items.size());

  const auto count = static_cast<long>(items.size());
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic) num_threads(max_threads())
    for (long k = 0; k < count; ++k) {
      const auto [i, j] = items[static_cast<std::size_t>(k)];
      values[static_cast<std::size_t>(k)] =
          symmetrical_uncertainty(enc.features[i], j == n ? enc.cls : enc.features[j]);
    }
  } else {
    for (long k = 0; k < count; ++k) {
      const auto [i, j] = items[static_cast<std::size_t>(k)];
      values[static_cast<std::size_t>(k)] =
          symmetrical_uncertainty(enc.features[i], j == n ? enc.cls : enc.features[j]);
    }
  }

  for (std::size_t k = 0; k < items.size(); ++k) {
    const auto [i, j] = items[k];
    if (j == n)
      su.set_fc(i, values[k]);
    else
      su.set_ff(i, j, values[k]);
  }
  for (std::size_t i = 0; i < n; ++i) su.set_ff(i, i, 1.0);
  return su;
}

double subset_merit(std::span<const std::size_t> subset, const SuMatrix& su) {
  const double k = static_cast<double>(subset.size());
  if (subset.empty()) return 0.0;
  double rcf = 0.0, rff = 0.0;
  for (std::size_t a = 0; a < subset.size(); ++a) {
    rcf += su.feature_class(subset[a]);
    for (std::size_t b = a + 1; b < subset.size(); ++b) rff += su.feature_feature(subset[a], subset[b]);
  }
  // k*mean(r_cf) = sum(r_cf); k(k-1)*mean(r_ff) = 2*sum over pairs.
  return rcf / std::sqrt(k + 2.0 * rff);
}

MeritScore cfs_merit(std::span<const std::size_t> subset, const DataTable& dataset) {
  if (subset.empty()) throw EmptySubset("cfs_merit needs a non-empty subset");
  const auto su = compute_su_matrix(dataset, Execution::Serial);
  for (auto i : subset)
    if (i >= su.size()) throw UnknownAttribute("subset index out of range");
  std::vector<std::size_t> s(subset.begin(), subset.end());
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  // Duplicates in the request count once: a set, not a multiset.
  return {s, subset_merit(s, su)};
}

MeritScore cfs_merit(std::span<const std::string> names, const DataTable& dataset) {
  const auto inputs = dataset.input_columns();
  std::vector<std::size_t> idx;
  for (const auto& name : names) {
    const auto col = dataset.require_column(name);
    auto it = std::find(inputs.begin(), inputs.end(), col);
    if (it == inputs.end()) throw UnknownAttribute("'" + name + "' is not an input attribute");
    idx.push_back(static_cast<std::size_t>(it - inputs.begin()));
  }
  return cfs_merit(idx, dataset);
}

MeritScore best_first_search(const SuMatrix& su, const BestFirstOptions& opts) {
  using Subset = std::vector<std::size_t>;  // sorted
  struct Node {
    Subset subset;
    double merit;
  };
  // Open list sorted by merit, descending; equal merits keep insertion order.
  std::list<Node> open;
  std::set<Subset> visited;
  open.push_back({{}, 0.0});
  visited.insert({});

  MeritScore best{{}, 0.0};
  std::size_t stale = 0;
  while (stale < opts.stall_limit && !open.empty()) {
    Node node = std::move(open.front());
    open.pop_front();
    bool improved = false;
    for (std::size_t a = 0; a < su.size(); ++a) {
      if (std::binary_search(node.subset.begin(), node.subset.end(), a)) continue;
      Subset s = node.subset;
      s.insert(std::upper_bound(s.begin(), s.end(), a), a);
      if (!visited.insert(s).second) continue;
      const double m = subset_merit(s, su);
      auto pos = std::find_if(open.begin(), open.end(), [&](const Node& o) { return o.merit < m; });
      open.insert(pos, Node{s, m});
      if (m > best.merit + 1e-12) {
        best = {s, m};
        improved = true;
      }
    }
    stale = improved ? 0 : stale + 1;
  }
  return best;
}

std::vector<std::string> select_best_attributes(const DataTable& dataset, const BestFirstOptions& opts,
                                                Execution exec) {
  const auto su = compute_su_matrix(dataset, exec);
  const auto best = best_first_search(su, opts);
  const auto inputs = dataset.input_columns();
  std::vector<std::string> names;
  for (auto i : best.subset) names.push_back(dataset.specs()[inputs[i]].name);
  return names;
}

DataTable reduce_to(const DataTable& dataset, std::span<const std::string> names) {
  std::set<std::size_t> keep;
  for (const auto& name : names) {
    const auto c = dataset.require_column(name);
    if (dataset.specs()[c].role != AttrRole::Input)
      throw UnknownAttribute("'" + name + "' is not an input attribute");
    keep.insert(c);
  }
  std::vector<std::size_t> cols;
  for (std::size_t c = 0; c < dataset.num_columns(); ++c)
    if (dataset.specs()[c].role != AttrRole::Input || keep.count(c)) cols.push_back(c);
  return dataset.select_columns(cols);
}

}  // namespace fusemine

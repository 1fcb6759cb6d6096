#include "fusemine/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <regex>
#include <set>

#include <fmt/format.h>

#include "fusemine/errors.hpp"
#include "fusemine/random.hpp"

namespace fusemine {

NormalizationParams fit_min_max(std::span<const Value> column) {
  NormalizationParams p;
  bool any = false;
  for (const auto& v : column) {
    if (!v.is_numeric()) continue;
    const double x = v.as_numeric();
    if (!any) {
      p.min = p.max = x;
      any = true;
    } else {
      p.min = std::min(p.min, x);
      p.max = std::max(p.max, x);
    }
  }
  if (!any) throw EmptyColumn("column has no numeric values");
  return p;
}

std::vector<Value> apply_min_max(std::span<const Value> column, const NormalizationParams& p) {
  std::vector<Value> out;
  out.reserve(column.size());
  for (const auto& v : column)
    out.push_back(v.is_numeric() ? Value::numeric(p.apply(v.as_numeric())) : Value::missing());
  return out;
}

std::pair<std::vector<Value>, NormalizationParams> min_max_normalize(std::span<const Value> column) {
  auto p = fit_min_max(column);
  return {apply_min_max(column, p), p};
}

// ---------------------------------------------------------------------------

std::vector<double> BinningParams::boundaries() const {
  std::vector<double> b;
  const double width = (max - min) / static_cast<double>(n_bins);
  for (std::size_t i = 1; i < n_bins; ++i) b.push_back(min + static_cast<double>(i) * width);
  return b;
}

std::size_t BinningParams::bin_of(double v) const {
  if (!(max > min)) return 0;
  // Counting cut points at or below v gives half-open bins with an exact
  // partition; the global max lands in the top bin automatically.
  std::size_t bin = 0;
  for (double cut : boundaries())
    if (v >= cut) ++bin;
  return bin;
}

void BinningParams::validate() const {
  if (n_bins < 2) throw InvalidParams("n_bins must be at least 2");
  if (labels.size() != n_bins) throw InvalidParams("bin label count must equal n_bins");
  if (min > max) throw InvalidParams("binning min exceeds max");
  AttributeSpec::nominal("bins", labels).validate();
}

BinningParams fit_equal_width(std::span<const Value> column, std::size_t n_bins,
                              std::vector<std::string> labels) {
  const auto mm = fit_min_max(column);
  BinningParams p{n_bins, std::move(labels), mm.min, mm.max};
  p.validate();
  return p;
}

std::vector<Value> equal_width_discretize(std::span<const Value> column, const BinningParams& p) {
  p.validate();
  std::vector<Value> out;
  out.reserve(column.size());
  for (const auto& v : column)
    out.push_back(v.is_numeric() ? Value::nominal(p.bin_of(v.as_numeric())) : Value::missing());
  return out;
}

// ---------------------------------------------------------------------------

void ClassRule::validate() const {
  if (!(pass_threshold >= 0.0 && pass_threshold <= 10.0))
    throw InvalidParams("pass_threshold must lie in [0, 10]");
}

std::size_t label_class(std::optional<double> exam_score, const ClassRule& rule) {
  rule.validate();
  if (!exam_score) return kDropout;
  const double s = *exam_score;
  if (!(s >= 0.0 && s <= 10.0)) throw OutOfRangeScore(fmt::format("exam score {} outside [0, 10]", s));
  return s >= rule.pass_threshold ? kPass : kFail;
}

// ---------------------------------------------------------------------------

DataTable fuse_sessions(const DataTable& table) {
  static const std::regex session_re(R"(^(.+)\.s([0-9]+)$)");
  const auto& specs = table.specs();

  // Group session columns by base name, ordered by first appearance.
  struct Group {
    std::string base;
    std::vector<std::size_t> members;
  };
  std::vector<Group> groups;
  std::vector<std::ptrdiff_t> group_of(specs.size(), -1);
  for (std::size_t c = 0; c < specs.size(); ++c) {
    std::smatch m;
    if (specs[c].role != AttrRole::Input || !std::regex_match(specs[c].name, m, session_re)) continue;
    const std::string base = m[1];
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) { return g.base == base; });
    if (it == groups.end()) {
      groups.push_back({base, {c}});
      group_of[c] = static_cast<std::ptrdiff_t>(groups.size() - 1);
    } else {
      it->members.push_back(c);
      group_of[c] = it - groups.begin();
    }
  }
  for (const auto& g : groups) {
    const auto& first = specs[g.members.front()];
    for (auto c : g.members)
      if (specs[c].kind != first.kind || specs[c].labels != first.labels)
        throw MixedKindGroup("session group '" + g.base + "' mixes kinds or label sets");
    if (table.column_index(g.base))
      throw MixedKindGroup("session group '" + g.base + "' collides with an existing column");
  }

  // Output layout: each group replaces its first member in place.
  struct Out {
    bool fused;
    std::size_t index;  // column or group index
  };
  std::vector<Out> layout;
  std::vector<AttributeSpec> out_specs;
  std::vector<bool> emitted(groups.size(), false);
  for (std::size_t c = 0; c < specs.size(); ++c) {
    if (group_of[c] < 0) {
      layout.push_back({false, c});
      out_specs.push_back(specs[c]);
    } else if (!emitted[static_cast<std::size_t>(group_of[c])]) {
      const auto g = static_cast<std::size_t>(group_of[c]);
      emitted[g] = true;
      layout.push_back({true, g});
      auto s = specs[c];
      s.name = groups[g].base;
      out_specs.push_back(std::move(s));
    }
  }

  std::vector<Row> rows;
  rows.reserve(table.num_rows());
  for (const auto& row : table.rows()) {
    Row out;
    out.reserve(layout.size());
    for (const auto& l : layout) {
      if (!l.fused) {
        out.push_back(row[l.index]);
        continue;
      }
      const auto& g = groups[l.index];
      const auto& spec = specs[g.members.front()];
      if (spec.is_numeric()) {
        double sum = 0.0;
        std::size_t n = 0;
        for (auto c : g.members)
          if (row[c].is_numeric()) {
            sum += row[c].as_numeric();
            ++n;
          }
        out.push_back(n ? Value::numeric(sum / static_cast<double>(n)) : Value::missing());
      } else {
        std::vector<std::size_t> counts(spec.labels.size(), 0);
        std::size_t n = 0;
        for (auto c : g.members)
          if (row[c].is_nominal()) {
            ++counts[row[c].as_nominal()];
            ++n;
          }
        if (!n) {
          out.push_back(Value::missing());
        } else {
          // max_element returns the first maximum: ties go to the smallest index.
          const auto best = std::max_element(counts.begin(), counts.end()) - counts.begin();
          out.push_back(Value::nominal(static_cast<std::size_t>(best)));
        }
      }
    }
    rows.push_back(std::move(out));
  }
  return DataTable(std::move(out_specs), std::move(rows));
}

std::vector<Value> winsorize_upper(std::span<const Value> column, double quantile) {
  std::vector<double> xs;
  for (const auto& v : column)
    if (v.is_numeric()) xs.push_back(v.as_numeric());
  if (xs.empty()) throw EmptyColumn("column has no numeric values");
  std::sort(xs.begin(), xs.end());
  const auto rank = static_cast<std::size_t>(std::ceil(quantile * static_cast<double>(xs.size())));
  const double cap = xs[std::clamp<std::size_t>(rank, 1, xs.size()) - 1];
  std::vector<Value> out;
  out.reserve(column.size());
  for (const auto& v : column)
    out.push_back(v.is_numeric() ? Value::numeric(std::min(v.as_numeric(), cap)) : v);
  return out;
}

// ---------------------------------------------------------------------------

AnonymizeResult anonymize(const SourceBundle& bundle, std::uint64_t seed) {
  bundle.validate_ids();
  std::set<long long> originals;
  for (const auto& [_, t] : bundle.sources) {
    auto ids = t.ids();
    originals.insert(ids.begin(), ids.end());
  }
  constexpr long long kLow = 100000, kSpan = 900000;
  if (originals.size() > static_cast<std::size_t>(kSpan))
    throw InvalidParams("too many students for six-digit anonymous ids");

  Rng rng(seed);
  std::map<long long, long long> mapping;
  std::set<long long> used;
  for (auto id : originals) {
    long long fresh;
    do {
      fresh = kLow + static_cast<long long>(uniform_index(rng, kSpan));
    } while (!used.insert(fresh).second);
    mapping.emplace(id, fresh);
  }

  AnonymizeResult result;
  for (const auto& [name, t] : bundle.sources) {
    const auto idc = *t.id_column();
    std::vector<Row> rows = t.rows();
    for (auto& r : rows)
      r[idc] = Value::numeric(static_cast<double>(mapping.at(static_cast<long long>(r[idc].as_numeric()))));
    result.bundle.sources.emplace(name, DataTable(t.specs(), std::move(rows)));
  }
  std::vector<Row> map_rows;
  for (const auto& [orig, fresh] : mapping)
    map_rows.push_back({Value::numeric(static_cast<double>(orig)), Value::numeric(static_cast<double>(fresh))});
  result.mapping = DataTable({AttributeSpec::id("original_id"), AttributeSpec::numeric("anonymous_id")},
                             std::move(map_rows));
  return result;
}

// ---------------------------------------------------------------------------

PreprocessConfig PreprocessConfig::from_json(const nlohmann::json& doc) {
  PreprocessConfig c;
  try {
    if (doc.contains("n_bins")) c.n_bins = doc.at("n_bins").get<std::size_t>();
    if (doc.contains("bin_labels")) c.bin_labels = doc.at("bin_labels").get<std::vector<std::string>>();
    if (doc.contains("pass_threshold")) c.pass_threshold = doc.at("pass_threshold").get<double>();
    if (doc.contains("seed")) c.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("fold_local_refit")) c.fold_local_refit = doc.at("fold_local_refit").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidParams(std::string("bad preprocess config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json PreprocessConfig::to_json() const {
  return {{"n_bins", n_bins},
          {"bin_labels", bin_labels},
          {"pass_threshold", pass_threshold},
          {"seed", seed},
          {"fold_local_refit", fold_local_refit}};
}

void PreprocessConfig::validate() const {
  BinningParams{n_bins, bin_labels, 0.0, 1.0}.validate();
  ClassRule{pass_threshold}.validate();
}

nlohmann::json PreprocessParams::to_json() const {
  nlohmann::json doc;
  doc["class_rule"] = {{"pass_threshold", class_rule.pass_threshold}, {"labels", kStatusLabels}};
  auto& src = doc["sources"] = nlohmann::json::object();
  for (const auto& [source, cols] : columns) {
    auto& s = src[source] = nlohmann::json::object();
    for (const auto& [name, p] : cols) {
      s[name] = {{"normalization", {{"min", p.normalization.min}, {"max", p.normalization.max}}},
                 {"binning",
                  {{"min", p.binning.min},
                   {"max", p.binning.max},
                   {"n_bins", p.binning.n_bins},
                   {"labels", p.binning.labels},
                   {"boundaries", p.binning.boundaries()}}}};
    }
  }
  return doc;
}

namespace {

DataTable label_exam(const DataTable& exam, const ClassRule& rule) {
  if (exam.class_column()) return exam;
  const auto inputs = exam.input_columns();
  auto score_col = std::find_if(inputs.begin(), inputs.end(),
                                [&](std::size_t c) { return exam.specs()[c].is_numeric(); });
  if (score_col == inputs.end()) throw SchemaMismatch("exam table has no numeric score column");
  const auto idc = *exam.id_column();
  std::vector<Row> rows;
  rows.reserve(exam.num_rows());
  for (const auto& r : exam.rows()) {
    const auto& v = r[*score_col];
    std::optional<double> score;
    if (v.is_numeric()) score = v.as_numeric();
    rows.push_back({r[idc], Value::nominal(label_class(score, rule))});
  }
  return DataTable({exam.specs()[idc],
                    AttributeSpec::nominal(std::string(kStatusName), kStatusLabels, AttrRole::Class)},
                   std::move(rows));
}

}  // namespace

SourceBundle fuse_bundle(const SourceBundle& raw, const ClassRule& rule) {
  raw.validate_ids();
  SourceBundle fused;
  for (const auto& [name, t] : raw.sources) {
    DataTable out = name == kExam ? label_exam(t, rule) : fuse_sessions(t);
    fused.sources.emplace(name, out.sorted_by_id());
  }
  return fused;
}

PreprocessParams fit_preprocess(const SourceBundle& fused, std::span<const std::size_t> rows,
                                const PreprocessConfig& config) {
  config.validate();
  PreprocessParams params;
  params.class_rule.pass_threshold = config.pass_threshold;
  for (const auto& name : fused.input_source_names()) {
    const auto& t = fused.at(name);
    const auto subset = t.select_rows(rows);
    auto& cols = params.columns[name];
    for (auto c : t.input_columns()) {
      const auto& spec = t.specs()[c];
      if (!spec.is_numeric()) continue;
      const auto col = subset.column(c);
      ColumnParams p;
      p.normalization = fit_min_max(col);
      p.binning = fit_equal_width(col, config.n_bins, config.bin_labels);
      cols.emplace(spec.name, std::move(p));
    }
  }
  return params;
}

std::pair<SourceBundle, SourceBundle> apply_preprocess(const SourceBundle& fused,
                                                       const PreprocessParams& params) {
  SourceBundle numeric, discretized;
  for (const auto& [name, t] : fused.sources) {
    auto pit = params.columns.find(name);
    if (pit == params.columns.end()) {
      numeric.sources.emplace(name, t);
      discretized.sources.emplace(name, t);
      continue;
    }
    std::vector<AttributeSpec> nspecs = t.specs(), dspecs = t.specs();
    std::vector<Row> nrows = t.rows(), drows = t.rows();
    for (std::size_t c = 0; c < t.num_columns(); ++c) {
      auto cit = pit->second.find(t.specs()[c].name);
      if (cit == pit->second.end() || t.specs()[c].role != AttrRole::Input) continue;
      const auto col = t.column(c);
      const auto ncol = apply_min_max(col, cit->second.normalization);
      const auto dcol = equal_width_discretize(col, cit->second.binning);
      dspecs[c] = AttributeSpec::nominal(t.specs()[c].name, cit->second.binning.labels);
      for (std::size_t r = 0; r < t.num_rows(); ++r) {
        nrows[r][c] = ncol[r];
        drows[r][c] = dcol[r];
      }
    }
    numeric.sources.emplace(name, DataTable(std::move(nspecs), std::move(nrows)));
    discretized.sources.emplace(name, DataTable(std::move(dspecs), std::move(drows)));
  }
  return {std::move(numeric), std::move(discretized)};
}

PreprocessResult preprocess_bundle(const SourceBundle& raw, const PreprocessConfig& config) {
  config.validate();
  const auto fused = fuse_bundle(raw, ClassRule{config.pass_threshold});
  std::vector<std::size_t> all(fused.sources.begin()->second.num_rows());
  std::iota(all.begin(), all.end(), 0);
  PreprocessResult result;
  result.params = fit_preprocess(fused, all, config);
  auto [n, d] = apply_preprocess(fused, result.params);
  result.numeric = std::move(n);
  result.discretized = std::move(d);
  return result;
}

}  // namespace fusemine

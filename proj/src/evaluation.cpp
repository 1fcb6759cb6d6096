#include "fusemine/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <numeric>

#include <fmt/format.h>

#include "fusemine/errors.hpp"
#include "fusemine/random.hpp"

namespace fusemine {

std::string_view to_string(Variant v) { return v == Variant::Numeric ? "numeric" : "discretized"; }

Variant parse_variant(std::string_view tag) {
  for (auto v : kAllVariants)
    if (to_string(v) == tag) return v;
  throw InvalidParams("unknown variant '" + std::string(tag) + "' (expected numeric or discretized)");
}

std::vector<std::size_t> FoldPlan::train_rows(std::size_t fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t f = 0; f < folds.size(); ++f)
    if (f != fold) rows.insert(rows.end(), folds[f].begin(), folds[f].end());
  std::sort(rows.begin(), rows.end());
  return rows;
}

namespace {

// Empty classes are tolerated here; cross-validation of a constant-class
// dataset still needs folds.
FoldPlan assign_folds(std::span<const std::size_t> labels, std::size_t num_classes, std::size_t k,
                      std::uint64_t seed) {
  if (k < 2) throw InvalidParams("k must be at least 2");
  if (k > labels.size())
    throw TooFewRows("k = " + std::to_string(k) + " exceeds the " + std::to_string(labels.size()) + " rows");
  std::vector<std::vector<std::size_t>> by_class(num_classes);
  for (std::size_t r = 0; r < labels.size(); ++r) {
    if (labels[r] >= num_classes) throw InvalidParams("label index out of range");
    by_class[labels[r]].push_back(r);
  }
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.folds.assign(k, {});
  std::size_t pos = 0;
  for (std::size_t c = 0; c < num_classes; ++c) {
    Rng rng(derive_seed(seed, {c}));
    shuffle(std::span<std::size_t>(by_class[c]), rng);
    for (auto r : by_class[c]) plan.folds[pos++ % k].push_back(r);
  }
  for (auto& f : plan.folds) std::sort(f.begin(), f.end());
  return plan;
}

std::size_t argmax(const std::vector<double>& d) {
  return static_cast<std::size_t>(std::max_element(d.begin(), d.end()) - d.begin());
}

}  // namespace

FoldPlan stratified_kfold(std::span<const std::size_t> labels, std::size_t num_classes, std::size_t k,
                          std::uint64_t seed) {
  std::vector<std::size_t> count(num_classes, 0);
  for (auto l : labels)
    if (l < num_classes) ++count[l];
  for (std::size_t c = 0; c < num_classes; ++c)
    if (count[c] == 0) throw TooFewRows("class " + std::to_string(c) + " has no rows");
  return assign_folds(labels, num_classes, k, seed);
}

FoldPlan stratified_kfold(const DataTable& dataset, std::size_t k, std::uint64_t seed) {
  const auto cc = dataset.class_column();
  if (!cc) throw SchemaMismatch("dataset has no class attribute");
  std::vector<std::size_t> labels;
  for (std::size_t r = 0; r < dataset.num_rows(); ++r) {
    const auto& v = dataset.at(r, *cc);
    if (!v.is_nominal()) throw InvalidParams("stratification needs a label on every row");
    labels.push_back(v.as_nominal());
  }
  return stratified_kfold(labels, dataset.specs()[*cc].labels.size(), k, seed);
}

double accuracy(std::span<const std::size_t> predictions, std::span<const std::size_t> truth) {
  if (predictions.size() != truth.size()) throw LengthMismatch("predictions and truth differ in length");
  if (truth.empty()) throw TooFewRows("no predictions to score");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) correct += predictions[i] == truth[i] ? 1 : 0;
  return 100.0 * static_cast<double>(correct) / static_cast<double>(truth.size());
}

double auc_binary(std::span<const double> scores, std::span<const bool> positive) {
  if (scores.size() != positive.size()) throw LengthMismatch("scores and labels differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    // Ranks i+1 .. j share the midrank.
    const double mid = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t)
      if (positive[order[t]]) {
        rank_sum += mid;
        ++pos;
      }
    i = j;
  }
  const std::size_t neg = n - pos;
  if (pos == 0 || neg == 0) throw SingleClassTruth("AUC needs both positive and negative instances");
  const double p = static_cast<double>(pos);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

AucReport auc_weighted(const std::vector<std::vector<double>>& dists, std::span<const std::size_t> truth) {
  if (dists.size() != truth.size()) throw LengthMismatch("distributions and truth differ in length");
  if (truth.empty()) throw SingleClassTruth("no instances");
  const std::size_t k = dists.front().size();
  for (const auto& d : dists)
    if (d.size() != k) throw LengthMismatch("distributions differ in width");
  AucReport rep;
  rep.per_class.assign(k, std::nullopt);
  rep.prevalence.assign(k, 0.0);
  for (auto t : truth) {
    if (t >= k) throw LengthMismatch("truth label outside the distribution width");
    rep.prevalence[t] += 1.0;
  }
  for (auto& p : rep.prevalence) p /= static_cast<double>(truth.size());
  double sum = 0.0, weight = 0.0;
  std::vector<double> scores(truth.size());
  // std::span cannot view a vector<bool>.
  std::unique_ptr<bool[]> positive(new bool[truth.size()]);
  for (std::size_t c = 0; c < k; ++c) {
    if (rep.prevalence[c] == 0.0 || rep.prevalence[c] == 1.0) continue;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      scores[i] = dists[i][c];
      positive[i] = truth[i] == c;
    }
    const double a = auc_binary(scores, std::span<const bool>(positive.get(), truth.size()));
    rep.per_class[c] = a;
    sum += rep.prevalence[c] * a;
    weight += rep.prevalence[c];
  }
  if (weight == 0.0) throw SingleClassTruth("every instance has the same class");
  rep.weighted = sum / weight;
  return rep;
}

ExperimentData ExperimentData::from_raw(const SourceBundle& raw, const PreprocessConfig& config) {
  config.validate();
  ExperimentData d;
  d.preprocess = config;
  d.fused = fuse_bundle(raw, ClassRule{config.pass_threshold});
  std::vector<std::size_t> all(d.fused->sources.begin()->second.num_rows());
  std::iota(all.begin(), all.end(), 0);
  auto [n, disc] = apply_preprocess(*d.fused, fit_preprocess(*d.fused, all, config));
  d.numeric = std::move(n);
  d.discretized = std::move(disc);
  return d;
}

void CvOptions::validate() const {
  if (k < 2) throw InvalidParams("k must be at least 2");
  learner.validate();
}

namespace {

// Held-out class distributions of every vote member, so that any weight
// assignment can be scored without retraining.
struct MemberCv {
  ApproachPlan plan;
  std::size_t num_classes = 0;
  std::vector<std::size_t> truth;   // scored rows only
  std::vector<std::size_t> fold_of;  // parallel to truth
  std::size_t k = 0;
  std::vector<std::vector<std::vector<double>>> dists;  // [member][scored row][class]
};

SourceBundle bundle_rows(const SourceBundle& b, std::span<const std::size_t> rows) {
  SourceBundle out;
  for (const auto& [name, t] : b.sources) out.sources.emplace(name, t.sorted_by_id().select_rows(rows));
  return out;
}

std::uint64_t cell_seed(std::uint64_t seed, Approach a, Variant v, Algorithm alg, std::size_t fold) {
  return derive_seed(seed, {static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(v),
                            static_cast<std::uint64_t>(alg), fold});
}

MemberCv member_cv(const FusionConfig& config, Algorithm algorithm, const ExperimentData& data, Variant variant,
                   const CvOptions& opt) {
  opt.validate();
  const bool refit = opt.fold_local_preprocess || data.preprocess.fold_local_refit;
  if (refit && !data.fused)
    throw InvalidParams("fold-local preprocessing needs the fused bundle");
  const auto& bundle = data.variant(variant);
  MemberCv cv;
  cv.plan = plan_approach(config, bundle, Execution::Serial);
  const auto datasets = plan_datasets(cv.plan, bundle);

  const auto& ref = datasets.front();
  const auto cc = *ref.class_column();
  cv.num_classes = ref.specs()[cc].labels.size();
  std::vector<std::size_t> scored;
  for (std::size_t r = 0; r < ref.num_rows(); ++r)
    if (ref.at(r, cc).is_nominal()) {
      scored.push_back(r);
      cv.truth.push_back(ref.at(r, cc).as_nominal());
    }
  const auto folds = assign_folds(cv.truth, cv.num_classes, opt.k, opt.seed);
  cv.k = opt.k;
  cv.fold_of.assign(scored.size(), 0);
  cv.dists.assign(datasets.size(), std::vector<std::vector<double>>(scored.size()));

  for (std::size_t f = 0; f < opt.k; ++f) {
    std::vector<std::size_t> train_rows, test_rows;
    for (auto i : folds.train_rows(f)) train_rows.push_back(scored[i]);
    for (auto i : folds.folds[f]) {
      test_rows.push_back(scored[i]);
      cv.fold_of[i] = f;
    }

    SourceBundle refitted;
    const SourceBundle* fold_bundle = &bundle;
    if (refit) {
      auto [n, d] = apply_preprocess(*data.fused, fit_preprocess(*data.fused, train_rows, data.preprocess));
      refitted = variant == Variant::Numeric ? std::move(n) : std::move(d);
      fold_bundle = &refitted;
    }
    ApproachPlan plan = cv.plan;
    if (opt.fold_local_selection)
      plan = plan_approach(config, bundle_rows(*fold_bundle, train_rows), Execution::Serial);
    std::vector<DataTable> fold_sets;
    if (refit || opt.fold_local_selection) fold_sets = plan_datasets(plan, *fold_bundle);
    const auto& sets = fold_sets.empty() ? datasets : fold_sets;

    std::vector<DataTable> train_sets, test_sets;
    for (const auto& s : sets) {
      train_sets.push_back(s.select_rows(train_rows));
      test_sets.push_back(s.select_rows(test_rows));
    }
    const auto model = fit_plan(plan, train_sets, algorithm, opt.learner,
                                cell_seed(opt.seed, config.approach, variant, algorithm, f));
    std::vector<std::vector<std::vector<double>>> held(sets.size());
    if (const auto* vote = std::get_if<VoteModel>(&model)) {
      for (std::size_t s = 0; s < sets.size(); ++s) held[s] = vote->members()[s].model.distributions(test_sets[s]);
    } else {
      held[0] = std::get<Model>(model).distributions(test_sets[0]);
    }
    for (std::size_t s = 0; s < sets.size(); ++s)
      for (std::size_t t = 0; t < folds.folds[f].size(); ++t) cv.dists[s][folds.folds[f][t]] = std::move(held[s][t]);
  }
  return cv;
}

std::vector<std::vector<double>> combined(const MemberCv& cv, std::span<const double> weights) {
  std::vector<std::vector<double>> out(cv.truth.size());
  std::vector<std::vector<double>> parts(cv.dists.size());
  for (std::size_t r = 0; r < out.size(); ++r) {
    for (std::size_t s = 0; s < cv.dists.size(); ++s) parts[s] = cv.dists[s][r];
    out[r] = vote_predict(parts, weights);
  }
  return out;
}

double cv_accuracy(const MemberCv& cv, const std::vector<std::size_t>& pred, bool mean_of_folds) {
  if (!mean_of_folds) return accuracy(pred, cv.truth);
  std::vector<double> correct(cv.k, 0.0), n(cv.k, 0.0);
  for (std::size_t r = 0; r < pred.size(); ++r) {
    n[cv.fold_of[r]] += 1.0;
    correct[cv.fold_of[r]] += pred[r] == cv.truth[r] ? 1.0 : 0.0;
  }
  double sum = 0.0;
  for (std::size_t f = 0; f < cv.k; ++f) sum += 100.0 * correct[f] / n[f];
  return sum / static_cast<double>(cv.k);
}

std::vector<double> plan_weights(const ApproachPlan& plan) {
  std::vector<double> w;
  for (const auto& name : plan.datasets) {
    auto it = plan.weights.find(name);
    w.push_back(it == plan.weights.end() ? 1.0 : it->second);
  }
  return w;
}

EvaluationRow row_from(const MemberCv& cv, Algorithm algorithm, std::span<const double> weights,
                       bool mean_of_folds) {
  EvaluationRow row;
  row.algorithm = algorithm;
  const auto dists = combined(cv, weights);
  std::vector<std::size_t> pred;
  for (const auto& d : dists) pred.push_back(argmax(d));
  row.accuracy_pct = cv_accuracy(cv, pred, mean_of_folds);
  try {
    const auto auc = auc_weighted(dists, cv.truth);
    row.auc = auc.weighted;
    row.class_auc = auc.per_class;
  } catch (const SingleClassTruth&) {
    row.auc = std::numeric_limits<double>::quiet_NaN();
    row.class_auc.assign(cv.num_classes, std::nullopt);
  }
  row.confusion.assign(cv.num_classes, std::vector<std::size_t>(cv.num_classes, 0));
  for (std::size_t r = 0; r < pred.size(); ++r) ++row.confusion[cv.truth[r]][pred[r]];
  if (is_ensemble(cv.plan.approach))
    for (std::size_t s = 0; s < cv.plan.datasets.size(); ++s) row.weights[cv.plan.datasets[s]] = weights[s];
  return row;
}

struct SearchOutcome {
  WeightSearchResult result;
  std::vector<double> best;
};

SearchOutcome search(const MemberCv& cv, std::span<const double> grid, bool mean_of_folds) {
  const std::size_t m = cv.dists.size();
  if (m < 2) throw InvalidParams("weight search needs at least two sources");
  if (grid.empty()) throw InvalidParams("weight grid is empty");
  for (auto g : grid)
    if (!(g > 0.0)) throw InvalidParams("weight grid values must be positive");

  SearchOutcome out;
  std::vector<std::size_t> idx(m, 0);
  double best_acc = -1.0;
  bool best_is_ones = false;
  for (;;) {
    std::vector<double> w(m);
    for (std::size_t s = 0; s < m; ++s) w[s] = grid[idx[s]];
    const auto dists = combined(cv, w);
    std::vector<std::size_t> pred;
    for (const auto& d : dists) pred.push_back(argmax(d));
    const double acc = cv_accuracy(cv, pred, mean_of_folds);
    out.result.evaluated.emplace_back(w, acc);
    const bool ones = std::all_of(w.begin(), w.end(), [](double v) { return v == 1.0; });
    if (acc > best_acc || (acc == best_acc && ones && !best_is_ones)) {
      best_acc = acc;
      best_is_ones = ones;
      out.best = w;
    }
    // Odometer with the last source varying fastest.
    std::size_t s = m;
    while (s > 0 && ++idx[s - 1] == grid.size()) idx[--s] = 0;
    if (s == 0) break;
  }
  out.result.accuracy_pct = best_acc;
  for (std::size_t s = 0; s < m; ++s) out.result.weights[cv.plan.datasets[s]] = out.best[s];
  return out;
}

}  // namespace

EvaluationRow cross_validate(const FusionConfig& config, Algorithm algorithm, const ExperimentData& data,
                             Variant variant, const CvOptions& options) {
  const auto cv = member_cv(config, algorithm, data, variant, options);
  return row_from(cv, algorithm, plan_weights(cv.plan), options.mean_of_folds);
}

WeightSearchResult weight_search(const FusionConfig& config, Algorithm algorithm, const ExperimentData& data,
                                 Variant variant, const CvOptions& options, std::span<const double> grid) {
  if (!is_ensemble(config.approach)) throw InvalidParams("weight search applies to ensemble approaches only");
  const auto cv = member_cv(config, algorithm, data, variant, options);
  return search(cv, grid, options.mean_of_folds).result;
}

void EvaluationReport::recompute_averages() {
  mean_accuracy = 0.0;
  mean_auc = 0.0;
  if (rows.empty()) return;
  for (const auto& r : rows) {
    mean_accuracy += r.accuracy_pct;
    mean_auc += r.auc;
  }
  mean_accuracy /= static_cast<double>(rows.size());
  mean_auc /= static_cast<double>(rows.size());
}

GridReport run_experiment_grid(const ExperimentData& data, const GridOptions& options) {
  options.cv.validate();
  struct Cell {
    std::size_t table;
    Approach approach;
    Variant variant;
    Algorithm algorithm;
  };
  GridReport report;
  std::vector<Cell> cells;
  for (auto a : options.approaches)
    for (auto v : options.variants) {
      EvaluationReport t;
      t.approach = a;
      t.variant = v;
      t.seed = options.cv.seed;
      t.rows.resize(options.algorithms.size());
      report.tables.push_back(std::move(t));
      for (auto alg : options.algorithms) cells.push_back({report.tables.size() - 1, a, v, alg});
    }

  std::vector<EvaluationRow> results(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  auto run_cell = [&](std::size_t i) {
    try {
      const auto& c = cells[i];
      FusionConfig config;
      config.approach = c.approach;
      config.weights = options.weights;
      const auto cv = member_cv(config, c.algorithm, data, c.variant, options.cv);
      if (options.weight_search && is_ensemble(c.approach)) {
        const std::array<double, 2> grid{1.0, 2.0};
        const auto best = search(cv, grid, options.cv.mean_of_folds).best;
        results[i] = row_from(cv, c.algorithm, best, options.cv.mean_of_folds);
      } else {
        results[i] = row_from(cv, c.algorithm, plan_weights(cv.plan), options.cv.mean_of_folds);
      }
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const auto n = static_cast<std::ptrdiff_t>(cells.size());
  if (options.exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic) num_threads(max_threads())
    for (std::ptrdiff_t i = 0; i < n; ++i) run_cell(static_cast<std::size_t>(i));
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) run_cell(static_cast<std::size_t>(i));
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<std::size_t> next(report.tables.size(), 0);
  for (std::size_t i = 0; i < cells.size(); ++i)
    report.tables[cells[i].table].rows[next[cells[i].table]++] = std::move(results[i]);
  for (auto& t : report.tables) t.recompute_averages();

  bool have = false;
  auto auc_key = [](double a) { return std::isnan(a) ? -1.0 : a; };
  for (const auto& t : report.tables)
    for (const auto& r : t.rows) {
      if (!have || r.accuracy_pct > report.best.accuracy_pct ||
          (r.accuracy_pct == report.best.accuracy_pct && auc_key(r.auc) > auc_key(report.best.auc))) {
        report.best = {t.approach, t.variant, r.algorithm, r.accuracy_pct, r.auc};
        have = true;
      }
    }
  return report;
}

std::string_view display_name(Algorithm a) {
  switch (a) {
    case Algorithm::C45: return "J48";
    case Algorithm::RepTree: return "REPTree";
    case Algorithm::RandomTree: return "Randomtree";
    case Algorithm::Ripper: return "Jrip";
    case Algorithm::Part: return "PART";
    case Algorithm::Nnge: return "Nnge";
  }
  return "?";
}

namespace {

std::string fixed4(double v) { return std::isnan(v) ? "?" : fmt::format("{:.4f}", v); }

std::string_view variant_heading(Variant v) {
  return v == Variant::Numeric ? "NUMERICAL DATA" : "DISCRETIZED DATA";
}

// Tables grouped by approach, preserving first-appearance order.
std::vector<std::vector<const EvaluationReport*>> by_approach(const GridReport& report) {
  std::vector<std::vector<const EvaluationReport*>> groups;
  for (const auto& t : report.tables) {
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const auto& g) { return g.front()->approach == t.approach; });
    if (it == groups.end())
      groups.push_back({&t});
    else
      it->push_back(&t);
  }
  return groups;
}

constexpr int kLabelWidth = 12;
constexpr int kCellWidth = 12;

std::string header_lines(const std::vector<const EvaluationReport*>& group, std::string_view label,
                         int width = kLabelWidth) {
  std::string top = fmt::format("{:<{}}", label, width);
  std::string sub = fmt::format("{:<{}}", "", width);
  for (const auto* t : group) {
    top += fmt::format("{:<{}}", variant_heading(t->variant), 2 * kCellWidth);
    sub += fmt::format("{:<{}}{:<{}}", "% Accuracy", kCellWidth, "AUC", kCellWidth);
  }
  auto rstrip = [](std::string s) {
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s;
  };
  return rstrip(top) + '\n' + rstrip(sub) + '\n';
}

std::string row_line(std::string_view label, const std::vector<std::pair<double, double>>& cells,
                     int width = kLabelWidth) {
  std::string line = fmt::format("{:<{}}", label, width);
  for (const auto& [acc, auc] : cells)
    line += fmt::format("{:<{}}{:<{}}", fixed4(acc), kCellWidth, fixed4(auc), kCellWidth);
  while (!line.empty() && line.back() == ' ') line.pop_back();
  return line + '\n';
}

}  // namespace

std::string report_csv(const GridReport& report) {
  std::string out = "approach,variant,algorithm,accuracy_pct,auc\n";
  for (const auto& t : report.tables)
    for (const auto& r : t.rows)
      out += fmt::format("{},{},{},{:.4f},{}\n", to_string(t.approach), to_string(t.variant),
                         to_string(r.algorithm), r.accuracy_pct, std::isnan(r.auc) ? "" : fixed4(r.auc));
  return out;
}

std::string render_tables(const GridReport& report) {
  std::string out;
  for (const auto& group : by_approach(report)) {
    if (!out.empty()) out += '\n';
    out += std::string(display_name(group.front()->approach)) + "\n\n";
    out += header_lines(group, "");
    const auto& first = group.front()->rows;
    for (std::size_t i = 0; i < first.size(); ++i) {
      std::vector<std::pair<double, double>> cells;
      for (const auto* t : group) cells.emplace_back(t->rows[i].accuracy_pct, t->rows[i].auc);
      out += row_line(display_name(first[i].algorithm), cells);
    }
    std::vector<std::pair<double, double>> avg;
    for (const auto* t : group) avg.emplace_back(t->mean_accuracy, t->mean_auc);
    out += row_line("Avg.", avg);
  }
  return out;
}

std::string render_summary(const GridReport& report) {
  std::string out;
  const auto groups = by_approach(report);
  if (groups.empty()) return out;
  int width = kLabelWidth;
  for (const auto& group : groups)
    width = std::max(width, static_cast<int>(display_name(group.front()->approach).size()) + 2);
  out += header_lines(groups.front(), "Average", width);
  for (const auto& group : groups) {
    std::vector<std::pair<double, double>> avg;
    for (const auto* t : group) avg.emplace_back(t->mean_accuracy, t->mean_auc);
    out += row_line(display_name(group.front()->approach), avg, width);
  }
  return out;
}

nlohmann::json report_to_json(const GridReport& report) {
  auto num = [](double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); };
  nlohmann::json tables = nlohmann::json::array();
  for (const auto& t : report.tables) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : t.rows) {
      nlohmann::json class_auc = nlohmann::json::array();
      for (const auto& a : r.class_auc) class_auc.push_back(a ? nlohmann::json(*a) : nlohmann::json(nullptr));
      nlohmann::json w = nlohmann::json::object();
      for (const auto& [k, v] : r.weights) w[k] = v;
      rows.push_back({{"algorithm", std::string(to_string(r.algorithm))},
                      {"accuracy_pct", r.accuracy_pct},
                      {"auc", num(r.auc)},
                      {"class_auc", class_auc},
                      {"confusion", r.confusion},
                      {"weights", w}});
    }
    tables.push_back({{"approach", std::string(to_string(t.approach))},
                      {"variant", std::string(to_string(t.variant))},
                      {"seed", t.seed},
                      {"rows", rows},
                      {"mean_accuracy", t.mean_accuracy},
                      {"mean_auc", num(t.mean_auc)}});
  }
  return {{"tables", tables},
          {"best",
           {{"approach", std::string(to_string(report.best.approach))},
            {"variant", std::string(to_string(report.best.variant))},
            {"algorithm", std::string(to_string(report.best.algorithm))},
            {"accuracy_pct", report.best.accuracy_pct},
            {"auc", num(report.best.auc)}}}};
}

}  // namespace fusemine

// Runs the ten acceptance criteria and prints one PASS/FAIL line for each.
// Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "fixtures.hpp"
#include "fusemine/errors.hpp"
#include "fusemine/evaluation.hpp"
#include "fusemine/feature_select.hpp"
#include "fusemine/fusion.hpp"
#include "fusemine/preprocess.hpp"
#include "fusemine/synthgen.hpp"
#include "oracles.hpp"

using namespace fusemine;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects the first few failures so the summary line stays short.
class Checker {
 public:
  void require(bool ok, const std::string& what) {
    if (ok) return;
    if (failures_++ < 3) notes_.push_back(what);
  }
  Outcome finish(std::string detail) const {
    if (failures_ == 0) return {true, std::move(detail)};
    std::string msg = fmt::format("{} failure(s)", failures_);
    for (const auto& n : notes_) msg += "; " + n;
    return {false, msg};
  }

 private:
  std::size_t failures_ = 0;
  std::vector<std::string> notes_;
};

std::vector<Value> numeric_column(const std::vector<double>& xs) {
  std::vector<Value> out;
  for (double x : xs) out.push_back(Value::numeric(x));
  return out;
}

// ---------------------------------------------------------------------------

Outcome preprocessing_exactness() {
  Checker check;
  std::mt19937_64 rng(101);
  for (int t = 0; t < 1000; ++t) {
    const double lo = std::uniform_real_distribution<double>(-1e3, 1e3)(rng);
    const double span = std::exp(std::uniform_real_distribution<double>(-5, 8)(rng));
    std::uniform_real_distribution<double> u(lo, lo + span);
    std::vector<double> xs(2 + rng() % 200);
    for (auto& x : xs) x = u(rng);
    const auto col = numeric_column(xs);
    const auto out = min_max_normalize(col).first;
    const auto mn = std::min_element(xs.begin(), xs.end()) - xs.begin();
    const auto mx = std::max_element(xs.begin(), xs.end()) - xs.begin();
    check.require(out[mn].as_numeric() == 0.0, "column min does not map to 0");
    check.require(out[mx].as_numeric() == 1.0, "column max does not map to 1");
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return xs[a] < xs[b]; });
    for (std::size_t i = 1; i < order.size(); ++i)
      check.require(out[order[i - 1]].as_numeric() <= out[order[i]].as_numeric(), "order not preserved");

    const auto bins = fit_equal_width(col);
    const double min = xs[mn], max = xs[mx];
    const auto b = bins.boundaries();
    check.require(b.size() == 2, "expected two inner boundaries");
    for (std::size_t i = 1; i <= 2 && i <= b.size(); ++i)
      check.require(std::abs(b[i - 1] - (min + static_cast<double>(i) * (max - min) / 3.0)) <= 1e-12 * std::max(1.0, std::abs(max)),
                    "bin boundary off");
    const auto coded = equal_width_discretize(col, bins);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const auto bin = coded[i].as_nominal();
      check.require(bin < 3, "bin index out of range");
      if (bin > 0 && bin - 1 < b.size()) check.require(xs[i] >= b[bin - 1], "value below its bin");
      if (bin < 2 && bin < b.size()) check.require(xs[i] < b[bin], "value above its bin");
    }
  }

  // Labels partition {absent} and [0, 10]; anything else is rejected.
  ClassRule rule;
  check.require(label_class(std::nullopt, rule) == kDropout, "absent score is not Dropout");
  for (int i = 0; i <= 100000; ++i) {
    const double s = 10.0 * i / 100000.0;
    const auto c = label_class(s, rule);
    check.require(c == (s >= 5.0 ? kPass : kFail), fmt::format("score {} mislabelled", s));
  }
  for (double s : {-1e-9, 10.0000001, -3.0, 11.0}) {
    bool threw = false;
    try {
      label_class(s, rule);
    } catch (const OutOfRangeScore&) {
      threw = true;
    }
    check.require(threw, fmt::format("score {} accepted", s));
  }
  return check.finish("1000 columns, boundaries within 1e-12, labels over 100001 scores");
}

Outcome fusion_oracle() {
  Checker check;
  std::mt19937_64 rng(202);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t sessions = 1 + rng() % 15;
    const std::size_t rows = 1 + rng() % 20;
    std::vector<AttributeSpec> specs{AttributeSpec::id()};
    for (std::size_t s = 1; s <= sessions; ++s) specs.push_back(AttributeSpec::numeric("Num.s" + std::to_string(s)));
    for (std::size_t s = 1; s <= sessions; ++s)
      specs.push_back(AttributeSpec::nominal("Nom.s" + std::to_string(s), fixture::levels()));
    std::uniform_real_distribution<double> u(-50, 50);
    std::vector<Row> data;
    std::vector<double> means;
    std::vector<std::size_t> modes;
    for (std::size_t r = 0; r < rows; ++r) {
      Row row{Value::numeric(static_cast<double>(r))};
      std::vector<double> xs;
      std::vector<std::size_t> cs;
      for (std::size_t s = 0; s < sessions; ++s) row.push_back(Value::numeric(xs.emplace_back(u(rng))));
      // Few levels and few sessions make ties common.
      for (std::size_t s = 0; s < sessions; ++s) row.push_back(Value::nominal(cs.emplace_back(rng() % 3)));
      means.push_back(oracle::mean(xs));
      modes.push_back(oracle::mode(cs));
      data.push_back(row);
    }
    const auto fused = fuse_sessions(DataTable(specs, data));
    const auto num = fused.require_column("Num");
    const auto nom = fused.require_column("Nom");
    for (std::size_t r = 0; r < rows; ++r) {
      check.require(std::abs(fused.at(r, num).as_numeric() - means[r]) <= 1e-12, "mean differs");
      check.require(fused.at(r, nom).as_nominal() == modes[r], "mode differs");
    }
  }
  return check.finish("1000 session tables, mean within 1e-12, mode exact with smallest-label ties");
}

Outcome cfs_equivalence() {
  Checker check;
  std::mt19937_64 rng(303);
  std::size_t misses = 0;
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const auto table = fixture::random_nominal(rng, 2 + t % 9, 40 + rng() % 80);
    const auto su = compute_su_matrix(table);
    std::vector<std::vector<double>> ff(su.size(), std::vector<double>(su.size()));
    std::vector<double> fc(su.size());
    // Oracle SU straight from the columns.
    const auto inputs = table.input_columns();
    const auto cls = fixture::column_codes(table, *table.class_column());
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      const auto a = fixture::column_codes(table, inputs[i]);
      fc[i] = oracle::su(a, cls);
      for (std::size_t j = 0; j < inputs.size(); ++j) ff[i][j] = oracle::su(a, fixture::column_codes(table, inputs[j]));
    }
    const double optimum = oracle::exhaustive_best_merit(ff, fc);
    const double found = best_first_search(su).merit;
    if (std::abs(found - optimum) > 1e-9) {
      ++misses;
      worst = std::max(worst, optimum - found);
    }
  }
  check.require(misses == 0, fmt::format("best-first below the exhaustive optimum on {} of 200 datasets (largest gap {:.6f})",
                                         misses, worst));
  return check.finish("200 datasets of 2 to 10 attributes, merit within 1e-9");
}

Outcome auc_equivalence() {
  Checker check;
  std::mt19937_64 rng(404);
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 2 + rng() % 300;
    std::vector<double> s(n);
    std::vector<bool> pos(n);
    const std::size_t levels = 1 + rng() % 20;  // coarse scores force ties
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = t % 2 ? static_cast<double>(rng() % levels) : std::uniform_real_distribution<double>(0, 1)(rng);
      pos[i] = rng() % 2;
    }
    pos[0] = true;
    pos[n - 1] = false;
    std::unique_ptr<bool[]> flags(new bool[n]);
    for (std::size_t i = 0; i < n; ++i) flags[i] = pos[i];
    const double got = auc_binary(s, std::span<const bool>(flags.get(), n));
    check.require(std::abs(got - oracle::auc_pairwise(s, pos)) <= 1e-9, "rank AUC differs from pairwise");
  }
  std::vector<double> ranked{0.1, 0.2, 0.3, 0.7, 0.8, 0.9};
  const bool pos[] = {false, false, false, true, true, true};
  check.require(auc_binary(ranked, pos) == 1.0, "perfect ranking is not 1.0");
  std::vector<double> flat(6, 0.4);
  check.require(auc_binary(flat, pos) == 0.5, "all-tied scores are not 0.5");
  std::vector<std::vector<double>> perfect, tied;
  std::vector<std::size_t> truth;
  for (std::size_t i = 0; i < 90; ++i) {
    truth.push_back(i % 3);
    std::vector<double> d(3, 0.0);
    d[i % 3] = 1.0;
    perfect.push_back(d);
    tied.push_back({1.0 / 3, 1.0 / 3, 1.0 / 3});
  }
  check.require(auc_weighted(perfect, truth).weighted == 1.0, "weighted AUC of perfect scores is not 1.0");
  check.require(auc_weighted(tied, truth).weighted == 0.5, "weighted AUC of tied scores is not 0.5");
  return check.finish("500 score sets with ties, within 1e-9; perfect 1.0; tied 0.5");
}

Outcome stratification() {
  Checker check;
  std::vector<std::size_t> y;
  const std::size_t sizes[] = {19, 17, 21};
  for (std::size_t c = 0; c < 3; ++c) y.insert(y.end(), sizes[c], c);
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    std::shuffle(y.begin(), y.end(), std::mt19937_64(seed * 7919));
    const auto plan = stratified_kfold(y, 3, 10, seed);
    std::vector<std::size_t> seen(y.size(), 0);
    for (const auto& fold : plan.folds) {
      check.require(fold.size() >= 5 && fold.size() <= 6, fmt::format("fold of size {}", fold.size()));
      std::vector<double> count(3, 0.0);
      for (auto r : fold) {
        ++seen[r];
        ++count[y[r]];
      }
      for (std::size_t c = 0; c < 3; ++c)
        check.require(std::abs(count[c] - static_cast<double>(sizes[c]) / 10.0) <= 1.0,
                      fmt::format("class {} has {} rows in a fold", c, count[c]));
    }
    check.require(std::all_of(seen.begin(), seen.end(), [](auto n) { return n == 1; }), "folds do not partition the rows");
  }
  return check.finish("100 seeds, sizes 5-6, per-class counts within 1 of n_c/k");
}

struct PlantedRun {
  DataTable merged;
  std::vector<std::size_t> planted;
  std::vector<std::pair<Algorithm, Model>> models;
};

PlantedRun& planted_run() {
  static PlantedRun run = [] {
    PlantedRun r;
    const auto cohort = generate(CohortSpec{}.scaled(10));
    const auto data = ExperimentData::from_raw(cohort.raw);
    r.merged = join_on_id(data.discretized, true);
    r.planted = default_ruleset_model().predictions(r.merged);
    for (auto a : {Algorithm::C45, Algorithm::Ripper, Algorithm::Part})
      r.models.emplace_back(a, std::get<Model>(run_approach({Approach::MergeAll, {}}, data.discretized, a).model));
    return r;
  }();
  return run;
}

Outcome planted_recovery() {
  Checker check;
  const auto cohort = generate(CohortSpec{}.scaled(10));
  const auto data = ExperimentData::from_raw(cohort.raw);
  std::string detail;
  for (auto a : {Algorithm::C45, Algorithm::Ripper, Algorithm::Part}) {
    const auto row = cross_validate({Approach::MergeAll, {}}, a, data, Variant::Discretized);
    check.require(row.accuracy_pct >= 95.0, fmt::format("{} accuracy {:.4f}", to_string(a), row.accuracy_pct));
    check.require(row.auc >= 0.95, fmt::format("{} AUC {:.4f}", to_string(a), row.auc));
    detail += fmt::format("{} {:.2f}%/{:.4f} ", to_string(a), row.accuracy_pct, row.auc);
  }
  // Every instance goes through exactly one rule or leaf of the rendered model;
  // count the instances where that rule agrees with the planted list.
  const auto& run = planted_run();
  for (const auto& [a, m] : run.models) {
    const auto pred = m.predictions(run.merged);
    std::size_t agree = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) agree += pred[i] == run.planted[i];
    const double share = 100.0 * static_cast<double>(agree) / static_cast<double>(pred.size());
    check.require(share >= 95.0, fmt::format("{} rules agree with the planted list on {:.1f}%", to_string(a), share));
    detail += fmt::format("{} coverage {:.1f}% ", to_string(a), share);
  }
  detail += "(n=570)";
  return check.finish(detail);
}

Outcome ensemble_properties() {
  Checker check;
  const std::vector<std::vector<double>> dists{{0.6, 0.3, 0.1}, {0.3, 0.4, 0.3}, {0.2, 0.2, 0.6}};
  const std::vector<double> w{1, 1, 2};
  const auto out = vote_predict(dists, w);
  check.require(out == std::vector<double>{0.325, 0.275, 0.400},
                fmt::format("vote gave ({:.17g}, {:.17g}, {:.17g})", out[0], out[1], out[2]));

  std::mt19937_64 rng(707);
  for (int t = 0; t < 10000; ++t) {
    std::vector<std::vector<double>> d(3, std::vector<double>(3));
    std::vector<double> ws(3);
    for (std::size_t s = 0; s < 3; ++s) {
      double sum = 0.0;
      for (auto& p : d[s]) sum += p = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      for (auto& p : d[s]) p /= sum;
      ws[s] = static_cast<double>(1 + rng() % 4);
    }
    const double c = static_cast<double>(1 + rng() % 1000);
    auto scaled = ws;
    for (auto& x : scaled) x *= c;
    check.require(vote_predict(d, scaled) == vote_predict(d, ws), "rescaled weights change the vote");
  }

  // Practice alone predicts the class; theory and online are noise.
  std::mt19937_64 gen(77);
  const std::size_t n = 150;
  std::vector<std::size_t> cls(n);
  for (auto& c : cls) c = gen() % 3;
  SourceBundle b;
  for (std::string name : {"theory", "practice", "online"}) {
    std::vector<AttributeSpec> specs{AttributeSpec::id()};
    for (int a = 0; a < 2; ++a) specs.push_back(AttributeSpec::nominal(name + ".A" + std::to_string(a), fixture::levels()));
    std::vector<Row> rows;
    for (std::size_t i = 0; i < n; ++i) {
      Row r{Value::numeric(static_cast<double>(i + 1))};
      for (int a = 0; a < 2; ++a) {
        std::size_t v = gen() % 3;
        if (name == "practice" && a == 0 && gen() % 10 < 9) v = cls[i];
        r.push_back(Value::nominal(v));
      }
      rows.push_back(r);
    }
    b.sources.emplace(name, DataTable(specs, rows));
  }
  std::vector<Row> exam;
  for (std::size_t i = 0; i < n; ++i) exam.push_back({Value::numeric(static_cast<double>(i + 1)), Value::nominal(cls[i])});
  b.sources.emplace("exam", DataTable({AttributeSpec::id(), fixture::status()}, exam));
  ExperimentData data;
  data.numeric = data.discretized = b;
  const auto search = weight_search({Approach::Ensemble, {}}, Algorithm::RandomTree, data, Variant::Discretized);
  double top = 0.0;
  for (const auto& [s, x] : search.weights) top = std::max(top, x);
  check.require(search.weights.at("practice") == top, "signal source is not the heaviest");
  return check.finish(fmt::format("vote bit-exact, 10000 integer rescalings, signal weights theory {} practice {} online {}",
                                  search.weights.at("theory"), search.weights.at("practice"),
                                  search.weights.at("online")));
}

Outcome grid_shape() {
  Checker check;
  const auto data = ExperimentData::from_raw(generate(CohortSpec{}.scaled(10)).raw);
  const auto first = run_experiment_grid(data);
  const auto second = run_experiment_grid(data);
  check.require(first.tables.size() == 8, fmt::format("{} tables", first.tables.size()));
  for (const auto& t : first.tables) {
    check.require(t.rows.size() == 6, fmt::format("{} rows", t.rows.size()));
    double acc = 0.0, auc = 0.0;
    for (const auto& r : t.rows) {
      acc += r.accuracy_pct;
      auc += r.auc;
    }
    check.require(std::abs(t.mean_accuracy - acc / 6.0) <= 1e-9, "accuracy average off");
    check.require(std::isnan(auc) ? std::isnan(t.mean_auc) : std::abs(t.mean_auc - auc / 6.0) <= 1e-9,
                  "AUC average off");
  }
  check.require(report_csv(first) == report_csv(second), "CSV differs between runs");
  check.require(render_tables(first) == render_tables(second), "tables differ between runs");
  check.require(render_summary(first) == render_summary(second), "summary differs between runs");
  return check.finish("8 tables x 6 rows on n=570, averages within 1e-9, reruns byte-identical");
}

Outcome round_trip() {
  Checker check;
  const auto& run = planted_run();
  std::size_t lists = 0;
  for (const auto& [a, m] : run.models) {
    if (!std::holds_alternative<RuleList>(m.structure())) continue;
    ++lists;
    const auto back = parse_rules(render_rules(m), m.inputs(), m.class_spec());
    check.require(back.predictions(run.merged) == m.predictions(run.merged),
                  fmt::format("{} predictions change after render and parse", to_string(a)));
  }
  check.require(lists == 2, fmt::format("{} rule-list models", lists));
  return check.finish("ripper and part, 570 rows each");
}

Outcome documentary_fidelity() {
  Checker check;
  const std::vector<std::string> published{
      "IF Moodle.Quiz = High THEN Pass",
      "IF Moodle.Quiz = Medium AND Theory.Attention = Medium THEN Pass",
      "IF Moodle.Quiz = Low THEN Fail",
      "IF Theory.Attention = Low AND Moodle.Forum = Low THEN Dropout",
  };
  const auto data = ExperimentData::from_raw(generate(showcase_spec()).raw);
  const auto model = run_approach({Approach::MergeAll, {}}, data.discretized, Algorithm::Part).model;
  // Same text the explain command prints for a saved model.
  const auto text = render_fitted(fitted_from_json(fitted_to_json(model)));
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) lines.push_back(line);
  std::vector<std::string> rules;
  for (const auto& l : lines)
    if (l.rfind("IF ", 0) == 0) rules.push_back(l);
  auto sorted_rules = rules;
  auto expected = published;
  std::sort(sorted_rules.begin(), sorted_rules.end());
  std::sort(expected.begin(), expected.end());
  check.require(sorted_rules == expected, "rule lines differ from the published list:\n" + text);
  check.require(lines.size() >= 2 && lines[lines.size() - 2] == "ELSE Pass", "missing ELSE Pass");
  check.require(!lines.empty() && lines.back() == "Number of Rules : 5", "missing footer");
  return check.finish("PART on the showcase cohort prints the published five-rule list");
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"preprocessing exactness", 1, preprocessing_exactness},
      {"fusion oracle", 1, fusion_oracle},
      {"CFS oracle equivalence", 30, cfs_equivalence},
      {"AUC oracle equivalence", 10, auc_equivalence},
      {"stratification", 1, stratification},
      {"planted-rule recovery", 30, planted_recovery},
      {"ensemble properties", 30, ensemble_properties},
      {"experiment-grid shape", 300, grid_shape},
      {"render/parse round trip", 60, round_trip},
      {"documentary fidelity", 60, documentary_fidelity},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.pass && secs > c.budget_s) {
      o.pass = false;
      o.detail += fmt::format("; over the {:.0f} s budget", c.budget_s);
    }
    failed += o.pass ? 0 : 1;
    fmt::print("criterion {}: {} {} ({:.2f} s) {}\n", i + 1, o.pass ? "PASS" : "FAIL", c.name, secs, o.detail);
    std::cout.flush();
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed;
}

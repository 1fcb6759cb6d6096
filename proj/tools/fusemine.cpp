#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "fusemine/errors.hpp"
#include "fusemine/evaluation.hpp"
#include "fusemine/feature_select.hpp"
#include "fusemine/fusion.hpp"
#include "fusemine/preprocess.hpp"
#include "fusemine/schema_io.hpp"
#include "fusemine/synthgen.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace fusemine;

namespace {

constexpr int kInputExit = 2;
constexpr int kPipelineExit = 3;

// Values from --config, each overridable on the command line.
struct RunConfig {
  std::optional<fs::path> input;
  std::map<std::string, fs::path> sources;  // explicit CSV paths, with `schema`
  std::optional<fs::path> schema;
  fs::path out = "out";
  std::uint64_t seed = 1;
  std::size_t k = 10;
  std::string approach = "all";
  std::string algorithm = "all";
  std::string variant = "both";
  std::string weights;
  bool weight_search = false;
  bool select = false;
  bool mean_of_folds = false;
  bool fold_local_selection = false;
  bool fold_local_preprocess = false;
  PreprocessConfig preprocess;
  LearnerParams learners;

  void validate() const {
    if (k < 2) throw InvalidParams("k must be at least 2");
    preprocess.validate();
    learners.validate();
  }
};

// Flag values as parsed; unset options leave the config alone.
struct Overrides {
  std::string config;
  std::optional<std::string> input, out, approach, algorithm, variant, weights;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> k;
  bool weight_search = false;
  std::optional<std::string> select;
  bool mean_of_folds = false;
  bool fold_local = false;
};

bool parse_select(const std::string& v) {
  if (v == "cfs") return true;
  if (v == "none") return false;
  throw InvalidParams("--select expects cfs or none");
}

RunConfig load_config(const Overrides& o) {
  RunConfig c;
  if (!o.config.empty()) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(read_file(o.config));
      const auto base = fs::path(o.config).parent_path();
      auto path_of = [&](const nlohmann::json& v) {
        fs::path p = v.get<std::string>();
        return p.is_relative() ? base / p : p;
      };
      if (doc.contains("input")) c.input = path_of(doc["input"]);
      if (doc.contains("schema")) c.schema = path_of(doc["schema"]);
      if (doc.contains("sources"))
        for (const auto& [name, p] : doc["sources"].items()) c.sources[name] = path_of(p);
      if (doc.contains("out")) c.out = path_of(doc["out"]);
      if (doc.contains("seed")) c.seed = doc["seed"].get<std::uint64_t>();
      if (doc.contains("k")) c.k = doc["k"].get<std::size_t>();
      if (doc.contains("approach")) c.approach = doc["approach"].get<std::string>();
      if (doc.contains("algorithm")) c.algorithm = doc["algorithm"].get<std::string>();
      if (doc.contains("variant")) c.variant = doc["variant"].get<std::string>();
      if (doc.contains("weights")) c.weights = doc["weights"].get<std::string>();
      if (doc.contains("weight_search")) c.weight_search = doc["weight_search"].get<bool>();
      if (doc.contains("select")) c.select = parse_select(doc["select"].get<std::string>());
      if (doc.contains("cv")) {
        const auto& cv = doc["cv"];
        c.mean_of_folds = cv.value("mean_of_folds", false);
        c.fold_local_selection = cv.value("fold_local_selection", false);
        c.fold_local_preprocess = cv.value("fold_local_preprocess", false);
      }
      if (doc.contains("preprocess")) c.preprocess = PreprocessConfig::from_json(doc["preprocess"]);
      if (doc.contains("learners")) c.learners = LearnerParams::from_json(doc["learners"]);
    } catch (const nlohmann::json::exception& e) {
      throw InvalidParams(std::string("bad config file: ") + e.what());
    }
  }
  if (o.input) c.input = *o.input;
  if (o.out) c.out = *o.out;
  if (o.seed) c.seed = *o.seed;
  if (o.k) c.k = *o.k;
  if (o.approach) c.approach = *o.approach;
  if (o.algorithm) c.algorithm = *o.algorithm;
  if (o.variant) c.variant = *o.variant;
  if (o.weights) c.weights = *o.weights;
  c.weight_search = c.weight_search || o.weight_search;
  if (o.select) c.select = parse_select(*o.select);
  c.mean_of_folds = c.mean_of_folds || o.mean_of_folds;
  if (o.fold_local) c.fold_local_selection = c.fold_local_preprocess = true;
  c.preprocess.seed = c.seed;
  c.validate();
  return c;
}

fs::path require_input(const RunConfig& c) {
  if (!c.input) throw InvalidParams("no input directory given (--input or \"input\" in the config)");
  if (!fs::is_directory(*c.input)) throw IoError("input directory '" + c.input->string() + "' does not exist");
  return *c.input;
}

std::vector<Approach> approaches_of(const RunConfig& c) {
  std::vector<Approach> out;
  if (c.approach == "all")
    out.assign(kAllApproaches.begin(), kAllApproaches.end());
  else
    out.push_back(parse_approach(c.approach));
  if (c.select)
    for (auto& a : out) {
      if (a == Approach::MergeAll) a = Approach::SelectBest;
      if (a == Approach::Ensemble) a = Approach::EnsembleSelect;
    }
  std::vector<Approach> unique;
  for (auto a : out)
    if (std::find(unique.begin(), unique.end(), a) == unique.end()) unique.push_back(a);
  return unique;
}

std::vector<Algorithm> algorithms_of(const RunConfig& c) {
  if (c.algorithm == "all") return {kAllAlgorithms.begin(), kAllAlgorithms.end()};
  std::vector<Algorithm> out;
  std::size_t start = 0;
  while (start <= c.algorithm.size()) {
    auto end = c.algorithm.find(',', start);
    if (end == std::string::npos) end = c.algorithm.size();
    out.push_back(parse_algorithm(c.algorithm.substr(start, end - start)));
    start = end + 1;
  }
  return out;
}

std::vector<Variant> variants_of(const RunConfig& c) {
  if (c.variant == "both") return {kAllVariants.begin(), kAllVariants.end()};
  return {parse_variant(c.variant)};
}

// Commands that build one model read "all" and "both" as these defaults.
RunConfig single_cell(RunConfig c) {
  if (c.approach == "all") c.approach = "merge";
  if (c.algorithm == "all") c.algorithm = "part";
  if (c.variant == "both") c.variant = "discretized";
  return c;
}

template <class T>
T single(const std::vector<T>& v, std::string_view what) {
  if (v.size() != 1) throw InvalidParams(fmt::format("this command needs exactly one {}", what));
  return v.front();
}

SourceBundle load_raw(const RunConfig& c) {
  SourceBundle raw;
  if (!c.sources.empty()) {
    if (!c.schema) throw InvalidParams("explicit sources need a \"schema\" file");
    const auto doc = nlohmann::json::parse(read_file(*c.schema), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw SchemaMismatch("schema file must map sources to schemas");
    for (const auto& [name, path] : c.sources) {
      if (!doc.contains(name)) throw SchemaMismatch("schema has no entry for source '" + name + "'");
      raw.sources.emplace(name, load_csv(path, schema_from_json(doc[name])));
    }
    raw.validate_ids();
  } else {
    raw = load_bundle(require_input(c));
  }
  for (auto name : {kTheory, kPractice, kOnline, kExam})
    if (!raw.sources.count(std::string(name)))
      throw IoError(fmt::format("source '{}' is missing from the input", name));
  return raw;
}

ExperimentData load_prepared(const RunConfig& c) {
  const auto dir = require_input(c);
  ExperimentData d;
  d.numeric = load_bundle(dir / "numeric");
  d.discretized = load_bundle(dir / "discretized");
  if (fs::exists(dir / "fused" / "schema.json")) d.fused = load_bundle(dir / "fused");
  d.preprocess = c.preprocess;
  if (fs::exists(dir / "config.json"))
    d.preprocess = PreprocessConfig::from_json(nlohmann::json::parse(read_file(dir / "config.json")));
  return d;
}

FusionConfig fusion_of(const RunConfig& c, Approach a, const SourceBundle& bundle) {
  FusionConfig f;
  f.approach = a;
  if (!c.weights.empty()) f.weights = parse_weights(c.weights, bundle.input_source_names());
  return f;
}

CvOptions cv_of(const RunConfig& c) {
  CvOptions o;
  o.k = c.k;
  o.seed = c.seed;
  o.mean_of_folds = c.mean_of_folds;
  o.fold_local_selection = c.fold_local_selection;
  o.fold_local_preprocess = c.fold_local_preprocess;
  o.learner = c.learners;
  return o;
}

std::string weights_text(const std::map<std::string, double, std::less<>>& w, const SourceBundle& bundle) {
  std::string out;
  for (const auto& name : bundle.input_source_names()) {
    auto it = w.find(name);
    if (it == w.end()) continue;
    if (!out.empty()) out += ", ";
    out += name + " " + format_number(it->second);
  }
  return out;
}

// ---------------------------------------------------------------------------

int cmd_synth(const Overrides& o, std::optional<std::size_t> n, double noise, const std::string& preset,
              std::optional<std::size_t> scale) {
  const auto c = load_config(o);
  CohortSpec spec;
  if (preset == "showcase")
    spec = showcase_spec(c.seed);
  else if (preset != "default")
    throw InvalidParams("unknown preset '" + preset + "' (expected default or showcase)");
  if (scale) spec = spec.scaled(*scale);
  if (n) spec = spec.resized(*n);
  spec.noise = noise;
  spec.seed = c.seed;
  const auto cohort = generate(spec);
  save_bundle(cohort.raw, c.out);
  save_csv(cohort.truth, c.out / "truth.csv");
  fmt::print("wrote {} students ({} Pass, {} Fail, {} Dropout) to {}\n", spec.n_students, spec.class_counts[0],
             spec.class_counts[1], spec.class_counts[2], c.out.string());
  return 0;
}

int cmd_preprocess(const Overrides& o) {
  const auto c = load_config(o);
  const auto raw = load_raw(c);
  const auto data = ExperimentData::from_raw(raw, c.preprocess);
  std::vector<std::size_t> all(data.fused->at(kExam).num_rows());
  std::iota(all.begin(), all.end(), 0);
  const auto params = fit_preprocess(*data.fused, all, c.preprocess);
  save_bundle(*data.fused, c.out / "fused");
  save_bundle(data.numeric, c.out / "numeric");
  save_bundle(data.discretized, c.out / "discretized");
  write_file_atomic(c.out / "params.json", params.to_json().dump(2) + "\n");
  write_file_atomic(c.out / "config.json", c.preprocess.to_json().dump(2) + "\n");
  fmt::print("wrote numeric and discretized bundles for {} students to {}\n", all.size(), c.out.string());
  return 0;
}

int cmd_select(const Overrides& o) {
  const auto c = load_config(o);
  const auto data = load_prepared(c);
  nlohmann::json doc = nlohmann::json::object();
  for (auto v : variants_of(c)) {
    const auto& bundle = data.variant(v);
    fmt::print("{} data\n", to_string(v));
    for (auto a : {Approach::SelectBest, Approach::EnsembleSelect}) {
      const auto plan = plan_approach(fusion_of(c, a, bundle), bundle);
      for (const auto& name : plan.datasets) {
        const auto& attrs = plan.attributes.at(name);
        fmt::print("  {:<9} {} selected: {}\n", name, attrs.size(), fmt::join(attrs, ", "));
        doc[std::string(to_string(v))][name] = attrs;
      }
    }
  }
  if (o.out) write_file_atomic(c.out / "selection.json", doc.dump(2) + "\n");
  return 0;
}

int cmd_train(const Overrides& o) {
  const auto c = single_cell(load_config(o));
  const auto data = load_prepared(c);
  const auto v = single(variants_of(c), "variant");
  const auto a = single(approaches_of(c), "approach");
  const auto alg = single(algorithms_of(c), "algorithm");
  const auto& bundle = data.variant(v);
  auto config = fusion_of(c, a, bundle);
  if (c.weight_search && is_ensemble(a)) {
    const auto ws = weight_search(config, alg, data, v, cv_of(c));
    config.weights = ws.weights;
    fmt::print("weights: {}\n", weights_text(ws.weights, bundle));
  }
  const auto result = run_approach(config, bundle, alg, c.learners, c.seed);
  fmt::print("{}", render_fitted(result.model));
  fs::create_directories(c.out);
  write_file_atomic(c.out / "model.json", fitted_to_json(result.model).dump(2) + "\n");
  write_file_atomic(c.out / "plan.json", result.plan.to_json().dump(2) + "\n");
  return 0;
}

void print_confusion(const EvaluationRow& r, const std::vector<std::string>& labels) {
  fmt::print("  confusion (rows = truth):\n");
  for (std::size_t t = 0; t < r.confusion.size(); ++t) {
    fmt::print("    {:<8}", t < labels.size() ? labels[t] : std::to_string(t));
    for (auto n : r.confusion[t]) fmt::print(" {:>5}", n);
    fmt::print("\n");
  }
}

int cmd_eval(const Overrides& o) {
  const auto c = load_config(o);
  const auto data = load_prepared(c);
  for (auto v : variants_of(c))
    for (auto a : approaches_of(c)) {
      const auto& bundle = data.variant(v);
      fmt::print("{} ({} data)\n", display_name(a), to_string(v));
      for (auto alg : algorithms_of(c)) {
        auto config = fusion_of(c, a, bundle);
        if (c.weight_search && is_ensemble(a)) config.weights = weight_search(config, alg, data, v, cv_of(c)).weights;
        const auto row = cross_validate(config, alg, data, v, cv_of(c));
        fmt::print("{:<12}{:.4f}  {}", display_name(alg), row.accuracy_pct,
                   std::isnan(row.auc) ? std::string("?") : fmt::format("{:.4f}", row.auc));
        if (!row.weights.empty()) fmt::print("  weights: {}", weights_text(row.weights, bundle));
        fmt::print("\n");
        print_confusion(row, kStatusLabels);
      }
    }
  return 0;
}

int cmd_experiment(const Overrides& o) {
  const auto c = load_config(o);
  const auto data = load_prepared(c);
  GridOptions g;
  g.algorithms = algorithms_of(c);
  g.approaches = approaches_of(c);
  g.variants = variants_of(c);
  g.cv = cv_of(c);
  g.weight_search = c.weight_search;
  if (!c.weights.empty()) g.weights = parse_weights(c.weights, data.numeric.input_source_names());
  const auto report = run_experiment_grid(data, g);
  const auto tables = render_tables(report);
  const auto summary = render_summary(report);
  fs::create_directories(c.out);
  write_file_atomic(c.out / "report.csv", report_csv(report));
  write_file_atomic(c.out / "tables.txt", tables);
  write_file_atomic(c.out / "summary.txt", summary);
  write_file_atomic(c.out / "report.json", report_to_json(report).dump(2) + "\n");
  fmt::print("{}\n{}\n", tables, summary);
  if (c.weight_search)
    for (const auto& t : report.tables)
      for (const auto& r : t.rows)
        if (!r.weights.empty())
          fmt::print("weights {} {} {}: {}\n", to_string(t.approach), to_string(t.variant), to_string(r.algorithm),
                     weights_text(r.weights, data.variant(t.variant)));
  const auto& b = report.best;
  fmt::print("best: {} / {} / {} ({:.4f}% accuracy, AUC {})\n", display_name(b.algorithm), to_string(b.approach),
             to_string(b.variant), b.accuracy_pct, std::isnan(b.auc) ? std::string("?") : fmt::format("{:.4f}", b.auc));
  return 0;
}

int cmd_explain(const Overrides& o, const std::string& model_path, std::optional<long long> student) {
  const auto c = single_cell(load_config(o));
  if (!fs::is_regular_file(model_path)) throw IoError("model file '" + model_path + "' does not exist");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(model_path));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaMismatch(std::string("model file is not JSON: ") + e.what());
  }
  const auto model = fitted_from_json(doc);
  fmt::print("{}", render_fitted(model));
  if (!student) return 0;

  const auto data = load_prepared(c);
  const auto table = join_on_id(data.variant(single(variants_of(c), "variant")), false);
  const auto ids = table.ids();
  const auto it = std::find(ids.begin(), ids.end(), *student);
  if (it == ids.end()) throw UnknownAttribute(fmt::format("no student with id {}", *student));
  const auto row = static_cast<std::size_t>(it - ids.begin());
  fmt::print("\nstudent {}\n", *student);
  auto show = [&](const Model& m, std::string_view heading) {
    const auto map = m.column_map(table);
    const auto x = m.project(table, row, map);
    fmt::print("{}{}  (predicted {})\n", heading, explain_instance(m, x),
               m.class_spec().labels[m.predict(x)]);
  };
  if (const auto* vote = std::get_if<VoteModel>(&model)) {
    for (const auto& m : vote->members()) show(m.model, fmt::format("  {}: ", m.source));
    const auto d = vote->distributions(table.select_rows(std::vector<std::size_t>{row})).front();
    const auto best = static_cast<std::size_t>(std::max_element(d.begin(), d.end()) - d.begin());
    fmt::print("  vote: {}\n", vote->class_spec().labels[best]);
  } else {
    show(std::get<Model>(model), "  ");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-source student performance prediction"};
  app.require_subcommand(1);
  Overrides o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON run configuration");
    sub->add_option("--seed", o.seed, "Random seed");
    sub->add_option("--out", o.out, "Output directory");
  };
  auto data_opts = [&](CLI::App* sub) {
    sub->add_option("--input", o.input, "Input directory");
    sub->add_option("--variant", o.variant, "numeric, discretized or both");
  };
  auto model_opts = [&](CLI::App* sub) {
    sub->add_option("--approach", o.approach, "merge, select, ensemble, ensemble-select or all");
    sub->add_option("--algorithm", o.algorithm, "c45, reptree, randomtree, ripper, part, nnge, a comma list or all");
    sub->add_option("--weights", o.weights, "Vote weights per source, e.g. 1,1,2");
    sub->add_flag("--weight-search", o.weight_search, "Search vote weights in {1,2} per source");
    sub->add_option("--select", o.select, "cfs: use the attribute-selecting variant of the approach; none");
    sub->add_option("--k", o.k, "Cross-validation folds");
    sub->add_flag("--mean-of-folds", o.mean_of_folds, "Average per-fold accuracies instead of pooling");
    sub->add_flag("--fold-local", o.fold_local, "Refit preprocessing and selection inside each fold");
  };

  auto* synth = app.add_subcommand("synth", "Generate a synthetic cohort");
  common(synth);
  std::optional<std::size_t> n_students, scale;
  double noise = 0.0;
  std::string preset = "default";
  synth->add_option("--n", n_students, "Number of students (class proportions kept)");
  synth->add_option("--scale", scale, "Multiply the preset's class counts");
  synth->add_option("--noise", noise, "Fraction of labels to flip")->check(CLI::Range(0.0, 1.0));
  synth->add_option("--preset", preset, "default or showcase");

  auto* prep = app.add_subcommand("preprocess", "Fuse sessions, label, normalize and discretize");
  common(prep);
  prep->add_option("--input", o.input, "Raw bundle directory");

  auto* sel = app.add_subcommand("select", "Show CFS attribute selections");
  common(sel);
  data_opts(sel);

  auto* tr = app.add_subcommand("train", "Train one model and save it");
  common(tr);
  data_opts(tr);
  model_opts(tr);

  auto* ev = app.add_subcommand("eval", "Cross-validate models");
  common(ev);
  data_opts(ev);
  model_opts(ev);

  auto* ex = app.add_subcommand("experiment", "Run the experiment grid");
  common(ex);
  data_opts(ex);
  model_opts(ex);

  auto* xp = app.add_subcommand("explain", "Print a saved model as IF-THEN rules");
  common(xp);
  data_opts(xp);
  std::string model_path;
  std::optional<long long> student;
  xp->add_option("model", model_path, "Model JSON file")->required();
  xp->add_option("--student", student, "Student id to trace through the model");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputExit;
  }

  try {
    if (*synth) return cmd_synth(o, n_students, noise, preset, scale);
    if (*prep) return cmd_preprocess(o);
    if (*sel) return cmd_select(o);
    if (*tr) return cmd_train(o);
    if (*ev) return cmd_eval(o);
    if (*ex) return cmd_experiment(o);
    if (*xp) return cmd_explain(o, model_path, student);
  } catch (const InputError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kInputExit;
  } catch (const nlohmann::json::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kInputExit;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kPipelineExit;
  }
  return 0;
}

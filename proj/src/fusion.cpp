#include "fusemine/fusion.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <numeric>
#include <sstream>

#include "fusemine/errors.hpp"
#include "fusemine/feature_select.hpp"
#include "fusemine/random.hpp"

namespace fusemine {

std::string_view to_string(Approach a) {
  switch (a) {
    case Approach::MergeAll: return "merge";
    case Approach::SelectBest: return "select";
    case Approach::Ensemble: return "ensemble";
    case Approach::EnsembleSelect: return "ensemble-select";
  }
  return "?";
}

Approach parse_approach(std::string_view tag) {
  for (auto a : kAllApproaches)
    if (to_string(a) == tag) return a;
  throw InvalidParams("unknown approach '" + std::string(tag) +
                      "' (expected merge, select, ensemble or ensemble-select)");
}

std::string_view display_name(Approach a) {
  switch (a) {
    case Approach::MergeAll: return "Merging all attributes";
    case Approach::SelectBest: return "Selecting the best attributes";
    case Approach::Ensemble: return "Using ensembles";
    case Approach::EnsembleSelect: return "Using ensembles and selection of the best attributes";
  }
  return "?";
}

bool is_ensemble(Approach a) { return a == Approach::Ensemble || a == Approach::EnsembleSelect; }
bool uses_selection(Approach a) { return a == Approach::SelectBest || a == Approach::EnsembleSelect; }

double FusionConfig::weight_of(std::string_view source) const {
  auto it = weights.find(source);
  return it == weights.end() ? 1.0 : it->second;
}

void FusionConfig::validate(std::span<const std::string> sources) const {
  for (const auto& [name, w] : weights) {
    if (std::find(sources.begin(), sources.end(), name) == sources.end())
      throw InvalidParams("weight given for unknown source '" + name + "'");
    if (!(w > 0.0)) throw InvalidParams("weight for '" + name + "' must be positive");
  }
}

nlohmann::json FusionConfig::to_json() const {
  nlohmann::json w = nlohmann::json::object();
  for (const auto& [k, v] : weights) w[k] = v;
  return {{"approach", std::string(to_string(approach))}, {"weights", w},
          {"combination_rule", "average"}};
}

FusionConfig FusionConfig::from_json(const nlohmann::json& doc) {
  FusionConfig c;
  try {
    if (doc.contains("approach")) c.approach = parse_approach(doc.at("approach").get<std::string>());
    if (doc.contains("weights"))
      for (const auto& [k, v] : doc.at("weights").items()) c.weights[k] = v.get<double>();
    if (doc.contains("combination_rule") && doc.at("combination_rule").get<std::string>() != "average")
      throw InvalidParams("only the average combination rule is supported");
  } catch (const nlohmann::json::exception& e) {
    throw InvalidParams(std::string("bad fusion config: ") + e.what());
  }
  return c;
}

std::map<std::string, double, std::less<>> parse_weights(std::string_view text,
                                                         std::span<const std::string> sources) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    auto piece = text.substr(start, end - start);
    while (!piece.empty() && piece.front() == ' ') piece.remove_prefix(1);
    while (!piece.empty() && piece.back() == ' ') piece.remove_suffix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), v);
    if (piece.empty() || ec != std::errc() || ptr != piece.data() + piece.size())
      throw InvalidParams("bad weight '" + std::string(piece) + "'");
    if (!(v > 0.0)) throw InvalidParams("weights must be positive");
    values.push_back(v);
    start = end + 1;
  }
  if (values.size() != sources.size())
    throw InvalidParams("expected " + std::to_string(sources.size()) + " weights, got " +
                        std::to_string(values.size()));
  std::map<std::string, double, std::less<>> out;
  for (std::size_t i = 0; i < values.size(); ++i) out[sources[i]] = values[i];
  return out;
}

std::vector<double> vote_predict(std::span<const std::vector<double>> dists,
                                 std::span<const double> weights) {
  if (dists.empty()) throw LengthMismatch("vote needs at least one distribution");
  if (dists.size() != weights.size())
    throw LengthMismatch("one weight per distribution is required");
  const std::size_t k = dists.front().size();
  double sum_w = 0.0;
  for (std::size_t s = 0; s < dists.size(); ++s) {
    if (dists[s].size() != k) throw LengthMismatch("distributions differ in width");
    if (!(weights[s] > 0.0)) throw InvalidParams("vote weights must be positive");
    sum_w += weights[s];
  }
  // Normalizing first makes the output depend only on the weight ratios.
  // Heaviest members are summed first, ties in source order.
  std::vector<std::size_t> order(dists.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return weights[a] > weights[b]; });
  std::vector<double> out(k, 0.0);
  for (std::size_t s : order) {
    const double u = weights[s] / sum_w;
    for (std::size_t c = 0; c < k; ++c) out[c] += u * dists[s][c];
  }
  return out;
}

VoteModel::VoteModel(std::vector<VoteMember> members, CombinationRule rule)
    : members_(std::move(members)), rule_(rule) {
  if (members_.empty()) throw InvalidParams("a vote needs at least one member");
  for (const auto& m : members_) {
    if (!(m.weight > 0.0)) throw InvalidParams("vote weight for '" + m.source + "' must be positive");
    if (!(m.model.class_spec() == members_.front().model.class_spec()))
      throw SchemaMismatch("vote members disagree on the class attribute");
  }
}

std::size_t VoteModel::num_classes() const { return members_.front().model.num_classes(); }
const AttributeSpec& VoteModel::class_spec() const { return members_.front().model.class_spec(); }

namespace {

std::vector<double> member_weights(const std::vector<VoteMember>& members) {
  std::vector<double> w;
  for (const auto& m : members) w.push_back(m.weight);
  return w;
}

}  // namespace

std::vector<double> VoteModel::distribution(std::span<const std::vector<Value>> parts) const {
  if (parts.size() != members_.size())
    throw SchemaMismatch("expected " + std::to_string(members_.size()) + " instance parts, got " +
                         std::to_string(parts.size()));
  std::vector<std::vector<double>> dists;
  for (std::size_t s = 0; s < members_.size(); ++s) {
    if (parts[s].size() != members_[s].model.inputs().size())
      throw SchemaMismatch("instance part for '" + members_[s].source + "' has the wrong width");
    dists.push_back(members_[s].model.distribution(parts[s]));
  }
  return vote_predict(dists, member_weights(members_));
}

namespace {

std::vector<std::vector<double>> combine_rows(const std::vector<std::vector<std::vector<double>>>& per,
                                              const std::vector<double>& w) {
  const std::size_t n = per.front().size();
  for (const auto& p : per)
    if (p.size() != n) throw SchemaMismatch("member tables differ in length");
  std::vector<std::vector<double>> out(n);
  std::vector<std::vector<double>> dists(per.size());
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t s = 0; s < per.size(); ++s) dists[s] = per[s][r];
    out[r] = vote_predict(dists, w);
  }
  return out;
}

}  // namespace

std::vector<std::vector<double>> VoteModel::distributions(const DataTable& table) const {
  std::vector<std::vector<std::vector<double>>> per;
  for (const auto& m : members_) per.push_back(m.model.distributions(table));
  return combine_rows(per, member_weights(members_));
}

std::vector<std::vector<double>> VoteModel::distributions(std::span<const DataTable> tables) const {
  if (tables.size() != members_.size()) throw SchemaMismatch("one table per vote member is required");
  std::vector<std::vector<std::vector<double>>> per;
  for (std::size_t s = 0; s < members_.size(); ++s) per.push_back(members_[s].model.distributions(tables[s]));
  return combine_rows(per, member_weights(members_));
}

std::vector<std::size_t> VoteModel::predictions(const DataTable& table) const {
  std::vector<std::size_t> out;
  for (const auto& d : distributions(table))
    out.push_back(static_cast<std::size_t>(std::max_element(d.begin(), d.end()) - d.begin()));
  return out;
}

bool operator==(const VoteModel& a, const VoteModel& b) {
  if (a.members_.size() != b.members_.size() || a.rule_ != b.rule_) return false;
  for (std::size_t i = 0; i < a.members_.size(); ++i) {
    const auto& x = a.members_[i];
    const auto& y = b.members_[i];
    if (x.source != y.source || x.weight != y.weight || !(x.model == y.model)) return false;
  }
  return true;
}

namespace {

std::string title_case(std::string_view s) {
  std::string out(s);
  if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

std::string algorithm_heading(const Model& m) {
  if (!m.meta().algorithm) return "Rules";
  switch (*m.meta().algorithm) {
    case Algorithm::C45: return "J48 pruned tree";
    case Algorithm::RepTree: return "REPTree";
    case Algorithm::RandomTree: return "RandomTree";
    case Algorithm::Ripper: return "JRIP rules";
    case Algorithm::Part: return "PART decision list";
    case Algorithm::Nnge: return "NNge exemplars";
  }
  return "Rules";
}

}  // namespace

std::string render_vote(const VoteModel& vote) {
  std::ostringstream out;
  bool first = true;
  for (const auto& m : vote.members()) {
    if (!first) out << '\n';
    first = false;
    out << algorithm_heading(m.model) << " (" << title_case(m.source)
        << ", weight " << format_number(m.weight) << ")\n";
    out << render_rules(m.model);
  }
  return out.str();
}

nlohmann::json vote_to_json(const VoteModel& vote) {
  nlohmann::json members = nlohmann::json::array();
  for (const auto& m : vote.members())
    members.push_back({{"source", m.source}, {"weight", m.weight}, {"model", model_to_json(m.model)}});
  return {{"kind", "vote"}, {"combination_rule", "average"}, {"members", members}};
}

VoteModel vote_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("kind").get<std::string>() != "vote") throw SchemaMismatch("not a vote model document");
    std::vector<VoteMember> members;
    for (const auto& m : doc.at("members"))
      members.push_back({m.at("source").get<std::string>(), m.at("weight").get<double>(),
                         model_from_json(m.at("model"))});
    return VoteModel(std::move(members));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaMismatch(std::string("bad vote model document: ") + e.what());
  }
}

std::vector<std::vector<double>> fitted_distributions(const FittedModel& m, const DataTable& table) {
  return std::visit([&](const auto& x) { return x.distributions(table); }, m);
}

std::string render_fitted(const FittedModel& m) {
  if (const auto* vote = std::get_if<VoteModel>(&m)) return render_vote(*vote);
  return render_rules(std::get<Model>(m));
}

nlohmann::json fitted_to_json(const FittedModel& m) {
  if (const auto* vote = std::get_if<VoteModel>(&m)) return vote_to_json(*vote);
  return model_to_json(std::get<Model>(m));
}

FittedModel fitted_from_json(const nlohmann::json& doc) {
  if (doc.is_object() && doc.contains("kind") && doc.at("kind") == "vote") return vote_from_json(doc);
  return model_from_json(doc);
}

nlohmann::json ApproachPlan::to_json() const {
  nlohmann::json attrs = nlohmann::json::object();
  for (const auto& [k, v] : attributes) attrs[k] = v;
  nlohmann::json w = nlohmann::json::object();
  for (const auto& [k, v] : weights) w[k] = v;
  return {{"approach", std::string(to_string(approach))},
          {"datasets", datasets},
          {"attributes", attrs},
          {"weights", w}};
}

DataTable source_dataset(const SourceBundle& bundle, std::string_view source) {
  SourceBundle pair;
  pair.sources.emplace(std::string(source), bundle.at(source));
  if (source != kExam) {
    auto it = bundle.sources.find(kExam);
    if (it == bundle.sources.end()) throw SchemaMismatch("bundle has no exam source");
    pair.sources.emplace(std::string(kExam), it->second);
  }
  return join_on_id(pair, true);
}

namespace {

std::vector<std::string> input_names(const DataTable& t) {
  std::vector<std::string> names;
  for (auto c : t.input_columns()) names.push_back(t.specs()[c].name);
  return names;
}

std::vector<std::string> cfs_names(const DataTable& t, Execution exec) {
  const auto su = compute_su_matrix(t, exec);
  auto best = best_first_search(su);
  if (best.subset.empty() && su.size() > 0) {
    std::size_t top = 0;
    for (std::size_t i = 1; i < su.size(); ++i)
      if (su.feature_class(i) > su.feature_class(top)) top = i;
    best.subset = {top};
  }
  std::sort(best.subset.begin(), best.subset.end());
  const auto all = input_names(t);
  std::vector<std::string> names;
  for (auto i : best.subset) names.push_back(all[i]);
  return names;
}

DataTable dataset_for(const SourceBundle& bundle, std::string_view name) {
  return name == kMergedName ? join_on_id(bundle, true) : source_dataset(bundle, name);
}

}  // namespace

ApproachPlan plan_approach(const FusionConfig& config, const SourceBundle& bundle, Execution exec) {
  const auto sources = bundle.input_source_names();
  config.validate(sources);
  ApproachPlan plan;
  plan.approach = config.approach;
  if (is_ensemble(config.approach)) {
    plan.datasets = sources;
    for (const auto& s : sources) plan.weights[s] = config.weight_of(s);
  } else {
    plan.datasets = {std::string(kMergedName)};
  }
  for (const auto& name : plan.datasets) {
    const auto t = dataset_for(bundle, name);
    plan.attributes[name] = uses_selection(config.approach) ? cfs_names(t, exec) : input_names(t);
  }
  return plan;
}

std::vector<DataTable> plan_datasets(const ApproachPlan& plan, const SourceBundle& bundle) {
  std::vector<DataTable> out;
  for (const auto& name : plan.datasets)
    out.push_back(reduce_to(dataset_for(bundle, name), plan.attributes.at(name)));
  return out;
}

FittedModel fit_plan(const ApproachPlan& plan, std::span<const DataTable> datasets, Algorithm algorithm,
                     const LearnerParams& params, std::uint64_t seed) {
  if (datasets.size() != plan.datasets.size())
    throw SchemaMismatch("plan and datasets disagree in number");
  if (!is_ensemble(plan.approach)) return train(algorithm, datasets.front(), params, seed);
  std::vector<VoteMember> members;
  for (std::size_t s = 0; s < datasets.size(); ++s) {
    const auto& name = plan.datasets[s];
    auto it = plan.weights.find(name);
    members.push_back({name, it == plan.weights.end() ? 1.0 : it->second,
                       train(algorithm, datasets[s], params, derive_seed(seed, {s}))});
  }
  return VoteModel(std::move(members));
}

ApproachResult run_approach(const FusionConfig& config, const SourceBundle& bundle, Algorithm algorithm,
                            const LearnerParams& params, std::uint64_t seed, Execution exec) {
  ApproachResult r;
  r.plan = plan_approach(config, bundle, exec);
  r.datasets = plan_datasets(r.plan, bundle);
  r.model = fit_plan(r.plan, r.datasets, algorithm, params, seed);
  return r;
}

}  // namespace fusemine

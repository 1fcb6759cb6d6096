#include "fusemine/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "fusemine/errors.hpp"
#include "fusemine/schema_io.hpp"

namespace fusemine {

namespace {

constexpr std::array<std::string_view, 6> kTags = {"c45", "reptree", "randomtree",
                                                   "ripper", "part", "nnge"};

}  // namespace

std::string_view to_string(Algorithm a) { return kTags[static_cast<std::size_t>(a)]; }

Algorithm parse_algorithm(std::string_view tag) {
  for (std::size_t i = 0; i < kTags.size(); ++i)
    if (kTags[i] == tag) return static_cast<Algorithm>(i);
  throw InvalidParams(fmt::format("unknown algorithm '{}'", tag));
}

std::vector<double> laplace(std::span<const double> counts) {
  double n = 0.0;
  for (double c : counts) n += c;
  const double k = static_cast<double>(counts.size());
  std::vector<double> p(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) p[i] = (counts[i] + 1.0) / (n + k);
  return p;
}

std::size_t DecisionTree::num_leaves() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

std::size_t DecisionTree::route(const Encoded& x) const {
  std::size_t at = 0;
  while (!nodes[at].is_leaf()) {
    const auto& n = nodes[at];
    const double v = x[*n.attr];
    if (n.numeric) {
      at = n.children[v <= n.threshold ? 0 : 1];
      continue;
    }
    auto it = std::find(n.branch_values.begin(), n.branch_values.end(), static_cast<std::size_t>(v));
    if (it == n.branch_values.end()) return at;
    at = n.children[static_cast<std::size_t>(it - n.branch_values.begin())];
  }
  return at;
}

// ---------------------------------------------------------------------------

Model::Model(std::vector<AttributeSpec> inputs, AttributeSpec cls, std::vector<double> medians,
             Structure structure, ModelMeta meta)
    : inputs_(std::move(inputs)),
      cls_(std::move(cls)),
      medians_(std::move(medians)),
      structure_(std::move(structure)),
      meta_(std::move(meta)) {
  if (medians_.size() != inputs_.size()) throw SchemaMismatch("model: one median per input expected");
  if (!cls_.is_nominal() || cls_.labels.empty()) throw SchemaMismatch("model: class must be nominal");
}

Encoded Model::encode(std::span<const Value> instance) const {
  if (instance.size() != inputs_.size())
    throw SchemaMismatch(fmt::format("instance has {} values, model expects {}", instance.size(),
                                     inputs_.size()));
  Encoded x(inputs_.size());
  for (std::size_t a = 0; a < inputs_.size(); ++a) {
    const auto& v = instance[a];
    const auto& s = inputs_[a];
    if (v.is_missing()) {
      x[a] = s.is_nominal() ? static_cast<double>(s.labels.size()) : medians_[a];
    } else if (s.is_nominal()) {
      if (!v.is_nominal() || v.as_nominal() >= s.labels.size())
        throw SchemaMismatch(fmt::format("'{}' expects a nominal value", s.name));
      x[a] = static_cast<double>(v.as_nominal());
    } else {
      if (!v.is_numeric()) throw SchemaMismatch(fmt::format("'{}' expects a numeric value", s.name));
      x[a] = v.as_numeric();
    }
  }
  return x;
}

namespace {

double exemplar_distance(const ExemplarSet& set, const Exemplar& e, const Encoded& x) {
  double d2 = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) {
    double d = 0.0;
    if (set.nominal[a]) {
      d = std::binary_search(e.values[a].begin(), e.values[a].end(), static_cast<std::size_t>(x[a]))
              ? 0.0
              : 1.0;
    } else {
      const double gap = x[a] < e.lo[a] ? e.lo[a] - x[a] : (x[a] > e.hi[a] ? x[a] - e.hi[a] : 0.0);
      d = set.ranges[a] > 0 ? gap / set.ranges[a] : (gap > 0 ? 1.0 : 0.0);
    }
    const double w = set.weights[a] * d;
    d2 += w * w;
  }
  return std::sqrt(d2);
}

}  // namespace

std::vector<double> Model::distribution_encoded(const Encoded& x) const {
  const std::size_t k = num_classes();
  if (const auto* tree = std::get_if<DecisionTree>(&structure_)) {
    return laplace(tree->nodes[tree->route(x)].dist);
  }
  if (const auto* list = std::get_if<RuleList>(&structure_)) {
    for (const auto& r : list->rules)
      if (r.matches(x)) return laplace(r.counts);
    if (meta_.degenerate) {
      // Nothing else was ever seen, so no mass goes to other classes.
      std::vector<double> one_hot(k, 0.0);
      one_hot[list->default_class] = 1.0;
      return one_hot;
    }
    return laplace(list->default_counts);
  }
  const auto& set = std::get<ExemplarSet>(structure_);
  std::vector<double> best(k, std::numeric_limits<double>::infinity());
  for (const auto& e : set.exemplars)
    best[e.cls] = std::min(best[e.cls], exemplar_distance(set, e, x));
  std::vector<double> p(k, 0.0);
  double total = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    if (std::isfinite(best[c])) p[c] = 1.0 / (best[c] + 0.01);
    total += p[c];
  }
  if (total <= 0) return std::vector<double>(k, 1.0 / static_cast<double>(k));
  for (auto& v : p) v /= total;
  return p;
}

std::vector<double> Model::distribution(std::span<const Value> instance) const {
  return distribution_encoded(encode(instance));
}

std::size_t Model::predict(std::span<const Value> instance) const {
  const auto p = distribution(instance);
  return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
}

std::vector<std::size_t> Model::column_map(const DataTable& table) const {
  std::vector<std::size_t> map;
  for (const auto& s : inputs_) {
    auto c = table.column_index(s.name);
    if (!c) throw SchemaMismatch(fmt::format("table lacks model input '{}'", s.name));
    const auto& t = table.specs()[*c];
    if (t.kind != s.kind || (s.is_nominal() && t.labels != s.labels))
      throw SchemaMismatch(fmt::format("column '{}' does not match the model schema", s.name));
    map.push_back(*c);
  }
  return map;
}

std::vector<Value> Model::project(const DataTable& table, std::size_t row,
                                  std::span<const std::size_t> map) const {
  std::vector<Value> out;
  out.reserve(map.size());
  for (auto c : map) out.push_back(table.at(row, c));
  return out;
}

std::vector<std::vector<double>> Model::distributions(const DataTable& table) const {
  const auto map = column_map(table);
  std::vector<std::vector<double>> out;
  out.reserve(table.num_rows());
  for (std::size_t r = 0; r < table.num_rows(); ++r) out.push_back(distribution(project(table, r, map)));
  return out;
}

std::vector<std::size_t> Model::predictions(const DataTable& table) const {
  std::vector<std::size_t> out;
  for (const auto& p : distributions(table))
    out.push_back(static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin()));
  return out;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

std::string nominal_text(const AttributeSpec& s, std::size_t v) {
  return v < s.labels.size() ? s.labels[v] : std::string("?");
}

std::string condition_text(const Model& m, const Condition& c) {
  const auto& s = m.inputs()[c.attr];
  switch (c.op) {
    case CondOp::Eq: return s.name + " = " + nominal_text(s, static_cast<std::size_t>(c.value));
    case CondOp::Le: return s.name + " <= " + format_number(c.value);
    case CondOp::Gt: return s.name + " > " + format_number(c.value);
  }
  return {};
}

std::string rule_text(const Model& m, const Rule& r) {
  std::string out = "IF ";
  for (std::size_t i = 0; i < r.conditions.size(); ++i) {
    if (i) out += " AND ";
    out += condition_text(m, r.conditions[i]);
  }
  return out + " THEN " + m.class_spec().labels[r.cls];
}

std::string branch_text(const Model& m, const TreeNode& n, std::size_t i) {
  const auto& s = m.inputs()[*n.attr];
  if (n.numeric) return s.name + (i == 0 ? " <= " : " > ") + format_number(n.threshold);
  return s.name + " = " + nominal_text(s, n.branch_values[i]);
}

void render_tree(const Model& m, const DecisionTree& t, std::size_t at, std::size_t depth,
                 std::string& out) {
  const auto& n = t.nodes[at];
  for (std::size_t i = 0; i < n.children.size(); ++i) {
    std::string prefix;
    if (depth == 0)
      prefix = i == 0 ? "IF " : "ELSE IF ";
    else
      for (std::size_t d = 0; d < depth; ++d) prefix += "| ";
    const auto& child = t.nodes[n.children[i]];
    out += prefix + branch_text(m, n, i);
    if (child.is_leaf()) {
      out += " THEN " + m.class_spec().labels[child.label] + "\n";
    } else {
      out += "\n";
      render_tree(m, t, n.children[i], depth + 1, out);
    }
  }
}

std::string exemplar_text(const Model& m, const Exemplar& e) {
  std::string out = "IF ";
  for (std::size_t a = 0; a < m.inputs().size(); ++a) {
    const auto& s = m.inputs()[a];
    if (a) out += " AND ";
    if (s.is_nominal()) {
      std::string set;
      for (std::size_t i = 0; i < e.values[a].size(); ++i)
        set += (i ? ", " : "") + nominal_text(s, e.values[a][i]);
      out += s.name + " in {" + set + "}";
    } else if (e.lo[a] == e.hi[a]) {
      out += s.name + " = " + format_number(e.lo[a]);
    } else {
      out += s.name + " in [" + format_number(e.lo[a]) + ", " + format_number(e.hi[a]) + "]";
    }
  }
  return out + " THEN " + m.class_spec().labels[e.cls] + " (" + std::to_string(e.members) + ")";
}

}  // namespace

std::string render_rules(const Model& model) {
  std::string out;
  const auto& labels = model.class_spec().labels;
  if (const auto* list = std::get_if<RuleList>(&model.structure())) {
    for (const auto& r : list->rules) out += rule_text(model, r) + "\n";
    out += "ELSE " + labels[list->default_class] + "\n";
    out += fmt::format("Number of Rules : {}\n", list->rules.size() + 1);
  } else if (const auto* tree = std::get_if<DecisionTree>(&model.structure())) {
    if (tree->nodes[0].is_leaf())
      out += "ELSE " + labels[tree->nodes[0].label] + "\n";
    else
      render_tree(model, *tree, 0, 0, out);
    out += fmt::format("Number of Leaves: {}\n", tree->num_leaves());
    out += fmt::format("Size of the tree : {}\n", tree->size());
  } else {
    const auto& set = std::get<ExemplarSet>(model.structure());
    for (const auto& e : set.exemplars) out += exemplar_text(model, e) + "\n";
    out += fmt::format("Number of Exemplars : {}\n", set.exemplars.size());
  }
  return out;
}

std::string explain_instance(const Model& model, std::span<const Value> instance) {
  const auto x = model.encode(instance);
  const auto& labels = model.class_spec().labels;
  if (const auto* list = std::get_if<RuleList>(&model.structure())) {
    for (std::size_t i = 0; i < list->rules.size(); ++i)
      if (list->rules[i].matches(x))
        return fmt::format("rule {}: {}", i + 1, rule_text(model, list->rules[i]));
    return fmt::format("rule {}: ELSE {}", list->rules.size() + 1, labels[list->default_class]);
  }
  if (const auto* tree = std::get_if<DecisionTree>(&model.structure())) {
    std::vector<std::string> path;
    std::size_t at = 0;
    while (!tree->nodes[at].is_leaf()) {
      const auto& n = tree->nodes[at];
      std::size_t i = 0;
      if (n.numeric) {
        i = x[*n.attr] <= n.threshold ? 0 : 1;
      } else {
        auto it = std::find(n.branch_values.begin(), n.branch_values.end(),
                            static_cast<std::size_t>(x[*n.attr]));
        if (it == n.branch_values.end()) break;
        i = static_cast<std::size_t>(it - n.branch_values.begin());
      }
      path.push_back(branch_text(model, n, i));
      at = n.children[i];
    }
    std::string out = "leaf: ";
    if (path.empty()) return out + "ELSE " + labels[tree->nodes[at].label];
    out += "IF ";
    for (std::size_t i = 0; i < path.size(); ++i) out += (i ? " AND " : "") + path[i];
    return out + " THEN " + labels[tree->nodes[at].label];
  }
  const auto& set = std::get<ExemplarSet>(model.structure());
  std::size_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < set.exemplars.size(); ++i) {
    const double d = exemplar_distance(set, set.exemplars[i], x);
    if (d < bd) {
      bd = d;
      best = i;
    }
  }
  if (set.exemplars.empty()) return "no exemplars";
  return fmt::format("exemplar {} (distance {}): {}", best + 1, format_number(bd),
                     exemplar_text(model, set.exemplars[best]));
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string_view strip_parens(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && s.front() == '(' && s.back() == ')') s = trim(s.substr(1, s.size() - 2));
  return s;
}

struct RawCondition {
  std::string attr;
  CondOp op;
  std::string value;
};

struct RawRule {
  std::vector<RawCondition> conditions;
  std::string cls;
  std::size_t line;
};

struct RawList {
  std::vector<RawRule> rules;
  std::string default_cls;
  std::size_t default_line = 0;
};

std::vector<std::string_view> split_on(std::string_view s, std::string_view sep) {
  std::vector<std::string_view> parts;
  std::size_t pos;
  while ((pos = s.find(sep)) != std::string_view::npos) {
    parts.push_back(s.substr(0, pos));
    s.remove_prefix(pos + sep.size());
  }
  parts.push_back(s);
  return parts;
}

RawCondition parse_condition(std::string_view text, std::size_t line) {
  text = strip_parens(text);
  for (auto [sep, op] : {std::pair{std::string_view(" <= "), CondOp::Le},
                         std::pair{std::string_view(" > "), CondOp::Gt},
                         std::pair{std::string_view(" = "), CondOp::Eq}}) {
    auto pos = text.find(sep);
    if (pos == std::string_view::npos) continue;
    auto name = trim(text.substr(0, pos));
    auto value = trim(text.substr(pos + sep.size()));
    if (name.empty() || value.empty()) break;
    return {std::string(name), op, std::string(value)};
  }
  throw SyntaxError(line, fmt::format("cannot read condition '{}'", text));
}

RawList parse_raw(std::string_view text) {
  RawList out;
  std::size_t line_no = 0;
  bool have_default = false, have_footer = false;
  std::size_t declared = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty()) continue;
    if (have_footer) throw SyntaxError(line_no, "text after the rule count footer");
    if (line.starts_with("Number of Rules")) {
      auto colon = line.find(':');
      if (colon == std::string_view::npos) throw SyntaxError(line_no, "malformed footer");
      auto num = trim(line.substr(colon + 1));
      try {
        declared = std::stoul(std::string(num));
      } catch (const std::exception&) {
        throw SyntaxError(line_no, "malformed rule count");
      }
      have_footer = true;
      if (!have_default) throw SyntaxError(line_no, "footer before the ELSE rule");
      if (declared != out.rules.size() + 1)
        throw SyntaxError(line_no, fmt::format("footer says {} rules, found {}", declared,
                                               out.rules.size() + 1));
      continue;
    }
    if (have_default) throw SyntaxError(line_no, "rule after the ELSE rule");
    if (line.starts_with("ELSE ")) {
      auto cls = trim(line.substr(5));
      if (cls.empty() || cls.find(' ') != std::string_view::npos)
        throw SyntaxError(line_no, "malformed ELSE rule");
      out.default_cls = std::string(cls);
      out.default_line = line_no;
      have_default = true;
      continue;
    }
    if (!line.starts_with("IF ")) throw SyntaxError(line_no, "expected IF, ELSE or the rule count");
    auto then = line.rfind(" THEN ");
    if (then == std::string_view::npos) throw SyntaxError(line_no, "missing THEN");
    RawRule rule;
    rule.line = line_no;
    rule.cls = std::string(trim(line.substr(then + 6)));
    if (rule.cls.empty() || rule.cls.find(' ') != std::string::npos)
      throw SyntaxError(line_no, "malformed class after THEN");
    auto body = line.substr(3, then - 3);
    for (auto part : split_on(body, " AND ")) {
      for (auto sub : split_on(part, " and ")) rule.conditions.push_back(parse_condition(sub, line_no));
    }
    out.rules.push_back(std::move(rule));
  }
  if (!have_default) throw SyntaxError(line_no == 0 ? 1 : line_no, "no ELSE rule");
  return out;
}

std::size_t class_index(const AttributeSpec& cls, const std::string& label, std::size_t line) {
  auto i = cls.label_index(label);
  if (!i) throw SyntaxError(line, fmt::format("unknown class '{}'", label));
  return *i;
}

Model build_parsed(const RawList& raw, const std::vector<AttributeSpec>& inputs,
                   const AttributeSpec& cls) {
  const std::size_t k = cls.labels.size();
  RuleList list;
  for (const auto& rr : raw.rules) {
    Rule r;
    for (const auto& rc : rr.conditions) {
      auto it = std::find_if(inputs.begin(), inputs.end(),
                             [&](const AttributeSpec& s) { return s.name == rc.attr; });
      if (it == inputs.end()) throw SyntaxError(rr.line, fmt::format("unknown attribute '{}'", rc.attr));
      Condition c;
      c.attr = static_cast<std::size_t>(it - inputs.begin());
      c.op = rc.op;
      if (rc.op == CondOp::Eq) {
        if (!it->is_nominal()) throw SyntaxError(rr.line, fmt::format("'{}' is numeric", rc.attr));
        if (rc.value == "?") {
          c.value = static_cast<double>(it->labels.size());
        } else {
          auto li = it->label_index(rc.value);
          if (!li) throw SyntaxError(rr.line, fmt::format("unknown label '{}'", rc.value));
          c.value = static_cast<double>(*li);
        }
      } else {
        if (!it->is_numeric()) throw SyntaxError(rr.line, fmt::format("'{}' is nominal", rc.attr));
        double v;
        auto res = std::from_chars(rc.value.data(), rc.value.data() + rc.value.size(), v);
        if (res.ec != std::errc() || res.ptr != rc.value.data() + rc.value.size())
          throw SyntaxError(rr.line, fmt::format("bad threshold '{}'", rc.value));
        c.value = v;
      }
      r.conditions.push_back(c);
    }
    r.cls = class_index(cls, rr.cls, rr.line);
    r.counts.assign(k, 0.0);
    r.counts[r.cls] = 1.0;
    list.rules.push_back(std::move(r));
  }
  list.default_class = class_index(cls, raw.default_cls, raw.default_line);
  list.default_counts.assign(k, 0.0);
  list.default_counts[list.default_class] = 1.0;
  ModelMeta meta;
  meta.notes.push_back("parsed from rule text; coverage counts are one-hot");
  return Model(inputs, cls, std::vector<double>(inputs.size(), 0.0), std::move(list), std::move(meta));
}

}  // namespace

Model parse_rules(std::string_view text, const std::vector<AttributeSpec>& inputs,
                  const AttributeSpec& cls) {
  return build_parsed(parse_raw(text), inputs, cls);
}

Model parse_rules(std::string_view text) {
  const auto raw = parse_raw(text);
  std::vector<AttributeSpec> inputs;
  auto find = [&](const std::string& name) -> AttributeSpec* {
    for (auto& s : inputs)
      if (s.name == name) return &s;
    return nullptr;
  };
  for (const auto& rr : raw.rules)
    for (const auto& rc : rr.conditions) {
      const bool nominal = rc.op == CondOp::Eq;
      auto* s = find(rc.attr);
      if (!s) {
        inputs.push_back(nominal ? AttributeSpec::nominal(rc.attr, {}) : AttributeSpec::numeric(rc.attr));
        s = &inputs.back();
      }
      if (s->is_nominal() != nominal)
        throw SyntaxError(rr.line, fmt::format("'{}' used as both nominal and numeric", rc.attr));
      if (nominal && rc.value != "?" && !s->label_index(rc.value)) s->labels.push_back(rc.value);
    }
  for (auto& s : inputs)
    if (s.is_nominal() && s.labels.empty()) s.labels.push_back("?");
  AttributeSpec cls = AttributeSpec::nominal("class", {}, AttrRole::Class);
  auto add_class = [&](const std::string& l) {
    if (!cls.label_index(l)) cls.labels.push_back(l);
  };
  for (const auto& rr : raw.rules) add_class(rr.cls);
  add_class(raw.default_cls);
  return build_parsed(raw, inputs, cls);
}

// ---------------------------------------------------------------------------
// JSON

namespace {

std::string_view op_text(CondOp op) {
  switch (op) {
    case CondOp::Eq: return "=";
    case CondOp::Le: return "<=";
    case CondOp::Gt: return ">";
  }
  return "=";
}

CondOp op_from(const std::string& s) {
  if (s == "=") return CondOp::Eq;
  if (s == "<=") return CondOp::Le;
  if (s == ">") return CondOp::Gt;
  throw SchemaMismatch("model file: unknown condition operator '" + s + "'");
}

nlohmann::json rule_json(const Rule& r) {
  nlohmann::json conds = nlohmann::json::array();
  for (const auto& c : r.conditions)
    conds.push_back({{"attr", c.attr}, {"op", op_text(c.op)}, {"value", c.value}});
  return {{"conditions", conds}, {"class", r.cls}, {"counts", r.counts}};
}

Rule rule_from(const nlohmann::json& j) {
  Rule r;
  for (const auto& c : j.at("conditions"))
    r.conditions.push_back({c.at("attr").get<std::size_t>(), op_from(c.at("op").get<std::string>()),
                            c.at("value").get<double>()});
  r.cls = j.at("class").get<std::size_t>();
  r.counts = j.at("counts").get<std::vector<double>>();
  return r;
}

}  // namespace

nlohmann::json model_to_json(const Model& model) {
  nlohmann::json doc;
  const auto& meta = model.meta();
  doc["algorithm"] = meta.algorithm ? nlohmann::json(std::string(to_string(*meta.algorithm)))
                                    : nlohmann::json(nullptr);
  doc["seed"] = meta.seed;
  doc["params"] = meta.params;
  doc["degenerate"] = meta.degenerate;
  doc["notes"] = meta.notes;
  doc["inputs"] = schema_to_json(model.inputs());
  doc["class"] = schema_to_json({model.class_spec()})[0];
  doc["medians"] = model.medians();

  nlohmann::json s;
  if (const auto* tree = std::get_if<DecisionTree>(&model.structure())) {
    s["kind"] = "tree";
    s["nodes"] = nlohmann::json::array();
    for (const auto& n : tree->nodes) {
      nlohmann::json jn = {{"counts", n.counts}, {"label", n.label}, {"dist", n.dist}};
      if (n.attr) {
        jn["attr"] = *n.attr;
        jn["numeric"] = n.numeric;
        jn["threshold"] = n.threshold;
        jn["children"] = n.children;
        jn["branch_values"] = n.branch_values;
      }
      s["nodes"].push_back(jn);
    }
  } else if (const auto* list = std::get_if<RuleList>(&model.structure())) {
    s["kind"] = "rules";
    s["rules"] = nlohmann::json::array();
    for (const auto& r : list->rules) s["rules"].push_back(rule_json(r));
    s["default_class"] = list->default_class;
    s["default_counts"] = list->default_counts;
  } else {
    const auto& set = std::get<ExemplarSet>(model.structure());
    s["kind"] = "exemplars";
    s["weights"] = set.weights;
    s["ranges"] = set.ranges;
    s["nominal"] = set.nominal;
    s["exemplars"] = nlohmann::json::array();
    for (const auto& e : set.exemplars)
      s["exemplars"].push_back({{"class", e.cls}, {"lo", e.lo}, {"hi", e.hi},
                                {"values", e.values}, {"members", e.members}});
  }
  doc["structure"] = s;
  return doc;
}

Model model_from_json(const nlohmann::json& doc) {
  try {
    ModelMeta meta;
    if (!doc.at("algorithm").is_null()) meta.algorithm = parse_algorithm(doc.at("algorithm").get<std::string>());
    meta.seed = doc.at("seed").get<std::uint64_t>();
    meta.params = doc.at("params");
    meta.degenerate = doc.at("degenerate").get<bool>();
    meta.notes = doc.at("notes").get<std::vector<std::string>>();
    auto inputs = schema_from_json(doc.at("inputs"));
    auto cls = schema_from_json(nlohmann::json::array({doc.at("class")}))[0];
    auto medians = doc.at("medians").get<std::vector<double>>();

    const auto& s = doc.at("structure");
    const auto kind = s.at("kind").get<std::string>();
    Structure structure;
    if (kind == "tree") {
      DecisionTree t;
      for (const auto& jn : s.at("nodes")) {
        TreeNode n;
        n.counts = jn.at("counts").get<std::vector<double>>();
        n.label = jn.at("label").get<std::size_t>();
        n.dist = jn.at("dist").get<std::vector<double>>();
        if (jn.contains("attr")) {
          n.attr = jn.at("attr").get<std::size_t>();
          n.numeric = jn.at("numeric").get<bool>();
          n.threshold = jn.at("threshold").get<double>();
          n.children = jn.at("children").get<std::vector<std::size_t>>();
          n.branch_values = jn.at("branch_values").get<std::vector<std::size_t>>();
        }
        t.nodes.push_back(std::move(n));
      }
      if (t.nodes.empty()) throw SchemaMismatch("model file: empty tree");
      structure = std::move(t);
    } else if (kind == "rules") {
      RuleList list;
      for (const auto& jr : s.at("rules")) list.rules.push_back(rule_from(jr));
      list.default_class = s.at("default_class").get<std::size_t>();
      list.default_counts = s.at("default_counts").get<std::vector<double>>();
      structure = std::move(list);
    } else if (kind == "exemplars") {
      ExemplarSet set;
      set.weights = s.at("weights").get<std::vector<double>>();
      set.ranges = s.at("ranges").get<std::vector<double>>();
      set.nominal = s.at("nominal").get<std::vector<bool>>();
      for (const auto& je : s.at("exemplars")) {
        Exemplar e;
        e.cls = je.at("class").get<std::size_t>();
        e.lo = je.at("lo").get<std::vector<double>>();
        e.hi = je.at("hi").get<std::vector<double>>();
        e.values = je.at("values").get<std::vector<std::vector<std::size_t>>>();
        e.members = je.at("members").get<std::size_t>();
        set.exemplars.push_back(std::move(e));
      }
      structure = std::move(set);
    } else {
      throw SchemaMismatch("model file: unknown structure kind '" + kind + "'");
    }
    return Model(std::move(inputs), std::move(cls), std::move(medians), std::move(structure),
                 std::move(meta));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaMismatch(std::string("model file: ") + e.what());
  }
}

}  // namespace fusemine

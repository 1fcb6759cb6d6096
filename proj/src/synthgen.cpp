#include "fusemine/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "fusemine/errors.hpp"
#include "fusemine/preprocess.hpp"
#include "fusemine/random.hpp"

namespace fusemine {

namespace {

enum class Sessions { Theory, Practice, Practicals, Single };

struct AttrDef {
  const char* name;
  std::string_view source;
  Sessions sessions;
  double lo, hi;
  bool binary;   // per-session 0/1, fused value k/n
  bool integer;  // single whole-number value
};

const std::vector<AttrDef>& defs() {
  static const std::vector<AttrDef> d = {
      {"Theory.Attendance", kTheory, Sessions::Theory, 0, 1, true, false},
      {"Theory.Location", kTheory, Sessions::Theory, 0, 12, false, false},
      {"Theory.Attention", kTheory, Sessions::Theory, 0, 110, false, false},
      {"Theory.TakeNotes", kTheory, Sessions::Theory, 0, 110, false, false},
      {"Practice.Attendance", kPractice, Sessions::Practice, 0, 1, true, false},
      {"Practice.Score", kPractice, Sessions::Practicals, 1, 10, false, false},
      {"Moodle.Quiz", kOnline, Sessions::Single, 0, 10, false, false},
      {"Moodle.Forum", kOnline, Sessions::Single, 0, 40, false, true},
      {"Moodle.Task", kOnline, Sessions::Single, 0, 8, false, true},
      {"Moodle.Time", kOnline, Sessions::Single, 0, 3000, false, false},
  };
  return d;
}

const std::vector<std::string> kLevels = {"Low", "Medium", "High"};
constexpr double kMargin = 0.05;

std::size_t session_count(const CohortSpec& s, Sessions k) {
  switch (k) {
    case Sessions::Theory: return s.theory_sessions;
    case Sessions::Practice: return s.practice_sessions;
    case Sessions::Practicals: return s.practicals;
    case Sessions::Single: return 1;
  }
  return 1;
}

// Uniform draw from the attribute's admissible values inside [a, b].
double draw_value(const AttrDef& def, std::size_t n_sessions, double a, double b, Rng& rng) {
  if (def.binary || def.integer) {
    const double scale = def.binary ? static_cast<double>(n_sessions) : 1.0;
    const auto first = static_cast<long long>(std::ceil(a * scale - 1e-9));
    const auto last = static_cast<long long>(std::floor(b * scale + 1e-9));
    if (last < first)
      throw InfeasibleRuleset(fmt::format("no admissible value of '{}' in [{}, {}]", def.name, a, b));
    const auto k = first + static_cast<long long>(uniform_index(rng, static_cast<std::uint64_t>(last - first + 1)));
    return static_cast<double>(k) / scale;
  }
  return uniform_real(rng, a, b);
}

// Session values whose mean is `v`: binary attributes switch on round(v*n)
// sessions, the rest use pairwise +/- jitter that cancels exactly.
std::vector<double> expand(const AttrDef& def, std::size_t n, double v, Rng& rng) {
  std::vector<double> out(n, v);
  if (n == 1) return out;
  if (def.binary) {
    const auto k = static_cast<std::size_t>(std::llround(v * static_cast<double>(n)));
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    shuffle(std::span<std::size_t>(idx), rng);
    for (std::size_t i = 0; i < n; ++i) out[idx[i]] = i < k ? 1.0 : 0.0;
    return out;
  }
  const double room = std::min({v - def.lo, def.hi - v, 0.2 * (def.hi - def.lo)});
  for (std::size_t i = 0; i + 1 < n; i += 2) {
    const double delta = room > 0 ? uniform_real(rng, 0.0, room) : 0.0;
    out[i] = v + delta;
    out[i + 1] = v - delta;
  }
  return out;
}

struct Entry {
  std::size_t cls;
  std::vector<std::vector<std::size_t>> cells;  // level per constrained attribute
};

std::vector<std::size_t> largest_remainder(std::size_t total, const std::vector<double>& w) {
  const double sum = std::accumulate(w.begin(), w.end(), 0.0);
  std::vector<std::size_t> out(w.size(), 0);
  if (sum <= 0) return out;
  std::vector<std::pair<double, std::size_t>> rem;
  std::size_t given = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double exact = static_cast<double>(total) * w[i] / sum;
    out[i] = static_cast<std::size_t>(std::floor(exact));
    given += out[i];
    rem.emplace_back(-(exact - std::floor(exact)), i);
  }
  std::sort(rem.begin(), rem.end());
  for (std::size_t i = 0; given < total; ++i, ++given) out[rem[i % rem.size()].second] += 1;
  return out;
}

}  // namespace

const std::vector<std::string>& fused_attribute_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& d : defs()) n.emplace_back(d.name);
    return n;
  }();
  return names;
}

std::vector<AttributeSpec> discretized_inputs() {
  std::vector<AttributeSpec> out;
  for (const auto& n : fused_attribute_names()) out.push_back(AttributeSpec::nominal(n, kLevels));
  return out;
}

AttributeSpec status_spec() {
  return AttributeSpec::nominal(std::string(kStatusName), kStatusLabels, AttrRole::Class);
}

RuleList default_ruleset() { return std::get<RuleList>(default_ruleset_model().structure()); }

Model default_ruleset_model() {
  static const char* text =
      "IF Moodle.Quiz = High THEN Pass\n"
      "IF Moodle.Quiz = Medium AND Theory.Attention = Medium THEN Pass\n"
      "IF Moodle.Quiz = Low THEN Fail\n"
      "IF Theory.Attention = Low AND Moodle.Forum = Low THEN Dropout\n"
      "ELSE Pass\n"
      "Number of Rules : 5\n";
  return parse_rules(text, discretized_inputs(), status_spec());
}

void CohortSpec::validate() const {
  if (class_counts.size() != kStatusLabels.size())
    throw InvalidParams("class_counts needs one entry per class (Pass, Fail, Dropout)");
  if (std::accumulate(class_counts.begin(), class_counts.end(), std::size_t{0}) != n_students)
    throw InvalidParams("class counts must sum to n_students");
  if (!(noise >= 0.0 && noise <= 1.0)) throw InvalidParams("noise must be in [0, 1]");
  if (theory_sessions == 0 || practice_sessions == 0 || practicals == 0)
    throw InvalidParams("session counts must be positive");
  if (!rule_weights.empty() && rule_weights.size() != ruleset.rules.size() + 1)
    throw InvalidParams("rule_weights needs one weight per rule plus one for the default");
  for (double w : rule_weights)
    if (!(w >= 0.0)) throw InvalidParams("rule weights must be non-negative");
  const auto inputs = discretized_inputs();
  for (const auto& r : ruleset.rules) {
    if (r.cls >= kStatusLabels.size()) throw InvalidParams("rule class out of range");
    for (const auto& c : r.conditions)
      if (c.op != CondOp::Eq || c.attr >= inputs.size() || c.value >= 3)
        throw InvalidParams("planted rules must be Low/Medium/High equality tests");
  }
  if (ruleset.default_class >= kStatusLabels.size()) throw InvalidParams("default class out of range");
}

CohortSpec CohortSpec::scaled(std::size_t factor) const {
  CohortSpec s = *this;
  s.n_students *= factor;
  for (auto& c : s.class_counts) c *= factor;
  return s;
}

CohortSpec CohortSpec::resized(std::size_t n) const {
  CohortSpec s = *this;
  const double total = static_cast<double>(std::accumulate(class_counts.begin(), class_counts.end(), std::size_t{0}));
  if (total == 0) throw InvalidParams("cannot resize a cohort with no students");
  std::vector<double> frac(class_counts.size());
  std::size_t given = 0;
  for (std::size_t c = 0; c < class_counts.size(); ++c) {
    const double exact = static_cast<double>(class_counts[c]) * static_cast<double>(n) / total;
    s.class_counts[c] = static_cast<std::size_t>(std::floor(exact));
    frac[c] = exact - std::floor(exact);
    given += s.class_counts[c];
  }
  std::vector<std::size_t> order(class_counts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (std::size_t i = 0; given < n; ++i, ++given) ++s.class_counts[order[i % order.size()]];
  s.n_students = n;
  return s;
}

CohortSpec showcase_spec(std::uint64_t seed) {
  CohortSpec s;
  s.n_students = 490;
  s.class_counts = {290, 120, 80};
  s.rule_weights = {100, 150, 1, 1, 40};
  s.seed = seed;
  return s;
}

Cohort generate(const CohortSpec& spec) {
  spec.validate();
  const auto& attrs = defs();
  const std::size_t dims = attrs.size();
  const std::size_t n = spec.n_students;
  const auto& rules = spec.ruleset.rules;

  std::set<std::size_t> used;
  for (const auto& r : rules)
    for (const auto& c : r.conditions) used.insert(c.attr);
  const std::vector<std::size_t> constrained(used.begin(), used.end());

  // Entries: one per rule, plus the default-only entry.
  std::vector<Entry> entries(rules.size() + 1);
  for (std::size_t i = 0; i < rules.size(); ++i) entries[i].cls = rules[i].cls;
  entries.back().cls = spec.ruleset.default_class;

  std::size_t cells = 1;
  for (std::size_t i = 0; i < constrained.size(); ++i) cells *= 3;
  for (std::size_t code = 0; code < cells; ++code) {
    Encoded x(dims, -1.0);
    std::vector<std::size_t> levels(constrained.size());
    std::size_t rest = code;
    for (std::size_t i = constrained.size(); i-- > 0;) {
      levels[i] = rest % 3;
      rest /= 3;
      x[constrained[i]] = static_cast<double>(levels[i]);
    }
    std::vector<bool> hit(rules.size());
    for (std::size_t i = 0; i < rules.size(); ++i) hit[i] = rules[i].matches(x);
    if (std::none_of(hit.begin(), hit.end(), [](bool b) { return b; })) {
      entries.back().cells.push_back(levels);
      continue;
    }
    for (std::size_t i = 0; i < rules.size(); ++i) {
      if (!hit[i]) continue;
      bool clean = true;
      for (std::size_t j = 0; j < rules.size(); ++j)
        if (hit[j] && rules[j].cls != rules[i].cls) clean = false;
      if (clean) entries[i].cells.push_back(levels);
    }
  }

  std::vector<double> weights = spec.rule_weights;
  if (weights.empty()) {
    weights.assign(entries.size(), 1.0);
    weights.back() = 0.0;
  }

  // Students per entry, class by class.
  std::vector<std::size_t> quota(entries.size(), 0);
  for (std::size_t c = 0; c < kStatusLabels.size(); ++c) {
    const std::size_t count = spec.class_counts[c];
    if (count == 0) continue;
    std::vector<std::size_t> mine;
    std::vector<double> w;
    for (std::size_t e = 0; e < entries.size(); ++e)
      if (entries[e].cls == c) {
        mine.push_back(e);
        w.push_back(weights[e]);
      }
    if (std::accumulate(w.begin(), w.end(), 0.0) <= 0.0) {
      if (c != spec.ruleset.default_class)
        throw InfeasibleRuleset(fmt::format("no weighted rule generates class {}", kStatusLabels[c]));
      w.assign(w.size(), 0.0);
      w.back() = 1.0;
    }
    const auto split = largest_remainder(count, w);
    for (std::size_t i = 0; i < mine.size(); ++i) {
      if (split[i] > 0 && entries[mine[i]].cells.empty())
        throw InfeasibleRuleset(fmt::format(
            "class {} cannot satisfy {} without also satisfying another class's rule", kStatusLabels[c],
            mine[i] < rules.size() ? fmt::format("rule {}", mine[i] + 1) : std::string("the default")));
      quota[mine[i]] = split[i];
    }
  }

  // Assign entries to students in a seeded order.
  std::vector<std::size_t> entry_of;
  for (std::size_t e = 0; e < entries.size(); ++e) entry_of.insert(entry_of.end(), quota[e], e);
  {
    Rng rng(derive_seed(spec.seed, {0x636c617373ULL}));
    shuffle(std::span<std::size_t>(entry_of), rng);
  }

  // Cells are dealt evenly within each entry, reshuffled every cycle, so
  // that cell frequencies follow the quota rather than sampling noise.
  std::vector<std::vector<std::size_t>> deal(entries.size());
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const std::size_t m = entries[e].cells.size();
    if (m == 0) continue;
    Rng rng(derive_seed(spec.seed, {0x63656c6cULL, e}));
    std::vector<std::size_t> perm(m);
    for (std::size_t t = 0; t < quota[e]; ++t) {
      if (t % m == 0) {
        std::iota(perm.begin(), perm.end(), 0);
        shuffle(std::span<std::size_t>(perm), rng);
      }
      deal[e].push_back(perm[t % m]);
    }
  }
  std::vector<std::size_t> dealt(entries.size(), 0);

  Cohort out;
  out.fused.assign(n, Encoded(dims, 0.0));
  out.planted.resize(n);
  std::vector<std::vector<std::size_t>> level_of(n);
  for (std::size_t s = 0; s < n; ++s) {
    Rng rng(derive_seed(spec.seed, {0x7374756473ULL, s}));
    const auto& entry = entries[entry_of[s]];
    out.planted[s] = entry.cls;
    level_of[s] = entry.cells[deal[entry_of[s]][dealt[entry_of[s]]++]];
    std::vector<bool> done(dims, false);
    for (std::size_t i = 0; i < constrained.size(); ++i) {
      const auto a = constrained[i];
      const auto& def = attrs[a];
      const double w = (def.hi - def.lo) / 3.0;
      const double b = static_cast<double>(level_of[s][i]);
      out.fused[s][a] = draw_value(def, session_count(spec, def.sessions), def.lo + w * (b + kMargin),
                                   def.lo + w * (b + 1.0 - kMargin), rng);
      done[a] = true;
    }
    for (std::size_t a = 0; a < dims; ++a)
      if (!done[a])
        out.fused[s][a] = draw_value(attrs[a], session_count(spec, attrs[a].sessions), attrs[a].lo,
                                     attrs[a].hi, rng);
  }
  // Pin the range ends so equal-width bins fitted on the cohort line up
  // with the levels the students were drawn from.
  for (std::size_t i = 0; i < constrained.size(); ++i) {
    const auto a = constrained[i];
    for (std::size_t level : {std::size_t{0}, std::size_t{2}})
      for (std::size_t s = 0; s < n; ++s)
        if (level_of[s][i] == level) {
          out.fused[s][a] = level == 0 ? attrs[a].lo : attrs[a].hi;
          break;
        }
  }

  out.labels = out.planted;
  const auto flips = static_cast<std::size_t>(std::llround(spec.noise * static_cast<double>(n)));
  if (flips > 1) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(derive_seed(spec.seed, {0x6e6f697365ULL}));
    shuffle(std::span<std::size_t>(idx), rng);
    idx.resize(flips);
    for (std::size_t i = 0; i < flips; ++i) out.labels[idx[i]] = out.planted[idx[(i + 1) % flips]];
  }

  // Raw per-session tables.
  std::map<std::string, std::vector<AttributeSpec>, std::less<>> specs;
  std::map<std::string, std::vector<Row>, std::less<>> rows;
  for (auto src : {kTheory, kPractice, kOnline, kExam}) {
    specs[std::string(src)].push_back(AttributeSpec::id());
    rows[std::string(src)].assign(n, Row{});
  }
  for (const auto& def : attrs) {
    const std::size_t k = session_count(spec, def.sessions);
    auto& sp = specs[std::string(def.source)];
    if (def.sessions == Sessions::Single)
      sp.push_back(AttributeSpec::numeric(def.name));
    else
      for (std::size_t i = 1; i <= k; ++i) sp.push_back(AttributeSpec::numeric(fmt::format("{}.s{}", def.name, i)));
  }
  specs[std::string(kExam)].push_back(AttributeSpec::numeric("Exam.Score"));

  for (std::size_t s = 0; s < n; ++s) {
    const auto id = Value::numeric(static_cast<double>(s + 1));
    for (auto& [name, r] : rows) r[s].push_back(id);
    Rng rng(derive_seed(spec.seed, {0x73657373ULL, s}));
    for (std::size_t a = 0; a < dims; ++a) {
      const auto& def = attrs[a];
      auto& r = rows[std::string(def.source)][s];
      for (double v : expand(def, session_count(spec, def.sessions), out.fused[s][a], rng))
        r.push_back(Value::numeric(v));
    }
    Value score;
    if (out.labels[s] == kPass)
      score = Value::numeric(std::round(uniform_real(rng, 5.0, 10.0) * 100.0) / 100.0);
    else if (out.labels[s] == kFail)
      score = Value::numeric(std::round(uniform_real(rng, 0.0, 4.99) * 100.0) / 100.0);
    rows[std::string(kExam)][s].push_back(score);
  }
  for (auto& [name, sp] : specs) out.raw.sources.emplace(name, DataTable(sp, std::move(rows[name])));

  std::vector<Row> truth;
  for (std::size_t s = 0; s < n; ++s)
    truth.push_back({Value::numeric(static_cast<double>(s + 1)), Value::nominal(out.planted[s]),
                     Value::nominal(out.labels[s])});
  out.truth = DataTable({AttributeSpec::id(), AttributeSpec::nominal("Planted", kStatusLabels),
                         status_spec()},
                        std::move(truth));
  return out;
}

}  // namespace fusemine

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <random>

#include "fixtures.hpp"
#include "fusemine/errors.hpp"
#include "fusemine/evaluation.hpp"
#include "fusemine/learners.hpp"
#include "fusemine/preprocess.hpp"
#include "fusemine/synthgen.hpp"

using namespace fusemine;

namespace {

const std::string kTable =
    "IF Moodle.Quiz = High THEN Pass\n"
    "IF Moodle.Quiz = Medium AND Theory.Attention = Medium THEN Pass\n"
    "IF Moodle.Quiz = Low THEN Fail\n"
    "IF Theory.Attention = Low AND Moodle.Forum = Low THEN Dropout\n"
    "ELSE Pass\n"
    "Number of Rules : 5\n";

// Discretized merged dataset of a noise-free planted cohort.
const DataTable& planted() {
  static const DataTable t = [] {
    const auto cohort = generate(CohortSpec{}.scaled(10));
    return join_on_id(preprocess_bundle(cohort.raw, PreprocessConfig{}).discretized, true);
  }();
  return t;
}

const DataTable& planted_numeric() {
  static const DataTable t = [] {
    const auto cohort = generate(CohortSpec{}.scaled(4));
    return join_on_id(preprocess_bundle(cohort.raw, PreprocessConfig{}).numeric, true);
  }();
  return t;
}

std::vector<std::size_t> truth(const DataTable& t) { return fixture::column_codes(t, *t.class_column()); }

double training_accuracy(const Model& m, const DataTable& t) {
  const auto pred = m.predictions(t);
  const auto y = truth(t);
  return accuracy(pred, y);
}

DataTable shuffled(const DataTable& t, std::uint64_t seed) {
  std::vector<std::size_t> order(t.num_rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), std::mt19937_64(seed));
  return t.select_rows(order);
}

}  // namespace

TEST_CASE("rule learners fit the planted cohort exactly") {
  for (auto a : {Algorithm::C45, Algorithm::Ripper, Algorithm::Part}) {
    CAPTURE(to_string(a));
    CHECK(training_accuracy(train(a, planted()), planted()) == 100.0);
  }
}

TEST_CASE("every learner trains on both variants and yields valid distributions") {
  std::mt19937_64 rng(4);
  for (const DataTable* t : {&planted(), &planted_numeric()}) {
    for (auto a : kAllAlgorithms) {
      CAPTURE(to_string(a));
      const auto m = train(a, *t, {}, 3);
      CHECK(training_accuracy(m, *t) > 60.0);
      for (const auto& d : m.distributions(*t)) {
        double sum = 0.0;
        for (double p : d) {
          CHECK(p >= 0.0);
          CHECK(p <= 1.0);
          sum += p;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-9);
      }
      // Random instances, including missing values, anywhere in the input space.
      for (int i = 0; i < 50; ++i) {
        std::vector<Value> x;
        for (const auto& spec : m.inputs()) {
          if (rng() % 7 == 0)
            x.push_back(Value::missing());
          else if (spec.is_nominal())
            x.push_back(Value::nominal(rng() % spec.labels.size()));
          else
            x.push_back(Value::numeric(std::uniform_real_distribution<double>(-0.5, 1.5)(rng)));
        }
        const auto d = m.distribution(x);
        CHECK(std::abs(std::accumulate(d.begin(), d.end(), 0.0) - 1.0) <= 1e-9);
      }
    }
  }
}

TEST_CASE("a single-class dataset gives a constant model") {
  std::vector<AttributeSpec> specs{AttributeSpec::nominal("A", fixture::levels()), fixture::status()};
  std::vector<Row> rows;
  for (std::size_t i = 0; i < 12; ++i) rows.push_back({Value::nominal(i % 3), Value::nominal(0)});
  const DataTable t(specs, rows);
  for (auto a : kAllAlgorithms) {
    const auto m = train(a, t);
    CHECK(m.meta().degenerate);
    const std::vector<Value> x{Value::nominal(1)};
    CHECK(m.distribution(x) == std::vector<double>{1.0, 0.0, 0.0});
    const auto text = render_rules(m);
    CHECK(text == "ELSE Pass\nNumber of Rules : 1\n");
  }
}

TEST_CASE("training rejects empty and class-less data") {
  std::vector<AttributeSpec> specs{AttributeSpec::nominal("A", fixture::levels()), fixture::status()};
  CHECK_THROWS_AS(train(Algorithm::C45, DataTable(specs, {})), TooFewRows);
  const DataTable no_class({AttributeSpec::nominal("A", fixture::levels())}, {{Value::nominal(0)}});
  CHECK_THROWS_AS(train(Algorithm::Part, no_class), SchemaMismatch);
  LearnerParams bad;
  bad.c45.confidence = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidParams);
}

TEST_CASE("same seed, same model") {
  for (auto a : kAllAlgorithms) {
    CAPTURE(to_string(a));
    const auto m1 = train(a, planted_numeric(), {}, 11);
    const auto m2 = train(a, planted_numeric(), {}, 11);
    CHECK(render_rules(m1) == render_rules(m2));
    CHECK(m1 == m2);
  }
}

TEST_CASE("row order does not change order-insensitive learners") {
  for (auto a : {Algorithm::C45, Algorithm::RepTree, Algorithm::Ripper, Algorithm::Part}) {
    CAPTURE(to_string(a));
    for (const DataTable* t : {&planted(), &planted_numeric()}) {
      const auto base = train(a, *t, {}, 5).predictions(*t);
      for (std::uint64_t s = 1; s <= 3; ++s) CHECK(train(a, shuffled(*t, s), {}, 5).predictions(*t) == base);
    }
  }
}

TEST_CASE("laplace smoothing") {
  const std::vector<double> counts{8, 0, 0};
  const auto p = laplace(counts);
  CHECK(p[0] == doctest::Approx(9.0 / 11.0));
  CHECK(p[1] == doctest::Approx(1.0 / 11.0));
  CHECK(p[2] == doctest::Approx(1.0 / 11.0));
}

TEST_CASE("a rule covering only Fail predicts Fail") {
  auto list = default_ruleset();
  list.rules[2].counts = {0, 5, 0};
  const Model m(discretized_inputs(), status_spec(), std::vector<double>(10, 0.0), list, {});
  std::vector<Value> x(10, Value::nominal(1));
  x[6] = Value::nominal(0);  // Moodle.Quiz = Low
  CHECK(m.predict(x) == kFail);
}

TEST_CASE("pruning never increases training accuracy or leaf count") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = fixture::random_nominal(rng, 6, 150);
    LearnerParams unpruned;
    unpruned.c45.prune = false;
    unpruned.reptree.prune = false;
    for (auto a : {Algorithm::C45, Algorithm::RepTree}) {
      const auto p = train(a, t, {}, 1);
      const auto u = train(a, t, unpruned, 1);
      CHECK(training_accuracy(p, t) <= training_accuracy(u, t) + 1e-12);
      CHECK(std::get<DecisionTree>(p.structure()).num_leaves() <= std::get<DecisionTree>(u.structure()).num_leaves());
    }
  }
}

TEST_CASE("a two-leaf stump renders with its size") {
  std::vector<AttributeSpec> specs{AttributeSpec::numeric("x"), fixture::status()};
  std::vector<Row> rows;
  for (int i = 0; i < 20; ++i) rows.push_back({Value::numeric(i), Value::nominal(i < 10 ? 0 : 1)});
  const auto m = train(Algorithm::C45, DataTable(specs, rows));
  const auto text = render_rules(m);
  CHECK(text.find("Number of Leaves: 2") != std::string::npos);
  CHECK(text.find("Size of the tree : 3") != std::string::npos);
  CHECK(text.find("x <= 9.5") != std::string::npos);
}

TEST_CASE("the published decision list parses") {
  const auto m = parse_rules(kTable, discretized_inputs(), status_spec());
  const auto& list = std::get<RuleList>(m.structure());
  CHECK(list.rules.size() == 4);
  CHECK(list.default_class == kPass);
  CHECK(render_rules(m) == kTable);
  CHECK(render_rules(parse_rules(kTable)) == kTable);
  CHECK(m.predictions(planted()) == default_ruleset_model().predictions(planted()));
}

TEST_CASE("malformed rule text is reported by line") {
  CHECK_THROWS_AS(parse_rules(""), SyntaxError);
  try {
    parse_rules("IF Moodle.Quiz = High THEN Pass\nIF Moodle.Quiz THEN\nELSE Pass\n");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_rules("IF Nope = High THEN Pass\nELSE Pass\n", discretized_inputs(), status_spec()),
                  SyntaxError);
}

TEST_CASE("rendered rule lists parse back to the same predictions") {
  for (const DataTable* t : {&planted(), &planted_numeric()}) {
    for (auto a : {Algorithm::Ripper, Algorithm::Part}) {
      CAPTURE(to_string(a));
      const auto m = train(a, *t, {}, 2);
      const auto text = render_rules(m);
      const auto back = parse_rules(text, m.inputs(), m.class_spec());
      CHECK(back.predictions(*t) == m.predictions(*t));
      CHECK(render_rules(back) == text);
    }
  }
}

TEST_CASE("models survive a json round trip") {
  for (auto a : kAllAlgorithms) {
    CAPTURE(to_string(a));
    const auto m = train(a, planted_numeric(), {}, 6);
    const auto back = model_from_json(nlohmann::json::parse(model_to_json(m).dump()));
    CHECK(back == m);
    CHECK(back.distributions(planted_numeric()) == m.distributions(planted_numeric()));
    CHECK(render_rules(back) == render_rules(m));
  }
}

TEST_CASE("explanations name the deciding rule") {
  const auto m = default_ruleset_model();
  std::vector<Value> x(10, Value::nominal(1));
  x[6] = Value::nominal(2);
  CHECK(explain_instance(m, x).find("IF Moodle.Quiz = High THEN Pass") != std::string::npos);
}

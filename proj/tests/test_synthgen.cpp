#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "fixtures.hpp"
#include "fusemine/errors.hpp"
#include "fusemine/preprocess.hpp"
#include "fusemine/synthgen.hpp"

using namespace fusemine;

namespace {

std::vector<std::size_t> counts(const std::vector<std::size_t>& labels) {
  std::vector<std::size_t> out(3, 0);
  for (auto l : labels) ++out[l];
  return out;
}

DataTable discretized_merged(const Cohort& c) {
  return join_on_id(preprocess_bundle(c.raw, PreprocessConfig{}).discretized, true);
}

}  // namespace

TEST_CASE("default cohort layout") {
  const auto c = generate(CohortSpec{});
  CHECK(c.raw.at("theory").num_columns() == 1 + 4 * 15);
  CHECK(c.raw.at("practice").num_columns() == 1 + 10 + 5);  // attendance per session, score per practical
  CHECK(c.raw.at("online").num_columns() == 1 + 4);
  CHECK(c.raw.at("exam").num_columns() == 1 + 1);
  for (const auto& [name, t] : c.raw.sources) CHECK(t.num_rows() == 57);
  CHECK(counts(c.labels) == std::vector<std::size_t>{19, 17, 21});
  CHECK(c.truth.num_rows() == 57);
}

TEST_CASE("the planted list is the published one") {
  const auto text = render_rules(default_ruleset_model());
  CHECK(text.rfind("IF Moodle.Quiz = High THEN Pass\n", 0) == 0);
  CHECK(text.find("IF Theory.Attention = Low AND Moodle.Forum = Low THEN Dropout\n") != std::string::npos);
  CHECK(text.find("Number of Rules : 5") != std::string::npos);
  CHECK(default_ruleset().rules.size() == 4);
}

TEST_CASE("class counts are exact for every seed and size") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    CohortSpec spec;
    spec.seed = seed;
    spec.noise = seed % 2 ? 0.0 : 0.15;
    const std::size_t f = 1 + seed % 4;
    const auto c = generate(spec.scaled(f));
    CHECK(counts(c.labels) == std::vector<std::size_t>{19 * f, 17 * f, 21 * f});
  }
}

TEST_CASE("session columns fuse back to the drawn values") {
  for (std::uint64_t seed : {1, 2, 3}) {
    CohortSpec spec;
    spec.seed = seed;
    const auto c = generate(spec);
    const auto& names = fused_attribute_names();
    for (const auto& source : {"theory", "practice", "online"}) {
      const auto fused = fuse_sessions(c.raw.at(source));
      for (std::size_t col = 0; col < fused.num_columns(); ++col) {
        const auto& spec_col = fused.specs()[col];
        if (spec_col.role != AttrRole::Input) continue;
        const auto pos = static_cast<std::size_t>(std::find(names.begin(), names.end(), spec_col.name) - names.begin());
        REQUIRE(pos < names.size());
        for (std::size_t r = 0; r < fused.num_rows(); ++r) {
          const auto& v = fused.at(r, col);
          if (v.is_numeric())
            CHECK(std::abs(v.as_numeric() - c.fused[r][pos]) <= 1e-9);
          else
            CHECK(static_cast<double>(v.as_nominal()) == c.fused[r][pos]);
        }
      }
    }
  }
}

TEST_CASE("without noise the planted list labels every student") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    CohortSpec spec;
    spec.seed = seed;
    const auto c = generate(spec);
    CHECK(c.planted == c.labels);
    const auto merged = discretized_merged(c);
    CHECK(default_ruleset_model().predictions(merged) == c.labels);
  }
}

TEST_CASE("noise changes labels but keeps the counts") {
  CohortSpec spec;
  spec.noise = 0.2;
  const auto c = generate(spec.scaled(5));
  CHECK(counts(c.labels) == std::vector<std::size_t>{95, 85, 105});
  std::size_t changed = 0;
  for (std::size_t i = 0; i < c.labels.size(); ++i) changed += c.labels[i] != c.planted[i];
  CHECK(changed > 0);
  CHECK(changed <= static_cast<std::size_t>(std::lround(0.2 * 285)));
}

TEST_CASE("same seed, same cohort") {
  CohortSpec spec;
  spec.seed = 17;
  const auto a = generate(spec);
  const auto b = generate(spec);
  for (const auto& [name, t] : a.raw.sources) CHECK(t == b.raw.at(name));
  spec.seed = 18;
  CHECK_FALSE(generate(spec).raw.at("theory") == a.raw.at("theory"));
}

TEST_CASE("unreachable classes are infeasible") {
  CohortSpec spec;
  auto list = default_ruleset();
  // Every Fail student would already satisfy the first Pass rule.
  list.rules[2].conditions = list.rules[0].conditions;
  spec.ruleset = list;
  CHECK_THROWS_AS(generate(spec), InfeasibleRuleset);
}

TEST_CASE("spec validation") {
  CohortSpec spec;
  spec.class_counts = {19, 17, 20};
  CHECK_THROWS_AS(spec.validate(), InvalidParams);
  spec = CohortSpec{};
  spec.noise = 1.5;
  CHECK_THROWS_AS(spec.validate(), InvalidParams);
  CHECK(CohortSpec{}.resized(100).class_counts == std::vector<std::size_t>{33, 30, 37});
}

TEST_CASE("the showcase cohort") {
  const auto spec = showcase_spec();
  spec.validate();
  const auto c = generate(spec);
  CHECK(c.labels.size() == spec.n_students);
  CHECK(default_ruleset_model().predictions(discretized_merged(c)) == c.labels);
}

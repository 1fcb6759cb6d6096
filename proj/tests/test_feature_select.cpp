#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "fusemine/errors.hpp"
#include "fusemine/feature_select.hpp"
#include "oracles.hpp"

using namespace fusemine;

namespace {

std::pair<std::vector<std::vector<double>>, std::vector<double>> oracle_su(const DataTable& t) {
  const auto inputs = t.input_columns();
  const auto cls = fixture::column_codes(t, *t.class_column());
  std::vector<std::vector<double>> ff(inputs.size(), std::vector<double>(inputs.size(), 0.0));
  std::vector<double> fc(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto a = fixture::column_codes(t, inputs[i]);
    fc[i] = oracle::su(a, cls);
    for (std::size_t j = 0; j < inputs.size(); ++j) ff[i][j] = oracle::su(a, fixture::column_codes(t, inputs[j]));
  }
  return {ff, fc};
}

DataTable from_columns(const std::vector<std::vector<std::size_t>>& cols, const std::vector<std::size_t>& cls) {
  std::vector<AttributeSpec> specs;
  for (std::size_t a = 0; a < cols.size(); ++a)
    specs.push_back(AttributeSpec::nominal("A" + std::to_string(a), fixture::levels()));
  specs.push_back(fixture::status());
  std::vector<Row> rows;
  for (std::size_t r = 0; r < cls.size(); ++r) {
    Row row;
    for (const auto& c : cols) row.push_back(Value::nominal(c[r]));
    row.push_back(Value::nominal(cls[r]));
    rows.push_back(row);
  }
  return DataTable(specs, rows);
}

}  // namespace

TEST_CASE("entropy of simple columns") {
  const std::vector<std::size_t> fair{0, 1, 0, 1};
  CHECK(entropy(fair) == doctest::Approx(1.0));
  const std::vector<std::size_t> pure{2, 2, 2};
  CHECK(entropy(pure) == 0.0);
}

TEST_CASE("symmetrical uncertainty examples") {
  const std::vector<std::size_t> a{0, 1, 2, 0, 1, 2};
  const std::vector<std::size_t> relabelled{2, 0, 1, 2, 0, 1};
  const std::vector<std::size_t> constant(6, 1);
  CHECK(symmetrical_uncertainty(a, a) == doctest::Approx(1.0));
  CHECK(symmetrical_uncertainty(a, relabelled) == doctest::Approx(1.0));
  CHECK(symmetrical_uncertainty(constant, constant) == 0.0);
  CHECK(symmetrical_uncertainty(a, constant) == 0.0);
  const std::vector<std::size_t> x{0, 0, 1, 1}, y{0, 1, 0, 1};
  CHECK(symmetrical_uncertainty(x, y) == doctest::Approx(0.0));
  CHECK_THROWS_AS(symmetrical_uncertainty(x, a), LengthMismatch);
}

TEST_CASE("symmetrical uncertainty matches the oracle and is symmetric") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 5 + rng() % 60;
    std::vector<std::size_t> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = rng() % (1 + t % 5);
      b[i] = rng() % 3 == 0 ? a[i] : rng() % 4;
    }
    const double ab = symmetrical_uncertainty(a, b);
    CHECK(std::abs(ab - symmetrical_uncertainty(b, a)) <= 1e-12);
    CHECK(std::abs(ab - oracle::su(a, b)) <= 1e-12);
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0 + 1e-12);
  }
}

TEST_CASE("merit of a perfect feature, its copy, and added noise") {
  std::mt19937_64 rng(7);
  const std::size_t n = 3000;
  std::vector<std::size_t> cls(n), noise(n);
  for (std::size_t i = 0; i < n; ++i) {
    cls[i] = rng() % 3;
    noise[i] = rng() % 3;
  }
  const auto t = from_columns({cls, cls, noise}, cls);
  CHECK(cfs_merit(std::vector<std::size_t>{0}, t).merit == doctest::Approx(1.0));
  CHECK(cfs_merit(std::vector<std::size_t>{0, 1}, t).merit == doctest::Approx(1.0));

  const auto [ff, fc] = oracle_su(t);
  const double with_noise = cfs_merit(std::vector<std::size_t>{0, 2}, t).merit;
  CHECK(std::abs(with_noise - oracle::merit({0, 2}, ff, fc)) <= 1e-12);
  CHECK(with_noise == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.01));
  CHECK(with_noise < 1.0);

  CHECK(cfs_merit(std::vector<std::string>{"A0", "A2"}, t).merit == with_noise);
}

TEST_CASE("empty subsets and missing classes are rejected") {
  std::mt19937_64 rng(2);
  const auto t = fixture::random_nominal(rng, 3, 30);
  CHECK_THROWS_AS(cfs_merit(std::vector<std::size_t>{}, t), EmptySubset);
  const auto inputs_only = t.select_columns(t.input_columns());
  CHECK_THROWS_AS(cfs_merit(std::vector<std::size_t>{0}, inputs_only), SchemaMismatch);
  CHECK(subset_merit(std::vector<std::size_t>{}, compute_su_matrix(t)) == 0.0);
}

TEST_CASE("best-first search against the exhaustive optimum") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 60; ++trial) {
    const auto t = fixture::random_nominal(rng, 2 + trial % 9, 40 + rng() % 80);
    const auto [ff, fc] = oracle_su(t);
    const double optimum = oracle::exhaustive_best_merit(ff, fc);
    const auto su = compute_su_matrix(t);
    const auto best = best_first_search(su);
    CHECK(best.merit <= optimum + 1e-12);
    CHECK(std::abs(best.merit - oracle::merit(best.subset, ff, fc)) <= 1e-12);
    // With no stall limit the search visits every subset reachable from the
    // empty set, so it must land on the optimum.
    const auto patient = best_first_search(su, BestFirstOptions{1000});
    CHECK(std::abs(patient.merit - optimum) <= 1e-9);
  }
}

TEST_CASE("the single informative attribute is selected") {
  std::mt19937_64 rng(9);
  const std::size_t n = 500;
  std::vector<std::vector<std::size_t>> cols(5, std::vector<std::size_t>(n));
  std::vector<std::size_t> cls(n);
  for (std::size_t i = 0; i < n; ++i) {
    cls[i] = rng() % 3;
    for (auto& c : cols) c[i] = rng() % 3;
    cols[3][i] = cls[i];
  }
  CHECK(select_best_attributes(from_columns(cols, cls)) == std::vector<std::string>{"A3"});
}

TEST_CASE("selection ignores label names and keeps original order") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = fixture::random_nominal(rng, 6, 80);
    auto specs = t.specs();
    for (auto& s : specs)
      for (auto& l : s.labels) l = "x" + l;
    const DataTable renamed(specs, t.rows());
    const auto names = select_best_attributes(t);
    CHECK(select_best_attributes(renamed) == names);
    std::vector<std::size_t> pos;
    for (const auto& n : names) pos.push_back(t.require_column(n));
    CHECK(std::is_sorted(pos.begin(), pos.end()));
  }
}

TEST_CASE("duplicating selected features never raises merit") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const auto t = fixture::random_nominal(rng, 4, 60);
    auto specs = t.specs();
    for (std::size_t a = 0; a < 4; ++a)
      specs.insert(specs.end() - 1, AttributeSpec::nominal("copy" + std::to_string(a), fixture::levels()));
    std::vector<Row> rows;
    for (auto row : t.rows()) {
      for (std::size_t a = 0; a < 4; ++a) row.insert(row.end() - 1, row[a]);
      rows.push_back(row);
    }
    const DataTable dup(specs, rows);

    // A lone feature and its copy score the same as the feature.
    const std::size_t picked = rng() % 4;
    const double alone = cfs_merit(std::vector<std::size_t>{picked}, dup).merit;
    CHECK(cfs_merit(std::vector<std::size_t>{picked, picked + 4}, dup).merit <= alone + 1e-12);

    // Copying every member leaves merit unchanged.
    std::vector<std::size_t> subset{picked};
    for (std::size_t a = 0; a < 4; ++a)
      if (a != picked && rng() % 2) subset.push_back(a);
    const double before = cfs_merit(subset, dup).merit;
    auto doubled = subset;
    for (auto a : subset) doubled.push_back(a + 4);
    CHECK(cfs_merit(doubled, dup).merit <= before + 1e-12);
  }
}

TEST_CASE("copying one strong member of a mixed subset can raise merit") {
  // r_cf = (0.5, 0.01), no redundancy: {p, q} scores 0.3606; adding a copy
  // of p scores 1.01 / sqrt(5) = 0.4517.
  const std::vector<std::vector<double>> ff{{1, 0, 1}, {0, 1, 0}, {1, 0, 1}};
  const std::vector<double> fc{0.5, 0.01, 0.5};
  SuMatrix su(3);
  for (std::size_t i = 0; i < 3; ++i) {
    su.set_fc(i, fc[i]);
    for (std::size_t j = 0; j < 3; ++j) su.set_ff(i, j, ff[i][j]);
  }
  const double pair = subset_merit(std::vector<std::size_t>{0, 1}, su);
  const double with_copy = subset_merit(std::vector<std::size_t>{0, 1, 2}, su);
  CHECK(pair == doctest::Approx(oracle::merit({0, 1}, ff, fc)));
  CHECK(with_copy == doctest::Approx(1.01 / std::sqrt(5.0)));
  CHECK(with_copy > pair);
}

TEST_CASE("numeric columns are coded by MDL cuts") {
  std::vector<Value> col;
  std::vector<std::size_t> cls;
  for (int i = 0; i < 60; ++i) {
    col.push_back(Value::numeric(i));
    cls.push_back(i < 30 ? 0 : 1);
  }
  const auto cuts = mdl_cut_points(col, cls);
  REQUIRE(cuts.size() == 1);
  CHECK(cuts[0] == doctest::Approx(29.5));
  const auto codes = encode_for_su(AttributeSpec::numeric("x"), col, cls);
  CHECK(symmetrical_uncertainty(codes, cls) == doctest::Approx(1.0));
}

TEST_CASE("reduce_to keeps id, named inputs and class") {
  std::vector<AttributeSpec> specs{AttributeSpec::id(), AttributeSpec::numeric("a"), AttributeSpec::numeric("b"),
                                   fixture::status()};
  const DataTable t(specs, {{Value::numeric(4), Value::numeric(1), Value::numeric(2), Value::nominal(0)}});
  const std::vector<std::string> keep{"b"};
  const auto r = reduce_to(t, keep);
  CHECK(r.num_columns() == 3);
  CHECK(r.specs()[1].name == "b");
  CHECK(r.at(0, 1) == Value::numeric(2));
  CHECK(r.id_of(0) == 4);
}

TEST_CASE("serial and parallel SU matrices agree") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto t = fixture::random_nominal(rng, 10, 200);
    CHECK(compute_su_matrix(t, Execution::Serial) == compute_su_matrix(t, Execution::Parallel));
  }
}

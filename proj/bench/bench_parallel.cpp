// Serial reference against the OpenMP path for the two parallel kernels.

#include <random>

#include <benchmark/benchmark.h>

#include "fusemine/evaluation.hpp"
#include "fusemine/feature_select.hpp"
#include "fusemine/synthgen.hpp"

using namespace fusemine;

namespace {

// Numeric inputs, a third of them tied to the class.
DataTable wide_table(std::size_t attrs, std::size_t rows) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<AttributeSpec> specs;
  for (std::size_t a = 0; a < attrs; ++a) specs.push_back(AttributeSpec::numeric("x" + std::to_string(a)));
  specs.push_back(status_spec());
  std::vector<Row> data;
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t cls = rng() % 3;
    Row row;
    for (std::size_t a = 0; a < attrs; ++a)
      row.push_back(Value::numeric(noise(rng) + (a % 3 == 0 ? static_cast<double>(cls) : 0.0)));
    row.push_back(Value::nominal(cls));
    data.push_back(row);
  }
  return DataTable(specs, data);
}

void su_matrix(benchmark::State& state, Execution exec) {
  const auto t = wide_table(static_cast<std::size_t>(state.range(0)), 1000);
  for (auto _ : state) benchmark::DoNotOptimize(compute_su_matrix(t, exec));
  state.counters["threads"] = exec == Execution::Parallel ? max_threads() : 1;
}

void grid(benchmark::State& state, Execution exec) {
  const auto data = ExperimentData::from_raw(generate(CohortSpec{}.scaled(static_cast<std::size_t>(state.range(0)))).raw);
  GridOptions opts;
  opts.exec = exec;
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment_grid(data, opts));
  state.counters["threads"] = exec == Execution::Parallel ? max_threads() : 1;
}

}  // namespace

BENCHMARK_CAPTURE(su_matrix, serial, Execution::Serial)->Arg(20)->Arg(60)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(su_matrix, parallel, Execution::Parallel)->Arg(20)->Arg(60)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(grid, serial, Execution::Serial)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(grid, parallel, Execution::Parallel)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

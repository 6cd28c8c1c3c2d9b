#include <benchmark/benchmark.h>

#include <map>
#include <sstream>

#include "bskm/bskm.hpp"

using namespace bskm;

namespace {

const LinearSystem& gaussian(Index m, Index n) {
  static std::map<std::pair<Index, Index>, LinearSystem> cache;
  auto it = cache.find({m, n});
  if (it == cache.end()) {
    LinearSystem sys = generate_gaussian(m, n, 1);
    prepare_reference(sys);
    it = cache.emplace(std::pair{m, n}, std::move(sys)).first;
  }
  return it->second;
}

SolverConfig config_for(Method method, Index beta) {
  SolverConfig cfg;
  cfg.method = method;
  cfg.beta = beta;
  cfg.eta = beta;
  cfg.beta_j = 1;
  cfg.history_stride = cfg.max_iters;
  return cfg;
}

// One step from a fixed random iterate; the state is rebuilt outside the timer.
void step_cost(benchmark::State& st, Method method) {
  const LinearSystem& sys = gaussian(5000, 500);
  const SolverConfig cfg = config_for(method, st.range(0));
  IterateState state(sys.A, sys.b, cfg);
  for (auto _ : st) {
    st.PauseTiming();
    state.x.setZero();
    state.reset_residual(sys.A, sys.b);
    st.ResumeTiming();
    benchmark::DoNotOptimize(step(state, sys.A, sys.b, cfg));
  }
}

void BM_StepSkm(benchmark::State& st) { step_cost(st, Method::skm); }
void BM_StepBskm1(benchmark::State& st) { step_cost(st, Method::bskm1); }
void BM_StepBskm2(benchmark::State& st) { step_cost(st, Method::bskm2); }
void BM_StepBskm2Pf(benchmark::State& st) { step_cost(st, Method::bskm2_pf); }

void BM_Solve(benchmark::State& st, Method method) {
  const LinearSystem& sys = gaussian(5000, 500);
  const SolverConfig cfg = config_for(method, st.range(0));
  long iterations = 0;
  for (auto _ : st) {
    const SolveReport rep = solve(sys, cfg);
    iterations = rep.iterations;
    benchmark::DoNotOptimize(rep.x.data());
  }
  st.counters["iterations"] = static_cast<double>(iterations);
}

void BM_SolveSkm(benchmark::State& st) { BM_Solve(st, Method::skm); }
void BM_SolveBskm1(benchmark::State& st) { BM_Solve(st, Method::bskm1); }
void BM_SolveBskm2(benchmark::State& st) { BM_Solve(st, Method::bskm2); }

void BM_BlockProjection(benchmark::State& st) {
  const LinearSystem& sys = gaussian(5000, 500);
  IndexSet rows(static_cast<std::size_t>(st.range(0)));
  for (Index i = 0; i < st.range(0); ++i) rows[static_cast<std::size_t>(i)] = 7 * i;
  Vector x = Vector::Zero(500);
  for (auto _ : st) {
    x.setZero();
    project_onto_block(sys.A, sys.b, x, rows);
    benchmark::DoNotOptimize(x.data());
  }
}

void BM_MatrixMarketRoundTrip(benchmark::State& st) {
  const LinearSystem& sys = gaussian(2000, 200);
  for (auto _ : st) {
    std::stringstream io;
    write_matrix_market(sys.A, io);
    benchmark::DoNotOptimize(parse_matrix_market(io));
  }
}

}  // namespace

BENCHMARK(BM_StepSkm)->Arg(10)->Arg(100)->Arg(500)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_StepBskm1)->Arg(10)->Arg(100)->Arg(500)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_StepBskm2)->Arg(10)->Arg(100)->Arg(500)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_StepBskm2Pf)->Arg(10)->Arg(100)->Arg(500)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SolveSkm)->Arg(50)->Arg(500)->Unit(benchmark::kMillisecond)->Iterations(3);
BENCHMARK(BM_SolveBskm1)->Arg(50)->Arg(500)->Unit(benchmark::kMillisecond)->Iterations(3);
BENCHMARK(BM_SolveBskm2)->Arg(50)->Arg(500)->Unit(benchmark::kMillisecond)->Iterations(3);
BENCHMARK(BM_BlockProjection)->Arg(1)->Arg(10)->Arg(100)->Arg(400)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_MatrixMarketRoundTrip)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

// Serial vs OpenMP: full reachability on corpus machines and boundary enumeration.

#include <benchmark/benchmark.h>

#include "sliced/checker.hpp"
#include "sliced/config.hpp"
#include "sliced/ingest.hpp"
#include "sliced/pipeline.hpp"
#include "sliced/reducer.hpp"

using namespace sliced;

namespace {

CompositeMachine corpus_machine(const std::string& name) {
  return build_machine(build_model(load_model(std::string(SLICED_SOURCE_DIR) + "/corpus/" + name + ".json"), {}),
                       {true, true, true});
}

void reachability(benchmark::State& state, const std::string& name, Backend backend) {
  CompositeMachine m = corpus_machine(name);
  Assertion a;
  a.formula = parse_expr("G(TRUE)");
  std::size_t states = 0;
  for (auto _ : state) {
    Verdict v = check_invariant(m, a, {50'000'000, backend, 20});
    states = v.stats.states;
    benchmark::DoNotOptimize(states);
  }
  state.counters["states"] = static_cast<double>(states);
}

void boundary(benchmark::State& state, Backend backend) {
  CompositeMachine m = corpus_machine("adapt-banks");
  MergeCandidate c = find_merge_candidates(m).at(0);
  CompositeMachine sub = subsystem_machine(m, c);
  Expr e = boundary_expr(c);
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_boundary(sub, e, backend));
}

}  // namespace

BENCHMARK_CAPTURE(reachability, banks_serial, std::string("adapt-banks"), Backend::Serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(reachability, banks_openmp, std::string("adapt-banks"), Backend::OpenMP)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(reachability, repair_serial, std::string("adapt-repair"), Backend::Serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(reachability, repair_openmp, std::string("adapt-repair"), Backend::OpenMP)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(boundary, serial, Backend::Serial)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(boundary, openmp, Backend::OpenMP)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();

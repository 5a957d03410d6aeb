#include <benchmark/benchmark.h>

#include "hetprice/revpref.hpp"
#include "hetprice/synth.hpp"

using namespace hetprice;

namespace {

std::vector<revpref::Observation> stream(std::size_t t_count) {
  synth::GeneratorSpec spec;
  spec.consumers = 1;
  spec.observations = t_count;
  spec.goods = 4;
  return revpref::observations_at_pbar(synth::generate_panel(spec), 0);
}

void BM_CheckGarp(benchmark::State& state) {
  auto obs = stream(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(revpref::check_garp(obs));
}
BENCHMARK(BM_CheckGarp)->RangeMultiplier(2)->Range(4, 64);

void BM_AfriatConstruct(benchmark::State& state) {
  auto obs = stream(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(revpref::afriat_construct(obs));
}
BENCHMARK(BM_AfriatConstruct)->RangeMultiplier(2)->Range(4, 32);

}  // namespace

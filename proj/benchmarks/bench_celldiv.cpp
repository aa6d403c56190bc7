#include <benchmark/benchmark.h>

#include <numbers>
#include <vector>

#include "celldiv/engine.hpp"
#include "celldiv/errors.hpp"
#include "celldiv/geometry.hpp"
#include "celldiv/measures.hpp"
#include "celldiv/rng.hpp"

namespace {

using namespace celldiv;

MeasurePtr isotropic() { return make_measure(1.0, DirectionalDistribution::isotropic()); }

void BM_SplitRegularPolygon(benchmark::State& state) {
  const Polygon cell = Polygon::regular({0.3, -0.2}, 1.0, static_cast<int>(state.range(0)));
  Rng rng(1);
  std::vector<Hyperplane> lines;
  for (int i = 0; i < 1024; ++i) lines.push_back(sample_hitting(*isotropic(), cell, rng));
  std::size_t k = 0;
  for (auto _ : state) {
    try {
      benchmark::DoNotOptimize(split(cell, lines[k++ & 1023]));
    } catch (const DegenerateSplit&) {
    }
  }
}
BENCHMARK(BM_SplitRegularPolygon)->Arg(4)->Arg(8)->Arg(32);

void BM_SampleHitting(benchmark::State& state) {
  const MeasurePtr m = state.range(0) == 0
                           ? isotropic()
                           : make_measure(1.0, DirectionalDistribution::atoms({{0.0, 0.5}, {1.2, 0.5}}));
  const Polygon cell = Polygon::regular({0.0, 0.0}, 1.0, 7);
  Rng rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(sample_hitting(*m, cell, rng));
}
BENCHMARK(BM_SampleHitting)->Arg(0)->Arg(1);

void BM_StitRun(benchmark::State& state) {
  const RulePair rules = make_stit(isotropic());
  const Polygon W = Polygon::square(3.0);
  const double t = static_cast<double>(state.range(0)) / 2.0;
  std::uint64_t seed = 0;
  std::size_t events = 0;
  for (auto _ : state) {
    ProcessState s = new_process(W, rules, seed++);
    s.advance(t);
    events += s.events();
    benchmark::DoNotOptimize(s.cell_count());
  }
  state.counters["divisions"] = benchmark::Counter(static_cast<double>(events), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_StitRun)->Arg(3)->Arg(6)->Unit(benchmark::kMicrosecond);

void BM_Crop(benchmark::State& state) {
  ProcessState s = new_process(Polygon::square(3.0), make_stit(isotropic()), 4);
  s.advance(static_cast<double>(state.range(0)));
  const Polygon V = Polygon::square(1.0, {1.0, 1.0});
  for (auto _ : state) benchmark::DoNotOptimize(crop(s, V));
  state.counters["segments"] = static_cast<double>(s.segments().size());
}
BENCHMARK(BM_Crop)->Arg(2)->Arg(8)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();

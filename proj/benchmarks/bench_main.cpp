#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "ctmcfit/estimation.hpp"
#include "ctmcfit/forward_backward.hpp"
#include "ctmcfit/prism/builder.hpp"

using namespace ctmcfit;

namespace {

std::string tandem_source() {
  std::ifstream in(CTMCFIT_MODELS_DIR "/tandem.prism");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

prism::BuiltModel tandem(int c) {
  return prism::compile(tandem_source(), {{"c", static_cast<double>(c)}}, {"sc", "ph"},
                        {"mu1a", "mu1b", "mu2", "kappa"});
}

const Valuation kTruth{0.2, 1.8, 2.0, 4.0};

std::vector<TimedObservation> tandem_data(const prism::BuiltModel& m, std::size_t sequences) {
  SimulationLimits limits;
  limits.max_steps = 30;
  return simulate_many(instantiate(m.chain, kTruth), sequences, limits, 1);
}

void BM_Build(benchmark::State& state) {
  const auto source = tandem_source();
  const int c = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto m = prism::compile(source, {{"c", static_cast<double>(c)}}, {"sc", "ph"}, {"mu1a", "mu1b", "mu2", "kappa"});
    benchmark::DoNotOptimize(m.chain.transition_count());
  }
}
BENCHMARK(BM_Build)->Arg(4)->Arg(16)->Arg(64);

void BM_ForwardBackward(benchmark::State& state) {
  const auto m = tandem(static_cast<int>(state.range(0)));
  const auto chain = instantiate(m.chain, kTruth);
  const LabelIndex index(chain.labels());
  const auto seq = tandem_data(m, 1).front();
  for (auto _ : state) benchmark::DoNotOptimize(forward_backward(chain, index, seq).loglik);
}
BENCHMARK(BM_ForwardBackward)->Arg(4)->Arg(16)->Arg(64);

void BM_FitIteration(benchmark::State& state) {
  const auto m = tandem(static_cast<int>(state.range(0)));
  const Dataset data(tandem_data(m, 100));
  const Valuation start{1.0, 1.0, 1.0, 1.0};
  for (auto _ : state) {
    const auto acc = accumulate(m.chain, start, data);
    benchmark::DoNotOptimize(mm_step_timed(m.chain, start, acc, {}).valuation);
  }
}
BENCHMARK(BM_FitIteration)->Arg(4)->Arg(16);

}  // namespace
BENCHMARK_MAIN();

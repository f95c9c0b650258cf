#include <benchmark/benchmark.h>

#include "cococat/convolution.hpp"
#include "cococat/mc_oracle.hpp"
#include "cococat/pricing.hpp"
#include "cococat/calibration.hpp"
#include "cococat/trigger.hpp"

using namespace cococat;

namespace {

const Intensity lam = Intensity::constant(1.4);
const SeverityDistribution region1 = SeverityDistribution::lognormal(-4.564, 1.813);
const SeverityDistribution region2 = SeverityDistribution::lognormal(-2.439, 1.183);
const SeverityDistribution total = SeverityDistribution::lognormal(-1.477, 0.902);

DependenceModel model(int kind) {
  switch (kind) {
    case 0: return {IlaStructure{lam, region1, region2}, {2, 2}};
    case 1: return {IlpStructure{{lam, region1}, {lam, region2}}, {2, 2}};
    case 2: return {PlaStructure{lam, total, ProportionDistribution::degenerate(0.38)}, {2, 2}};
    default: return {PlaStructure{lam, total, ProportionDistribution::beta(2.1531, 3.5135)}, {2, 2}};
  }
}

void BM_NfoldTable(benchmark::State& state) {
  ConvolutionOptions o;
  o.grid_points = static_cast<int>(state.range(0));
  for (auto _ : state) {
    NfoldTable t(total, 4.0, 40, o);
    benchmark::DoNotOptimize(t.cdf(10, 2.0));
  }
}
BENCHMARK(BM_NfoldTable)->Arg(1 << 12)->Arg(1 << 14)->Arg(1 << 16)->Unit(benchmark::kMillisecond);

void BM_TriggerLaw(benchmark::State& state) {
  const auto m = model(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    const auto law = trigger_law(m, 5.0);
    benchmark::DoNotOptimize(law.survival(5.0));
  }
}
BENCHMARK(BM_TriggerLaw)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

// ILA, ILP, cPLA, rPLA.
void BM_Price(benchmark::State& state) {
  const auto m = model(static_cast<int>(state.range(0)));
  const auto imp = impact_coefficients(0.02, m);
  BondCovenant bond;
  for (auto _ : state) benchmark::DoNotOptimize(price(bond, MarketParams{}, m, imp).total);
}
BENCHMARK(BM_Price)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

void BM_SimulatePrice(benchmark::State& state) {
  const auto m = model(0);
  const auto imp = impact_coefficients(0.02, m);
  SimulationConfig cfg;
  cfg.paths = static_cast<std::size_t>(state.range(0));
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_price(BondCovenant{}, MarketParams{}, m, imp, cfg).mean);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulatePrice)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_TriggerTimes(benchmark::State& state) {
  const auto m = model(3);
  SimulationConfig cfg;
  cfg.paths = 100000;
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_trigger_times(m, cfg, 5.0).size());
  state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_TriggerTimes)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

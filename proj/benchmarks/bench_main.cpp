#include <benchmark/benchmark.h>

#include "qct/dsp_chain.hpp"
#include "qct/model.hpp"
#include "qct/oracle.hpp"
#include "qct/selection.hpp"
#include "qct/stats.hpp"

namespace {

const qct::TwinPairParams kPair{7.0, 20.0, 1.0, 0.0};

qct::FourChannelCovariance twin_cov() {
  return qct::build_covariance(kPair, kPair, qct::MeasurementSetting::TwinBeams0deg);
}

void BM_SampleBatch(benchmark::State& state) {
  const auto cov = twin_cov();
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(qct::sample_batch(cov, n, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleBatch)->Arg(300000)->Unit(benchmark::kMillisecond);

void BM_Select(benchmark::State& state) {
  const auto batch = qct::sample_batch(twin_cov(), 300000, 1);
  const qct::SelectionConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(qct::select(batch, cfg));
  state.SetItemsProcessed(state.iterations() * 300000);
}
BENCHMARK(BM_Select)->Unit(benchmark::kMicrosecond);

void BM_Bootstrap(benchmark::State& state) {
  const auto batch = qct::sample_batch(twin_cov(), static_cast<std::size_t>(state.range(0)), 2);
  const std::vector<double> values(batch.channels[1].begin(), batch.channels[1].end());
  for (auto _ : state) benchmark::DoNotOptimize(qct::bootstrap_ci(values, 2.0, 1000, 0.68, 3));
}
BENCHMARK(BM_Bootstrap)->Arg(1000)->Arg(300000)->Unit(benchmark::kMillisecond);

// One acquire() block: 1024 output points, i.e. 256 000 wideband samples per channel.
void BM_Acquire(benchmark::State& state) {
  qct::SignalChainConfig cfg;
  cfg.record_points = 1024;
  const auto cov = twin_cov();
  for (auto _ : state) benchmark::DoNotOptimize(qct::acquire(cov, cfg, 4));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.synth_length()));
}
BENCHMARK(BM_Acquire)->Unit(benchmark::kMillisecond);

void BM_PredictTransfer(benchmark::State& state) {
  double di = 0.03;
  for (auto _ : state) {
    benchmark::DoNotOptimize(qct::predict_transfer(kPair, kPair, di));
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_PredictTransfer);

}  // namespace
BENCHMARK_MAIN();

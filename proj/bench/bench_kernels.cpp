// Serial reference vs OpenMP path for the hot kernels.
#include <benchmark/benchmark.h>

#include "echohide/attacks.hpp"
#include "echohide/cepstrum.hpp"
#include "echohide/dsp.hpp"
#include "echohide/echo.hpp"
#include "echohide/steganalysis.hpp"

using namespace echohide;

namespace {

const AudioSignal& stego() {
  static const AudioSignal s = [] {
    const auto x = synth_speech_like(20.0, 16000, 1);
    const FrameSpec fs{600};
    return embed_echo(x, random_bits(fs.frame_count(x.size()), 2), BasicKernel{0.3, 50}, BitDelays{}, fs);
  }();
  return s;
}

Exec exec_of(const benchmark::State& st) { return st.range(0) ? Exec::parallel : Exec::serial; }

void BM_ExtractEcho(benchmark::State& st) {
  const FrameSpec fs{600};
  const auto n = fs.frame_count(stego().size());
  for (auto _ : st)
    benchmark::DoNotOptimize(extract_echo(stego(), BitDelays{}, fs, n, CepstralMethod::proposed, {}, exec_of(st)));
}

void BM_Mfcc(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(mfcc_features(stego(), MfccConfig{}, exec_of(st)));
}

void BM_GmmFit(benchmark::State& st) {
  static const auto features = mfcc_features(stego(), MfccConfig{});
  GmmFitOptions opts{8, 1, 30, 0.0, exec_of(st)};
  for (auto _ : st) benchmark::DoNotOptimize(gmm_fit(features, opts));
}

void BM_LowPass(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(attack_lowpass(stego(), 4000.0, exec_of(st)));
}

}  // namespace

BENCHMARK(BM_ExtractEcho)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Mfcc)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GmmFit)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LowPass)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

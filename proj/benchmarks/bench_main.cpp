#include <benchmark/benchmark.h>

#include <random>

#include "pirlab/analysis.hpp"
#include "pirlab/nary_code.hpp"
#include "pirlab/netsim.hpp"

namespace {

using namespace pirlab;

void BM_NaryRetrieve(benchmark::State& state) {
  const auto N = static_cast<std::uint32_t>(state.range(0));
  const auto K = static_cast<std::uint32_t>(state.range(1));
  const auto code = nary::NaryCode::make(N, K, 256);
  std::mt19937_64 rng(1);
  const auto msgs = nary::random_messages(code.params(), rng);
  for (auto _ : state) {
    const auto key = code.sample_key(rng);
    benchmark::DoNotOptimize(code.retrieve(msgs, static_cast<std::uint32_t>(rng() % K), key));
  }
}
BENCHMARK(BM_NaryRetrieve)->Args({2, 2})->Args({3, 3})->Args({8, 8})->Args({16, 8});

void BM_VerifyCorrectness(benchmark::State& state) {
  const auto code = nary::NaryCode::make(static_cast<std::uint32_t>(state.range(0)),
                                         static_cast<std::uint32_t>(state.range(1)), 2)
                        .export_decomposable();
  for (auto _ : state) benchmark::DoNotOptimize(analysis::verify_correctness(code).passed);
}
BENCHMARK(BM_VerifyCorrectness)->Args({2, 3})->Args({3, 3})->Args({4, 3})->Unit(benchmark::kMillisecond);

void BM_JointPmfAnswers(benchmark::State& state) {
  const auto code = nary::NaryCode::make(3, 3, 2).export_decomposable();
  std::vector<analysis::Variable> vars;
  for (std::size_t n = 0; n < 3; ++n) vars.push_back(analysis::Variable::answer(n, 1));
  for (auto _ : state) benchmark::DoNotOptimize(analysis::joint_pmf(code, vars).support_size());
}
BENCHMARK(BM_JointPmfAnswers);

void BM_FrameRoundTrip(benchmark::State& state) {
  net::Frame f{net::FrameKind::kAnswer, std::vector<std::uint8_t>(static_cast<std::size_t>(state.range(0)), 7)};
  for (auto _ : state) benchmark::DoNotOptimize(net::decode_frame(net::encode_frame(f)));
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FrameRoundTrip)->Arg(16)->Arg(4096);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "disinr/ops.hpp"
#include "disinr/rng.hpp"
#include "disinr/tape.hpp"

using namespace disinr;

namespace {

Tensor randn(Shape shape, Rng& rng) {
  Tensor t(std::move(shape));
  for (auto& v : t.data_mut()) v = static_cast<real>(rng.gaussian());
  return t;
}

void BM_matmul_forward(benchmark::State& state) {
  const std::int64_t n = state.range(0);
  Rng rng(1);
  Tensor a = randn({n, 128}, rng);
  Tensor b = randn({128, 128}, rng);
  for (auto _ : state) {
    Tensor c = ops::matmul(a, b);
    benchmark::DoNotOptimize(c.data().data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_matmul_forward)->Arg(1024)->Arg(16384);

void BM_mlp_fwd_bwd(benchmark::State& state) {
  const std::int64_t n = state.range(0);
  Rng rng(2);
  Tensor x = randn({n, 32}, rng);
  Tensor w1 = randn({32, 128}, rng).set_requires_grad(true);
  Tensor w2 = randn({128, 1}, rng).set_requires_grad(true);
  Tensor target = randn({n, 1}, rng);
  for (auto _ : state) {
    w1.zero_grad();
    w2.zero_grad();
    Tape tape;
    Tape::Scope scope(tape);
    Tensor h = ops::relu(ops::matmul(x, w1));
    Tensor loss = ops::l1_loss(ops::matmul(h, w2), target);
    tape.backward(loss);
    benchmark::DoNotOptimize(w1.grad().data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_mlp_fwd_bwd)->Arg(4096);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "fairstream/harness.hpp"

using namespace fairstream;

namespace {

Instance make(const std::string& klass, Direction d, int n, int t, std::uint64_t seed = 1) {
  GenSpec g;
  g.klass = klass;
  g.direction = d;
  g.n = n;
  g.t = t;
  g.seed = seed;
  return generate(g);
}

Allocation round_robin(const Stream& s) {
  Allocation a = Allocation::empty(s);
  for (const auto& item : s.items) a = apply_decision(std::move(a), item, Decision::assign((item.id - 1) % s.n + 1));
  return a;
}

void BM_Rational(benchmark::State& state) {
  for (auto _ : state) {
    Rational acc;
    for (int k = 1; k <= 20; ++k) acc = (acc + Rational(1, k)) * Rational(k, k + 1);
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_Rational);

void BM_EF1(benchmark::State& state) {
  Instance inst = make("bivalued(1,5)", Direction::Goods, 4, static_cast<int>(state.range(0)));
  ValuationOracle o(inst.stream);
  Allocation a = round_robin(inst.stream);
  for (auto _ : state) benchmark::DoNotOptimize(ef1_ratio(a, o));
}
BENCHMARK(BM_EF1)->Arg(16)->Arg(64)->Arg(256);

void BM_MmsShareAdditive(benchmark::State& state) {
  Instance inst = make("trivalued(1,2,7)", Direction::Goods, 3, static_cast<int>(state.range(0)));
  ValuationOracle o(inst.stream);
  for (auto _ : state) benchmark::DoNotOptimize(mms_share(1, inst.stream.t(), 3, o));
}
BENCHMARK(BM_MmsShareAdditive)->Arg(8)->Arg(12);

void BM_MmsShareGeneral(benchmark::State& state) {
  Instance inst = make("monotone", Direction::Goods, 3, static_cast<int>(state.range(0)));
  ValuationOracle o(inst.stream);
  for (auto _ : state) benchmark::DoNotOptimize(mms_share(1, inst.stream.t(), 3, o));
}
BENCHMARK(BM_MmsShareGeneral)->Arg(8)->Arg(12);

void BM_MmsShareMatroid(benchmark::State& state) {
  Instance inst = make("partition-matroid", Direction::Goods, 3, static_cast<int>(state.range(0)));
  ValuationOracle o(inst.stream);
  for (auto _ : state) benchmark::DoNotOptimize(mms_share(1, inst.stream.t(), 3, o));
}
BENCHMARK(BM_MmsShareMatroid)->Arg(12)->Arg(64);

void BM_RunMarginalGreedy(benchmark::State& state) {
  Instance inst = make("partition-matroid", Direction::Goods, 3, static_cast<int>(state.range(0)));
  RunConfig cfg;
  cfg.algorithm = "marginal_greedy";
  for (auto _ : state) benchmark::DoNotOptimize(run(inst, cfg));
}
BENCHMARK(BM_RunMarginalGreedy)->Arg(8)->Arg(12);

void BM_RunBivaluedTwoChores(benchmark::State& state) {
  Instance inst = make("bivalued(1,5)", Direction::Chores, 2, static_cast<int>(state.range(0)));
  RunConfig cfg;
  cfg.algorithm = "bivalued_two_chores";
  for (auto _ : state) benchmark::DoNotOptimize(run(inst, cfg));
}
BENCHMARK(BM_RunBivaluedTwoChores)->Arg(12);

void BM_SolveGame(benchmark::State& state) {
  auto adv = builtin_adversary("bivalued_goods");
  GameQuery q;
  q.metric = Metric::MMS;
  for (auto _ : state) benchmark::DoNotOptimize(solve_game(*adv, q));
}
BENCHMARK(BM_SolveGame);

}  // namespace

BENCHMARK_MAIN();

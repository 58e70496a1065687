#include <benchmark/benchmark.h>

#include "dtl/finite_model.hpp"
#include "dtl/search.hpp"
#include "dtl/temporal.hpp"

using namespace dtl;

namespace {

const char* kFormula = "*[]p -> []*p";

PhiType type_with(const ClosurePtr& c, std::initializer_list<const char*> members) {
  std::vector<Formula> fs;
  for (const auto* m : members) fs.push_back(parse(m));
  return *complete_type(c, fs);
}

Quasimodel three_worlds() {
  const auto c = Closure::of(parse(kFormula));
  Quasimodel q;
  q.frame.closure = c;
  q.frame.types = {type_with(c, {"p", "[]p", "*[]p", "*p", "![]*p"}),
                   type_with(c, {"p", "[]p", "!*[]p", "!*p", "![]*p"}),
                   type_with(c, {"!p", "![]p", "!*[]p", "!*p", "![]*p"})};
  q.frame.R = {bit(0) | bit(1), bit(1), bit(2)};
  q.g = {bit(0), bit(1) | bit(2), bit(2)};
  return q;
}

void BM_Closure(benchmark::State& state) {
  const auto phi = parse("*(p -> X[]q) & []<>(r | *X!p)");
  for (auto _ : state) benchmark::DoNotOptimize(Closure::of(phi));
}
BENCHMARK(BM_Closure);

void BM_EnumerateTypes(benchmark::State& state) {
  const auto c = Closure::of(parse("*(p -> X[]q) & []<>(r | *X!p)"));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_types(c));
}
BENCHMARK(BM_EnumerateTypes);

void BM_ValidateThreeWorlds(benchmark::State& state) {
  const auto q = three_worlds();
  for (auto _ : state) benchmark::DoNotOptimize(validate_quasimodel(q));
}
BENCHMARK(BM_ValidateThreeWorlds);

void BM_TemporalSuccessor(benchmark::State& state) {
  const auto q = three_worlds();
  TypedFrame uv = q.frame;
  uv.types.pop_back();
  uv.R = {bit(0) | bit(1), bit(1)};
  const auto a = LocalFrame::make(uv, 0);
  for (auto _ : state) benchmark::DoNotOptimize(temporal_successor(a, a));
}
BENCHMARK(BM_TemporalSuccessor);

void BM_Embeds(benchmark::State& state) {
  const auto c = Closure::of(parse("p"));
  const auto p = type_with(c, {"p"});
  const auto n = static_cast<std::size_t>(state.range(0));
  TypedFrame f;
  f.closure = c;
  for (std::size_t w = 0; w < n; ++w) {
    f.types.push_back(p);
    f.R.push_back(w == 0 ? (n == 64 ? ~Row{0} : (Row{1} << n) - 1) : bit(w));
  }
  const auto big = LocalFrame::make(f, 0);
  f.types.erase(f.types.begin() + static_cast<std::ptrdiff_t>(n / 2), f.types.end());
  f.R.resize(n / 2);
  f.R[0] = (Row{1} << (n / 2)) - 1;
  const auto small = LocalFrame::make(f, 0);
  for (auto _ : state) benchmark::DoNotOptimize(embeds(small, big));
}
BENCHMARK(BM_Embeds)->Arg(4)->Arg(8)->Arg(16);

void BM_CertifierThreeWorlds(benchmark::State& state) {
  const auto goal = parse("!(*[]p -> []*p)");
  for (auto _ : state) benchmark::DoNotOptimize(find_satisfying_quasimodel(goal, 3, Budget{}));
}
BENCHMARK(BM_CertifierThreeWorlds);

void BM_OracleThreeWorlds(benchmark::State& state) {
  const auto phi = parse(kFormula);
  for (auto _ : state) benchmark::DoNotOptimize(oracle_refute(phi, 3));
}
BENCHMARK(BM_OracleThreeWorlds);

void BM_PreordersUpToIso(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(preorders_up_to_iso(n));
}
BENCHMARK(BM_PreordersUpToIso)->DenseRange(2, 5);

void BM_DecideTautology(benchmark::State& state) {
  const auto phi = parse("(p -> q) & p -> q");
  for (auto _ : state) benchmark::DoNotOptimize(decide_validity(phi, 0, Budget{1'000'000}));
}
BENCHMARK(BM_DecideTautology);

}  // namespace

BENCHMARK_MAIN();

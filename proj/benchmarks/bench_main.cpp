#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "liftpdb/learn/synthetic.hpp"
#include "liftpdb/learn/train.hpp"
#include "liftpdb/lift/lift.hpp"
#include "liftpdb/logic/parser.hpp"
#include "liftpdb/pdb/database.hpp"
#include "liftpdb/tractor/query.hpp"

using namespace liftpdb;

namespace {

pdb::ProbDatabase chain_db(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  pdb::ProbDatabase db;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string a = "C" + std::to_string(i);
    db.insert(logic::ground_atom("T", {a}), u(rng));
    for (int k = 1; k <= 4; ++k) db.insert(logic::ground_atom("R", {a, "C" + std::to_string((i * 7 + k) % n)}), u(rng));
  }
  return db;
}

tractor::TractorModel random_model(std::size_t entities, std::size_t d) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::string> en;
  for (std::size_t e = 0; e < entities; ++e) en.push_back("E" + std::to_string(e));
  tractor::TractorModel m(en, {"r", "s", "t"}, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t e = 0; e < entities; ++e) m.set_E(i, e, u(rng));
    for (std::size_t r = 0; r < 3; ++r) m.set_T(i, r, u(rng));
  }
  return m;
}

}  // namespace

static void BM_CompileSafeUnion(benchmark::State& state) {
  auto q = logic::parse_ucq("EXISTS x,y. T(x) AND U(y) OR EXISTS u,v. T(u) AND S(u,v)");
  for (auto _ : state) benchmark::DoNotOptimize(lift::compile(q));
}
BENCHMARK(BM_CompileSafeUnion);

static void BM_LiftJoin(benchmark::State& state) {
  const auto db = chain_db(static_cast<std::size_t>(state.range(0)));
  const auto plan = lift::compile(logic::parse_ucq("EXISTS x,y. T(x) AND R(x,y)"));
  for (auto _ : state) benchmark::DoNotOptimize(lift::evaluate(plan, db));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LiftJoin)->RangeMultiplier(2)->Range(64, 1024)->Complexity();

static void BM_TractorQ4Rank(benchmark::State& state) {
  const auto m = random_model(static_cast<std::size_t>(state.range(0)), 16);
  const auto tpl = logic::parse_template("Q4(t) = EXISTS x,y. r(E0,x) AND s(x,y) AND t(y,t)");
  for (auto _ : state) benchmark::DoNotOptimize(tractor::answer_template(m, tpl, m.entities()));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_TractorQ4Rank)->RangeMultiplier(2)->Range(256, 2048)->Complexity()->Unit(benchmark::kMillisecond);

static void BM_TrainEpoch(benchmark::State& state) {
  learn::PlantedConfig pc;
  pc.entities = 200;
  pc.facts_per_relation = 300;
  const auto p = learn::planted_kb(pc);
  learn::TrainConfig cfg;
  cfg.d = static_cast<std::size_t>(state.range(0));
  cfg.epochs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(learn::train(p.kb, cfg));
}
BENCHMARK(BM_TrainEpoch)->Arg(16)->Arg(128)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

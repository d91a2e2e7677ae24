#include <benchmark/benchmark.h>

#include <string>

#include "prologi/engine.hpp"
#include "prologi/interaction.hpp"
#include "prologi/substitution.hpp"
#include "prologi/syntax.hpp"

namespace {

using namespace prologi;

// Chain of `n` edges plus transitive closure.
std::string chain_program(int n) {
  std::string text;
  for (int i = 0; i < n; ++i) text += "edge(n" + std::to_string(i) + ", n" + std::to_string(i + 1) + ").\n";
  text += "path(X, Y) :- edge(X, Y).\npath(X, Z) :- edge(X, Y), path(Y, Z).\n";
  return text;
}

std::string nested(int depth, const std::string& leaf) {
  std::string t = leaf;
  for (int i = 0; i < depth; ++i) t = "f(" + t + ", g(a, " + std::to_string(i) + "))";
  return t;
}

void BM_UnifyNested(benchmark::State& state) {
  const int depth = static_cast<int>(state.range(0));
  const Term a = parse_term(nested(depth, "X"));
  const Term b = parse_term(nested(depth, "h(b)"));
  for (auto _ : state) benchmark::DoNotOptimize(unify(a, b));
}
BENCHMARK(BM_UnifyNested)->Arg(8)->Arg(64)->Arg(512);

void BM_UnifyOccursCheck(benchmark::State& state) {
  const int depth = static_cast<int>(state.range(0));
  const Term a = parse_term(nested(depth, "X"));
  const Term b = parse_term(nested(depth, "h(Y)"));
  for (auto _ : state) benchmark::DoNotOptimize(unify(a, b, true));
}
BENCHMARK(BM_UnifyOccursCheck)->Arg(8)->Arg(64)->Arg(512);

void BM_ParseProgram(benchmark::State& state) {
  const std::string text = chain_program(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(parse_program(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseProgram)->Arg(10)->Arg(100)->Arg(1000);

void BM_SolveTransitiveClosure(benchmark::State& state) {
  const Program program = parse_program(chain_program(static_cast<int>(state.range(0))));
  const Goal goal = parse_goal("path(n0, Z)");
  for (auto _ : state) {
    ScriptedHandler handler({});
    benchmark::DoNotOptimize(solve_all(program, goal, handler));
  }
}
BENCHMARK(BM_SolveTransitiveClosure)->Arg(10)->Arg(50)->Arg(200);

void BM_SolveScriptedChoice(benchmark::State& state) {
  const Program program = parse_program("price(h,3).\nprice(f,4).\nprice(o,1).\nprice(c,2).\n");
  const Goal goal = parse_goal(
      "uchoose((price(h,W), price(o,Z)), (price(f,W), price(o,Z)), (price(h,W), price(c,Z)), "
      "(price(f,W), price(c,Z)))");
  for (auto _ : state) {
    auto handler = make_scripted_handler("choose 4\n");
    benchmark::DoNotOptimize(solve_all(program, goal, handler));
  }
}
BENCHMARK(BM_SolveScriptedChoice);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "cdr/geom2d.hpp"
#include "cdr/mapf.hpp"
#include "cdr/planners.hpp"
#include "cdr/scenarios.hpp"
#include "cdr/skeleton.hpp"

using namespace cdr;

static void BM_EdgeValid(benchmark::State& state) {
  const auto sc = bench::hallwayCross(2);
  const auto& p = sc.problem;
  for (auto _ : state)
    benchmark::DoNotOptimize(geom::edgeValid(p.starts, p.goals, p.robots, p.env, geom::kDefaultCollisionResolution));
}
BENCHMARK(BM_EdgeValid);

static void BM_MedialAxisSkeleton(benchmark::State& state) {
  const auto sc = bench::track(4);
  plan::PlannerParams params;
  params.gridResolution = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(plan::defaultSkeleton(sc.problem, params));
}
BENCHMARK(BM_MedialAxisSkeleton)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_Mapf(benchmark::State& state) {
  const auto sc = bench::track(static_cast<int>(state.range(1)));
  const auto skeleton = plan::defaultSkeleton(sc.problem, plan::PlannerParams{});
  mapf::Instance inst;
  inst.skeleton = &skeleton;
  for (std::size_t r = 0; r < sc.problem.robotCount(); ++r) {
    inst.widths.push_back(sc.problem.robots[r].width());
    inst.starts.push_back(skel::nearestSkeletonVertex(skeleton, sc.problem.starts[r]));
    inst.goals.push_back(skel::nearestSkeletonVertex(skeleton, sc.problem.goals[r]));
  }
  const auto level = state.range(0) ? mapf::HighLevel::CBS : mapf::HighLevel::PBS;
  for (auto _ : state) benchmark::DoNotOptimize(mapf::solve(level, inst));
}
BENCHMARK(BM_Mapf)->Args({0, 2})->Args({1, 2})->Args({0, 4})->Args({1, 4})->Unit(benchmark::kMicrosecond);

static void BM_NearestNeighbor(benchmark::State& state) {
  const auto sc = bench::openCross(2);
  plan::Rng rng(7);
  plan::Tree tree(sc.problem.starts);
  for (int i = 0; i < state.range(0); ++i) {
    plan::CompositeCfg q;
    for (std::size_t r = 0; r < 2; ++r) q.push_back(plan::sampleBox(sc.problem.env.bounds(), rng));
    tree.add(std::move(q), 0);
  }
  const plan::CompositeCfg query = sc.problem.goals;
  for (auto _ : state) benchmark::DoNotOptimize(plan::nearestNeighbor(tree, query));
}
BENCHMARK(BM_NearestNeighbor)->Arg(1000)->Arg(10000);

static void BM_Planner(benchmark::State& state) {
  const auto sc = bench::makeScenario(state.range(1) ? "hallway-cross" : "open-cross", 2);
  const auto kind = static_cast<plan::PlannerKind>(state.range(0));
  const auto skeleton = plan::defaultSkeleton(sc.problem, plan::PlannerParams{});
  plan::PlannerParams params;
  params.timeLimit = 60.0;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    params.seed = seed++;
    benchmark::DoNotOptimize(plan::runPlanner(kind, sc.problem, params, &skeleton));
  }
  state.SetLabel(plan::plannerName(kind));
}
BENCHMARK(BM_Planner)
    ->ArgsProduct({{static_cast<long>(plan::PlannerKind::CdrRrt), static_cast<long>(plan::PlannerKind::CompositeRrt),
                    static_cast<long>(plan::PlannerKind::CompositePrm)},
                   {0, 1}})
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

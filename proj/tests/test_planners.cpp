#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "cdr/planners.hpp"
#include "cdr/scenarios.hpp"

using namespace cdr;
using geom::CompositeCfg;
using geom::Vec2;

namespace {

CompositeCfg randomCfg(std::mt19937_64& rng, std::size_t robots, double lo = 0.0, double hi = 10.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  CompositeCfg q;
  for (std::size_t r = 0; r < robots; ++r) q.push_back({u(rng), u(rng)});
  return q;
}

bool pathValid(const Problem& problem, const std::vector<CompositeCfg>& path, double resolution) {
  if (path.empty() || path.front() != problem.starts || path.back() != problem.goals) return false;
  for (std::size_t k = 1; k < path.size(); ++k)
    if (!geom::edgeValid(path[k - 1], path[k], problem.robots, problem.env, resolution)) return false;
  return true;
}

Problem openProblem(CompositeCfg starts, CompositeCfg goals) {
  Problem p{"open", geom::Environment(geom::Box{{0, 0}, {10, 10}}, {}), {}, std::move(starts), std::move(goals)};
  for (std::size_t r = 0; r < p.starts.size(); ++r) p.robots.push_back({0.3, "r" + std::to_string(r)});
  return p;
}

}  // namespace

TEST_SUITE("planners") {
  TEST_CASE("nearest neighbor matches a linear scan") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
      plan::Tree tree(randomCfg(rng, 3));
      const int size = 1 + static_cast<int>(rng() % 200);
      for (int i = 1; i < size; ++i) tree.add(randomCfg(rng, 3), static_cast<int>(rng() % tree.size()));
      const auto q = randomCfg(rng, 3);
      int best = -1;
      double bestDist = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < tree.size(); ++i) {
        const double d = geom::compositeDistance(tree.node(static_cast<int>(i)).q, q);
        if (d < bestDist) {
          bestDist = d;
          best = static_cast<int>(i);
        }
      }
      CHECK(plan::nearestNeighbor(tree, q) == best);
    }
    plan::Tree ties(CompositeCfg{{1, 0}});
    ties.add(CompositeCfg{{-1, 0}}, 0);
    CHECK(plan::nearestNeighbor(ties, CompositeCfg{{0, 0}}) == 0);
  }

  TEST_CASE("extension is clamped to delta") {
    const geom::Environment env(geom::Box{{0, 0}, {10, 10}}, {geom::Polygon::rectangle(4, 0, 5, 10)});
    const std::vector<geom::RobotSpec> robots{{0.2, "a"}, {0.2, "b"}};
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 500; ++trial) {
      plan::Tree tree(randomCfg(rng, 2, 0.5, 3.5));
      const auto target = randomCfg(rng, 2, 0.5, 3.5);
      const double delta = 0.1 + 2.0 * plan::uniform01(rng);
      const auto added = plan::extend(tree, 0, target, delta, robots, env, 0.05);
      if (!added) {
        CHECK(tree.size() == 1);
        continue;
      }
      const auto& q = tree.node(*added).q;
      const double d = geom::compositeDistance(tree.node(0).q, q);
      CHECK(d <= delta * (1.0 + 1e-9));
      if (geom::compositeDistance(tree.node(0).q, target) <= delta) CHECK(q == target);
      CHECK(tree.node(*added).parent == 0);
      CHECK(tree.node(*added).cost == doctest::Approx(d));
    }
    plan::Tree blocked(CompositeCfg{{3, 5}, {1, 1}});
    CHECK_FALSE(plan::extend(blocked, 0, CompositeCfg{{6, 5}, {1, 1}}, 10.0, robots, env, 0.05));
    CHECK_FALSE(plan::extend(blocked, 0, CompositeCfg{{3, 5}, {1, 1}}, 10.0, robots, env, 0.05));
  }

  TEST_CASE("region and environment draws follow epsilon") {
    plan::Rng rng(7);
    int env = 0;
    const int draws = 20000;
    for (int i = 0; i < draws; ++i) env += plan::selectRegionOrEnv(0.05, rng) == plan::Bound::Environment;
    const double fraction = static_cast<double>(env) / draws;
    CHECK(fraction >= 0.04);
    CHECK(fraction <= 0.06);
    for (int i = 0; i < 100; ++i) CHECK(plan::selectRegionOrEnv(1.0, rng) == plan::Bound::Environment);
  }

  TEST_CASE("region samples stay within eta of the lockstep centers") {
    const geom::Box bounds{{0, 0}, {10, 10}};
    plan::CompositeRegion region;
    region.edge = 0;
    region.centers = {{{1, 1}, {2, 1}, {3, 1}}, {{9.9, 5}, {9.9, 6}, {9.9, 7}}};
    region.step = 1;
    region.eta = 0.5;
    plan::Rng rng(9);
    double sumX = 0.0;
    const int samples = 5000;
    for (int i = 0; i < samples; ++i) {
      const auto q = plan::sampleInRegion(region, bounds, rng);
      REQUIRE(q.size() == 2);
      CHECK(geom::distance(q[0], Vec2{2, 1}) <= 0.5 + 1e-12);
      CHECK(geom::distance(q[1], Vec2{9.9, 6}) <= 0.5 + 1e-12);
      CHECK(bounds.contains(q[1]));
      sumX += q[0].x;
    }
    CHECK(sumX / samples == doctest::Approx(2.0).epsilon(0.01));
  }

  TEST_CASE("region advancement matches a linear scan") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 4.0);
    for (int trial = 0; trial < 1000; ++trial) {
      plan::CompositeRegion region;
      region.edge = 0;
      region.eta = 0.3 + u(rng) / 4.0;
      const int steps = 2 + static_cast<int>(rng() % 8);
      region.centers.assign(2, {});
      for (int k = 0; k < steps; ++k) {
        region.centers[0].push_back({0.4 * k, 0.0});
        region.centers[1].push_back({u(rng), u(rng)});
      }
      region.step = static_cast<int>(rng() % steps);
      const int before = region.step;
      const CompositeCfg q{{u(rng), 0.2 * u(rng) - 0.4}, {u(rng), u(rng)}};

      auto inside = [&](int step) {
        for (std::size_t r = 0; r < 2; ++r)
          if (geom::distance(q[r], region.centers[r][static_cast<std::size_t>(step)]) > region.eta) return false;
        return true;
      };
      int expected = before;
      while (inside(expected) && expected + 1 < steps) ++expected;

      const auto result = plan::advanceCompositeRegion(region, q);
      CHECK(region.step == expected);
      CHECK(result.steps == expected - before);
      CHECK(result.atEnd == inside(expected));
      if (!result.atEnd) CHECK_FALSE(region.contains(q));
    }
  }

  TEST_CASE("makespan sums the largest displacement per segment") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<CompositeCfg> path;
      const int len = 1 + static_cast<int>(rng() % 10);
      for (int k = 0; k < len; ++k) path.push_back(randomCfg(rng, 3));
      double expected = 0.0;
      for (int k = 1; k < len; ++k) {
        double worst = 0.0;
        for (std::size_t r = 0; r < 3; ++r) {
          const double dx = path[k][r].x - path[k - 1][r].x;
          const double dy = path[k][r].y - path[k - 1][r].y;
          worst = std::max(worst, std::sqrt(dx * dx + dy * dy));
        }
        expected += worst;
      }
      CHECK(plan::pathMakespan(path) == doctest::Approx(expected));
      const auto timed = plan::timedPaths(path);
      REQUIRE(timed.size() == 3);
      CHECK(timed[0].back().first == doctest::Approx(expected));
      for (const auto& robot : timed) CHECK(robot.size() == path.size());
    }
    CHECK(plan::pathMakespan(std::vector<CompositeCfg>{}) == 0.0);
  }

  TEST_CASE("parameter overrides are validated") {
    plan::PlannerParams p;
    plan::applyOverrides(p, {{"tau", 10}, {"epsilon", 0.2}, {"mapf_cbs", 1}, {"regions_enabled", 0}});
    CHECK(p.tau == 10);
    CHECK(p.epsilon == 0.2);
    CHECK(p.mapfSolver == mapf::HighLevel::CBS);
    CHECK_FALSE(p.regionsEnabled);
    CHECK_THROWS_AS(plan::applyOverrides(p, {{"no_such_knob", 1}}), std::invalid_argument);
    CHECK_THROWS_AS(plan::applyOverrides(p, {{"epsilon", 0.0}}), std::invalid_argument);
    CHECK_THROWS_AS(plan::applyOverrides(p, {{"epsilon", 1.5}}), std::invalid_argument);
    CHECK_THROWS_AS(plan::applyOverrides(p, {{"tau", 0}}), std::invalid_argument);
    CHECK_THROWS_AS(plan::applyOverrides(p, {{"time_limit", -1}}), std::invalid_argument);

    const std::vector<geom::RobotSpec> robots{{0.2, "a"}, {0.5, "b"}};
    const auto resolved = plan::resolveParams(plan::PlannerParams{}, robots);
    CHECK(resolved.delta == doctest::Approx(0.8));
    CHECK(resolved.eta == doctest::Approx(1.0));
    CHECK(resolved.spacing == doctest::Approx(0.5));
    CHECK_THROWS_AS(plan::resolveParams(plan::PlannerParams{}, {}), std::invalid_argument);
    CHECK_THROWS_AS(plan::parsePlanner("rrt-star"), std::invalid_argument);
    for (auto k : plan::allPlanners()) CHECK(plan::parsePlanner(plan::plannerName(k)) == k);
  }

  TEST_CASE("a query already at its goal costs nothing") {
    const auto problem = openProblem({{2, 2}, {8, 8}}, {{2, 2}, {8, 8}});
    plan::PlannerParams p;
    p.timeLimit = 10.0;
    for (auto kind : plan::allPlanners()) {
      CAPTURE(plan::plannerName(kind));
      const auto r = plan::runPlanner(kind, problem, p);
      REQUIRE(r.success());
      CHECK(r.makespan == 0.0);
      CHECK(r.path.front() == problem.starts);
      CHECK(r.path.back() == problem.goals);
    }
  }

  TEST_CASE("invalid endpoints fail without searching") {
    const auto problem = openProblem({{2, 2}, {2.1, 2}}, {{8, 8}, {2, 8}});
    plan::PlannerParams p;
    p.timeLimit = 5.0;
    for (auto kind : plan::allPlanners()) {
      CAPTURE(plan::plannerName(kind));
      const auto r = plan::runPlanner(kind, problem, p);
      CHECK_FALSE(r.success());
      CHECK(r.path.empty());
    }
  }

  TEST_CASE("every planner solves an open crossing with a valid path") {
    const auto problem = openProblem({{1, 5}, {5, 1}}, {{9, 5}, {5, 9}});
    plan::PlannerParams p;
    p.timeLimit = 60.0;
    p.seed = 4;
    for (auto kind : plan::allPlanners()) {
      CAPTURE(plan::plannerName(kind));
      const auto r = plan::runPlanner(kind, problem, p);
      REQUIRE(r.success());
      CHECK(pathValid(problem, r.path, p.collisionResolution / 10.0));
      CHECK(r.makespan == doctest::Approx(plan::pathMakespan(r.path)));
      CHECK(r.makespan >= 8.0 - 1e-9);
    }
  }

  TEST_CASE("decoupled planning waits at a crossing") {
    const auto problem = openProblem({{1, 5}, {5, 1}}, {{9, 5}, {5, 9}});
    const std::vector<std::vector<Vec2>> paths{{{1, 5}, {3, 5}, {5, 5}, {7, 5}, {9, 5}},
                                               {{5, 1}, {5, 3}, {5, 5}, {5, 7}, {5, 9}}};
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(10);
    const auto schedule = plan::coordinatePaths(paths, problem.robots, problem.env, 0.01, deadline);
    REQUIRE(schedule);
    CHECK(pathValid(problem, *schedule, 0.005));
    bool waited = false;
    for (std::size_t k = 1; k < schedule->size(); ++k)
      for (std::size_t r = 0; r < 2; ++r) waited |= (*schedule)[k][r] == (*schedule)[k - 1][r];
    CHECK(waited);

    // A head-on swap along one line cannot be scheduled.
    const std::vector<std::vector<Vec2>> swap{{{1, 5}, {5, 5}, {9, 5}}, {{9, 5}, {5, 5}, {1, 5}}};
    CHECK_FALSE(plan::coordinatePaths(swap, problem.robots, problem.env, 0.01, deadline));
  }

  TEST_CASE("with regions off and epsilon one the guided planner samples like the composite baseline") {
    const auto scenario = bench::makeScenario("hallway-cross", 2);
    plan::PlannerParams p;
    p.maxIterations = 3000;
    p.timeLimit = 60.0;
    p.seed = 11;
    std::vector<CompositeCfg> baseline, guided;
    plan::PlannerHooks hb{[&](const CompositeCfg& q) { baseline.push_back(q); }, {}};
    plan::PlannerHooks hg{[&](const CompositeCfg& q) { guided.push_back(q); }, {}};
    plan::compositeRrt(scenario.problem, p, &hb);
    p.regionsEnabled = false;
    p.epsilon = 1.0;
    plan::cdrRrt(scenario.problem, p, nullptr, &hg);
    REQUIRE_FALSE(baseline.empty());
    CHECK(guided == baseline);
  }

  TEST_CASE("runs are deterministic for a fixed seed") {
    const auto scenario = bench::makeScenario("open-cross", 2);
    plan::PlannerParams p;
    p.timeLimit = 60.0;
    p.seed = 21;
    for (auto kind : {plan::PlannerKind::CdrRrt, plan::PlannerKind::DrRrt, plan::PlannerKind::CompositeRrt,
                      plan::PlannerKind::CompositePrm}) {
      CAPTURE(plan::plannerName(kind));
      const auto a = plan::runPlanner(kind, scenario.problem, p);
      const auto b = plan::runPlanner(kind, scenario.problem, p);
      CHECK(a.success() == b.success());
      CHECK(a.path == b.path);
      CHECK(a.telemetry.counters() == b.telemetry.counters());
    }
  }

  TEST_CASE("region failures beyond tau replace the region") {
    const auto scenario = bench::makeScenario("hallway-cross", 2);
    plan::PlannerParams p;
    p.tau = 3;
    p.maxIterations = 4000;
    p.timeLimit = 60.0;
    std::vector<plan::RegionEvent> events;
    plan::PlannerHooks hooks{{}, [&](const plan::RegionEvent& e) { events.push_back(e); }};
    const auto r = plan::cdrRrt(scenario.problem, p, nullptr, &hooks);
    CHECK(r.telemetry.maxRegionFailures <= static_cast<std::size_t>(p.tau) + 1);
    std::size_t over = 0;
    for (std::size_t i = 0; i < events.size(); ++i) {
      if (events[i].kind != plan::RegionEvent::Kind::Failure || events[i].failures <= p.tau) continue;
      ++over;
      REQUIRE(i + 1 < events.size());
      CHECK(events[i + 1].kind == plan::RegionEvent::Kind::Replaced);
      CHECK(events[i + 1].iteration == events[i].iteration);
    }
    CHECK(over == r.telemetry.regionReplacements);
  }
}

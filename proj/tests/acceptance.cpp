// Acceptance suite: one PASS/FAIL line per criterion.
//
//   cdr_acceptance            run every criterion
//   cdr_acceptance -c 2 -c 8  run a subset

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cdr/bench.hpp"
#include "cdr/composite_skeleton.hpp"
#include "cdr/mapf.hpp"
#include "cdr/planners.hpp"
#include "support.hpp"

using namespace cdr;
using geom::CompositeCfg;
using geom::Vec2;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

double median(std::vector<double> v) { return v.empty() ? NAN : bench::percentile(std::move(v), 0.5); }

// Independent path check: every robot pair and every robot against the
// environment, sampled along each segment with step `resolution` in the
// largest single-robot displacement.
bool sampledPathValid(const Problem& problem, const std::vector<CompositeCfg>& path, double resolution) {
  const std::size_t n = problem.robotCount();
  auto ok = [&](const CompositeCfg& q) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!problem.env.bounds().contains(q[i])) return false;
      if (!(problem.env.clearance(q[i]) > problem.robots[i].radius)) return false;
      for (std::size_t j = i + 1; j < n; ++j)
        if (!(geom::distance(q[i], q[j]) > problem.robots[i].radius + problem.robots[j].radius)) return false;
    }
    return true;
  };
  if (path.empty() || !ok(path.front())) return false;
  for (std::size_t k = 1; k < path.size(); ++k) {
    const double span = geom::maxRobotDisplacement(path[k - 1], path[k]);
    const int steps = std::max(1, static_cast<int>(std::ceil(span / resolution)));
    for (int s = 1; s <= steps; ++s) {
      const double t = static_cast<double>(s) / steps;
      CompositeCfg q(n);
      for (std::size_t r = 0; r < n; ++r) q[r] = path[k - 1][r] + (path[k][r] - path[k - 1][r]) * t;
      if (!ok(q)) return false;
    }
  }
  return true;
}

bench::ScenarioEntry entry(const std::string& name, int robots) { return bench::loadScenario({name, "", robots, {}}); }

Outcome collisionFreeness() {
  const std::vector<std::string> scenarios{"hallway-cross", "inlet", "open-cross"};
  const std::vector<plan::PlannerKind> planners{plan::PlannerKind::CdrRrt, plan::PlannerKind::DrRrt,
                                                plan::PlannerKind::CompositeRrt, plan::PlannerKind::CompositePrm};
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= 100; ++s) seeds.push_back(s);
  bench::BenchmarkOptions options;
  options.timeLimit = 60.0;
  options.keepPaths = true;
  const double fine = options.base.collisionResolution / 10.0;

  std::size_t runs = 0, successes = 0, violations = 0;
  for (const auto& name : scenarios) {
    const auto e = entry(name, 2);
    if (!e.scenario) return {false, name + ": " + e.error};
    const auto records = bench::runBenchmark({e}, planners, seeds, options);
    for (const auto& r : records) {
      ++runs;
      if (r.error.rfind("validation failed", 0) == 0) ++violations;
      if (!r.success) continue;
      ++successes;
      if (!sampledPathValid(e.scenario->problem, r.path, fine)) ++violations;
    }
  }
  return {violations == 0 && successes > 0,
          format("%zu runs, %zu successes, %zu violations at resolution %g", runs, successes, violations, fine)};
}

Outcome mapfOptimality() {
  std::mt19937 rng(20240601);
  int coSolved = 0, cbsMismatch = 0, pbsInvalid = 0, pbsBelow = 0, feasibilityMismatch = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = test::randomGraph(rng, 8);
    const int robots = std::uniform_int_distribution<int>(2, 3)(rng);
    mapf::Instance inst{&g, {}, {}, {}, nullptr};
    std::uniform_int_distribution<int> vert(0, static_cast<int>(g.vertexCount()) - 1);
    for (int r = 0; r < robots; ++r) {
      inst.widths.push_back(std::uniform_real_distribution<double>(0.3, 0.8)(rng));
      inst.starts.push_back(vert(rng));
      inst.goals.push_back(vert(rng));
    }
    const auto oracle = mapf::jointStateOracle(inst);
    const auto cbs = mapf::cbsSolve(inst);
    const auto pbs = mapf::pbsSolve(inst);
    if (oracle.has_value() != cbs.has_value()) ++feasibilityMismatch;
    if (oracle && cbs && oracle->makespan() != cbs->makespan()) ++cbsMismatch;
    if (pbs && mapf::findCapacityConflict(pbs->paths, g, inst.widths)) ++pbsInvalid;
    if (pbs && cbs) {
      ++coSolved;
      if (pbs->makespan() < cbs->makespan()) ++pbsBelow;
    }
  }
  return {cbsMismatch == 0 && feasibilityMismatch == 0 && pbsInvalid == 0 && pbsBelow == 0,
          format("100 instances, CBS makespan mismatches %d, feasibility mismatches %d, %d co-solved, "
                 "PBS conflicts %d, PBS below CBS %d",
                 cbsMismatch, feasibilityMismatch, coSolved, pbsInvalid, pbsBelow)};
}

Outcome regionMechanics() {
  std::size_t containment = 0, edgeBound = 0, chainBad = 0, advances = 0;
  for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
    std::mt19937 rng(static_cast<std::mt19937::result_type>(seed));
    const auto g = test::randomGraph(rng, 8);
    const int n = static_cast<int>(g.vertexCount());
    const int robots = 1 + static_cast<int>(rng() % 3);
    std::vector<double> widths;
    mapf::VertexTuple starts, goals;
    for (int r = 0; r < robots; ++r) {
      widths.push_back(std::uniform_real_distribution<double>(0.2, 0.6)(rng));
      starts.push_back(static_cast<int>(rng() % n));
      goals.push_back(static_cast<int>(rng() % n));
    }
    comp::GrowOptions opts;
    opts.maxGrowthFailures = static_cast<int>(rng() % 3);
    opts.spacing = std::uniform_real_distribution<double>(0.1, 0.8)(rng);
    comp::CompositeSkeleton s(g, widths, starts, goals, opts);
    comp::FailureSet fails;
    std::set<int> created{s.root()};
    int active = s.root();
    for (int step = 0; step < 30; ++step) {
      const auto grown = s.grow(active, fails);
      if (grown.status != comp::GrowResult::Status::Edge) break;
      const auto& e = s.edge(grown.edge);
      created.insert(e.target);
      if (static_cast<std::size_t>(grown.edge) >= s.telemetry().growCalls) ++edgeBound;

      // Advance a lockstep region with a sample near a random waypoint.
      auto region = plan::CompositeRegion::onEdge(e, std::uniform_real_distribution<double>(0.1, 0.6)(rng));
      region.step = static_cast<int>(rng() % static_cast<unsigned>(region.stepCount()));
      const auto k = rng() % static_cast<unsigned>(region.stepCount());
      std::normal_distribution<double> jitter(0.0, region.eta / 3);
      CompositeCfg q;
      for (int r = 0; r < robots; ++r) q.push_back(e.waypoints[static_cast<std::size_t>(r)][k] + Vec2{jitter(rng), jitter(rng)});
      const auto adv = plan::advanceCompositeRegion(region, q);
      advances += static_cast<std::size_t>(adv.steps);
      if (!adv.atEnd && region.contains(q)) ++containment;

      if (rng() % 3 == 0) {
        s.recordFailedEdge(grown.edge, fails);
        s.markFinished(grown.edge);
        active = e.source;
      } else {
        s.markFinished(grown.edge);
        active = e.target;
      }
      if (rng() % 2) s.gcUseless(active);
      const auto chain = s.predecessorChain(active);
      if (chain.back() != s.root() || chain.size() > created.size()) ++chainBad;
    }
  }

  // Tau-replacement through planner telemetry on narrow scenarios.
  std::size_t runs = 0, unreplaced = 0, overshoot = 0, replacements = 0;
  for (const char* name : {"hallway-cross", "inlet"}) {
    const auto scenario = bench::makeScenario(name, 2);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      plan::PlannerParams p;
      p.seed = seed;
      p.tau = 1 + static_cast<int>(seed % 5);
      p.maxIterations = 1500;
      p.timeLimit = 60.0;
      std::vector<plan::RegionEvent> events;
      plan::PlannerHooks hooks{{}, [&](const plan::RegionEvent& ev) { events.push_back(ev); }};
      const auto r = plan::cdrRrt(scenario.problem, p, nullptr, &hooks);
      ++runs;
      replacements += r.telemetry.regionReplacements;
      if (r.telemetry.maxRegionFailures > static_cast<std::size_t>(p.tau) + 1) ++overshoot;
      for (std::size_t i = 0; i < events.size(); ++i) {
        if (events[i].kind != plan::RegionEvent::Kind::Failure || events[i].failures <= p.tau) continue;
        if (i + 1 >= events.size() || events[i + 1].kind != plan::RegionEvent::Kind::Replaced) ++unreplaced;
      }
    }
  }
  const bool pass = containment == 0 && edgeBound == 0 && chainBad == 0 && unreplaced == 0 && overshoot == 0;
  return {pass, format("1000 fuzz iterations (%zu region advances): containment after advance %zu, edge bound "
                       "violations %zu, bad chains %zu; %zu planner runs, %zu replacements, unreplaced tau "
                       "failures %zu, counter overshoots %zu",
                       advances, containment, edgeBound, chainBad, runs, replacements, unreplaced, overshoot)};
}

Outcome epsilonReduction() {
  std::size_t compared = 0, mismatched = 0, samples = 0;
  for (const char* name : {"hallway-cross", "inlet", "open-cross", "track"}) {
    const auto scenario = bench::makeScenario(name, name == std::string("track") ? 4 : 2);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      plan::PlannerParams p;
      p.seed = seed;
      p.maxIterations = 2000;
      p.timeLimit = 120.0;
      std::vector<CompositeCfg> baseline, reduced;
      plan::PlannerHooks hb{[&](const CompositeCfg& q) { baseline.push_back(q); }, {}};
      plan::PlannerHooks hr{[&](const CompositeCfg& q) { reduced.push_back(q); }, {}};
      const auto a = plan::compositeRrt(scenario.problem, p, &hb);
      p.regionsEnabled = false;
      p.epsilon = 1.0;
      const auto b = plan::cdrRrt(scenario.problem, p, nullptr, &hr);
      ++compared;
      samples += baseline.size();
      if (baseline != reduced || a.path != b.path) ++mismatched;
    }
  }
  return {mismatched == 0, format("%zu seeded runs, %zu samples compared, %zu mismatched streams", compared, samples, mismatched)};
}

Outcome narrowPassage() {
  const auto e = entry("hallway-cross", 2);
  if (!e.scenario) return {false, e.error};
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= 20; ++s) seeds.push_back(s);
  bench::BenchmarkOptions options;
  options.timeLimit = 120.0;
  const auto records = bench::runBenchmark({e}, {plan::PlannerKind::CdrRrt, plan::PlannerKind::CompositeRrt}, seeds, options);
  std::vector<double> cdr, composite;
  std::size_t cdrSuccess = 0, compositeSuccess = 0;
  for (const auto& r : records) {
    if (!r.success) continue;
    if (r.planner == "cdr-rrt") {
      ++cdrSuccess;
      cdr.push_back(*r.makespan);
    } else {
      ++compositeSuccess;
      composite.push_back(*r.makespan);
    }
  }
  const double mc = median(cdr), mb = median(composite);
  const bool pass = cdrSuccess == seeds.size() && !composite.empty() && mc <= 0.9 * mb;
  return {pass, format("CDR-RRT %zu/20 solved, median makespan %.3f; Composite RRT %zu/20 solved, median makespan "
                       "%.3f; ratio %.3f (required <= 0.9)",
                       cdrSuccess, mc, compositeSuccess, mb, mc / mb)};
}

Outcome coordination() {
  const auto e = entry("track", 4);
  if (!e.scenario) return {false, e.error};
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= 10; ++s) seeds.push_back(s);
  bench::BenchmarkOptions options;
  options.timeLimit = 600.0;
  const auto records = bench::runBenchmark({e}, {plan::PlannerKind::CdrRrt, plan::PlannerKind::CompositeRrt}, seeds, options);
  std::size_t cdr = 0, composite = 0;
  for (const auto& r : records)
    if (r.success) ++(r.planner == "cdr-rrt" ? cdr : composite);
  const double rc = cdr / 10.0, rb = composite / 10.0;
  return {rc >= 0.7 && rc > rb,
          format("Track n=4: CDR-RRT success %.0f%%, Composite RRT success %.0f%% (required >= 70%% and greater)",
                 100 * rc, 100 * rb)};
}

// Points every `step` along a polyline, endpoints and corners included.
std::vector<Vec2> subdivide(const std::vector<Vec2>& path, double step) {
  std::vector<Vec2> out{path.front()};
  for (std::size_t k = 1; k < path.size(); ++k) {
    const int pieces = std::max(1, static_cast<int>(std::ceil(geom::distance(path[k - 1], path[k]) / step)));
    for (int j = 1; j <= pieces; ++j) out.push_back(path[k - 1] + (path[k] - path[k - 1]) * (double(j) / pieces));
  }
  return out;
}

Outcome decoupledFailure() {
  const auto scenario = bench::makeScenario("hallway-cross", 2);
  const auto& problem = scenario.problem;
  std::size_t solved = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    plan::PlannerParams p;
    p.seed = seed;
    p.timeLimit = 60.0;
    if (plan::decoupledPrm(problem, p).success()) ++solved;
  }

  // Exhaustive schedule grid over the seed-1 roadmap paths: every pair of
  // waypoint indices, reachable from (0, 0) by advancing either or both.
  plan::PlannerParams p;
  p.seed = 1;
  p.timeLimit = 60.0;
  const auto resolved = plan::resolveParams(p, problem.robots);
  const auto paths = plan::decoupledRoadmapPaths(problem, resolved);
  if (!paths) return {false, format("decoupled PRM solved %zu/10; no roadmap paths for the oracle", solved)};
  const auto a = subdivide((*paths)[0], resolved.spacing / 2);
  const auto b = subdivide((*paths)[1], resolved.spacing / 2);
  const std::size_t na = a.size(), nb = b.size();
  std::vector<std::vector<char>> reach(na, std::vector<char>(nb, 0));
  auto cfg = [&](std::size_t i, std::size_t j) { return CompositeCfg{a[i], b[j]}; };
  auto step = [&](std::size_t i0, std::size_t j0, std::size_t i, std::size_t j) {
    return geom::edgeValid(cfg(i0, j0), cfg(i, j), problem.robots, problem.env, resolved.collisionResolution);
  };
  std::size_t cells = 0;
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j) {
      ++cells;
      if (!geom::compositeValid(cfg(i, j), problem.robots, problem.env)) continue;
      if (i == 0 && j == 0) {
        reach[i][j] = 1;
        continue;
      }
      reach[i][j] = (i > 0 && reach[i - 1][j] && step(i - 1, j, i, j)) ||
                    (j > 0 && reach[i][j - 1] && step(i, j - 1, i, j)) ||
                    (i > 0 && j > 0 && reach[i - 1][j - 1] && step(i - 1, j - 1, i, j));
    }
  const bool oracleInfeasible = !reach[na - 1][nb - 1];
  return {solved == 0 && oracleInfeasible,
          format("decoupled PRM solved %zu/10 seeds; schedule grid %zux%zu (%zu cells) %s", solved, na, nb, cells,
                 oracleInfeasible ? "has no collision-free schedule" : "admits a schedule")};
}

Outcome capacitySemantics() {
  const auto g = test::makeGraph({{0, 0}, {1, 0}, {2, 0}}, {{0, 1, 1.0}, {1, 2, 1.0}});
  const auto wide = test::makeGraph({{0, 0}, {1, 0}, {2, 0}}, {{0, 1, 2.0}, {1, 2, 2.0}});
  const std::vector<double> widths{0.6, 0.6};
  const std::vector<mapf::SkeletonPath> together{{0, {0, 1, 2}}, {1, {0, 1, 2}}};
  const std::vector<mapf::SkeletonPath> opposite{{0, {0, 1}}, {1, {1, 0}}};
  const std::vector<mapf::SkeletonPath> staggered{{0, {0, 1, 2}}, {1, {0, 0, 1, 2}}};
  int failures = 0;
  const auto c = mapf::findCapacityConflict(together, g, widths);
  if (!c || c->time != 0 || c->edge != 0) ++failures;
  if (!mapf::findCapacityConflict(opposite, g, widths)) ++failures;
  if (mapf::findCapacityConflict(staggered, g, widths)) ++failures;
  if (mapf::findCapacityConflict(together, wide, widths)) ++failures;
  if (mapf::findCapacityConflict(together, g, std::vector<double>{0.5, 0.5})) ++failures;  // 1.0 is not > 1.0
  return {failures == 0, format("5 fixtures, %d wrong", failures)};
}

// Every line of the CSV with the time_s column removed.
std::vector<std::string> rowsWithoutTime(const std::vector<bench::RunRecord>& records) {
  std::ostringstream out;
  bench::writeCsv(out, records);
  std::vector<std::string> rows;
  std::istringstream in(out.str());
  for (std::string line; std::getline(in, line);) {
    std::size_t start = 0;
    for (int k = 0; k < 4; ++k) start = line.find(',', start) + 1;
    line.erase(start, line.find(',', start) - start);
    rows.push_back(line);
  }
  return rows;
}

Outcome determinism() {
  std::vector<bench::ScenarioEntry> entries{entry("hallway-cross", 2), entry("inlet", 2), entry("open-cross", 2)};
  bench::BenchmarkOptions options;
  options.timeLimit = 60.0;
  options.base.maxIterations = 20000;
  const auto planners = plan::allPlanners();
  const auto first = bench::runBenchmark(entries, planners, {1, 2}, options);
  options.workers = 1;
  const auto second = bench::runBenchmark(entries, planners, {1, 2}, options);
  const auto a = rowsWithoutTime(first);
  const auto b = rowsWithoutTime(second);
  std::size_t differing = 0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) differing += a[i] != b[i];
  // Only runs that end by reaching an iteration cap or a solution are reproducible.
  std::size_t timedOut = 0;
  for (const auto& r : first) timedOut += r.timeSeconds >= 0.99 * options.timeLimit;
  return {a.size() == b.size() && differing == 0 && timedOut == 0,
          format("%zu rows compared, %zu differ, %zu wall-clock timeouts", a.size() - 1, differing, timedOut)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{{1, "collision-freeness", collisionFreeness},
                                        {2, "MAPF optimality", mapfOptimality},
                                        {3, "region mechanics", regionMechanics},
                                        {4, "epsilon reduction", epsilonReduction},
                                        {5, "narrow-passage trend", narrowPassage},
                                        {6, "coordination trend", coordination},
                                        {7, "decoupled failure mode", decoupledFailure},
                                        {8, "capacity semantics", capacitySemantics},
                                        {9, "determinism", determinism}};

  CLI::App app{"Acceptance criteria"};
  std::vector<int> selected;
  app.add_option("-c,--criterion", selected, "Criterion number (repeatable); default all")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);

  int failed = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] criterion %d (%s): %s [%.1fs]\n", out.pass ? "PASS" : "FAIL", c.id, c.name, out.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !out.pass;
  }
  return failed == 0 ? 0 : 1;
}

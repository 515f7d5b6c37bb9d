#include <algorithm>
#include <chrono>
#include <set>
#include <stdexcept>

#include "cdr/planners.hpp"

namespace cdr::plan {

namespace {

using Clock = std::chrono::steady_clock;

// State shared by the RRT variants: tree, rng, limits and goal handling.
class RrtRun {
 public:
  enum class Draw { Goal, Environment, Region };

  RrtRun(const Problem& problem, const PlannerParams& params, const PlannerHooks* hooks)
      : problem_(problem),
        params_(resolveParams(params, problem.robots)),
        rng_(params_.seed),
        tree_(problem.starts),
        hooks_(hooks),
        started_(Clock::now()),
        deadline_(started_ + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(params_.timeLimit))) {}

  const PlannerParams& params() const { return params_; }
  const Problem& problem() const { return problem_; }
  Rng& rng() { return rng_; }
  Tree& tree() { return tree_; }
  Telemetry& telemetry() { return telemetry_; }
  std::size_t iteration() const { return telemetry_.iterations; }

  /// Result for inputs that need no search, if any.
  std::optional<PlanResult> precheck() {
    if (!problem_.wellFormed()) return finish(PlanStatus::Failed, -1, "start or goal configuration invalid");
    if (const auto goal = connectGoal(0)) return finish(PlanStatus::Solved, *goal);
    return std::nullopt;
  }

  /// Result once the iteration budget or deadline is exhausted.
  std::optional<PlanResult> checkLimits() {
    if (params_.maxIterations > 0 && telemetry_.iterations >= params_.maxIterations)
      return finish(PlanStatus::IterationLimit, -1, "iteration limit reached");
    if (Clock::now() >= deadline_) return finish(PlanStatus::Timeout, -1, "time limit reached");
    ++telemetry_.iterations;
    return std::nullopt;
  }

  bool pastDeadline() const { return Clock::now() >= deadline_; }

  /// Goal-bias draw followed by the region/environment draw.
  Draw draw(double epsilon, bool regionAvailable) {
    if (uniform01(rng_) < params_.goalBias) {
      ++telemetry_.goalSamples;
      return Draw::Goal;
    }
    const bool env = selectRegionOrEnv(epsilon, rng_) == Bound::Environment;
    if (env || !regionAvailable) {
      ++telemetry_.envSamples;
      return Draw::Environment;
    }
    ++telemetry_.regionSamples;
    return Draw::Region;
  }

  CompositeCfg sampleEnvironment() {
    CompositeCfg q;
    for (std::size_t r = 0; r < problem_.robotCount(); ++r) q.push_back(sampleBox(problem_.env.bounds(), rng_));
    return q;
  }

  void emit(const CompositeCfg& q) const {
    if (hooks_ && hooks_->onSample) hooks_->onSample(q);
  }

  void event(RegionEvent::Kind kind, int edge, int failures) const {
    if (hooks_ && hooks_->onRegionEvent) hooks_->onRegionEvent({kind, edge, failures, telemetry_.iterations});
  }

  std::optional<int> extendToward(const CompositeCfg& q) {
    const int near = nearestNeighbor(tree_, q);
    auto added = extend(tree_, near, q, params_.delta, problem_.robots, problem_.env, params_.collisionResolution);
    if (!added) ++telemetry_.extendFailures;
    return added;
  }

  /// Connects a node that lies within goal tolerance to the exact goal.
  std::optional<int> connectGoal(int node) {
    const auto& q = tree_.node(node).q;
    if (!withinTolerance(q)) return std::nullopt;
    if (q == problem_.goals) return node;
    if (!geom::edgeValid(q, problem_.goals, problem_.robots, problem_.env, params_.collisionResolution))
      return std::nullopt;
    return tree_.add(problem_.goals, node);
  }

  PlanResult finish(PlanStatus status, int goalNode, std::string message = {}) {
    PlanResult out;
    out.status = status;
    out.message = std::move(message);
    if (goalNode >= 0) {
      out.path = tree_.pathTo(goalNode);
      out.makespan = pathMakespan(out.path);
    }
    telemetry_.treeNodes = tree_.size();
    out.telemetry = telemetry_;
    out.planningTime = std::chrono::duration<double>(Clock::now() - started_).count();
    return out;
  }

 private:
  bool withinTolerance(const CompositeCfg& q) const {
    for (std::size_t r = 0; r < q.size(); ++r)
      if (geom::distance(q[r], problem_.goals[r]) > params_.goalTolerance * problem_.robots[r].radius) return false;
    return true;
  }

  const Problem& problem_;
  PlannerParams params_;
  Rng rng_;
  Tree tree_;
  Telemetry telemetry_;
  const PlannerHooks* hooks_;
  Clock::time_point started_;
  Clock::time_point deadline_;
};

// One robot's DR-RRT state: query skeleton, explored vertices and regions.
struct RobotRegions {
  skel::QuerySkeleton query;
  std::set<int> explored;
  std::vector<Region> regions;
  int selected = -1;
};

void spawnRegions(RobotRegions& rr, const skel::WorkspaceSkeleton& skel, int v, Telemetry& tel) {
  rr.explored.insert(v);
  for (const auto& de : rr.query.outgoing(v)) {
    Region r;
    r.edge = de;
    r.centers = skel.edge(de.edge).intermediates;
    if (skel.edge(de.edge).source != de.from) std::reverse(r.centers.begin(), r.centers.end());
    rr.regions.push_back(std::move(r));
    ++tel.regionsCreated;
  }
}

std::vector<double> robotWidths(const Problem& problem) {
  std::vector<double> w;
  for (const auto& r : problem.robots) w.push_back(r.width());
  return w;
}

}  // namespace

PlanResult compositeRrt(const Problem& problem, const PlannerParams& params, const PlannerHooks* hooks) {
  RrtRun run(problem, params, hooks);
  if (auto done = run.precheck()) return *done;
  while (true) {
    if (auto done = run.checkLimits()) return *done;
    const auto d = run.draw(run.params().epsilon, false);
    const CompositeCfg q = d == RrtRun::Draw::Goal ? problem.goals : run.sampleEnvironment();
    run.emit(q);
    if (const auto added = run.extendToward(q))
      if (const auto goal = run.connectGoal(*added)) return run.finish(PlanStatus::Solved, *goal);
  }
}

PlanResult cdrRrt(const Problem& problem, const PlannerParams& params, const skel::WorkspaceSkeleton* skeleton,
                  const PlannerHooks* hooks) {
  RrtRun run(problem, params, hooks);
  if (auto done = run.precheck()) return *done;
  const auto& p = run.params();
  auto& tel = run.telemetry();

  std::optional<skel::WorkspaceSkeleton> built;
  std::optional<comp::CompositeSkeleton> composite;
  comp::FailureSet failures;
  std::optional<CompositeRegion> region;

  auto syncGrowth = [&] {
    if (composite) tel.growth = composite->telemetry();
  };
  // Replaces the active region by one grown out of composite vertex `from`.
  auto spawn = [&](int from) {
    const auto g = composite->grow(from, failures);
    switch (g.status) {
      case comp::GrowResult::Status::Edge:
        region = CompositeRegion::onEdge(composite->edge(g.edge), p.eta);
        composite->gcUseless(g.vertex);
        ++tel.regionsCreated;
        run.event(RegionEvent::Kind::Created, g.edge, 0);
        break;
      case comp::GrowResult::Status::QueryReached:
        region = CompositeRegion::atGoal(problem.goals, p.eta);
        composite->gcUseless(g.vertex);
        ++tel.regionsCreated;
        run.event(RegionEvent::Kind::QueryReached, -1, 0);
        break;
      case comp::GrowResult::Status::Exhausted:
        region.reset();
        tel.skeletonExhausted = true;
        run.event(RegionEvent::Kind::Exhausted, -1, 0);
        break;
    }
    syncGrowth();
  };

  if (p.regionsEnabled) {
    if (!skeleton) {
      built = defaultSkeleton(problem, p);
      skeleton = &*built;
    }
    mapf::VertexTuple starts;
    mapf::VertexTuple goals;
    for (std::size_t r = 0; r < problem.robotCount(); ++r) {
      starts.push_back(skel::nearestSkeletonVertex(*skeleton, problem.starts[r]));
      goals.push_back(skel::nearestSkeletonVertex(*skeleton, problem.goals[r]));
    }
    comp::GrowOptions options;
    options.solver = p.mapfSolver;
    options.maxGrowthFailures = p.maxGrowthFailures;
    options.spacing = p.spacing;
    composite.emplace(*skeleton, robotWidths(problem), starts, goals, options);
    spawn(composite->root());
  }

  while (true) {
    if (auto done = run.checkLimits()) {
      syncGrowth();
      done->telemetry.growth = tel.growth;
      return *done;
    }
    const auto d = run.draw(p.epsilon, region.has_value());
    CompositeCfg q;
    if (d == RrtRun::Draw::Goal) q = problem.goals;
    else if (d == RrtRun::Draw::Environment) q = run.sampleEnvironment();
    else q = sampleInRegion(*region, problem.env.bounds(), run.rng());
    run.emit(q);

    const auto added = run.extendToward(q);
    if (added) {
      if (const auto goal = run.connectGoal(*added)) {
        syncGrowth();
        return run.finish(PlanStatus::Solved, *goal);
      }
    }
    if (d != RrtRun::Draw::Region) continue;

    if (added) {
      ++region->successes;
      run.event(RegionEvent::Kind::Success, region->edge, region->failures);
      const auto& qNew = run.tree().node(*added).q;
      // A fresh region may already contain q_new.
      for (int guard = 0; region && guard < 1000 && !run.pastDeadline(); ++guard) {
        const auto adv = advanceCompositeRegion(*region, qNew);
        tel.regionAdvances += static_cast<std::size_t>(adv.steps);
        if (adv.steps > 0) run.event(RegionEvent::Kind::Advanced, region->edge, region->failures);
        if (!adv.atEnd || region->terminal()) break;
        run.event(RegionEvent::Kind::AtEnd, region->edge, region->failures);
        const int edge = region->edge;
        composite->markFinished(edge);
        ++tel.regionsDeleted;
        spawn(composite->edge(edge).target);
      }
    } else {
      ++region->failures;
      tel.maxRegionFailures = std::max(tel.maxRegionFailures, static_cast<std::size_t>(region->failures));
      run.event(RegionEvent::Kind::Failure, region->edge, region->failures);
    }

    if (region && region->failures > p.tau) {
      ++tel.regionReplacements;
      ++tel.regionsDeleted;
      run.event(RegionEvent::Kind::Replaced, region->edge, region->failures);
      if (region->terminal()) {
        region = CompositeRegion::atGoal(problem.goals, p.eta);
        ++tel.regionsCreated;
      } else {
        const int edge = region->edge;
        composite->recordFailedEdge(edge, failures);
        composite->markFinished(edge);
        spawn(composite->edge(edge).source);
      }
    }
  }
}

PlanResult drRrt(const Problem& problem, const PlannerParams& params, const skel::WorkspaceSkeleton* skeleton,
                 const PlannerHooks* hooks) {
  RrtRun run(problem, params, hooks);
  if (auto done = run.precheck()) return *done;
  const auto& p = run.params();
  auto& tel = run.telemetry();

  std::optional<skel::WorkspaceSkeleton> built;
  if (!skeleton) {
    built = defaultSkeleton(problem, p);
    skeleton = &*built;
  }
  const std::size_t n = problem.robotCount();
  std::vector<RobotRegions> robots(n);
  for (std::size_t r = 0; r < n; ++r) {
    const skel::SkeletonView view{skeleton, problem.robots[r].width()};
    try {
      robots[r].query = skel::computeQuerySkeleton(view, problem.starts[r], problem.goals[r]);
    } catch (const std::runtime_error& e) {
      return run.finish(PlanStatus::Failed, -1, e.what());
    }
    spawnRegions(robots[r], *skeleton, robots[r].query.start, tel);
  }

  while (true) {
    if (auto done = run.checkLimits()) return *done;
    const bool anyRegion = std::any_of(robots.begin(), robots.end(), [](const auto& rr) { return !rr.regions.empty(); });
    const auto d = run.draw(p.epsilon, anyRegion);
    CompositeCfg q;
    if (d == RrtRun::Draw::Goal) {
      q = problem.goals;
    } else if (d == RrtRun::Draw::Environment) {
      q = run.sampleEnvironment();
    } else {
      for (std::size_t r = 0; r < n; ++r) {
        auto& rr = robots[r];
        rr.selected = -1;
        if (rr.regions.empty()) {
          q.push_back(sampleBox(problem.env.bounds(), run.rng()));
          continue;
        }
        double total = 0.0;
        for (const auto& reg : rr.regions) total += reg.weight();
        double pick = uniform01(run.rng()) * total;
        rr.selected = static_cast<int>(rr.regions.size()) - 1;
        for (std::size_t k = 0; k < rr.regions.size(); ++k) {
          pick -= rr.regions[k].weight();
          if (pick < 0.0) {
            rr.selected = static_cast<int>(k);
            break;
          }
        }
        q.push_back(sampleDisk(rr.regions[static_cast<std::size_t>(rr.selected)].center(), p.eta,
                               problem.env.bounds(), run.rng()));
      }
    }
    run.emit(q);

    const auto added = run.extendToward(q);
    if (added)
      if (const auto goal = run.connectGoal(*added)) return run.finish(PlanStatus::Solved, *goal);
    if (d != RrtRun::Draw::Region) continue;

    for (std::size_t r = 0; r < n; ++r) {
      auto& rr = robots[r];
      if (rr.selected < 0) continue;
      auto& sel = rr.regions[static_cast<std::size_t>(rr.selected)];
      if (added) ++sel.successes;
      else ++sel.failures;
      tel.maxRegionFailures = std::max(tel.maxRegionFailures, static_cast<std::size_t>(sel.failures));
    }

    for (std::size_t r = 0; r < n; ++r) {
      auto& rr = robots[r];
      std::vector<char> drop(rr.regions.size(), 0);
      if (added) {
        const Vec2 pos = run.tree().node(*added).q[r];
        for (std::size_t k = 0; k < rr.regions.size(); ++k) {
          auto& reg = rr.regions[k];
          while (geom::distance(pos, reg.center()) <= p.eta) {
            ++reg.index;
            ++tel.regionAdvances;
            if (reg.atEnd()) {
              drop[k] = 1;
              break;
            }
          }
        }
      }
      if (rr.selected >= 0 && rr.regions[static_cast<std::size_t>(rr.selected)].failures > p.tau) {
        drop[static_cast<std::size_t>(rr.selected)] = 1;
        ++tel.regionReplacements;
      }
      std::vector<Region> kept;
      for (std::size_t k = 0; k < rr.regions.size(); ++k) {
        if (drop[k]) ++tel.regionsDeleted;
        else kept.push_back(std::move(rr.regions[k]));
      }
      rr.regions = std::move(kept);
      rr.selected = -1;

      if (added) {
        const Vec2 pos = run.tree().node(*added).q[r];
        for (int v : rr.query.vertices) {
          if (rr.explored.count(v)) continue;
          if (geom::distance(skeleton->vertex(v).point, pos) < p.eta) spawnRegions(rr, *skeleton, v, tel);
        }
      }
    }
  }
}

}  // namespace cdr::plan

#pragma once

// Sampling-based planners: DR-RRT, CDR-RRT and the composite and decoupled
// baselines, plus the tree and region primitives they share.

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cdr/composite_skeleton.hpp"
#include "cdr/geom2d.hpp"
#include "cdr/mapf.hpp"
#include "cdr/problem.hpp"
#include "cdr/skeleton.hpp"

namespace cdr::plan {

using geom::CompositeCfg;
using geom::Vec2;
using Rng = std::mt19937_64;

struct PlannerParams {
  double delta = 0.0;  ///< Max extension distance; <= 0 means 4 * min radius.
  double eta = 0.0;    ///< Region radius; <= 0 means 2 * max radius.
  int tau = 50;
  double epsilon = 0.05;
  double collisionResolution = geom::kDefaultCollisionResolution;
  std::uint64_t seed = 1;
  double timeLimit = 600.0;      ///< Seconds of wall clock.
  std::size_t maxIterations = 0;  ///< 0 = unbounded.
  double goalBias = 0.05;
  double goalTolerance = 0.1;  ///< Fraction of each robot's radius.
  int maxGrowthFailures = 3;
  mapf::HighLevel mapfSolver = mapf::HighLevel::PBS;
  double gridResolution = 0.1;
  double spacing = 0.0;  ///< Intermediate spacing; <= 0 means eta / 2.
  bool regionsEnabled = true;
  int prmNeighbors = 10;
  int prmBatch = 50;
};

/// Fills derived defaults (delta, eta, spacing) for a robot roster.
PlannerParams resolveParams(PlannerParams params, std::span<const geom::RobotSpec> robots);

/// Applies named overrides ("delta", "eta", "tau", "epsilon", ...). Throws
/// std::invalid_argument for unknown names or out-of-range values.
void applyOverrides(PlannerParams& params, const std::map<std::string, double>& overrides);
void validateParams(const PlannerParams& params);

/// Append-only tree over composite configurations.
class Tree {
 public:
  struct Node {
    CompositeCfg q;
    int parent = -1;
    double cost = 0.0;
  };

  explicit Tree(CompositeCfg root);
  int add(CompositeCfg q, int parent);
  const Node& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  std::size_t size() const { return nodes_.size(); }
  /// Root-to-node configurations.
  std::vector<CompositeCfg> pathTo(int i) const;

 private:
  std::vector<Node> nodes_;
};

/// Node minimizing composite Euclidean distance to q; lowest index on ties.
int nearestNeighbor(const Tree& tree, std::span<const Vec2> q);

/// Steers from node `near` toward qRand by at most delta and appends the new
/// configuration when the straight motion is valid.
std::optional<int> extend(Tree& tree, int near, std::span<const Vec2> qRand, double delta,
                          std::span<const geom::RobotSpec> robots, const geom::Environment& env, double resolution);

double uniform01(Rng& rng);
/// Uniform point in a disk, clamped to the box.
Vec2 sampleDisk(const Vec2& center, double radius, const geom::Box& bounds, Rng& rng);
Vec2 sampleBox(const geom::Box& bounds, Rng& rng);

/// Single-robot region travelling along a directed query-skeleton edge.
struct Region {
  skel::DirectedEdge edge;
  std::vector<Vec2> centers;  ///< Intermediates ordered from edge.from to edge.to.
  int index = 0;
  int successes = 0;
  int failures = 0;

  const Vec2& center() const { return centers[static_cast<std::size_t>(index)]; }
  bool atEnd() const { return index + 1 >= static_cast<int>(centers.size()); }
  double weight() const { return (successes + 1.0) / (successes + failures + 2.0); }
};

/// n lockstep regions along one composite edge, or fixed spheres around the
/// goal configuration once the query vertex is reached (edge = -1).
struct CompositeRegion {
  int edge = -1;
  std::vector<std::vector<Vec2>> centers;  ///< Per robot, stepCount each.
  int step = 0;
  int successes = 0;
  int failures = 0;
  double eta = 0.0;

  static CompositeRegion onEdge(const comp::CompositeEdge& e, double eta);
  static CompositeRegion atGoal(std::span<const Vec2> goal, double eta);

  int stepCount() const { return static_cast<int>(centers.front().size()); }
  const Vec2& center(std::size_t robot) const { return centers[robot][static_cast<std::size_t>(step)]; }
  bool contains(std::span<const Vec2> q) const;
  bool terminal() const { return edge < 0; }
};

enum class Bound { Region, Environment };

/// Whole environment with probability epsilon, otherwise the region.
Bound selectRegionOrEnv(double epsilon, Rng& rng);

/// Per-robot uniform samples in the region's disks.
CompositeCfg sampleInRegion(const CompositeRegion& region, const geom::Box& bounds, Rng& rng);

struct AdvanceResult {
  int steps = 0;
  bool atEnd = false;  ///< Last step reached with q still inside.
};

/// Advances the lockstep index the minimum amount that leaves q outside.
AdvanceResult advanceCompositeRegion(CompositeRegion& region, std::span<const Vec2> q);

struct Telemetry {
  std::size_t iterations = 0;
  std::size_t treeNodes = 0;
  std::size_t goalSamples = 0;
  std::size_t envSamples = 0;
  std::size_t regionSamples = 0;
  std::size_t extendFailures = 0;
  std::size_t regionsCreated = 0;
  std::size_t regionsDeleted = 0;
  std::size_t regionReplacements = 0;
  std::size_t maxRegionFailures = 0;
  std::size_t regionAdvances = 0;
  std::size_t roadmapNodes = 0;
  bool skeletonExhausted = false;
  comp::GrowTelemetry growth;

  /// Fixed-order name/value pairs shared by every planner.
  std::vector<std::pair<std::string, double>> counters() const;
};

enum class PlanStatus { Solved, Timeout, IterationLimit, Failed };

struct PlanResult {
  PlanStatus status = PlanStatus::Failed;
  std::string message;
  std::vector<CompositeCfg> path;  ///< Composite waypoints from start to goal.
  double makespan = 0.0;
  double planningTime = 0.0;
  Telemetry telemetry;

  bool success() const { return status == PlanStatus::Solved; }
};

/// Sum over path segments of the largest single-robot displacement.
double pathMakespan(std::span<const CompositeCfg> path);

/// Per-robot timed waypoints (time, position) at unit speed with segments
/// synchronized across robots.
std::vector<std::vector<std::pair<double, Vec2>>> timedPaths(std::span<const CompositeCfg> path);

struct RegionEvent {
  enum class Kind { Created, Success, Failure, Advanced, AtEnd, Replaced, Exhausted, QueryReached };
  Kind kind = Kind::Created;
  int edge = -1;
  int failures = 0;
  std::size_t iteration = 0;
};

struct PlannerHooks {
  std::function<void(const CompositeCfg&)> onSample;
  std::function<void(const RegionEvent&)> onRegionEvent;
};

PlanResult drRrt(const Problem& problem, const PlannerParams& params, const skel::WorkspaceSkeleton* skeleton = nullptr,
                 const PlannerHooks* hooks = nullptr);
PlanResult cdrRrt(const Problem& problem, const PlannerParams& params, const skel::WorkspaceSkeleton* skeleton = nullptr,
                  const PlannerHooks* hooks = nullptr);
PlanResult compositeRrt(const Problem& problem, const PlannerParams& params, const PlannerHooks* hooks = nullptr);
PlanResult compositePrm(const Problem& problem, const PlannerParams& params);
PlanResult decoupledPrm(const Problem& problem, const PlannerParams& params);

/// Skeleton used by the skeleton-guided planners when none is supplied.
skel::WorkspaceSkeleton defaultSkeleton(const Problem& problem, const PlannerParams& params);

/// Per-robot roadmap paths of the decoupled planner (first stage only).
std::optional<std::vector<std::vector<Vec2>>> decoupledRoadmapPaths(const Problem& problem, const PlannerParams& params);

/// Velocity tuning over fixed per-robot paths: each robot pauses or advances
/// one waypoint per step. Returns the composite schedule or nullopt.
std::optional<std::vector<CompositeCfg>> coordinatePaths(const std::vector<std::vector<Vec2>>& paths,
                                                         std::span<const geom::RobotSpec> robots,
                                                         const geom::Environment& env, double resolution,
                                                         std::chrono::steady_clock::time_point deadline);

enum class PlannerKind { CdrRrt, DrRrt, CompositeRrt, CompositePrm, DecoupledPrm };

PlannerKind parsePlanner(const std::string& name);
std::string plannerName(PlannerKind kind);
std::vector<PlannerKind> allPlanners();

PlanResult runPlanner(PlannerKind kind, const Problem& problem, const PlannerParams& params,
                      const skel::WorkspaceSkeleton* skeleton = nullptr);

}  // namespace cdr::plan

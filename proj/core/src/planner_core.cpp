#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "cdr/planners.hpp"

namespace cdr::plan {

PlannerParams resolveParams(PlannerParams params, std::span<const geom::RobotSpec> robots) {
  if (robots.empty()) throw std::invalid_argument("planner: no robots");
  double rmin = std::numeric_limits<double>::infinity();
  double rmax = 0.0;
  for (const auto& r : robots) {
    rmin = std::min(rmin, r.radius);
    rmax = std::max(rmax, r.radius);
  }
  if (params.delta <= 0.0) params.delta = 4.0 * rmin;
  if (params.eta <= 0.0) params.eta = 2.0 * rmax;
  if (params.spacing <= 0.0) params.spacing = params.eta / 2.0;
  validateParams(params);
  return params;
}

void validateParams(const PlannerParams& p) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("planner parameter out of range: ") + what);
  };
  require(p.tau > 0, "tau");
  require(p.epsilon > 0.0 && p.epsilon <= 1.0, "epsilon");
  require(p.collisionResolution > 0.0, "collision_resolution");
  require(p.timeLimit > 0.0, "time_limit");
  require(p.goalBias >= 0.0 && p.goalBias < 1.0, "goal_bias");
  require(p.goalTolerance > 0.0, "goal_tolerance");
  require(p.maxGrowthFailures >= 0, "max_growth_failures");
  require(p.gridResolution > 0.0, "grid_resolution");
  require(p.prmNeighbors > 0, "prm_neighbors");
  require(p.prmBatch > 0, "prm_batch");
}

void applyOverrides(PlannerParams& p, const std::map<std::string, double>& overrides) {
  for (const auto& [key, value] : overrides) {
    if (key == "delta") p.delta = value;
    else if (key == "eta") p.eta = value;
    else if (key == "tau") p.tau = static_cast<int>(value);
    else if (key == "epsilon") p.epsilon = value;
    else if (key == "collision_resolution") p.collisionResolution = value;
    else if (key == "seed") p.seed = static_cast<std::uint64_t>(value);
    else if (key == "time_limit") p.timeLimit = value;
    else if (key == "max_iterations") p.maxIterations = static_cast<std::size_t>(value);
    else if (key == "goal_bias") p.goalBias = value;
    else if (key == "goal_tolerance") p.goalTolerance = value;
    else if (key == "max_growth_failures") p.maxGrowthFailures = static_cast<int>(value);
    else if (key == "mapf_cbs") p.mapfSolver = value != 0.0 ? mapf::HighLevel::CBS : mapf::HighLevel::PBS;
    else if (key == "grid_resolution") p.gridResolution = value;
    else if (key == "spacing") p.spacing = value;
    else if (key == "regions_enabled") p.regionsEnabled = value != 0.0;
    else if (key == "prm_neighbors") p.prmNeighbors = static_cast<int>(value);
    else if (key == "prm_batch") p.prmBatch = static_cast<int>(value);
    else throw std::invalid_argument("unknown planner parameter: " + key);
  }
  validateParams(p);
}

Tree::Tree(CompositeCfg root) { nodes_.push_back({std::move(root), -1, 0.0}); }

int Tree::add(CompositeCfg q, int parent) {
  const auto& p = node(parent);
  const double cost = p.cost + geom::compositeDistance(p.q, q);
  nodes_.push_back({std::move(q), parent, cost});
  return static_cast<int>(nodes_.size()) - 1;
}

std::vector<CompositeCfg> Tree::pathTo(int i) const {
  std::vector<CompositeCfg> out;
  for (int x = i; x >= 0; x = node(x).parent) out.push_back(node(x).q);
  std::reverse(out.begin(), out.end());
  return out;
}

int nearestNeighbor(const Tree& tree, std::span<const Vec2> q) {
  int best = 0;
  double bestSq = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const auto& cfg = tree.node(static_cast<int>(i)).q;
    double sq = 0.0;
    for (std::size_t r = 0; r < q.size() && sq < bestSq; ++r) sq += (cfg[r] - q[r]).squaredNorm();
    if (sq < bestSq) {
      bestSq = sq;
      best = static_cast<int>(i);
    }
  }
  return best;
}

std::optional<int> extend(Tree& tree, int near, std::span<const Vec2> qRand, double delta,
                          std::span<const geom::RobotSpec> robots, const geom::Environment& env, double resolution) {
  const auto& from = tree.node(near).q;
  const double dist = geom::compositeDistance(from, qRand);
  if (dist <= 0.0) return std::nullopt;
  CompositeCfg qNew(qRand.begin(), qRand.end());
  if (dist > delta) {
    const double s = delta / dist;
    for (std::size_t r = 0; r < qNew.size(); ++r) qNew[r] = from[r] + (qRand[r] - from[r]) * s;
  }
  if (!geom::edgeValid(from, qNew, robots, env, resolution)) return std::nullopt;
  return tree.add(std::move(qNew), near);
}

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

Vec2 sampleDisk(const Vec2& center, double radius, const geom::Box& bounds, Rng& rng) {
  const double rho = radius * std::sqrt(uniform01(rng));
  const double theta = 2.0 * std::numbers::pi * uniform01(rng);
  return bounds.clamp(center + Vec2{rho * std::cos(theta), rho * std::sin(theta)});
}

Vec2 sampleBox(const geom::Box& bounds, Rng& rng) {
  const double x = bounds.min.x + uniform01(rng) * bounds.width();
  const double y = bounds.min.y + uniform01(rng) * bounds.height();
  return {x, y};
}

CompositeRegion CompositeRegion::onEdge(const comp::CompositeEdge& e, double eta) {
  CompositeRegion r;
  r.edge = e.id;
  r.centers = e.waypoints;
  r.eta = eta;
  return r;
}

CompositeRegion CompositeRegion::atGoal(std::span<const Vec2> goal, double eta) {
  CompositeRegion r;
  for (const auto& g : goal) r.centers.push_back({g});
  r.eta = eta;
  return r;
}

bool CompositeRegion::contains(std::span<const Vec2> q) const {
  for (std::size_t i = 0; i < q.size(); ++i)
    if (geom::distance(q[i], center(i)) > eta) return false;
  return true;
}

Bound selectRegionOrEnv(double epsilon, Rng& rng) {
  return uniform01(rng) < epsilon ? Bound::Environment : Bound::Region;
}

CompositeCfg sampleInRegion(const CompositeRegion& region, const geom::Box& bounds, Rng& rng) {
  CompositeCfg q;
  q.reserve(region.centers.size());
  for (std::size_t i = 0; i < region.centers.size(); ++i) q.push_back(sampleDisk(region.center(i), region.eta, bounds, rng));
  return q;
}

AdvanceResult advanceCompositeRegion(CompositeRegion& region, std::span<const Vec2> q) {
  AdvanceResult out;
  while (region.contains(q) && region.step + 1 < region.stepCount()) {
    ++region.step;
    ++out.steps;
  }
  out.atEnd = region.contains(q);
  return out;
}

std::vector<std::pair<std::string, double>> Telemetry::counters() const {
  auto d = [](std::size_t v) { return static_cast<double>(v); };
  return {{"iterations", d(iterations)},
          {"tree_nodes", d(treeNodes)},
          {"roadmap_nodes", d(roadmapNodes)},
          {"goal_samples", d(goalSamples)},
          {"env_samples", d(envSamples)},
          {"region_samples", d(regionSamples)},
          {"extend_failures", d(extendFailures)},
          {"regions_created", d(regionsCreated)},
          {"regions_deleted", d(regionsDeleted)},
          {"region_replacements", d(regionReplacements)},
          {"max_region_failures", d(maxRegionFailures)},
          {"region_advances", d(regionAdvances)},
          {"grow_calls", d(growth.growCalls)},
          {"mapf_calls", d(growth.mapfCalls)},
          {"edges_grown", d(growth.edgesGrown)},
          {"edges_banned", d(growth.edgesBanned)},
          {"vertices_banned", d(growth.verticesBanned)},
          {"backtracks", d(growth.backtracks)},
          {"gc_removed_edges", d(growth.gcRemovedEdges)},
          {"gc_removed_vertices", d(growth.gcRemovedVertices)},
          {"skeleton_exhausted", skeletonExhausted ? 1.0 : 0.0}};
}

double pathMakespan(std::span<const CompositeCfg> path) {
  double total = 0.0;
  for (std::size_t k = 1; k < path.size(); ++k) total += geom::maxRobotDisplacement(path[k - 1], path[k]);
  return total;
}

std::vector<std::vector<std::pair<double, Vec2>>> timedPaths(std::span<const CompositeCfg> path) {
  std::vector<std::vector<std::pair<double, Vec2>>> out;
  if (path.empty()) return out;
  out.resize(path.front().size());
  double t = 0.0;
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (k > 0) t += geom::maxRobotDisplacement(path[k - 1], path[k]);
    for (std::size_t r = 0; r < out.size(); ++r) out[r].push_back({t, path[k][r]});
  }
  return out;
}

PlannerKind parsePlanner(const std::string& name) {
  for (auto k : allPlanners())
    if (plannerName(k) == name) return k;
  throw std::invalid_argument("unknown planner: " + name);
}

std::string plannerName(PlannerKind kind) {
  switch (kind) {
    case PlannerKind::CdrRrt: return "cdr-rrt";
    case PlannerKind::DrRrt: return "dr-rrt";
    case PlannerKind::CompositeRrt: return "composite-rrt";
    case PlannerKind::CompositePrm: return "composite-prm";
    case PlannerKind::DecoupledPrm: return "decoupled-prm";
  }
  return "unknown";
}

std::vector<PlannerKind> allPlanners() {
  return {PlannerKind::CdrRrt, PlannerKind::DrRrt, PlannerKind::CompositeRrt, PlannerKind::CompositePrm,
          PlannerKind::DecoupledPrm};
}

PlanResult runPlanner(PlannerKind kind, const Problem& problem, const PlannerParams& params,
                      const skel::WorkspaceSkeleton* skeleton) {
  switch (kind) {
    case PlannerKind::CdrRrt: return cdrRrt(problem, params, skeleton);
    case PlannerKind::DrRrt: return drRrt(problem, params, skeleton);
    case PlannerKind::CompositeRrt: return compositeRrt(problem, params);
    case PlannerKind::CompositePrm: return compositePrm(problem, params);
    case PlannerKind::DecoupledPrm: return decoupledPrm(problem, params);
  }
  throw std::invalid_argument("unknown planner");
}

skel::WorkspaceSkeleton defaultSkeleton(const Problem& problem, const PlannerParams& params) {
  const auto p = resolveParams(params, problem.robots);
  double rmax = 0.0;
  for (const auto& r : problem.robots) rmax = std::max(rmax, r.radius);
  skel::MedialAxisOptions opts;
  opts.gridResolution = p.gridResolution;
  opts.tipClearance = 1.2 * rmax;
  opts.spacing = p.spacing;
  return skel::buildMedialAxisSkeleton(problem.env, opts);
}

}  // namespace cdr::plan

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <queue>

#include "cdr/planners.hpp"

namespace cdr::plan {

namespace {

using Clock = std::chrono::steady_clock;

Clock::time_point deadlineAfter(Clock::time_point start, double seconds) {
  return start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(seconds));
}

class DisjointSets {
 public:
  int add() {
    parent_.push_back(static_cast<int>(parent_.size()));
    return parent_.back();
  }
  int find(int x) {
    while (parent_[static_cast<std::size_t>(x)] != x) {
      parent_[static_cast<std::size_t>(x)] = parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(x)])];
      x = parent_[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }

 private:
  std::vector<int> parent_;
};

// Undirected roadmap over composite configurations (one robot is the n = 1 case).
class Roadmap {
 public:
  Roadmap(std::span<const geom::RobotSpec> robots, const geom::Environment& env, const PlannerParams& p)
      : robots_(robots), env_(env), p_(p) {}

  int add(CompositeCfg q) {
    nodes_.push_back(std::move(q));
    adjacency_.emplace_back();
    const int id = sets_.add();
    const auto& qn = nodes_.back();
    std::vector<std::pair<double, int>> near;
    for (int i = 0; i < id; ++i) near.push_back({geom::compositeDistance(nodes_[static_cast<std::size_t>(i)], qn), i});
    const auto k = std::min<std::size_t>(near.size(), static_cast<std::size_t>(p_.prmNeighbors));
    std::partial_sort(near.begin(), near.begin() + static_cast<std::ptrdiff_t>(k), near.end());
    for (std::size_t j = 0; j < k; ++j) {
      const int other = near[j].second;
      if (!geom::edgeValid(nodes_[static_cast<std::size_t>(other)], qn, robots_, env_, p_.collisionResolution)) continue;
      const double w = geom::maxRobotDisplacement(nodes_[static_cast<std::size_t>(other)], qn);
      adjacency_[static_cast<std::size_t>(id)].push_back({other, w});
      adjacency_[static_cast<std::size_t>(other)].push_back({id, w});
      sets_.unite(id, other);
    }
    return id;
  }

  bool connected(int a, int b) { return sets_.find(a) == sets_.find(b); }
  std::size_t size() const { return nodes_.size(); }

  std::vector<CompositeCfg> shortestPath(int from, int to) const {
    std::vector<double> dist(nodes_.size(), std::numeric_limits<double>::infinity());
    std::vector<int> prev(nodes_.size(), -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    dist[static_cast<std::size_t>(from)] = 0.0;
    open.push({0.0, from});
    while (!open.empty()) {
      const auto [d, u] = open.top();
      open.pop();
      if (d > dist[static_cast<std::size_t>(u)]) continue;
      if (u == to) break;
      for (const auto& [v, w] : adjacency_[static_cast<std::size_t>(u)]) {
        if (d + w < dist[static_cast<std::size_t>(v)]) {
          dist[static_cast<std::size_t>(v)] = d + w;
          prev[static_cast<std::size_t>(v)] = u;
          open.push({d + w, v});
        }
      }
    }
    std::vector<CompositeCfg> path;
    if (!std::isfinite(dist[static_cast<std::size_t>(to)])) return path;
    for (int x = to; x >= 0; x = prev[static_cast<std::size_t>(x)]) path.push_back(nodes_[static_cast<std::size_t>(x)]);
    std::reverse(path.begin(), path.end());
    return path;
  }

 private:
  std::span<const geom::RobotSpec> robots_;
  const geom::Environment& env_;
  const PlannerParams& p_;
  std::vector<CompositeCfg> nodes_;
  std::vector<std::vector<std::pair<int, double>>> adjacency_;
  DisjointSets sets_;
};

// Rejection sample: each robot valid alone, then the whole tuple.
std::optional<CompositeCfg> sampleValid(std::span<const geom::RobotSpec> robots, const geom::Environment& env, Rng& rng) {
  CompositeCfg q;
  for (const auto& r : robots) {
    std::optional<Vec2> p;
    for (int attempt = 0; attempt < 100 && !p; ++attempt) {
      const Vec2 c = sampleBox(env.bounds(), rng);
      if (geom::cfgValid(c, r, env)) p = c;
    }
    if (!p) return std::nullopt;
    q.push_back(*p);
  }
  if (!geom::compositeValid(q, robots, env)) return std::nullopt;
  return q;
}

// Grows a roadmap until start and goal are connected, the deadline passes or
// the sample budget is spent. Returns the path or an empty vector.
std::vector<CompositeCfg> roadmapQuery(std::span<const geom::RobotSpec> robots, const geom::Environment& env,
                                       const CompositeCfg& start, const CompositeCfg& goal, const PlannerParams& p,
                                       Rng& rng, Clock::time_point deadline, Telemetry& tel) {
  Roadmap map(robots, env, p);
  const int s = map.add(start);
  const int g = map.add(goal);
  std::size_t samples = 0;
  while (!map.connected(s, g)) {
    if (Clock::now() >= deadline) return {};
    if (p.maxIterations > 0 && samples >= p.maxIterations) return {};
    for (int b = 0; b < p.prmBatch; ++b) {
      ++samples;
      ++tel.iterations;
      if (auto q = sampleValid(robots, env, rng)) map.add(std::move(*q));
      if (map.connected(s, g)) break;
    }
  }
  tel.roadmapNodes += map.size();
  return map.shortestPath(s, g);
}

// Greedy straight-line shortcutting of a single-robot path.
std::vector<Vec2> shortcut(const std::vector<Vec2>& path, const geom::RobotSpec& robot, const geom::Environment& env,
                           double resolution) {
  if (path.size() <= 2) return path;
  std::vector<Vec2> out{path.front()};
  std::size_t i = 0;
  while (i + 1 < path.size()) {
    std::size_t j = path.size() - 1;
    while (j > i + 1) {
      const Vec2 a[] = {path[i]};
      const Vec2 b[] = {path[j]};
      if (geom::edgeValid(a, b, std::span(&robot, 1), env, resolution)) break;
      --j;
    }
    out.push_back(path[j]);
    i = j;
  }
  return out;
}

std::vector<Vec2> densify(const std::vector<Vec2>& path, double step) {
  std::vector<Vec2> out{path.front()};
  for (std::size_t k = 1; k < path.size(); ++k) {
    const double len = geom::distance(path[k - 1], path[k]);
    const auto pieces = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / step - 1e-12)));
    for (std::size_t j = 1; j <= pieces; ++j)
      out.push_back(path[k - 1] + (path[k] - path[k - 1]) * (static_cast<double>(j) / static_cast<double>(pieces)));
  }
  return out;
}

}  // namespace

PlanResult compositePrm(const Problem& problem, const PlannerParams& params) {
  const auto start = Clock::now();
  const auto p = resolveParams(params, problem.robots);
  PlanResult out;
  if (!problem.wellFormed()) {
    out.message = "start or goal configuration invalid";
    return out;
  }
  Rng rng(p.seed);
  out.path = roadmapQuery(problem.robots, problem.env, problem.starts, problem.goals, p, rng,
                          deadlineAfter(start, p.timeLimit), out.telemetry);
  out.planningTime = std::chrono::duration<double>(Clock::now() - start).count();
  if (out.path.empty()) {
    out.status = Clock::now() >= deadlineAfter(start, p.timeLimit) ? PlanStatus::Timeout : PlanStatus::IterationLimit;
    out.message = "roadmap did not connect start and goal";
    return out;
  }
  out.status = PlanStatus::Solved;
  out.makespan = pathMakespan(out.path);
  return out;
}

std::optional<std::vector<std::vector<Vec2>>> decoupledRoadmapPaths(const Problem& problem, const PlannerParams& params) {
  const auto start = Clock::now();
  const auto p = resolveParams(params, problem.robots);
  const auto deadline = deadlineAfter(start, p.timeLimit);
  Rng rng(p.seed);
  Telemetry tel;
  std::vector<std::vector<Vec2>> paths;
  for (std::size_t r = 0; r < problem.robotCount(); ++r) {
    const auto one = std::span(&problem.robots[r], 1);
    if (!geom::cfgValid(problem.starts[r], problem.robots[r], problem.env) ||
        !geom::cfgValid(problem.goals[r], problem.robots[r], problem.env))
      return std::nullopt;
    const auto path = roadmapQuery(one, problem.env, {problem.starts[r]}, {problem.goals[r]}, p, rng, deadline, tel);
    if (path.empty()) return std::nullopt;
    std::vector<Vec2> flat;
    for (const auto& q : path) flat.push_back(q.front());
    paths.push_back(shortcut(flat, problem.robots[r], problem.env, p.collisionResolution));
  }
  return paths;
}

std::optional<std::vector<CompositeCfg>> coordinatePaths(const std::vector<std::vector<Vec2>>& paths,
                                                         std::span<const geom::RobotSpec> robots,
                                                         const geom::Environment& env, double resolution,
                                                         Clock::time_point deadline) {
  const std::size_t n = paths.size();
  std::vector<int> last(n);
  for (std::size_t r = 0; r < n; ++r) last[r] = static_cast<int>(paths[r].size()) - 1;
  auto cfgAt = [&](const std::vector<int>& idx) {
    CompositeCfg q(n);
    for (std::size_t r = 0; r < n; ++r) q[r] = paths[r][static_cast<std::size_t>(idx[r])];
    return q;
  };

  const std::vector<int> origin(n, 0);
  if (!geom::compositeValid(cfgAt(origin), robots, env)) return std::nullopt;
  std::map<std::vector<int>, std::vector<int>> parent{{origin, origin}};
  std::deque<std::vector<int>> frontier{origin};
  const std::size_t subsets = std::size_t{1} << n;
  while (!frontier.empty()) {
    if (Clock::now() >= deadline) return std::nullopt;
    const auto cur = frontier.front();
    frontier.pop_front();
    if (cur == last) {
      std::vector<CompositeCfg> out;
      for (auto x = cur;; x = parent[x]) {
        out.push_back(cfgAt(x));
        if (x == origin) break;
      }
      std::reverse(out.begin(), out.end());
      return out;
    }
    const auto from = cfgAt(cur);
    for (std::size_t mask = 1; mask < subsets; ++mask) {
      auto next = cur;
      bool ok = true;
      for (std::size_t r = 0; r < n && ok; ++r) {
        if (!(mask >> r & 1U)) continue;
        if (next[r] == last[r]) ok = false;
        else ++next[r];
      }
      if (!ok || parent.count(next)) continue;
      if (!geom::edgeValid(from, cfgAt(next), robots, env, resolution)) continue;
      parent.emplace(next, cur);
      frontier.push_back(std::move(next));
    }
  }
  return std::nullopt;
}

PlanResult decoupledPrm(const Problem& problem, const PlannerParams& params) {
  const auto start = Clock::now();
  const auto p = resolveParams(params, problem.robots);
  const auto deadline = deadlineAfter(start, p.timeLimit);
  PlanResult out;
  auto stop = [&](std::string msg) {
    out.status = Clock::now() >= deadline ? PlanStatus::Timeout : PlanStatus::Failed;
    out.message = std::move(msg);
    out.planningTime = std::chrono::duration<double>(Clock::now() - start).count();
    return out;
  };
  if (!problem.wellFormed()) return stop("start or goal configuration invalid");
  const auto paths = decoupledRoadmapPaths(problem, p);
  if (!paths) return stop("no individual roadmap path");
  std::vector<std::vector<Vec2>> dense;
  for (const auto& path : *paths) dense.push_back(densify(path, p.spacing));
  const auto schedule = coordinatePaths(dense, problem.robots, problem.env, p.collisionResolution, deadline);
  if (!schedule) return stop("no velocity schedule avoids collisions");
  out.status = PlanStatus::Solved;
  out.path = *schedule;
  out.makespan = pathMakespan(out.path);
  out.planningTime = std::chrono::duration<double>(Clock::now() - start).count();
  return out;
}

}  // namespace cdr::plan

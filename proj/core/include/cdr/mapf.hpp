#pragma once

// Multi-agent pathfinding on a workspace skeleton with edge-capacity
// conflicts. Every edge traversal takes one timestep; waiting is free.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "cdr/skeleton.hpp"

namespace cdr::mapf {

/// Vertex occupied at each timestep, starting at t = 0.
struct SkeletonPath {
  int robot = 0;
  std::vector<int> vertices;

  /// Timestep of arrival at the final vertex.
  int arrival() const { return static_cast<int>(vertices.size()) - 1; }
  /// Vertex at time t; the path is padded by waiting at its last vertex.
  int at(int t) const {
    return vertices[static_cast<std::size_t>(std::min(t, arrival()))];
  }
};

/// One robot's step from `from` to `to`; from == to is a wait.
struct Move {
  int from = 0;
  int to = 0;

  bool stationary() const { return from == to; }
  auto operator<=>(const Move&) const = default;
};

using MoveTuple = std::vector<Move>;
using VertexTuple = std::vector<int>;

/// Joint-solution bans fed back from the motion planner: composite edges and
/// composite vertices that future solutions must not contain at any timestep.
struct CompositeBans {
  std::set<MoveTuple> edges;
  std::set<VertexTuple> vertices;

  bool empty() const { return edges.empty() && vertices.empty(); }
};

struct CapacityConflict {
  int edge = 0;
  int time = 0;
  std::vector<int> robots;  ///< Every robot on the edge during [time, time + 1].
};

/// Per-robot constraint used inside the high-level searches.
struct Constraint {
  enum class Kind { Edge, Move, Vertex };
  Kind kind = Kind::Edge;
  int robot = 0;
  int time = 0;
  int edge = -1;  ///< Kind::Edge: may not traverse this edge during [time, time + 1].
  Move move;      ///< Kind::Move: may not make this move during [time, time + 1].
  int vertex = -1;  ///< Kind::Vertex: may not occupy this vertex at `time`.

  static Constraint edgeBan(int robot, int edge, int time) { return {Kind::Edge, robot, time, edge, {}, -1}; }
  static Constraint moveBan(int robot, Move move, int time) { return {Kind::Move, robot, time, -1, move, -1}; }
  static Constraint vertexBan(int robot, int vertex, int time) { return {Kind::Vertex, robot, time, -1, {}, vertex}; }
};

/// Capacity already consumed on each (edge, timestep) by other robots.
class ReservationTable {
 public:
  void reserve(const skel::WorkspaceSkeleton& skel, const SkeletonPath& path, double width);
  double used(int edge, int time) const;

 private:
  std::vector<std::vector<double>> usage_;  // [edge][time]
};

struct Instance {
  const skel::WorkspaceSkeleton* skeleton = nullptr;
  std::vector<double> widths;  ///< Robot widths (2 * radius).
  std::vector<int> starts;
  std::vector<int> goals;
  const CompositeBans* bans = nullptr;

  std::size_t robotCount() const { return widths.size(); }
};

struct SolverOptions {
  int horizon = 0;                    ///< <= 0 selects the default horizon.
  std::size_t nodeBudget = 20000;     ///< High-level node expansions.
  std::size_t stateBudget = 1000000;  ///< Joint-state oracle only.
};

struct Solution {
  std::vector<SkeletonPath> paths;
  std::size_t expanded = 0;

  int makespan() const;
  int sumOfCosts() const;
};

enum class HighLevel { CBS, PBS };

/// Default horizon: 4 * (longest individual shortest path + robot count).
int defaultHorizon(const Instance& instance);

/// Time-expanded search for one robot. Minimizes arrival time, then traversed
/// Euclidean length, then the vertex sequence lexicographically. The robot
/// must be able to wait at the goal forever once it arrives.
std::optional<SkeletonPath> lowLevelSearch(const skel::WorkspaceSkeleton& skel, double width, int robot,
                                           int start, int goal, std::span<const Constraint> constraints,
                                           int horizon, const ReservationTable* reservations = nullptr);

/// Earliest capacity conflict (lowest edge id among ties), if any.
std::optional<CapacityConflict> findCapacityConflict(std::span<const SkeletonPath> paths,
                                                     const skel::WorkspaceSkeleton& skel,
                                                     std::span<const double> widths);

/// Moves of every robot during [t, t + 1].
MoveTuple movesAt(std::span<const SkeletonPath> paths, int t);
VertexTuple verticesAt(std::span<const SkeletonPath> paths, int t);

/// First timestep at which the joint solution contains a banned composite
/// edge (moves during [t, t + 1]) or a banned composite vertex (t >= 1).
struct BanViolation {
  int time = 0;
  bool isEdge = false;
};
std::optional<BanViolation> findBanViolation(std::span<const SkeletonPath> paths, const CompositeBans& bans);

std::optional<Solution> cbsSolve(const Instance& instance, const SolverOptions& options = {});
std::optional<Solution> pbsSolve(const Instance& instance, const SolverOptions& options = {});
std::optional<Solution> solve(HighLevel solver, const Instance& instance, const SolverOptions& options = {});

/// Breadth-first search over joint vertex tuples; makespan-optimal. Returns
/// nullopt when infeasible or when the state budget is exceeded.
std::optional<Solution> jointStateOracle(const Instance& instance, const SolverOptions& options = {});

}  // namespace cdr::mapf

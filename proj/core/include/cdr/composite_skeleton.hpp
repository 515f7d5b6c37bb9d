#pragma once

// Lazily grown composite skeleton. Each grow call solves MAPF from a
// composite vertex and keeps only the first composite edge of the solution.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "cdr/mapf.hpp"
#include "cdr/skeleton.hpp"

namespace cdr::comp {

using mapf::MoveTuple;
using mapf::VertexTuple;

struct CompositeVertex {
  int id = 0;
  VertexTuple vertices;
  int predecessor = -1;  ///< -1 for the root.
  int failedGrowthCount = 0;
  bool alive = true;
};

struct CompositeEdge {
  int id = 0;
  int source = 0;
  int target = 0;
  MoveTuple moves;
  std::vector<int> skeletonEdges;  ///< Per robot; -1 for a stationary robot.
  int stepCount = 2;
  /// Per-robot lockstep waypoints, stepCount each. Stationary robots repeat
  /// their vertex point.
  std::vector<std::vector<geom::Vec2>> waypoints;
  bool useful = true;
  bool alive = true;
};

/// Failed composite edges and vertices (the constraint set fed to MAPF).
class FailureSet {
 public:
  /// Returns true when the tuple was not banned before.
  bool banEdge(const MoveTuple& moves) { return bans_.edges.insert(moves).second; }
  bool banVertex(const VertexTuple& vertices) { return bans_.vertices.insert(vertices).second; }
  bool edgeBanned(const MoveTuple& moves) const { return bans_.edges.count(moves) > 0; }
  bool vertexBanned(const VertexTuple& vertices) const { return bans_.vertices.count(vertices) > 0; }
  std::size_t size() const { return bans_.edges.size() + bans_.vertices.size(); }
  const mapf::CompositeBans& bans() const { return bans_; }

 private:
  mapf::CompositeBans bans_;
};

struct GrowTelemetry {
  std::size_t growCalls = 0;
  std::size_t edgesGrown = 0;
  std::size_t verticesBanned = 0;
  std::size_t edgesBanned = 0;
  std::size_t mapfCalls = 0;
  std::size_t backtracks = 0;
  std::size_t gcRemovedEdges = 0;
  std::size_t gcRemovedVertices = 0;
};

struct GrowOptions {
  mapf::HighLevel solver = mapf::HighLevel::PBS;
  mapf::SolverOptions mapf;
  int maxGrowthFailures = 3;
  double spacing = 0.2;  ///< Lockstep intermediate spacing (meters).
};

struct GrowResult {
  enum class Status { Edge, QueryReached, Exhausted };
  Status status = Status::Exhausted;
  int edge = -1;    ///< Status::Edge only.
  int vertex = -1;  ///< Vertex the growth finally started from.
};

/// Outcome of extracting the first composite edge of a MAPF solution.
struct FirstEdge {
  MoveTuple moves;
  VertexTuple target;
};

/// First timestep at which some robot moves; moving robots contribute their
/// step, the others a stationary move. Search starts at the last time the
/// joint state equals the start tuple. nullopt when nobody ever moves.
std::optional<FirstEdge> extractFirstCompositeEdge(std::span<const mapf::SkeletonPath> paths);

class CompositeSkeleton {
 public:
  CompositeSkeleton(const skel::WorkspaceSkeleton& skeleton, std::vector<double> widths, VertexTuple starts,
                    VertexTuple goals, GrowOptions options = {});

  int root() const { return 0; }
  const VertexTuple& goals() const { return goals_; }
  const CompositeVertex& vertex(int id) const { return vertices_.at(static_cast<std::size_t>(id)); }
  const CompositeEdge& edge(int id) const { return edges_.at(static_cast<std::size_t>(id)); }
  std::size_t aliveVertexCount() const;
  std::size_t aliveEdgeCount() const;
  std::vector<int> aliveEdges() const;
  std::vector<int> aliveVertices() const;
  const GrowTelemetry& telemetry() const { return telemetry_; }
  const GrowOptions& options() const { return options_; }

  /// Grows one composite edge out of `from`, backtracking along predecessors
  /// past vertices that exceeded their growth failures.
  GrowResult grow(int from, FailureSet& failures);

  /// Bans the edge's move tuple and charges a failure to its source vertex.
  /// Repeated calls for the same edge change nothing.
  void recordFailedEdge(int edge, FailureSet& failures);

  /// Marks an edge finished: its region reached the end or was replaced.
  void markFinished(int edge);

  /// Removes finished edges, then vertices without a useful incident edge
  /// that are not on the predecessor chain of `active`.
  void gcUseless(int active);

  /// Predecessor chain from `v` to the root, inclusive.
  std::vector<int> predecessorChain(int v) const;

 private:
  int findOrAddVertex(const VertexTuple& tuple, int predecessor);
  int addEdge(int source, const FirstEdge& first);
  bool exceeded(const CompositeVertex& v) const { return v.failedGrowthCount > options_.maxGrowthFailures; }

  const skel::WorkspaceSkeleton* skeleton_;
  std::vector<double> widths_;
  VertexTuple goals_;
  GrowOptions options_;
  std::vector<CompositeVertex> vertices_;
  std::vector<CompositeEdge> edges_;
  std::map<VertexTuple, int> vertexIndex_;
  GrowTelemetry telemetry_;
};

}  // namespace cdr::comp

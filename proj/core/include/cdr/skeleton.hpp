#pragma once

// Annotated workspace skeletons: construction from a grid medial axis,
// import, resampling and query-skeleton extraction.

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "cdr/geom2d.hpp"

namespace cdr::skel {

using geom::Vec2;

struct SkeletonVertex {
  int id = 0;  ///< Dense index; equals the position in WorkspaceSkeleton::vertices().
  Vec2 point;
};

struct SkeletonEdge {
  int id = 0;  ///< Dense index; equals the position in WorkspaceSkeleton::edges().
  int source = 0;
  int target = 0;
  std::vector<Vec2> intermediates;  ///< Polyline from source point to target point.
  double capacity = 0.0;            ///< Minimum 2 * clearance over intermediates.
  double length = 0.0;

  int other(int v) const { return v == source ? target : source; }
};

double polylineLength(const std::vector<Vec2>& points);

/// Undirected embedded graph with no self loops and no parallel edges.
class WorkspaceSkeleton {
 public:
  WorkspaceSkeleton() = default;

  int addVertex(Vec2 p);
  /// Adds an edge whose polyline must start at the source point and end at the
  /// target point. Capacity and length are taken from the arguments.
  int addEdge(int source, int target, std::vector<Vec2> intermediates, double capacity);

  const std::vector<SkeletonVertex>& vertices() const { return vertices_; }
  const std::vector<SkeletonEdge>& edges() const { return edges_; }
  const SkeletonEdge& edge(int id) const { return edges_.at(static_cast<std::size_t>(id)); }
  const SkeletonVertex& vertex(int id) const { return vertices_.at(static_cast<std::size_t>(id)); }
  /// Incident edge ids of a vertex, ascending.
  const std::vector<int>& incident(int v) const { return adjacency_.at(static_cast<std::size_t>(v)); }
  /// Edge joining u and v, if any.
  std::optional<int> edgeBetween(int u, int v) const;

  bool empty() const { return vertices_.empty(); }
  std::size_t vertexCount() const { return vertices_.size(); }
  std::size_t edgeCount() const { return edges_.size(); }

  /// Recomputes capacity of every edge from the environment.
  void annotateCapacities(const geom::Environment& env);
  /// Resamples every edge so consecutive intermediates are at most `spacing` apart.
  void resampleAll(double spacing, const geom::Environment& env);

 private:
  std::vector<SkeletonVertex> vertices_;
  std::vector<SkeletonEdge> edges_;
  std::vector<std::vector<int>> adjacency_;
};

double edgeCapacity(const std::vector<Vec2>& intermediates, const geom::Environment& env);

/// Uniform arc-length resampling into `segments` pieces (at least one).
std::vector<Vec2> resamplePolyline(const std::vector<Vec2>& points, std::size_t segments);

/// Arc-length reparameterization with spacing <= `spacing` and endpoints kept.
SkeletonEdge resampleIntermediates(const SkeletonEdge& edge, double spacing,
                                   const geom::Environment& env);

struct MedialAxisOptions {
  double gridResolution = 0.1;
  /// Dangling branches are trimmed back to where clearance reaches this value.
  double tipClearance = 0.0;
  /// Spacing of the emitted intermediates; <= 0 keeps the traced grid points.
  double spacing = 0.0;
};

/// Approximate medial axis of the free space computed on a grid. Throws
/// std::runtime_error when the free space is empty.
WorkspaceSkeleton buildMedialAxisSkeleton(const geom::Environment& env,
                                          const MedialAxisOptions& options = {});

/// Parses the skeleton JSON schema. Vertex ids may be any unique integers; they
/// are remapped to dense indices in ascending id order. Missing capacities are
/// computed from `env`; a missing capacity without an environment is an error.
/// Throws std::runtime_error on schema violations.
WorkspaceSkeleton loadSkeleton(std::istream& in, const geom::Environment* env = nullptr);
WorkspaceSkeleton loadSkeletonFile(const std::string& path, const geom::Environment* env = nullptr);
std::string skeletonToJson(const WorkspaceSkeleton& skel);

/// Closest vertex to p, lowest id on ties. Throws on an empty skeleton.
int nearestSkeletonVertex(const WorkspaceSkeleton& skel, const Vec2& p);

/// Per-robot view: edges narrower than the robot are unusable.
struct SkeletonView {
  const WorkspaceSkeleton* skeleton = nullptr;
  double width = 0.0;

  bool usable(int edgeId) const { return skeleton->edge(edgeId).capacity >= width; }
};

/// Unweighted hop distances from `source` over usable edges; -1 when unreachable.
std::vector<int> hopDistances(const SkeletonView& view, int source);
/// Euclidean shortest-path lengths over usable edges; +inf when unreachable.
std::vector<double> pathLengths(const SkeletonView& view, int source);

struct DirectedEdge {
  int edge = 0;
  int from = 0;
  int to = 0;
};

struct QuerySkeleton {
  int start = 0;
  int goal = 0;
  std::vector<DirectedEdge> edges;
  std::vector<int> vertices;  ///< Ascending ids of vertices incident to kept edges (or start).

  /// Outgoing directed edges of v.
  std::vector<DirectedEdge> outgoing(int v) const;
};

/// Directed, pruned skeleton whose edges all lie on some start-to-goal path.
/// Throws std::runtime_error("query not coverable by skeleton") when the
/// start and goal vertices are disconnected.
QuerySkeleton computeQuerySkeleton(const SkeletonView& view, const Vec2& start, const Vec2& goal);
QuerySkeleton computeQuerySkeleton(const SkeletonView& view, int startVertex, int goalVertex);

}  // namespace cdr::skel

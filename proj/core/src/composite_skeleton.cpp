#include "cdr/composite_skeleton.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace cdr::comp {

std::optional<FirstEdge> extractFirstCompositeEdge(std::span<const mapf::SkeletonPath> paths) {
  int horizon = 0;
  for (const auto& p : paths) horizon = std::max(horizon, p.arrival());
  // Skip any detour that returns to the start tuple.
  const auto start = mapf::verticesAt(paths, 0);
  int from = 0;
  for (int t = 1; t < horizon; ++t)
    if (mapf::verticesAt(paths, t) == start) from = t;
  for (int t = from; t < horizon; ++t) {
    auto moves = mapf::movesAt(paths, t);
    if (std::all_of(moves.begin(), moves.end(), [](const mapf::Move& m) { return m.stationary(); })) continue;
    return FirstEdge{std::move(moves), mapf::verticesAt(paths, t + 1)};
  }
  return std::nullopt;
}

CompositeSkeleton::CompositeSkeleton(const skel::WorkspaceSkeleton& skeleton, std::vector<double> widths,
                                     VertexTuple starts, VertexTuple goals, GrowOptions options)
    : skeleton_(&skeleton), widths_(std::move(widths)), goals_(std::move(goals)), options_(options) {
  if (starts.size() != widths_.size() || goals_.size() != widths_.size())
    throw std::invalid_argument("composite skeleton: tuple sizes differ from robot count");
  if (!(options_.spacing > 0.0)) throw std::invalid_argument("composite skeleton: spacing must be positive");
  findOrAddVertex(starts, -1);
}

std::size_t CompositeSkeleton::aliveVertexCount() const {
  return static_cast<std::size_t>(std::count_if(vertices_.begin(), vertices_.end(), [](const auto& v) { return v.alive; }));
}

std::size_t CompositeSkeleton::aliveEdgeCount() const {
  return static_cast<std::size_t>(std::count_if(edges_.begin(), edges_.end(), [](const auto& e) { return e.alive; }));
}

std::vector<int> CompositeSkeleton::aliveEdges() const {
  std::vector<int> out;
  for (const auto& e : edges_)
    if (e.alive) out.push_back(e.id);
  return out;
}

std::vector<int> CompositeSkeleton::aliveVertices() const {
  std::vector<int> out;
  for (const auto& v : vertices_)
    if (v.alive) out.push_back(v.id);
  return out;
}

std::vector<int> CompositeSkeleton::predecessorChain(int v) const {
  std::vector<int> chain;
  for (int x = v; x >= 0; x = vertex(x).predecessor) chain.push_back(x);
  return chain;
}

int CompositeSkeleton::findOrAddVertex(const VertexTuple& tuple, int predecessor) {
  if (auto it = vertexIndex_.find(tuple); it != vertexIndex_.end()) return it->second;
  const int id = static_cast<int>(vertices_.size());
  vertices_.push_back({id, tuple, predecessor, 0, true});
  vertexIndex_.emplace(tuple, id);
  return id;
}

int CompositeSkeleton::addEdge(int source, const FirstEdge& first) {
  for (auto& e : edges_) {
    if (e.alive && e.source == source && e.moves == first.moves) {
      e.useful = true;
      return e.id;
    }
  }
  const std::size_t n = widths_.size();
  CompositeEdge edge;
  edge.id = static_cast<int>(edges_.size());
  edge.source = source;
  edge.target = findOrAddVertex(first.target, source);
  edge.moves = first.moves;
  edge.skeletonEdges.assign(n, -1);

  std::vector<std::vector<geom::Vec2>> polylines(n);
  int steps = 2;
  for (std::size_t r = 0; r < n; ++r) {
    const auto& m = first.moves[r];
    if (m.stationary()) continue;
    const int e = *skeleton_->edgeBetween(m.from, m.to);
    edge.skeletonEdges[r] = e;
    const auto& se = skeleton_->edge(e);
    polylines[r] = se.intermediates;
    if (se.source != m.from) std::reverse(polylines[r].begin(), polylines[r].end());
    steps = std::max(steps, static_cast<int>(std::ceil(se.length / options_.spacing - 1e-12)) + 1);
  }
  edge.stepCount = steps;
  edge.waypoints.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    if (edge.skeletonEdges[r] < 0)
      edge.waypoints[r].assign(static_cast<std::size_t>(steps), skeleton_->vertex(first.moves[r].from).point);
    else
      edge.waypoints[r] = skel::resamplePolyline(polylines[r], static_cast<std::size_t>(steps - 1));
  }
  edges_.push_back(std::move(edge));
  ++telemetry_.edgesGrown;
  return edges_.back().id;
}

GrowResult CompositeSkeleton::grow(int from, FailureSet& failures) {
  ++telemetry_.growCalls;
  int v = from;
  auto backtrack = [&] {
    auto& cur = vertices_[static_cast<std::size_t>(v)];
    if (exceeded(cur) && failures.banVertex(cur.vertices)) ++telemetry_.verticesBanned;
    v = cur.predecessor;
    ++telemetry_.backtracks;
  };
  while (true) {
    while (exceeded(vertex(v)) && vertex(v).predecessor >= 0) backtrack();
    auto& cur = vertices_[static_cast<std::size_t>(v)];
    if (cur.vertices == goals_) return {GrowResult::Status::QueryReached, -1, v};

    ++telemetry_.mapfCalls;
    const mapf::Instance instance{skeleton_, widths_, cur.vertices, goals_, &failures.bans()};
    const auto solution = mapf::solve(options_.solver, instance, options_.mapf);
    if (!solution) {
      if (cur.predecessor < 0) return {GrowResult::Status::Exhausted, -1, v};
      ++cur.failedGrowthCount;
      backtrack();
      continue;
    }
    const auto first = extractFirstCompositeEdge(solution->paths);
    if (!first) return {GrowResult::Status::QueryReached, -1, v};
    return {GrowResult::Status::Edge, addEdge(v, *first), v};
  }
}

void CompositeSkeleton::recordFailedEdge(int edgeId, FailureSet& failures) {
  const auto& e = edge(edgeId);
  if (!failures.banEdge(e.moves)) return;
  ++telemetry_.edgesBanned;
  ++vertices_[static_cast<std::size_t>(e.source)].failedGrowthCount;
}

void CompositeSkeleton::markFinished(int edgeId) { edges_.at(static_cast<std::size_t>(edgeId)).useful = false; }

void CompositeSkeleton::gcUseless(int active) {
  for (auto& e : edges_) {
    if (!e.alive || e.useful) continue;
    e.alive = false;
    ++telemetry_.gcRemovedEdges;
  }
  std::vector<char> keep(vertices_.size(), 0);
  auto protect = [&](int v) {
    for (int x = v; x >= 0 && !keep[static_cast<std::size_t>(x)]; x = vertex(x).predecessor)
      keep[static_cast<std::size_t>(x)] = 1;
  };
  protect(active);
  for (const auto& e : edges_) {
    if (!e.alive) continue;
    protect(e.source);
    protect(e.target);
  }
  for (auto& v : vertices_) {
    if (!v.alive || keep[static_cast<std::size_t>(v.id)]) continue;
    v.alive = false;
    vertexIndex_.erase(v.vertices);
    ++telemetry_.gcRemovedVertices;
  }
}

}  // namespace cdr::comp

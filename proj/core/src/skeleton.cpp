#include "cdr/skeleton.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <stdexcept>
#include <tuple>

namespace cdr::skel {

double polylineLength(const std::vector<Vec2>& points) {
  double len = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) len += geom::distance(points[i - 1], points[i]);
  return len;
}

int WorkspaceSkeleton::addVertex(Vec2 p) {
  const int id = static_cast<int>(vertices_.size());
  vertices_.push_back({id, p});
  adjacency_.emplace_back();
  return id;
}

int WorkspaceSkeleton::addEdge(int source, int target, std::vector<Vec2> intermediates,
                               double capacity) {
  const auto n = static_cast<int>(vertices_.size());
  if (source < 0 || source >= n || target < 0 || target >= n)
    throw std::invalid_argument("edge endpoint does not exist");
  if (source == target) throw std::invalid_argument("self-loop edges are not supported");
  if (edgeBetween(source, target)) throw std::invalid_argument("parallel edges are not supported");
  if (intermediates.size() < 2) intermediates = {vertices_[source].point, vertices_[target].point};
  intermediates.front() = vertices_[source].point;
  intermediates.back() = vertices_[target].point;
  const int id = static_cast<int>(edges_.size());
  SkeletonEdge e;
  e.id = id;
  e.source = source;
  e.target = target;
  e.length = polylineLength(intermediates);
  e.intermediates = std::move(intermediates);
  e.capacity = capacity;
  edges_.push_back(std::move(e));
  adjacency_[source].push_back(id);
  adjacency_[target].push_back(id);
  return id;
}

std::optional<int> WorkspaceSkeleton::edgeBetween(int u, int v) const {
  if (u < 0 || v < 0 || u >= static_cast<int>(vertices_.size())) return std::nullopt;
  for (int e : adjacency_[u]) {
    const auto& edge = edges_[e];
    if ((edge.source == u && edge.target == v) || (edge.source == v && edge.target == u)) return e;
  }
  return std::nullopt;
}

double edgeCapacity(const std::vector<Vec2>& intermediates, const geom::Environment& env) {
  double cap = std::numeric_limits<double>::infinity();
  for (const auto& p : intermediates) {
    const double c = env.bounds().contains(p) ? env.clearance(p) : 0.0;
    cap = std::min(cap, 2.0 * c);
  }
  return cap;
}

void WorkspaceSkeleton::annotateCapacities(const geom::Environment& env) {
  for (auto& e : edges_) e.capacity = edgeCapacity(e.intermediates, env);
}

void WorkspaceSkeleton::resampleAll(double spacing, const geom::Environment& env) {
  for (auto& e : edges_) e = resampleIntermediates(e, spacing, env);
}

std::vector<Vec2> resamplePolyline(const std::vector<Vec2>& pts, std::size_t segments) {
  if (pts.empty()) throw std::invalid_argument("cannot resample an empty polyline");
  segments = std::max<std::size_t>(1, segments);
  std::vector<double> cumulative(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i)
    cumulative[i] = cumulative[i - 1] + geom::distance(pts[i - 1], pts[i]);
  const double total = cumulative.back();

  std::vector<Vec2> out;
  out.reserve(segments + 1);
  out.push_back(pts.front());
  std::size_t seg = 1;
  for (std::size_t k = 1; k < segments; ++k) {
    if (pts.size() == 1) {
      out.push_back(pts.front());
      continue;
    }
    const double s = total * static_cast<double>(k) / static_cast<double>(segments);
    while (seg + 1 < pts.size() && cumulative[seg] < s) ++seg;
    const double span = cumulative[seg] - cumulative[seg - 1];
    const double t = span > 0.0 ? (s - cumulative[seg - 1]) / span : 0.0;
    out.push_back(pts[seg - 1] + (pts[seg] - pts[seg - 1]) * t);
  }
  out.push_back(pts.back());
  return out;
}

SkeletonEdge resampleIntermediates(const SkeletonEdge& edge, double spacing,
                                   const geom::Environment& env) {
  if (!(spacing > 0.0)) throw std::invalid_argument("resample spacing must be positive");
  const auto& pts = edge.intermediates;
  const double total = polylineLength(pts);
  const auto segments = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(total / spacing - 1e-12)));

  // Uniform arc-length samples, merged with the bends of the original polyline
  // so the resampled curve traces the same path.
  std::vector<std::pair<double, Vec2>> marks;
  const auto uniform = resamplePolyline(pts, segments);
  for (std::size_t k = 0; k < uniform.size(); ++k)
    marks.push_back({total * static_cast<double>(k) / static_cast<double>(segments), uniform[k]});
  double s = 0.0;
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    s += geom::distance(pts[i - 1], pts[i]);
    const Vec2 a = pts[i] - pts[i - 1];
    const Vec2 b = pts[i + 1] - pts[i];
    const double scale = a.squaredNorm() * b.squaredNorm();
    const bool bend = std::abs(a.cross(b)) > 1e-9 * std::sqrt(scale) || a.dot(b) < 0.0;
    if (bend && s > 0.0 && s < total) marks.push_back({s, pts[i]});
  }
  std::stable_sort(marks.begin(), marks.end(), [](const auto& x, const auto& y) { return x.first < y.first; });

  std::vector<Vec2> out;
  for (const auto& [arc, p] : marks)
    if (out.empty() || geom::distance(out.back(), p) > 1e-12) out.push_back(p);
  if (out.size() == 1) out.push_back(pts.back());
  out.back() = pts.back();

  SkeletonEdge result = edge;
  result.intermediates = std::move(out);
  result.length = polylineLength(result.intermediates);
  result.capacity = edgeCapacity(result.intermediates, env);
  return result;
}

int nearestSkeletonVertex(const WorkspaceSkeleton& skel, const Vec2& p) {
  if (skel.empty()) throw std::runtime_error("nearest vertex query on an empty skeleton");
  int best = 0;
  double bestDist = std::numeric_limits<double>::infinity();
  for (const auto& v : skel.vertices()) {
    const double d = (v.point - p).squaredNorm();
    if (d < bestDist) {
      bestDist = d;
      best = v.id;
    }
  }
  return best;
}

std::vector<int> hopDistances(const SkeletonView& view, int source) {
  const auto& skel = *view.skeleton;
  std::vector<int> dist(skel.vertexCount(), -1);
  std::deque<int> frontier{source};
  dist[source] = 0;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop_front();
    for (int e : skel.incident(u)) {
      if (!view.usable(e)) continue;
      const int v = skel.edge(e).other(u);
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        frontier.push_back(v);
      }
    }
  }
  return dist;
}

std::vector<double> pathLengths(const SkeletonView& view, int source) {
  const auto& skel = *view.skeleton;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(skel.vertexCount(), kInf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist[source] = 0.0;
  open.emplace(0.0, source);
  while (!open.empty()) {
    const auto [d, u] = open.top();
    open.pop();
    if (d > dist[u]) continue;
    for (int e : skel.incident(u)) {
      if (!view.usable(e)) continue;
      const auto& edge = skel.edge(e);
      const int v = edge.other(u);
      const double nd = d + edge.length;
      if (nd < dist[v]) {
        dist[v] = nd;
        open.emplace(nd, v);
      }
    }
  }
  return dist;
}

std::vector<DirectedEdge> QuerySkeleton::outgoing(int v) const {
  std::vector<DirectedEdge> out;
  for (const auto& e : edges)
    if (e.from == v) out.push_back(e);
  return out;
}

QuerySkeleton computeQuerySkeleton(const SkeletonView& view, const Vec2& start, const Vec2& goal) {
  return computeQuerySkeleton(view, nearestSkeletonVertex(*view.skeleton, start),
                              nearestSkeletonVertex(*view.skeleton, goal));
}

QuerySkeleton computeQuerySkeleton(const SkeletonView& view, int startVertex, int goalVertex) {
  const auto& skel = *view.skeleton;
  const auto fromStart = pathLengths(view, startVertex);
  const auto toGoal = pathLengths(view, goalVertex);
  if (!std::isfinite(fromStart[goalVertex]))
    throw std::runtime_error("query not coverable by skeleton");

  // Orient every reachable edge along a strict total order of its endpoints,
  // which makes the directed graph acyclic.
  auto precedes = [&](int a, int b) {
    return std::make_tuple(fromStart[a], -toGoal[a], a) < std::make_tuple(fromStart[b], -toGoal[b], b);
  };
  std::vector<DirectedEdge> oriented;
  for (const auto& e : skel.edges()) {
    if (!view.usable(e.id) || !std::isfinite(fromStart[e.source])) continue;
    if (precedes(e.source, e.target))
      oriented.push_back({e.id, e.source, e.target});
    else
      oriented.push_back({e.id, e.target, e.source});
  }

  const std::size_t n = skel.vertexCount();
  std::vector<std::vector<int>> out(n), in(n);
  for (std::size_t i = 0; i < oriented.size(); ++i) {
    out[oriented[i].from].push_back(static_cast<int>(i));
    in[oriented[i].to].push_back(static_cast<int>(i));
  }
  auto reach = [&](int root, const std::vector<std::vector<int>>& adj, bool forward) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack{root};
    seen[root] = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int idx : adj[u]) {
        const int v = forward ? oriented[idx].to : oriented[idx].from;
        if (!seen[v]) {
          seen[v] = 1;
          stack.push_back(v);
        }
      }
    }
    return seen;
  };
  const auto forward = reach(startVertex, out, true);
  const auto backward = reach(goalVertex, in, false);

  QuerySkeleton q;
  q.start = startVertex;
  q.goal = goalVertex;
  std::vector<char> keep(n, 0);
  keep[startVertex] = 1;
  for (const auto& e : oriented) {
    if (forward[e.from] && backward[e.to]) {
      q.edges.push_back(e);
      keep[e.from] = keep[e.to] = 1;
    }
  }
  for (std::size_t v = 0; v < n; ++v)
    if (keep[v]) q.vertices.push_back(static_cast<int>(v));
  return q;
}

}  // namespace cdr::skel

#pragma once

#include <cmath>
#include <random>
#include <set>
#include <tuple>
#include <vector>

#include "cdr/mapf.hpp"
#include "cdr/skeleton.hpp"

namespace cdr::test {

struct GraphEdge {
  int u;
  int v;
  double capacity;
};

// Straight-edged skeleton from explicit points and edges.
inline skel::WorkspaceSkeleton makeGraph(const std::vector<geom::Vec2>& points, const std::vector<GraphEdge>& edges) {
  skel::WorkspaceSkeleton g;
  for (const auto& p : points) g.addVertex(p);
  for (const auto& e : edges)
    g.addEdge(e.u, e.v, {points[static_cast<std::size_t>(e.u)], points[static_cast<std::size_t>(e.v)]}, e.capacity);
  return g;
}

// Random connected graph on up to `maxVertices` vertices placed on a circle.
inline skel::WorkspaceSkeleton randomGraph(std::mt19937& rng, int maxVertices) {
  std::uniform_int_distribution<int> count(3, maxVertices);
  const int n = count(rng);
  std::vector<geom::Vec2> points;
  for (int i = 0; i < n; ++i) {
    const double a = 6.283185307179586 * i / n;
    points.push_back({std::cos(a) * 3.0, std::sin(a) * 3.0});
  }
  std::uniform_real_distribution<double> cap(0.3, 1.6);
  std::vector<GraphEdge> edges;
  std::set<std::pair<int, int>> used;
  for (int v = 1; v < n; ++v) {
    const int u = std::uniform_int_distribution<int>(0, v - 1)(rng);
    edges.push_back({u, v, cap(rng)});
    used.insert({u, v});
  }
  const int extra = std::uniform_int_distribution<int>(0, n)(rng);
  for (int k = 0; k < extra; ++k) {
    int u = std::uniform_int_distribution<int>(0, n - 1)(rng);
    int v = std::uniform_int_distribution<int>(0, n - 1)(rng);
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (!used.insert({u, v}).second) continue;
    edges.push_back({u, v, cap(rng)});
  }
  return makeGraph(points, edges);
}

}  // namespace cdr::test

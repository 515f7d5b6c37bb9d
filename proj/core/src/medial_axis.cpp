// Grid medial axis: rasterize free space, run an exact Euclidean feature
// transform, keep cells whose neighbours see distant obstacle features, thin
// to one-pixel curves and trace the result into a graph.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>

#include "cdr/skeleton.hpp"

namespace cdr::skel {
namespace {

struct Grid {
  int nx = 0;
  int ny = 0;
  double res = 0.0;
  Vec2 origin;

  int index(int i, int j) const { return j * nx + i; }
  bool inside(int i, int j) const { return i >= 0 && j >= 0 && i < nx && j < ny; }
  Vec2 center(int i, int j) const { return {origin.x + (i + 0.5) * res, origin.y + (j + 0.5) * res}; }
  Vec2 center(int idx) const { return center(idx % nx, idx / nx); }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
};

constexpr int kDx8[8] = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr int kDy8[8] = {0, 1, 1, 1, 0, -1, -1, -1};

// Nearest obstacle site per cell on a grid padded by one ring of obstacle
// cells (the bounds act as walls). Sites are stored as padded (x, y).
struct FeatureTransform {
  std::vector<int> siteX;
  std::vector<int> siteY;
  std::vector<double> dist;  // in cells
};

FeatureTransform featureTransform(const Grid& g, const std::vector<char>& free) {
  const int px = g.nx + 2;
  const int py = g.ny + 2;
  auto isFree = [&](int x, int y) {
    return x >= 1 && y >= 1 && x <= g.nx && y <= g.ny && free[g.index(x - 1, y - 1)];
  };
  constexpr long long kFar = std::numeric_limits<int>::max() / 4;

  // Column pass: nearest obstacle row per padded cell.
  std::vector<int> colSite(static_cast<std::size_t>(px) * py, -1);
  for (int x = 0; x < px; ++x) {
    int last = -1;
    for (int y = 0; y < py; ++y) {
      if (!isFree(x, y)) last = y;
      colSite[y * px + x] = last;
    }
    last = -1;
    for (int y = py - 1; y >= 0; --y) {
      if (!isFree(x, y)) last = y;
      int& s = colSite[y * px + x];
      if (last >= 0 && (s < 0 || last - y < y - s)) s = last;
    }
  }

  FeatureTransform ft;
  ft.siteX.assign(g.size(), 0);
  ft.siteY.assign(g.size(), 0);
  ft.dist.assign(g.size(), 0.0);

  // Row pass: lower envelope of parabolas (Felzenszwalb-Huttenlocher).
  std::vector<int> v(px);
  std::vector<double> z(px + 1);
  std::vector<long long> f(px);
  for (int y = 0; y < py; ++y) {
    for (int x = 0; x < px; ++x) {
      const int s = colSite[y * px + x];
      f[x] = s < 0 ? kFar : static_cast<long long>(s - y) * (s - y);
    }
    auto intersect = [&](int q, int r) {
      return (static_cast<double>(f[q] + 1LL * q * q) - static_cast<double>(f[r] + 1LL * r * r)) /
             (2.0 * (q - r));
    };
    int k = 0;
    v[0] = 0;
    z[0] = -std::numeric_limits<double>::infinity();
    z[1] = std::numeric_limits<double>::infinity();
    for (int q = 1; q < px; ++q) {
      double s = intersect(q, v[k]);
      while (s <= z[k]) {
        --k;
        s = intersect(q, v[k]);
      }
      ++k;
      v[k] = q;
      z[k] = s;
      z[k + 1] = std::numeric_limits<double>::infinity();
    }
    k = 0;
    for (int x = 0; x < px; ++x) {
      while (z[k + 1] < x) ++k;
      if (x < 1 || y < 1 || x > g.nx || y > g.ny) continue;
      const int sx = v[k];
      const int sy = colSite[y * px + sx];
      const int idx = g.index(x - 1, y - 1);
      ft.siteX[idx] = sx;
      ft.siteY[idx] = sy;
      ft.dist[idx] = std::hypot(static_cast<double>(sx - x), static_cast<double>(sy - y));
    }
  }
  return ft;
}

// Sequential topology-preserving thinning: repeatedly peels simple border
// pixels (Yokoi 8-connectivity number of 1) from each side, keeping endpoints.
void thin(const Grid& g, std::vector<char>& mask) {
  auto at = [&](int i, int j) -> int { return g.inside(i, j) && mask[g.index(i, j)] ? 1 : 0; };
  // Neighbours counter-clockwise from east.
  constexpr int kRingX[8] = {1, 1, 0, -1, -1, -1, 0, 1};
  constexpr int kRingY[8] = {0, 1, 1, 1, 0, -1, -1, -1};
  constexpr int kSideX[4] = {0, 0, 1, -1};
  constexpr int kSideY[4] = {1, -1, 0, 0};
  bool changed = true;
  while (changed) {
    changed = false;
    for (int side = 0; side < 4; ++side) {
      for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
          if (!mask[g.index(i, j)]) continue;
          if (at(i + kSideX[side], j + kSideY[side])) continue;
          int x[9];
          int count = 0;
          for (int k = 0; k < 8; ++k) {
            x[k] = at(i + kRingX[k], j + kRingY[k]);
            count += x[k];
          }
          x[8] = x[0];
          if (count <= 1) continue;
          int yokoi = 0;
          for (int k = 0; k < 8; k += 2) {
            const int a = 1 - x[k];
            const int b = 1 - x[k + 1];
            const int c = 1 - (k + 2 < 9 ? x[k + 2] : x[0]);
            yokoi += a - a * b * c;
          }
          if (yokoi != 1) continue;
          mask[g.index(i, j)] = 0;
          changed = true;
        }
      }
    }
  }
}

// Pixel adjacency: 8-connected, minus diagonal links already bridged by a
// shared 4-neighbour.
std::vector<std::vector<int>> pixelLinks(const Grid& g, const std::vector<char>& mask) {
  std::vector<std::vector<int>> links(g.size());
  auto on = [&](int i, int j) { return g.inside(i, j) && mask[g.index(i, j)]; };
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (!on(i, j)) continue;
      for (int k = 0; k < 8; ++k) {
        const int ni = i + kDx8[k];
        const int nj = j + kDy8[k];
        if (!on(ni, nj)) continue;
        const bool diagonal = kDx8[k] != 0 && kDy8[k] != 0;
        if (diagonal && (on(ni, j) || on(i, nj))) continue;
        links[g.index(i, j)].push_back(g.index(ni, nj));
      }
    }
  return links;
}

std::vector<int> labelComponents(const Grid& g, const std::vector<char>& mask, bool eight) {
  std::vector<int> label(g.size(), -1);
  int next = 0;
  for (std::size_t s = 0; s < g.size(); ++s) {
    if (!mask[s] || label[s] >= 0) continue;
    std::vector<int> stack{static_cast<int>(s)};
    label[s] = next;
    while (!stack.empty()) {
      const int c = stack.back();
      stack.pop_back();
      const int ci = c % g.nx;
      const int cj = c / g.nx;
      for (int k = 0; k < 8; ++k) {
        if (!eight && k % 2 == 1) continue;
        const int ni = ci + kDx8[k];
        const int nj = cj + kDy8[k];
        if (!g.inside(ni, nj)) continue;
        const int n = g.index(ni, nj);
        if (mask[n] && label[n] < 0) {
          label[n] = next;
          stack.push_back(n);
        }
      }
    }
    ++next;
  }
  return label;
}

// Joins disconnected ridge pieces that share a free-space component by
// high-clearance paths through free cells.
void connectRidgePieces(const Grid& g, const std::vector<char>& free,
                        const std::vector<double>& dist, std::vector<char>& ridge) {
  const auto freeLabel = labelComponents(g, free, false);
  const int freeCount = freeLabel.empty() ? 0 : *std::max_element(freeLabel.begin(), freeLabel.end()) + 1;
  for (int comp = 0; comp < freeCount; ++comp) {
    bool hasRidge = false;
    int bestCell = -1;
    for (std::size_t c = 0; c < g.size(); ++c) {
      if (freeLabel[c] != comp) continue;
      if (ridge[c]) hasRidge = true;
      if (bestCell < 0 || dist[c] > dist[bestCell]) bestCell = static_cast<int>(c);
    }
    if (!hasRidge) {
      ridge[bestCell] = 1;
      continue;
    }
    while (true) {
      const auto pieces = labelComponents(g, ridge, true);
      int anchor = -1;
      std::set<int> piecesHere;
      for (std::size_t c = 0; c < g.size(); ++c)
        if (freeLabel[c] == comp && ridge[c]) {
          piecesHere.insert(pieces[c]);
          if (anchor < 0) anchor = pieces[c];
        }
      if (piecesHere.size() <= 1) break;

      // Dijkstra from the anchor piece until any other piece is hit.
      std::vector<double> cost(g.size(), std::numeric_limits<double>::infinity());
      std::vector<int> parent(g.size(), -1);
      using Item = std::pair<double, int>;
      std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
      for (std::size_t c = 0; c < g.size(); ++c)
        if (ridge[c] && pieces[c] == anchor) {
          cost[c] = 0.0;
          open.emplace(0.0, static_cast<int>(c));
        }
      int hit = -1;
      while (!open.empty()) {
        const auto [d, c] = open.top();
        open.pop();
        if (d > cost[c]) continue;
        if (ridge[c] && pieces[c] != anchor) {
          hit = c;
          break;
        }
        const int ci = c % g.nx;
        const int cj = c / g.nx;
        for (int k = 0; k < 8; ++k) {
          const int ni = ci + kDx8[k];
          const int nj = cj + kDy8[k];
          if (!g.inside(ni, nj)) continue;
          const int n = g.index(ni, nj);
          if (!free[n] || freeLabel[n] != comp) continue;
          const double step = (k % 2 == 0 ? 1.0 : std::sqrt(2.0)) * (1.0 + 4.0 / (dist[n] + 0.25));
          if (d + step < cost[n]) {
            cost[n] = d + step;
            parent[n] = c;
            open.emplace(cost[n], n);
          }
        }
      }
      if (hit < 0) break;
      for (int c = hit; c >= 0 && !(ridge[c] && pieces[c] == anchor); c = parent[c]) ridge[c] = 1;
    }
  }
}

// Mutable graph used while simplifying the traced pixel graph.
struct TraceGraph {
  struct Edge {
    int a = -1;
    int b = -1;
    std::vector<Vec2> pts;
    bool alive = true;
  };
  std::vector<Vec2> vertex;
  std::vector<char> vertexAlive;
  std::vector<Edge> edges;

  int addVertex(Vec2 p) {
    vertex.push_back(p);
    vertexAlive.push_back(1);
    return static_cast<int>(vertex.size()) - 1;
  }
  void addEdge(int a, int b, std::vector<Vec2> pts) { edges.push_back({a, b, std::move(pts), true}); }
  std::vector<int> incident(int v) const {
    std::vector<int> out;
    for (std::size_t e = 0; e < edges.size(); ++e)
      if (edges[e].alive && (edges[e].a == v || edges[e].b == v)) {
        out.push_back(static_cast<int>(e));
        if (edges[e].a == v && edges[e].b == v) out.push_back(static_cast<int>(e));
      }
    return out;
  }
  int degree(int v) const { return static_cast<int>(incident(v).size()); }
  // Points of edge e oriented to start at vertex v.
  std::vector<Vec2> from(int e, int v) const {
    auto pts = edges[e].pts;
    if (edges[e].a != v) std::reverse(pts.begin(), pts.end());
    return pts;
  }
};

TraceGraph traceGraph(const Grid& g, const std::vector<char>& ridge, const std::vector<double>& dist) {
  const auto links = pixelLinks(g, ridge);
  std::vector<int> vertexOf(g.size(), -1);
  TraceGraph tg;

  // Junction clusters and endpoints become vertices.
  for (std::size_t c = 0; c < g.size(); ++c) {
    if (!ridge[c] || vertexOf[c] >= 0) continue;
    const auto deg = links[c].size();
    if (deg == 2) continue;
    std::vector<int> cluster{static_cast<int>(c)};
    vertexOf[c] = -2;
    if (deg >= 3) {
      for (std::size_t k = 0; k < cluster.size(); ++k)
        for (int n : links[cluster[k]])
          if (vertexOf[n] == -1 && links[n].size() >= 3) {
            vertexOf[n] = -2;
            cluster.push_back(n);
          }
    }
    int rep = cluster.front();
    for (int p : cluster)
      if (dist[p] > dist[rep]) rep = p;
    const int id = tg.addVertex(g.center(rep));
    for (int p : cluster) vertexOf[p] = id;
  }

  std::set<std::pair<int, int>> usedLinks;
  auto traceFrom = [&](int startPixel) {
    const int va = vertexOf[startPixel];
    for (int next : links[startPixel]) {
      if (vertexOf[next] == va) continue;
      if (usedLinks.count({startPixel, next})) continue;
      std::vector<Vec2> pts{tg.vertex[va]};
      int prev = startPixel;
      int cur = next;
      usedLinks.insert({startPixel, next});
      usedLinks.insert({next, startPixel});
      while (vertexOf[cur] < 0) {
        pts.push_back(g.center(cur));
        int step = -1;
        for (int n : links[cur])
          if (n != prev && !usedLinks.count({cur, n})) {
            step = n;
            break;
          }
        if (step < 0) break;
        usedLinks.insert({cur, step});
        usedLinks.insert({step, cur});
        prev = cur;
        cur = step;
      }
      if (vertexOf[cur] < 0) continue;  // dangling walk; cannot happen on clean input
      pts.push_back(tg.vertex[vertexOf[cur]]);
      tg.addEdge(va, vertexOf[cur], std::move(pts));
    }
  };
  for (std::size_t c = 0; c < g.size(); ++c)
    if (ridge[c] && vertexOf[c] >= 0) traceFrom(static_cast<int>(c));

  // Pure cycles have no vertex pixels; seed one per cycle.
  for (std::size_t c = 0; c < g.size(); ++c) {
    if (!ridge[c] || vertexOf[c] >= 0) continue;
    bool untouched = true;
    for (int n : links[c])
      if (usedLinks.count({static_cast<int>(c), n})) untouched = false;
    if (!untouched) continue;
    vertexOf[c] = tg.addVertex(g.center(static_cast<int>(c)));
    traceFrom(static_cast<int>(c));
  }
  return tg;
}

void pruneShortSpurs(TraceGraph& tg, double minLength) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t e = 0; e < tg.edges.size(); ++e) {
      auto& edge = tg.edges[e];
      if (!edge.alive || edge.a == edge.b) continue;
      const int da = tg.degree(edge.a);
      const int db = tg.degree(edge.b);
      if (!((da == 1) != (db == 1))) continue;  // only spurs hanging off the graph
      if (polylineLength(edge.pts) >= minLength) continue;
      const int tip = da == 1 ? edge.a : edge.b;
      edge.alive = false;
      tg.vertexAlive[tip] = 0;
      changed = true;
    }
  }
}

void trimTips(TraceGraph& tg, const geom::Environment& env, double tipClearance) {
  if (!(tipClearance > 0.0)) return;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t e = 0; e < tg.edges.size(); ++e) {
      auto& edge = tg.edges[e];
      if (!edge.alive || edge.a == edge.b) continue;
      const int da = tg.degree(edge.a);
      const int db = tg.degree(edge.b);
      int tip = -1;
      if (da == 1 && db != 1) tip = edge.a;
      if (db == 1 && da != 1) tip = edge.b;
      if (tip < 0) continue;
      auto pts = tg.from(static_cast<int>(e), tip);
      std::size_t cut = 0;
      while (cut < pts.size() && env.clearance(pts[cut]) < tipClearance) ++cut;
      if (cut == 0) continue;
      changed = true;
      if (cut >= pts.size() - 1) {
        edge.alive = false;
        tg.vertexAlive[tip] = 0;
        continue;
      }
      pts.erase(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(cut));
      tg.vertex[tip] = pts.front();
      if (edge.a != tip) std::reverse(pts.begin(), pts.end());
      edge.pts = std::move(pts);
    }
  }
}

void mergeDegreeTwo(TraceGraph& tg) {
  for (std::size_t v = 0; v < tg.vertex.size(); ++v) {
    if (!tg.vertexAlive[v]) continue;
    const auto inc = tg.incident(static_cast<int>(v));
    if (inc.size() != 2 || inc[0] == inc[1]) continue;
    const int e1 = inc[0];
    const int e2 = inc[1];
    const int u = tg.edges[e1].a == static_cast<int>(v) ? tg.edges[e1].b : tg.edges[e1].a;
    const int w = tg.edges[e2].a == static_cast<int>(v) ? tg.edges[e2].b : tg.edges[e2].a;
    if (u == w) continue;  // keeps a two-edge cycle from collapsing to a loop
    auto left = tg.from(e1, u);
    auto right = tg.from(e2, static_cast<int>(v));
    left.insert(left.end(), right.begin() + 1, right.end());
    tg.edges[e1].alive = false;
    tg.edges[e2].alive = false;
    tg.vertexAlive[v] = 0;
    tg.addEdge(u, w, std::move(left));
  }
}

// Collapses short edges between junctions into a single junction.
void contractShortLinks(TraceGraph& tg, double maxLength) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t e = 0; e < tg.edges.size(); ++e) {
      auto& edge = tg.edges[e];
      if (!edge.alive || edge.a == edge.b) continue;
      if (polylineLength(edge.pts) > maxLength) continue;
      if (tg.degree(edge.a) < 3 || tg.degree(edge.b) < 3) continue;
      const int keep = edge.a;
      const int drop = edge.b;
      edge.alive = false;
      for (auto& other : tg.edges) {
        if (!other.alive) continue;
        if (other.a == drop) {
          other.a = keep;
          other.pts.front() = tg.vertex[keep];
        }
        if (other.b == drop) {
          other.b = keep;
          other.pts.back() = tg.vertex[keep];
        }
      }
      tg.vertexAlive[drop] = 0;
      changed = true;
    }
  }
}

// Splits self loops and parallel edges by inserting vertices along them.
void splitDegenerate(TraceGraph& tg) {
  std::map<std::pair<int, int>, int> seen;
  const std::size_t count = tg.edges.size();
  for (std::size_t e = 0; e < count; ++e) {
    if (!tg.edges[e].alive) continue;
    const int a = tg.edges[e].a;
    const int b = tg.edges[e].b;
    const auto key = std::minmax(a, b);
    const bool loop = a == b;
    const bool parallel = !loop && seen.count(key);
    if (!loop && !parallel) {
      seen[key] = static_cast<int>(e);
      continue;
    }
    auto pts = tg.edges[e].pts;
    tg.edges[e].alive = false;
    if (pts.size() < 4) continue;  // too short to split; drop
    std::vector<std::size_t> cuts;
    if (loop)
      cuts = {pts.size() / 3, 2 * pts.size() / 3};
    else
      cuts = {pts.size() / 2};
    int prevVertex = a;
    std::size_t prevCut = 0;
    for (std::size_t c : cuts) {
      const int nv = tg.addVertex(pts[c]);
      tg.addEdge(prevVertex, nv, {pts.begin() + static_cast<std::ptrdiff_t>(prevCut),
                                  pts.begin() + static_cast<std::ptrdiff_t>(c) + 1});
      prevVertex = nv;
      prevCut = c;
    }
    tg.addEdge(prevVertex, b, {pts.begin() + static_cast<std::ptrdiff_t>(prevCut), pts.end()});
  }
}

std::vector<Vec2> smooth(const std::vector<Vec2>& pts, const geom::Environment& env) {
  if (pts.size() < 5) return pts;
  std::vector<Vec2> out = pts;
  for (std::size_t i = 2; i + 2 < pts.size(); ++i) {
    Vec2 avg;
    for (std::size_t k = i - 2; k <= i + 2; ++k) avg += pts[k];
    avg = avg * 0.2;
    if (env.clearanceExceeds(avg, 0.0)) out[i] = avg;
  }
  return out;
}

// Slides interior points along the local normal, within one grid cell, to the
// position of largest clearance. Removes the half-cell bias of even-width
// passages.
std::vector<Vec2> center(const std::vector<Vec2>& pts, const geom::Environment& env, double res) {
  std::vector<Vec2> out = pts;
  constexpr int kSteps = 10;
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    const Vec2 tangent = pts[i + 1] - pts[i - 1];
    const double len = tangent.norm();
    if (len == 0.0) continue;
    const Vec2 normal{-tangent.y / len, tangent.x / len};
    double best = env.clearance(pts[i]);
    for (int k = -kSteps; k <= kSteps; ++k) {
      const Vec2 cand = pts[i] + normal * (res * k / kSteps);
      if (!env.bounds().contains(cand)) continue;
      const double c = env.clearance(cand);
      if (c > best + 1e-12) {
        best = c;
        out[i] = cand;
      }
    }
  }
  return out;
}

}  // namespace

WorkspaceSkeleton buildMedialAxisSkeleton(const geom::Environment& env, const MedialAxisOptions& options) {
  if (!(options.gridResolution > 0.0)) throw std::invalid_argument("grid resolution must be positive");
  const auto& b = env.bounds();
  Grid g;
  g.res = options.gridResolution;
  g.origin = b.min;
  g.nx = std::max(1, static_cast<int>(std::floor(b.width() / g.res)));
  g.ny = std::max(1, static_cast<int>(std::floor(b.height() / g.res)));
  // Center the grid inside the bounds.
  g.origin = {b.min.x + 0.5 * (b.width() - g.nx * g.res), b.min.y + 0.5 * (b.height() - g.ny * g.res)};

  std::vector<char> free(g.size(), 0);
  bool anyFree = false;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const bool f = env.clearanceExceeds(g.center(i, j), 0.0);
      free[g.index(i, j)] = f ? 1 : 0;
      anyFree = anyFree || f;
    }
  if (!anyFree) throw std::runtime_error("free space is empty");

  const auto ft = featureTransform(g, free);

  // Ridge: of two neighbouring cells whose nearest obstacle features are far
  // apart, the one deeper in free space.
  std::vector<char> ridge(g.size(), 0);
  constexpr int kMinFeatureGap2 = 8;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int p = g.index(i, j);
      if (!free[p]) continue;
      for (const auto& [di, dj] : {std::pair{1, 0}, std::pair{0, 1}}) {
        if (!g.inside(i + di, j + dj)) continue;
        const int q = g.index(i + di, j + dj);
        if (!free[q]) continue;
        const int dx = ft.siteX[p] - ft.siteX[q];
        const int dy = ft.siteY[p] - ft.siteY[q];
        if (dx * dx + dy * dy >= kMinFeatureGap2) ridge[ft.dist[q] > ft.dist[p] ? q : p] = 1;
      }
    }

  thin(g, ridge);
  connectRidgePieces(g, free, ft.dist, ridge);
  thin(g, ridge);

  auto tg = traceGraph(g, ridge, ft.dist);
  pruneShortSpurs(tg, 3.0 * g.res);
  contractShortLinks(tg, 3.0 * g.res);
  mergeDegreeTwo(tg);
  trimTips(tg, env, options.tipClearance);
  mergeDegreeTwo(tg);
  splitDegenerate(tg);

  WorkspaceSkeleton skel;
  std::vector<int> remap(tg.vertex.size(), -1);
  for (std::size_t v = 0; v < tg.vertex.size(); ++v) {
    if (!tg.vertexAlive[v]) continue;
    remap[v] = skel.addVertex(tg.vertex[v]);
  }
  const double spacing = options.spacing > 0.0 ? options.spacing : g.res;
  for (const auto& e : tg.edges) {
    if (!e.alive || remap[e.a] < 0 || remap[e.b] < 0 || e.a == e.b) continue;
    if (skel.edgeBetween(remap[e.a], remap[e.b])) continue;
    auto pts = center(smooth(e.pts, env), env, g.res);
    SkeletonEdge tmp;
    tmp.intermediates = pts;
    tmp.intermediates.front() = tg.vertex[e.a];
    tmp.intermediates.back() = tg.vertex[e.b];
    tmp = resampleIntermediates(tmp, spacing, env);
    bool clear = true;
    for (const auto& p : tmp.intermediates)
      if (!env.clearanceExceeds(p, 0.0)) clear = false;
    if (!clear) {
      tmp.intermediates = e.pts;
      tmp = resampleIntermediates(tmp, spacing, env);
    }
    skel.addEdge(remap[e.a], remap[e.b], tmp.intermediates, tmp.capacity);
  }
  return skel;
}

}  // namespace cdr::skel

#include <doctest.h>

#include <algorithm>
#include <array>
#include <set>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "cdr/scenarios.hpp"
#include "cdr/skeleton.hpp"
#include "support.hpp"

using namespace cdr;
using geom::Vec2;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::vector<double>> floydWarshall(const skel::WorkspaceSkeleton& s, double width, bool unit) {
  const std::size_t n = s.vertexCount();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, kInf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0.0;
  for (const auto& e : s.edges()) {
    if (e.capacity < width) continue;
    const double w = unit ? 1.0 : e.length;
    d[e.source][e.target] = std::min(d[e.source][e.target], w);
    d[e.target][e.source] = std::min(d[e.target][e.source], w);
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

bool connected(const skel::WorkspaceSkeleton& s, int a, int b) { return std::isfinite(floydWarshall(s, 0.0, true)[a][b]); }

std::vector<char> directedReach(std::size_t n, const std::vector<skel::DirectedEdge>& edges, int root, bool forward) {
  std::vector<char> seen(n, 0);
  seen[root] = 1;
  for (bool grew = true; grew;) {
    grew = false;
    for (const auto& e : edges) {
      const int u = forward ? e.from : e.to;
      const int v = forward ? e.to : e.from;
      if (seen[u] && !seen[v]) seen[v] = grew = true;
    }
  }
  return seen;
}

double minClearanceOracle(const std::vector<Vec2>& pts, const geom::Environment& env) {
  double best = kInf;
  for (const auto& p : pts) best = std::min(best, 2.0 * env.clearance(p));
  return best;
}

geom::Environment twoRoomsAndCorridor(double corridorWidth) {
  const double lo = 2.0 - corridorWidth / 2, hi = 2.0 + corridorWidth / 2;
  return geom::Environment(geom::Box{{0, 0}, {12, 4}},
                           {geom::Polygon::rectangle(4, 0, 8, lo), geom::Polygon::rectangle(4, hi, 8, 4)});
}

}  // namespace

TEST_SUITE("skeleton") {
  TEST_CASE("graph structure rejects self loops and parallel edges") {
    skel::WorkspaceSkeleton s;
    const int a = s.addVertex({0, 0});
    const int b = s.addVertex({1, 0});
    CHECK(a == 0);
    CHECK(b == 1);
    CHECK(s.addEdge(a, b, {{0, 0}, {1, 0}}, 1.0) == 0);
    CHECK_THROWS(s.addEdge(a, a, {{0, 0}, {0, 0}}, 1.0));
    CHECK_THROWS(s.addEdge(b, a, {{1, 0}, {0, 0}}, 1.0));
    CHECK_THROWS(s.addEdge(a, b, {{0.5, 0}, {1, 0}}, 1.0));
    CHECK(s.edgeBetween(b, a) == 0);
  }

  TEST_CASE("corridor between two rooms yields a centered corridor edge") {
    const auto env = twoRoomsAndCorridor(1.0);
    skel::MedialAxisOptions opts;
    opts.gridResolution = 0.1;
    const auto s = skel::buildMedialAxisSkeleton(env, opts);
    bool found = false;
    for (const auto& e : s.edges()) {
      int inside = 0;
      for (const auto& p : e.intermediates)
        if (p.x > 4.5 && p.x < 7.5) {
          ++inside;
          CHECK(std::abs(p.y - 2.0) <= opts.gridResolution);
        }
      if (inside > 10) {
        found = true;
        CHECK(e.capacity == doctest::Approx(1.0).epsilon(opts.gridResolution));
      }
    }
    CHECK(found);
  }

  TEST_CASE("empty square skeleton lies on the boundary-induced medial axis") {
    const geom::Environment env(geom::Box{{0, 0}, {6, 6}}, {});
    skel::MedialAxisOptions opts;
    opts.gridResolution = 0.1;
    const auto s = skel::buildMedialAxisSkeleton(env, opts);
    REQUIRE(s.edgeCount() > 0);
    for (const auto& e : s.edges())
      for (const auto& p : e.intermediates) {
        std::array<double, 4> walls{p.x, 6 - p.x, p.y, 6 - p.y};
        std::sort(walls.begin(), walls.end());
        // Medial points are equidistant from their two nearest walls.
        CHECK(walls[1] - walls[0] <= 2 * opts.gridResolution);
        CHECK(env.clearance(p) > 0.0);
      }
  }

  TEST_CASE("fully covered environment has no skeleton") {
    const geom::Environment env(geom::Box{{0, 0}, {2, 2}}, {geom::Polygon::rectangle(0, 0, 2, 2)});
    CHECK_THROWS_AS(skel::buildMedialAxisSkeleton(env), std::runtime_error);
  }

  TEST_CASE("built skeletons satisfy structural invariants") {
    for (const auto& sc : {bench::hallwayCross(2), bench::inlet(2), bench::track(4), bench::warehouse(2.0, 4),
                           bench::openCross(2)}) {
      CAPTURE(sc.name());
      skel::MedialAxisOptions opts;
      opts.spacing = 0.2;
      const auto s = skel::buildMedialAxisSkeleton(sc.problem.env, opts);
      std::set<std::pair<int, int>> pairs;
      for (std::size_t i = 0; i < s.vertexCount(); ++i) CHECK(s.vertex(static_cast<int>(i)).id == static_cast<int>(i));
      for (std::size_t i = 0; i < s.edgeCount(); ++i) {
        const auto& e = s.edge(static_cast<int>(i));
        CHECK(e.id == static_cast<int>(i));
        CHECK(e.source != e.target);
        CHECK(pairs.insert({std::min(e.source, e.target), std::max(e.source, e.target)}).second);
        CHECK(e.intermediates.front() == s.vertex(e.source).point);
        CHECK(e.intermediates.back() == s.vertex(e.target).point);
        for (std::size_t k = 1; k < e.intermediates.size(); ++k)
          CHECK(geom::distance(e.intermediates[k - 1], e.intermediates[k]) <= opts.spacing * (1 + 1e-9));
        CHECK(e.capacity == doctest::Approx(minClearanceOracle(e.intermediates, sc.problem.env)).epsilon(1e-9));
        for (const auto& p : e.intermediates) CHECK(e.capacity <= 2.0 * sc.problem.env.clearance(p) + 1e-9);
        CHECK(e.length == doctest::Approx(skel::polylineLength(e.intermediates)));
      }
    }
  }

  TEST_CASE("hallway skeleton joins the two rooms through the corridor") {
    const auto sc = bench::hallwayCross(2);
    const auto s = skel::buildMedialAxisSkeleton(sc.problem.env);
    const auto& bounds = sc.problem.env.bounds();
    const int left = skel::nearestSkeletonVertex(s, {bounds.min.x + 2, 2});
    const int right = skel::nearestSkeletonVertex(s, {bounds.max.x - 2, 2});
    CHECK(left != right);
    CHECK(connected(s, left, right));
    // The corridor is one robot wide, so the joining edge cannot take two.
    bool narrow = false;
    for (const auto& e : s.edges())
      if (e.capacity < 2 * 2 * sc.problem.robots[0].radius && e.length > 3.0) narrow = true;
    CHECK(narrow);
  }

  TEST_CASE("resampling a straight edge") {
    const geom::Environment env(geom::Box{{-2, -2}, {3, 2}}, {});
    skel::SkeletonEdge e;
    e.intermediates = {{0, 0}, {1, 0}};
    const auto r = skel::resampleIntermediates(e, 0.25, env);
    REQUIRE(r.intermediates.size() == 5);
    for (int k = 0; k < 5; ++k) CHECK(r.intermediates[k].x == doctest::Approx(0.25 * k));
    CHECK(r.capacity == doctest::Approx(4.0));

    const auto coarse = skel::resampleIntermediates(e, 2.0, env);
    CHECK(coarse.intermediates.size() == 2);
    CHECK(coarse.intermediates.front() == Vec2{0, 0});
    CHECK(coarse.intermediates.back() == Vec2{1, 0});
  }

  TEST_CASE("resampling random polylines keeps length, endpoints and spacing") {
    const geom::Environment env(geom::Box{{-20, -20}, {20, 20}}, {});
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> step(-1.0, 1.0), sp(0.05, 1.5);
    for (int trial = 0; trial < 300; ++trial) {
      skel::SkeletonEdge e;
      Vec2 p{0, 0};
      const int n = 2 + static_cast<int>(rng() % 12);
      for (int i = 0; i < n; ++i) {
        e.intermediates.push_back(p);
        p = p + Vec2{step(rng), step(rng)};
      }
      const double spacing = sp(rng);
      const auto r = skel::resampleIntermediates(e, spacing, env);
      CHECK(r.intermediates.size() >= 2);
      CHECK(r.intermediates.front() == e.intermediates.front());
      CHECK(r.intermediates.back() == e.intermediates.back());
      const double before = skel::polylineLength(e.intermediates);
      CHECK(std::abs(skel::polylineLength(r.intermediates) - before) <= 1e-6 * before);
      for (std::size_t k = 1; k < r.intermediates.size(); ++k)
        CHECK(geom::distance(r.intermediates[k - 1], r.intermediates[k]) <= spacing * (1 + 1e-9));
    }
  }

  TEST_CASE("uniform polyline resampling is uniform in arc length") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> step(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<Vec2> pts{{0, 0}};
      for (int i = 0; i < 6; ++i) pts.push_back(pts.back() + Vec2{step(rng), step(rng)});
      const std::size_t segments = 1 + rng() % 20;
      const auto out = skel::resamplePolyline(pts, segments);
      REQUIRE(out.size() == segments + 1);
      // Cumulative-length oracle: each output point sits at arc length k * L / segments.
      const double total = skel::polylineLength(pts);
      for (std::size_t k = 0; k <= segments; ++k) {
        const double target = total * double(k) / double(segments);
        double acc = 0.0, best = kInf;
        for (std::size_t i = 1; i < pts.size(); ++i) {
          const double len = geom::distance(pts[i - 1], pts[i]);
          if (target >= acc - 1e-12 && target <= acc + len + 1e-12) {
            const double t = len > 0 ? (target - acc) / len : 0.0;
            best = std::min(best, geom::distance(out[k], pts[i - 1] + (pts[i] - pts[i - 1]) * t));
          }
          acc += len;
        }
        CHECK(best < 1e-9);
      }
    }
  }

  TEST_CASE("nearest vertex matches a linear scan with lowest-id ties") {
    skel::WorkspaceSkeleton s;
    s.addVertex({0, 0});
    s.addVertex({2, 0});
    CHECK(skel::nearestSkeletonVertex(s, {1, 0}) == 0);
    CHECK(skel::nearestSkeletonVertex(s, {2, 0}) == 1);
    CHECK_THROWS(skel::nearestSkeletonVertex(skel::WorkspaceSkeleton{}, {0, 0}));

    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> u(-5, 5);
    skel::WorkspaceSkeleton r;
    for (int i = 0; i < 50; ++i) r.addVertex({u(rng), u(rng)});
    for (int trial = 0; trial < 500; ++trial) {
      const Vec2 p{u(rng), u(rng)};
      int best = 0;
      for (int i = 1; i < 50; ++i)
        if (geom::distance(r.vertex(i).point, p) < geom::distance(r.vertex(best).point, p)) best = i;
      CHECK(skel::nearestSkeletonVertex(r, p) == best);
    }
  }

  TEST_CASE("hop and length distances match Floyd-Warshall") {
    std::mt19937 rng(53);
    for (int trial = 0; trial < 60; ++trial) {
      const auto s = test::randomGraph(rng, 9);
      const double width = 0.5;
      const auto hops = floydWarshall(s, width, true);
      const auto lens = floydWarshall(s, width, false);
      const skel::SkeletonView view{&s, width};
      for (std::size_t src = 0; src < s.vertexCount(); ++src) {
        const auto h = skel::hopDistances(view, static_cast<int>(src));
        const auto l = skel::pathLengths(view, static_cast<int>(src));
        for (std::size_t v = 0; v < s.vertexCount(); ++v) {
          if (std::isfinite(hops[src][v])) {
            CHECK(h[v] == static_cast<int>(hops[src][v]));
            CHECK(l[v] == doctest::Approx(lens[src][v]));
          } else {
            CHECK(h[v] == -1);
            CHECK(std::isinf(l[v]));
          }
        }
      }
    }
  }

  TEST_CASE("query skeleton examples") {
    // Path graph s - a - b - g.
    const auto path = test::makeGraph({{0, 0}, {1, 0}, {2, 0}, {3, 0}}, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}});
    const auto q = skel::computeQuerySkeleton(skel::SkeletonView{&path, 0.4}, 0, 3);
    REQUIRE(q.edges.size() == 3);
    for (const auto& e : q.edges) CHECK(e.to == e.from + 1);

    // Spur off the middle vertex is dropped.
    const auto spur = test::makeGraph({{0, 0}, {1, 0}, {2, 0}, {1, 1}}, {{0, 1, 1.0}, {1, 2, 1.0}, {1, 3, 1.0}});
    const auto qs = skel::computeQuerySkeleton(skel::SkeletonView{&spur, 0.4}, 0, 2);
    CHECK(qs.edges.size() == 2);
    CHECK(std::find(qs.vertices.begin(), qs.vertices.end(), 3) == qs.vertices.end());

    // Diamond with routes of different length keeps both.
    const auto diamond =
        test::makeGraph({{0, 0}, {1, 1}, {1, -1.5}, {2, 0}}, {{0, 1, 1.0}, {1, 3, 1.0}, {0, 2, 1.0}, {2, 3, 1.0}});
    const auto qd = skel::computeQuerySkeleton(skel::SkeletonView{&diamond, 0.4}, 0, 3);
    CHECK(qd.edges.size() == 4);
    for (const auto& e : qd.edges) CHECK(e.from != 3);

    // Disconnected start and goal.
    const auto split = test::makeGraph({{0, 0}, {1, 0}, {5, 0}, {6, 0}}, {{0, 1, 1.0}, {2, 3, 1.0}});
    CHECK_THROWS_WITH_AS(skel::computeQuerySkeleton(skel::SkeletonView{&split, 0.4}, 0, 3),
                         "query not coverable by skeleton", std::runtime_error);

    // A capacity-filtered edge disconnects a wide robot.
    const auto narrow = test::makeGraph({{0, 0}, {1, 0}}, {{0, 1, 0.3}});
    CHECK_THROWS(skel::computeQuerySkeleton(skel::SkeletonView{&narrow, 0.4}, 0, 1));
    CHECK_NOTHROW(skel::computeQuerySkeleton(skel::SkeletonView{&narrow, 0.2}, 0, 1));
  }

  TEST_CASE("query skeleton properties on random graphs") {
    std::mt19937 rng(59);
    int checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const auto s = test::randomGraph(rng, 9);
      const double width = 0.5;
      const int n = static_cast<int>(s.vertexCount());
      const int src = static_cast<int>(rng() % n);
      const int dst = static_cast<int>(rng() % n);
      const auto d = floydWarshall(s, width, false);
      const skel::SkeletonView view{&s, width};
      if (!std::isfinite(d[src][dst])) {
        CHECK_THROWS(skel::computeQuerySkeleton(view, src, dst));
        continue;
      }
      ++checked;
      const auto q = skel::computeQuerySkeleton(view, src, dst);
      const auto fwd = directedReach(s.vertexCount(), q.edges, src, true);
      const auto bwd = directedReach(s.vertexCount(), q.edges, dst, false);
      for (const auto& e : q.edges) {
        CHECK(view.usable(e.edge));
        const auto& se = s.edge(e.edge);
        CHECK(((se.source == e.from && se.target == e.to) || (se.source == e.to && se.target == e.from)));
        CHECK(fwd[e.from]);
        CHECK(bwd[e.to]);
        // Oriented away from the start by shortest-path distance, then toward the goal.
        const double df = d[src][e.from], dt = d[src][e.to];
        CHECK(df <= dt + 1e-9);
        if (std::abs(df - dt) <= 1e-12) CHECK(d[e.from][dst] >= d[e.to][dst] - 1e-9);
      }
      for (int v : q.vertices) CHECK((v == src || (fwd[v] && bwd[v])));
    }
    CHECK(checked > 50);
  }

  TEST_CASE("skeleton file round trip and errors") {
    const auto sc = bench::hallwayCross(2);
    const auto built = skel::buildMedialAxisSkeleton(sc.problem.env);
    std::istringstream in(skel::skeletonToJson(built));
    const auto loaded = skel::loadSkeleton(in);
    REQUIRE(loaded.vertexCount() == built.vertexCount());
    REQUIRE(loaded.edgeCount() == built.edgeCount());
    for (std::size_t i = 0; i < built.edgeCount(); ++i)
      CHECK(loaded.edge(static_cast<int>(i)).capacity == doctest::Approx(built.edge(static_cast<int>(i)).capacity));

    std::istringstream minimal(R"({"vertices":[{"id":4,"p":[1,1]},{"id":9,"p":[3,1]}],"edges":[{"id":0,"src":4,"dst":9,"capacity":1.5}]})");
    const auto m = skel::loadSkeleton(minimal);
    CHECK(m.vertexCount() == 2);
    CHECK(m.edgeCount() == 1);
    CHECK(m.edge(0).capacity == 1.5);

    std::istringstream dangling(R"({"vertices":[{"id":0,"p":[1,1]}],"edges":[{"id":0,"src":0,"dst":7,"capacity":1}]})");
    CHECK_THROWS_AS(skel::loadSkeleton(dangling), std::runtime_error);
    std::istringstream garbage("{not json");
    CHECK_THROWS_AS(skel::loadSkeleton(garbage), std::runtime_error);

    const geom::Environment env(geom::Box{{0, 0}, {4, 3}}, {});
    std::istringstream noCap(
        R"({"vertices":[{"id":0,"p":[1,1]},{"id":1,"p":[3,1.5]}],"edges":[{"id":0,"src":0,"dst":1,"intermediates":[[1,1],[2,1.2],[3,1.5]]}]})");
    const auto filled = skel::loadSkeleton(noCap, &env);
    CHECK(filled.edge(0).capacity == doctest::Approx(minClearanceOracle({{1, 1}, {2, 1.2}, {3, 1.5}}, env)));
    std::istringstream noCapNoEnv(R"({"vertices":[{"id":0,"p":[1,1]},{"id":1,"p":[3,1]}],"edges":[{"id":0,"src":0,"dst":1}]})");
    CHECK_THROWS(skel::loadSkeleton(noCapNoEnv));
  }
}

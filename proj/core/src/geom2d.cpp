#include "cdr/geom2d.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <stdexcept>

namespace cdr::geom {

double pointSegmentDistance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return distance(p, a + ab * t);
}

double Box::interiorDistance(const Vec2& p) const {
  return std::min({p.x - min.x, max.x - p.x, p.y - min.y, max.y - p.y});
}

Vec2 Box::clamp(const Vec2& p) const {
  return {std::clamp(p.x, min.x, max.x), std::clamp(p.y, min.y, max.y)};
}

namespace {

double boxDistance(const Box& b, const Vec2& p) {
  const double dx = std::max({b.min.x - p.x, 0.0, p.x - b.max.x});
  const double dy = std::max({b.min.y - p.y, 0.0, p.y - b.max.y});
  return std::hypot(dx, dy);
}

}  // namespace

Polygon::Polygon(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
  bbox_ = {vertices_.front(), vertices_.front()};
  for (const auto& v : vertices_) {
    bbox_.min = {std::min(bbox_.min.x, v.x), std::min(bbox_.min.y, v.y)};
    bbox_.max = {std::max(bbox_.max.x, v.x), std::max(bbox_.max.y, v.y)};
  }
  if (signedArea() < 0.0) std::reverse(vertices_.begin(), vertices_.end());
}

Polygon Polygon::rectangle(double xmin, double ymin, double xmax, double ymax) {
  return Polygon({{xmin, ymin}, {xmax, ymin}, {xmax, ymax}, {xmin, ymax}});
}

double Polygon::signedArea() const {
  double a = 0.0;
  for (std::size_t i = 0, n = vertices_.size(); i < n; ++i)
    a += vertices_[i].cross(vertices_[(i + 1) % n]);
  return 0.5 * a;
}

bool Polygon::contains(const Vec2& p) const {
  if (!bbox_.contains(p)) return false;
  bool inside = false;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = vertices_[i];
    const Vec2& b = vertices_[j];
    if (pointSegmentDistance(p, a, b) == 0.0) return true;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double xCross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < xCross) inside = !inside;
    }
  }
  return inside;
}

double Polygon::boundaryDistance(const Vec2& p) const {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i)
    best = std::min(best, pointSegmentDistance(p, vertices_[i], vertices_[(i + 1) % n]));
  return best;
}

Environment::Environment(Box bounds, std::vector<Polygon> obstacles)
    : bounds_(bounds), obstacles_(std::move(obstacles)) {
  if (!(bounds_.width() > 0.0) || !(bounds_.height() > 0.0))
    throw std::invalid_argument("environment bounds must have positive area");
  for (const auto& poly : obstacles_)
    for (const auto& v : poly.vertices())
      if (!bounds_.contains(v)) throw std::invalid_argument("obstacle vertex outside bounds");
}

double Environment::clearance(const Vec2& p) const {
  if (!std::isfinite(p.x) || !std::isfinite(p.y) || !bounds_.contains(p))
    throw std::domain_error("clearance query outside environment bounds");
  double best = bounds_.interiorDistance(p);
  for (const auto& poly : obstacles_) {
    if (boxDistance(poly.boundingBox(), p) >= best) continue;
    if (poly.contains(p)) return 0.0;
    best = std::min(best, poly.boundaryDistance(p));
  }
  return best;
}

bool Environment::clearanceExceeds(const Vec2& p, double radius) const {
  if (!std::isfinite(p.x) || !std::isfinite(p.y) || !bounds_.contains(p)) return false;
  if (!(bounds_.interiorDistance(p) > radius)) return false;
  for (const auto& poly : obstacles_) {
    if (boxDistance(poly.boundingBox(), p) > radius) continue;
    if (poly.contains(p)) return false;
    if (!(poly.boundaryDistance(p) > radius)) return false;
  }
  return true;
}

bool cfgValid(const Configuration& q, const RobotSpec& robot, const Environment& env) {
  return env.clearanceExceeds(q, robot.radius);
}

bool compositeValid(std::span<const Configuration> q, std::span<const RobotSpec> robots,
                    const Environment& env) {
  if (q.size() != robots.size())
    throw std::domain_error("composite configuration size does not match robot count");
  for (std::size_t i = 0; i < q.size(); ++i)
    if (!cfgValid(q[i], robots[i], env)) return false;
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = i + 1; j < q.size(); ++j) {
      const double minSep = robots[i].radius + robots[j].radius;
      if (!((q[i] - q[j]).squaredNorm() > minSep * minSep)) return false;
    }
  return true;
}

double maxRobotDisplacement(std::span<const Configuration> q1, std::span<const Configuration> q2) {
  double m = 0.0;
  for (std::size_t i = 0; i < q1.size(); ++i) m = std::max(m, distance(q1[i], q2[i]));
  return m;
}

double compositeDistance(std::span<const Configuration> q1, std::span<const Configuration> q2) {
  double s = 0.0;
  for (std::size_t i = 0; i < q1.size(); ++i) s += (q1[i] - q2[i]).squaredNorm();
  return std::sqrt(s);
}

std::size_t interpolationSegments(std::span<const Configuration> q1,
                                  std::span<const Configuration> q2, double resolution) {
  const double ratio = maxRobotDisplacement(q1, q2) / resolution;
  if (!(ratio > 1.0)) return 1;
  const auto needed = static_cast<std::size_t>(std::ceil(ratio));
  return std::bit_ceil(needed);
}

namespace {

// Per-robot obstacle margins followed by per-pair separation margins.
void motionMargins(std::span<const Configuration> q, std::span<const RobotSpec> robots, const Environment& env,
                   std::vector<double>& out) {
  out.clear();
  for (std::size_t i = 0; i < q.size(); ++i) out.push_back(env.clearance(q[i]) - robots[i].radius);
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = i + 1; j < q.size(); ++j) out.push_back(distance(q[i], q[j]) - robots[i].radius - robots[j].radius);
}

// Every margin is 1-Lipschitz in its points, so the motion over [t0, t1] is
// safe when the end margins outweigh the distance covered. Otherwise bisect.
class GapCertifier {
 public:
  GapCertifier(std::span<const Configuration> q1, std::span<const Configuration> q2, std::span<const RobotSpec> robots,
               const Environment& env)
      : q1_(q1), q2_(q2), robots_(robots), env_(env), q_(q1.size()) {
    const std::size_t n = q1.size();
    for (std::size_t i = 0; i < n; ++i) rates_.push_back(distance(q1[i], q2[i]));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) rates_.push_back(((q2[i] - q1[i]) - (q2[j] - q1[j])).norm());
  }

  std::vector<double> marginsAt(double t) {
    at(t);
    std::vector<double> m;
    motionMargins(q_, robots_, env_, m);
    return m;
  }

  bool certify(double t0, const std::vector<double>& m0, double t1, const std::vector<double>& m1, int depth = 0) {
    const double width = t1 - t0;
    bool safe = true;
    for (std::size_t k = 0; k < rates_.size() && safe; ++k) safe = m0[k] + m1[k] > rates_[k] * width;
    if (safe) return true;
    if (depth >= kMaxDepth) return false;
    const double mid = 0.5 * (t0 + t1);
    at(mid);
    if (!compositeValid(q_, robots_, env_)) return false;
    const auto mm = marginsAt(mid);
    return certify(t0, m0, mid, mm, depth + 1) && certify(mid, mm, t1, m1, depth + 1);
  }

 private:
  static constexpr int kMaxDepth = 40;

  void at(double t) {
    for (std::size_t i = 0; i < q_.size(); ++i) q_[i] = q1_[i] + (q2_[i] - q1_[i]) * t;
  }

  std::span<const Configuration> q1_, q2_;
  std::span<const RobotSpec> robots_;
  const Environment& env_;
  CompositeCfg q_;
  std::vector<double> rates_;
};

}  // namespace

bool edgeValid(std::span<const Configuration> q1, std::span<const Configuration> q2,
               std::span<const RobotSpec> robots, const Environment& env, double resolution) {
  if (!(resolution > 0.0)) throw std::invalid_argument("collision resolution must be positive");
  if (q1.size() != robots.size() || q2.size() != robots.size())
    throw std::domain_error("composite configuration size does not match robot count");
  const std::size_t segments = interpolationSegments(q1, q2, resolution);
  // Endpoints first, then coarse-to-fine so collisions surface early.
  if (!compositeValid(q1, robots, env) || !compositeValid(q2, robots, env)) return false;
  CompositeCfg q(q1.size());
  for (std::size_t stride = segments / 2; stride >= 1; stride /= 2) {
    for (std::size_t k = stride; k < segments; k += 2 * stride) {
      const double t = static_cast<double>(k) / static_cast<double>(segments);
      for (std::size_t i = 0; i < q.size(); ++i) q[i] = q1[i] + (q2[i] - q1[i]) * t;
      if (!compositeValid(q, robots, env)) return false;
    }
    if (stride == 1) break;
  }
  // Every sample is valid; rule out contact between neighbouring samples.
  GapCertifier gaps(q1, q2, robots, env);
  auto prev = gaps.marginsAt(0.0);
  for (std::size_t k = 1; k <= segments; ++k) {
    const double t0 = static_cast<double>(k - 1) / static_cast<double>(segments);
    const double t1 = static_cast<double>(k) / static_cast<double>(segments);
    auto next = gaps.marginsAt(t1);
    if (!gaps.certify(t0, prev, t1, next)) return false;
    prev = std::move(next);
  }
  return true;
}

}  // namespace cdr::geom

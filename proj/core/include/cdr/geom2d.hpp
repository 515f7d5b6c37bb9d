#pragma once

// Planar workspace model for disk robots among polygonal obstacles.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace cdr::geom {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr bool operator==(const Vec2&) const = default;

  constexpr double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  constexpr double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  constexpr double squaredNorm() const { return x * x + y * y; }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

/// Distance from p to the closed segment [a, b].
double pointSegmentDistance(const Vec2& p, const Vec2& a, const Vec2& b);

struct Box {
  Vec2 min;
  Vec2 max;

  double width() const { return max.x - min.x; }
  double height() const { return max.y - min.y; }
  bool contains(const Vec2& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }
  /// Distance from an interior point to the nearest wall.
  double interiorDistance(const Vec2& p) const;
  Vec2 clamp(const Vec2& p) const;
};

/// Simple polygon, counter-clockwise vertex order.
class Polygon {
 public:
  Polygon() = default;
  explicit Polygon(std::vector<Vec2> vertices);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const Box& boundingBox() const { return bbox_; }

  /// Even-odd containment; points on the boundary count as inside.
  bool contains(const Vec2& p) const;
  /// Distance to the polygon boundary.
  double boundaryDistance(const Vec2& p) const;
  double signedArea() const;

  static Polygon rectangle(double xmin, double ymin, double xmax, double ymax);

 private:
  std::vector<Vec2> vertices_;
  Box bbox_;
};

/// Rectangular bounds plus obstacles. The bounds behave as walls.
class Environment {
 public:
  Environment(Box bounds, std::vector<Polygon> obstacles);

  const Box& bounds() const { return bounds_; }
  const std::vector<Polygon>& obstacles() const { return obstacles_; }

  /// Distance to the closest obstacle or wall; 0 inside an obstacle.
  /// Throws std::domain_error when p lies outside the bounds.
  double clearance(const Vec2& p) const;

  /// True iff clearance(p) > radius, without computing the exact minimum.
  /// Points outside the bounds yield false.
  bool clearanceExceeds(const Vec2& p, double radius) const;

 private:
  Box bounds_;
  std::vector<Polygon> obstacles_;
};

struct RobotSpec {
  double radius = 0.2;
  std::string label;

  double width() const { return 2.0 * radius; }
};

using Configuration = Vec2;
using CompositeCfg = std::vector<Configuration>;

bool cfgValid(const Configuration& q, const RobotSpec& robot, const Environment& env);

/// Every robot valid and every pair separated by more than the sum of radii.
/// Throws std::domain_error on a length mismatch.
bool compositeValid(std::span<const Configuration> q, std::span<const RobotSpec> robots,
                    const Environment& env);

/// Checks the straight composite motion q1 -> q2. Samples form a power-of-two
/// subdivision whose largest per-robot step is at most `resolution`, so a
/// check at a finer resolution always covers every sample of a coarser one.
/// The gaps between samples are then certified with clearance bounds, so an
/// accepted motion stays valid at any finer resolution.
bool edgeValid(std::span<const Configuration> q1, std::span<const Configuration> q2,
               std::span<const RobotSpec> robots, const Environment& env, double resolution);

/// Number of interpolation intervals edgeValid uses for a motion.
std::size_t interpolationSegments(std::span<const Configuration> q1,
                                  std::span<const Configuration> q2, double resolution);

/// Largest per-robot displacement between two composite configurations.
double maxRobotDisplacement(std::span<const Configuration> q1, std::span<const Configuration> q2);

/// Euclidean distance in the composite space (all coordinates stacked).
double compositeDistance(std::span<const Configuration> q1, std::span<const Configuration> q2);

constexpr double kDefaultCollisionResolution = 0.05;

}  // namespace cdr::geom

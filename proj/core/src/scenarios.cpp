#include "cdr/scenarios.hpp"

#include <stdexcept>

namespace cdr::bench {

using geom::Box;
using geom::Environment;
using geom::Polygon;
using geom::Vec2;

namespace {

std::vector<geom::RobotSpec> roster(int n, double radius) {
  std::vector<geom::RobotSpec> robots;
  for (int i = 0; i < n; ++i) robots.push_back({radius, "r" + std::to_string(i)});
  return robots;
}

void requireCount(bool ok, const std::string& scenario, int robots) {
  if (!ok)
    throw std::invalid_argument(scenario + ": cannot stage " + std::to_string(robots) + " robots");
}

// Hallway: two square rooms joined by a corridor that admits one robot.
constexpr double kHallwayRoom = 4.0;
constexpr double kHallwayCorridor = 4.0;
constexpr double kHallwayWidth = 2 * kHallwayRoom + kHallwayCorridor;

Environment hallwayEnv(double radius) {
  const double half = 1.5 * radius;
  const double room = kHallwayRoom;
  const double mid = room / 2;
  return Environment(Box{{0, 0}, {kHallwayWidth, room}},
                     {Polygon::rectangle(room, 0, room + kHallwayCorridor, mid - half),
                      Polygon::rectangle(room, mid + half, room + kHallwayCorridor, room)});
}

// Staging cells of the left Hallway room, closest to the corridor axis first.
std::vector<Vec2> hallwayStaging() {
  const double m = kHallwayRoom / 2;
  return {{m, m}, {m, m + 1}, {m, m - 1}, {m - 1, m}, {m - 1, m + 1},
          {m - 1, m - 1}, {m + 1, m + 1}, {m + 1, m - 1}, {m + 1, m}};
}

}  // namespace

Scenario hallwayCross(int robots, double radius) {
  const auto cells = hallwayStaging();
  requireCount(robots >= 1 && (robots + 1) / 2 <= static_cast<int>(cells.size()), "hallway-cross", robots);
  Scenario s{{"hallway-cross-" + std::to_string(robots), hallwayEnv(radius), roster(robots, radius), {}, {}}, {}};
  const int left = (robots + 1) / 2;
  for (int i = 0; i < robots; ++i) {
    const bool onLeft = i < left;
    const Vec2 c = cells[onLeft ? i : i - left];
    const Vec2 l = c;
    const Vec2 r{kHallwayWidth - c.x, c.y};
    s.problem.starts.push_back(onLeft ? l : r);
    s.problem.goals.push_back(onLeft ? r : l);
  }
  return s;
}

Scenario hallwayFlow(int robots, double radius) {
  const auto cells = hallwayStaging();
  requireCount(robots >= 1 && robots <= static_cast<int>(cells.size()), "hallway-flow", robots);
  Scenario s{{"hallway-flow-" + std::to_string(robots), hallwayEnv(radius), roster(robots, radius), {}, {}}, {}};
  for (int i = 0; i < robots; ++i) {
    s.problem.starts.push_back(cells[i]);
    s.problem.goals.push_back(cells[i] + Vec2{kHallwayRoom + kHallwayCorridor, 0.0});
  }
  return s;
}

Scenario inlet(int robots, double radius) {
  requireCount(robots == 2, "inlet", robots);
  // Corridor along y = 1.5 with one alcove above its middle.
  const double half = 1.5 * radius;
  Environment env(Box{{0, 0}, {10, 3}},
                  {Polygon::rectangle(0, 0, 10, 1.5 - half),
                   Polygon::rectangle(0, 1.5 + half, 4.6, 3),
                   Polygon::rectangle(5.4, 1.5 + half, 10, 3)});
  Scenario s{{"inlet-2", std::move(env), roster(2, radius), {}, {}}, {}};
  s.problem.starts = {{0.5, 1.5}, {9.5, 1.5}};
  s.problem.goals = {{9.5, 1.5}, {0.5, 1.5}};
  return s;
}

Scenario track(int robots, double radius) {
  // Ring corridor around a central block; one robot fits across the ring.
  const double ring = 3.5 * radius;
  const double w = 6.0;
  const double h = 4.0;
  const int perSide = robots / 2;
  requireCount(robots >= 2 && robots % 2 == 0 && perSide <= 7, "track", robots);
  Environment env(Box{{0, 0}, {w, h}}, {Polygon::rectangle(ring, ring, w - ring, h - ring)});
  Scenario s{{"track-" + std::to_string(robots), std::move(env), roster(robots, radius), {}, {}}, {}};
  const double yTop = h - 0.5 * ring;
  const double yBottom = 0.5 * ring;
  // Goals are the starts rotated half a turn about the center, so every robot
  // keeps its place in the cyclic order around the ring.
  for (int k = 0; k < perSide; ++k) {
    const double x = perSide == 1 ? w / 2 : 1.2 + (w - 2.4) * k / (perSide - 1);
    s.problem.starts.push_back({x, yTop});
    s.problem.goals.push_back({w - x, yBottom});
  }
  for (int k = 0; k < perSide; ++k) {
    const double x = perSide == 1 ? w / 2 : 1.2 + (w - 2.4) * k / (perSide - 1);
    s.problem.starts.push_back({x, yBottom});
    s.problem.goals.push_back({w - x, yTop});
  }
  return s;
}

Scenario warehouse(double aisleWidth, int robots, double radius) {
  requireCount(robots >= 2 && robots % 2 == 0, "warehouse", robots);
  if (!(aisleWidth > 2.0 * radius)) throw std::invalid_argument("warehouse: aisle narrower than a robot");
  // Length-wise aisles separated by 1 m shelves, one aisle more than robot
  // pairs, with a width-wise aisle through the middle and open staging rows
  // above and below.
  const int pairs = robots / 2;
  const int aisles = pairs + 1;
  const double shelf = 1.0;
  const double stage = 1.5;
  const double shelfHeight = 6.0;
  const double width = aisles * aisleWidth + (aisles - 1) * shelf;
  const double height = 2 * stage + shelfHeight;
  const double crossLo = stage + 0.5 * (shelfHeight - aisleWidth);
  const double crossHi = crossLo + aisleWidth;
  std::vector<Polygon> shelves;
  for (int k = 0; k + 1 < aisles; ++k) {
    const double x0 = (k + 1) * aisleWidth + k * shelf;
    shelves.push_back(Polygon::rectangle(x0, stage, x0 + shelf, crossLo));
    shelves.push_back(Polygon::rectangle(x0, crossHi, x0 + shelf, stage + shelfHeight));
  }
  const auto label = aisleWidth == static_cast<int>(aisleWidth) ? std::to_string(static_cast<int>(aisleWidth))
                                                                 : std::to_string(aisleWidth);
  Scenario s{{"warehouse-" + label + "-" + std::to_string(robots), Environment(Box{{0, 0}, {width, height}}, shelves),
              roster(robots, radius), {}, {}},
             {}};
  for (int k = 0; k < pairs; ++k) {
    const double x = (k + 1) * aisleWidth + k * shelf + 0.5 * shelf;
    s.problem.starts.push_back({x, height - 0.5 * stage});
    s.problem.goals.push_back({x, 0.5 * stage});
  }
  for (int k = 0; k < pairs; ++k) {
    const double x = (k + 1) * aisleWidth + k * shelf + 0.5 * shelf;
    s.problem.starts.push_back({x, 0.5 * stage});
    s.problem.goals.push_back({x, height - 0.5 * stage});
  }
  return s;
}

Scenario openCross(int robots, double radius) {
  // Red robots cross left to right, blue robots top to bottom.
  const double side = 8.0;
  const int red = (robots + 1) / 2;
  const int blue = robots / 2;
  requireCount(robots >= 1 && red <= 7, "open-cross", robots);
  Scenario s{{"open-cross-" + std::to_string(robots), Environment(Box{{0, 0}, {side, side}}, {}),
              roster(robots, radius), {}, {}},
             {}};
  auto lane = [&](int k, int count) { return count == 1 ? side / 2 : 2.0 + 4.0 * k / (count - 1); };
  for (int k = 0; k < red; ++k) {
    s.problem.starts.push_back({0.5, lane(k, red)});
    s.problem.goals.push_back({side - 0.5, lane(k, red)});
  }
  for (int k = 0; k < blue; ++k) {
    s.problem.starts.push_back({lane(k, blue), side - 0.5});
    s.problem.goals.push_back({lane(k, blue), 0.5});
  }
  return s;
}

std::vector<std::string> builtinScenarioNames() {
  return {"hallway-cross", "hallway-flow", "inlet",      "track",
          "warehouse-1",   "warehouse-2",  "warehouse-4", "open-cross"};
}

Scenario makeScenario(const std::string& name, int robots) {
  if (name == "hallway-cross") return hallwayCross(robots);
  if (name == "hallway-flow") return hallwayFlow(robots);
  if (name == "inlet") return inlet(robots);
  if (name == "track") return track(robots);
  if (name == "warehouse-1") return warehouse(1.0, robots);
  if (name == "warehouse-2") return warehouse(2.0, robots);
  if (name == "warehouse-4") return warehouse(4.0, robots);
  if (name == "open-cross") return openCross(robots);
  throw std::invalid_argument("unknown scenario: " + name);
}

std::vector<Scenario> builtinScenarios() {
  std::vector<Scenario> out;
  for (const auto& name : builtinScenarioNames()) {
    for (int n : {2, 4, 6}) {
      if (name == "inlet" && n != 2) continue;
      out.push_back(makeScenario(name, n));
    }
  }
  return out;
}

}  // namespace cdr::bench

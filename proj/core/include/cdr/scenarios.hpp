#pragma once

// Generated benchmark environments: Hallway (Cross/Flow), Inlet, Track,
// Warehouse and Open Cross.

#include <map>
#include <string>
#include <vector>

#include "cdr/problem.hpp"

namespace cdr::bench {

constexpr double kDefaultRobotRadius = 0.2;

struct Scenario {
  Problem problem;
  /// Planner parameter overrides by name (see planning::applyOverrides).
  std::map<std::string, double> paramOverrides;

  const std::string& name() const { return problem.name; }
};

Scenario hallwayCross(int robots, double radius = kDefaultRobotRadius);
Scenario hallwayFlow(int robots, double radius = kDefaultRobotRadius);
Scenario inlet(int robots = 2, double radius = kDefaultRobotRadius);
Scenario track(int robots, double radius = kDefaultRobotRadius);
Scenario warehouse(double aisleWidth, int robots, double radius = kDefaultRobotRadius);
Scenario openCross(int robots, double radius = kDefaultRobotRadius);

/// Names accepted by makeScenario.
std::vector<std::string> builtinScenarioNames();

/// Builds a named scenario ("hallway-cross", "hallway-flow", "inlet", "track",
/// "warehouse-1", "warehouse-2", "warehouse-4", "open-cross"). Throws
/// std::invalid_argument for unknown names or robot counts the geometry
/// cannot stage.
Scenario makeScenario(const std::string& name, int robots);

/// Every builtin scenario at the default robot counts (2, 4 and 6 where the
/// geometry allows it).
std::vector<Scenario> builtinScenarios();

}  // namespace cdr::bench

#pragma once

#include <istream>
#include <string>
#include <vector>

#include "cdr/geom2d.hpp"

namespace cdr {

/// A multi-robot query: environment, roster, starts and goals.
struct Problem {
  std::string name;
  geom::Environment env;
  std::vector<geom::RobotSpec> robots;
  geom::CompositeCfg starts;
  geom::CompositeCfg goals;

  std::size_t robotCount() const { return robots.size(); }
  /// Starts and goals exist for every robot and are composite-valid.
  bool wellFormed() const;
};

/// Reads the environment file format:
/// {"bounds": [xmin, ymin, xmax, ymax], "obstacles": [[[x, y], ...], ...],
///  "robots": [{"radius", "label", "start": [x, y], "goal": [x, y]}, ...]}
/// Throws std::runtime_error on malformed input.
Problem loadProblem(std::istream& in, std::string name = {});
Problem loadProblemFile(const std::string& path);
std::string problemToJson(const Problem& problem);

}  // namespace cdr

#include "cdr/problem.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace cdr {

using nlohmann::json;

namespace {

geom::Vec2 point(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw std::runtime_error(std::string("environment: ") + what + " must be [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

bool Problem::wellFormed() const {
  if (robots.empty() || starts.size() != robots.size() || goals.size() != robots.size()) return false;
  return geom::compositeValid(starts, robots, env) && geom::compositeValid(goals, robots, env);
}

Problem loadProblem(std::istream& in, std::string name) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("environment: invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("bounds")) throw std::runtime_error("environment: missing 'bounds'");
  const auto& b = doc["bounds"];
  if (!b.is_array() || b.size() != 4) throw std::runtime_error("environment: 'bounds' must be [xmin, ymin, xmax, ymax]");
  geom::Box bounds{{b[0].get<double>(), b[1].get<double>()}, {b[2].get<double>(), b[3].get<double>()}};

  std::vector<geom::Polygon> obstacles;
  if (doc.contains("obstacles")) {
    for (const auto& poly : doc["obstacles"]) {
      std::vector<geom::Vec2> pts;
      for (const auto& p : poly) pts.push_back(point(p, "obstacle vertex"));
      try {
        obstacles.emplace_back(std::move(pts));
      } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("environment: ") + e.what());
      }
    }
  }

  std::optional<geom::Environment> env;
  try {
    env.emplace(bounds, std::move(obstacles));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("environment: ") + e.what());
  }
  Problem problem{std::move(name), std::move(*env), {}, {}, {}};
  if (problem.name.empty() && doc.contains("name") && doc["name"].is_string())
    problem.name = doc["name"].get<std::string>();
  if (doc.contains("robots")) {
    for (const auto& r : doc["robots"]) {
      geom::RobotSpec spec;
      spec.radius = r.value("radius", 0.2);
      if (!(spec.radius > 0.0)) throw std::runtime_error("environment: robot radius must be positive");
      spec.label = r.value("label", "r" + std::to_string(problem.robots.size()));
      if (!r.contains("start") || !r.contains("goal")) throw std::runtime_error("environment: robot needs start and goal");
      problem.robots.push_back(spec);
      problem.starts.push_back(point(r["start"], "start"));
      problem.goals.push_back(point(r["goal"], "goal"));
    }
  }
  return problem;
}

Problem loadProblemFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open environment file: " + path);
  return loadProblem(in, std::filesystem::path(path).stem().string());
}

std::string problemToJson(const Problem& problem) {
  json doc;
  const auto& b = problem.env.bounds();
  doc["name"] = problem.name;
  doc["bounds"] = {b.min.x, b.min.y, b.max.x, b.max.y};
  doc["obstacles"] = json::array();
  for (const auto& poly : problem.env.obstacles()) {
    json pts = json::array();
    for (const auto& v : poly.vertices()) pts.push_back({v.x, v.y});
    doc["obstacles"].push_back(pts);
  }
  doc["robots"] = json::array();
  for (std::size_t i = 0; i < problem.robots.size(); ++i)
    doc["robots"].push_back({{"radius", problem.robots[i].radius},
                             {"label", problem.robots[i].label},
                             {"start", {problem.starts[i].x, problem.starts[i].y}},
                             {"goal", {problem.goals[i].x, problem.goals[i].y}}});
  return doc.dump(2);
}

}  // namespace cdr

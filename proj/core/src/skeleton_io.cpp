#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "cdr/skeleton.hpp"

namespace cdr::skel {

using nlohmann::json;

namespace {

Vec2 parsePoint(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw std::runtime_error("skeleton: point must be [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

WorkspaceSkeleton loadSkeleton(std::istream& in, const geom::Environment* env) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("skeleton: invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("vertices") || !doc["vertices"].is_array() ||
      !doc.contains("edges") || !doc["edges"].is_array())
    throw std::runtime_error("skeleton: expected object with 'vertices' and 'edges' arrays");

  std::map<long long, Vec2> byId;
  for (const auto& v : doc["vertices"]) {
    if (!v.is_object() || !v.contains("id") || !v["id"].is_number_integer() || !v.contains("p"))
      throw std::runtime_error("skeleton: vertex needs integer 'id' and point 'p'");
    const auto id = v["id"].get<long long>();
    if (!byId.emplace(id, parsePoint(v["p"])).second)
      throw std::runtime_error("skeleton: duplicate vertex id " + std::to_string(id));
  }

  WorkspaceSkeleton skel;
  std::map<long long, int> dense;
  for (const auto& [id, p] : byId) dense[id] = skel.addVertex(p);

  struct PendingEdge {
    long long id;
    int src;
    int dst;
    std::vector<Vec2> pts;
    std::optional<double> capacity;
  };
  std::vector<PendingEdge> pending;
  for (const auto& e : doc["edges"]) {
    if (!e.is_object() || !e.contains("id") || !e.contains("src") || !e.contains("dst") ||
        !e["id"].is_number_integer() || !e["src"].is_number_integer() || !e["dst"].is_number_integer())
      throw std::runtime_error("skeleton: edge needs integer 'id', 'src', 'dst'");
    PendingEdge pe;
    pe.id = e["id"].get<long long>();
    const auto src = e["src"].get<long long>();
    const auto dst = e["dst"].get<long long>();
    if (!dense.count(src) || !dense.count(dst))
      throw std::runtime_error("skeleton: edge " + std::to_string(pe.id) + " references a missing vertex");
    pe.src = dense[src];
    pe.dst = dense[dst];
    if (e.contains("intermediates")) {
      if (!e["intermediates"].is_array()) throw std::runtime_error("skeleton: 'intermediates' must be an array");
      for (const auto& p : e["intermediates"]) pe.pts.push_back(parsePoint(p));
    }
    if (pe.pts.size() < 2) pe.pts = {skel.vertex(pe.src).point, skel.vertex(pe.dst).point};
    if (e.contains("capacity") && !e["capacity"].is_null()) {
      if (!e["capacity"].is_number()) throw std::runtime_error("skeleton: 'capacity' must be a number");
      pe.capacity = e["capacity"].get<double>();
    }
    pending.push_back(std::move(pe));
  }
  std::sort(pending.begin(), pending.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < pending.size(); ++i)
    if (pending[i].id == pending[i - 1].id)
      throw std::runtime_error("skeleton: duplicate edge id " + std::to_string(pending[i].id));

  for (auto& pe : pending) {
    double capacity = 0.0;
    if (pe.capacity) {
      capacity = *pe.capacity;
    } else if (env) {
      capacity = edgeCapacity(pe.pts, *env);
    } else {
      throw std::runtime_error("skeleton: edge " + std::to_string(pe.id) +
                               " has no capacity and no environment was given");
    }
    try {
      skel.addEdge(pe.src, pe.dst, std::move(pe.pts), capacity);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("skeleton: edge " + std::to_string(pe.id) + ": " + e.what());
    }
  }
  return skel;
}

WorkspaceSkeleton loadSkeletonFile(const std::string& path, const geom::Environment* env) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open skeleton file: " + path);
  return loadSkeleton(in, env);
}

std::string skeletonToJson(const WorkspaceSkeleton& skel) {
  json doc;
  doc["vertices"] = json::array();
  for (const auto& v : skel.vertices()) doc["vertices"].push_back({{"id", v.id}, {"p", {v.point.x, v.point.y}}});
  doc["edges"] = json::array();
  for (const auto& e : skel.edges()) {
    json pts = json::array();
    for (const auto& p : e.intermediates) pts.push_back({p.x, p.y});
    doc["edges"].push_back(
        {{"id", e.id}, {"src", e.source}, {"dst", e.target}, {"intermediates", pts}, {"capacity", e.capacity}});
  }
  return doc.dump(2);
}

}  // namespace cdr::skel

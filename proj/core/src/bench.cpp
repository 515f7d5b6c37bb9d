#include "cdr/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace cdr::bench {

using nlohmann::json;

namespace {

std::ofstream openOutput(const std::string& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file);
  return out;
}

void finishOutput(std::ofstream& out, const std::string& file) {
  out.flush();
  if (!out) throw std::runtime_error("error writing " + file);
}

bool recordLess(const RunRecord& a, const RunRecord& b) {
  return std::tie(a.scenario, a.planner, a.seed) < std::tie(b.scenario, b.planner, b.seed);
}

std::map<std::string, double> overridesFromJson(const json& j, const std::string& where) {
  std::map<std::string, double> out;
  if (j.is_null()) return out;
  if (!j.is_object()) throw std::runtime_error(where + ": params must be an object");
  for (const auto& [key, value] : j.items()) {
    if (value.is_boolean()) out[key] = value.get<bool>() ? 1.0 : 0.0;
    else if (value.is_number()) out[key] = value.get<double>();
    else throw std::runtime_error(where + ": param '" + key + "' must be a number or boolean");
  }
  return out;
}

}  // namespace

Scenario resolveScenario(const std::string& nameOrFile, int robots) {
  const auto names = builtinScenarioNames();
  if (std::find(names.begin(), names.end(), nameOrFile) != names.end()) return makeScenario(nameOrFile, robots);
  if (!std::filesystem::exists(nameOrFile))
    throw std::invalid_argument("unknown scenario (not a builtin name or file): " + nameOrFile);
  Scenario s{loadProblemFile(nameOrFile), {}};
  if (s.problem.name.empty()) s.problem.name = std::filesystem::path(nameOrFile).stem().string();
  return s;
}

ScenarioEntry loadScenario(const ScenarioSource& source) {
  ScenarioEntry entry;
  entry.name = source.name.empty() ? source.file : source.name;
  try {
    Scenario s = source.file.empty() ? makeScenario(source.name, source.robots) : resolveScenario(source.file, 0);
    if (!source.name.empty() && !source.file.empty()) s.problem.name = source.name;
    if (!s.problem.wellFormed()) throw std::runtime_error("starts or goals are invalid");
    for (const auto& [k, v] : source.overrides) s.paramOverrides[k] = v;
    entry.name = s.name();
    entry.scenario = std::move(s);
  } catch (const std::exception& e) {
    entry.error = e.what();
  }
  return entry;
}

std::optional<std::string> validatePlan(const Problem& problem, const plan::PlanResult& result,
                                        const plan::PlannerParams& params) {
  const auto& path = result.path;
  if (path.empty()) return "empty path";
  if (path.front() != problem.starts) return "path does not begin at the starts";
  for (std::size_t r = 0; r < problem.robotCount(); ++r) {
    if (path.back().size() != problem.robotCount()) return "configuration size mismatch";
    if (geom::distance(path.back()[r], problem.goals[r]) > params.goalTolerance * problem.robots[r].radius)
      return "path does not end at the goals";
  }
  const double fine = params.collisionResolution / 10.0;
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (path[k].size() != problem.robotCount()) return "configuration size mismatch";
    if (!geom::compositeValid(path[k], problem.robots, problem.env)) return fmt::format("waypoint {} invalid", k);
    if (k > 0 && !geom::edgeValid(path[k - 1], path[k], problem.robots, problem.env, fine))
      return fmt::format("segment {} collides at resolution {}", k, fine);
  }
  if (std::abs(plan::pathMakespan(path) - result.makespan) > 1e-9) return "reported makespan does not match path";
  return std::nullopt;
}

RunRecord runOne(const Scenario& scenario, plan::PlannerKind planner, std::uint64_t seed,
                 const BenchmarkOptions& options, const skel::WorkspaceSkeleton* skeleton) {
  RunRecord rec;
  rec.scenario = scenario.name();
  rec.planner = plan::plannerName(planner);
  rec.seed = seed;
  rec.telemetry = plan::Telemetry{}.counters();
  try {
    plan::PlannerParams params = options.base;
    plan::applyOverrides(params, options.overrides);
    plan::applyOverrides(params, scenario.paramOverrides);
    params.seed = seed;
    params.timeLimit = options.timeLimit;
    params = plan::resolveParams(params, scenario.problem.robots);

    const auto result = plan::runPlanner(planner, scenario.problem, params, skeleton);
    rec.timeSeconds = result.planningTime;
    rec.telemetry = result.telemetry.counters();
    if (result.success()) {
      if (auto problem = validatePlan(scenario.problem, result, params)) {
        rec.error = "validation failed: " + *problem;
      } else {
        rec.success = true;
        rec.makespan = result.makespan;
      }
    } else {
      rec.error = result.message.empty() ? "no solution" : result.message;
    }
    if (options.keepPaths && rec.success) rec.path = result.path;
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  return rec;
}

std::vector<RunRecord> runBenchmark(const std::vector<ScenarioEntry>& scenarios,
                                    const std::vector<plan::PlannerKind>& planners,
                                    const std::vector<std::uint64_t>& seeds, const BenchmarkOptions& options) {
  if (!(options.timeLimit > 0.0)) throw std::invalid_argument("time limit must be positive");
  if (seeds.empty()) throw std::invalid_argument("no seeds");

  struct Job {
    const ScenarioEntry* entry;
    plan::PlannerKind planner;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& s : scenarios)
    for (auto p : planners)
      for (auto seed : seeds) jobs.push_back({&s, p, seed});

  std::vector<RunRecord> records(jobs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const auto& job = jobs[i];
      if (job.entry->scenario) {
        const Scenario local = *job.entry->scenario;
        records[i] = runOne(local, job.planner, job.seed, options);
      } else {
        auto& rec = records[i];
        rec.scenario = job.entry->name;
        rec.planner = plan::plannerName(job.planner);
        rec.seed = job.seed;
        rec.telemetry = plan::Telemetry{}.counters();
        rec.error = "scenario load failed: " + job.entry->error;
      }
    }
  };

  unsigned workers = options.workers ? options.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(jobs.size(), 1)));
  std::vector<std::jthread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  pool.clear();
  return records;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("percentile of an empty set");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<Aggregate> aggregate(const std::vector<RunRecord>& records) {
  std::map<std::pair<std::string, std::string>, std::vector<const RunRecord*>> groups;
  for (const auto& r : records) groups[{r.scenario, r.planner}].push_back(&r);

  std::vector<Aggregate> out;
  for (const auto& [key, group] : groups) {
    Aggregate a;
    a.scenario = key.first;
    a.planner = key.second;
    a.runs = group.size();
    std::vector<double> times, costs;
    for (const auto* r : group) {
      times.push_back(r->timeSeconds);
      if (r->success) costs.push_back(*r->makespan);
    }
    a.successes = costs.size();
    a.successRate = static_cast<double>(a.successes) / static_cast<double>(a.runs);
    double sum = 0.0;
    for (double t : times) sum += t;
    a.meanTime = sum / static_cast<double>(times.size());
    a.medianTime = percentile(times, 0.5);
    if (!costs.empty()) {
      sum = 0.0;
      for (double c : costs) sum += c;
      a.meanMakespan = sum / static_cast<double>(costs.size());
      a.medianMakespan = percentile(costs, 0.5);
      a.p25Makespan = percentile(costs, 0.25);
      a.p75Makespan = percentile(costs, 0.75);
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<std::string> telemetryColumns() {
  std::vector<std::string> out;
  for (const auto& [name, value] : plan::Telemetry{}.counters()) out.push_back(name);
  return out;
}

void writeCsv(std::ostream& out, const std::vector<RunRecord>& records) {
  const auto columns = telemetryColumns();
  out << "scenario,planner,seed,success,time_s,makespan_s";
  for (const auto& c : columns) out << ',' << c;
  out << '\n';

  std::vector<const RunRecord*> sorted;
  for (const auto& r : records) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) { return recordLess(*a, *b); });

  for (const auto* r : sorted) {
    out << r->scenario << ',' << r->planner << ',' << r->seed << ',' << (r->success ? 1 : 0) << ','
        << fmt::format("{:.6f}", r->timeSeconds) << ',';
    if (r->makespan) out << fmt::format("{}", *r->makespan);
    for (const auto& c : columns) {
      out << ',';
      for (const auto& [name, value] : r->telemetry)
        if (name == c) {
          out << fmt::format("{}", value);
          break;
        }
    }
    out << '\n';
  }
}

void emitCsv(const std::vector<RunRecord>& records, const std::string& file) {
  auto out = openOutput(file);
  writeCsv(out, records);
  finishOutput(out, file);
}

std::string summaryJson(const std::vector<RunRecord>& records, double timeLimit) {
  json doc;
  doc["time_limit"] = timeLimit;
  doc["runs"] = records.size();
  auto optional = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  doc["aggregates"] = json::array();
  for (const auto& a : aggregate(records)) {
    doc["aggregates"].push_back({{"scenario", a.scenario},
                                 {"planner", a.planner},
                                 {"runs", a.runs},
                                 {"successes", a.successes},
                                 {"success_rate", a.successRate},
                                 {"time_mean_s", a.meanTime},
                                 {"time_median_s", a.medianTime},
                                 {"makespan_mean_s", optional(a.meanMakespan)},
                                 {"makespan_median_s", optional(a.medianMakespan)},
                                 {"makespan_p25_s", optional(a.p25Makespan)},
                                 {"makespan_p75_s", optional(a.p75Makespan)}});
  }
  doc["failures"] = json::array();
  std::vector<const RunRecord*> sorted;
  for (const auto& r : records) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) { return recordLess(*a, *b); });
  for (const auto* r : sorted)
    if (!r->success)
      doc["failures"].push_back({{"scenario", r->scenario}, {"planner", r->planner}, {"seed", r->seed}, {"reason", r->error}});
  return doc.dump(2) + "\n";
}

void emitSummary(const std::vector<RunRecord>& records, double timeLimit, const std::string& file) {
  auto out = openOutput(file);
  out << summaryJson(records, timeLimit);
  finishOutput(out, file);
}

std::string pathJson(const RunRecord& record) {
  json doc;
  doc["scenario"] = record.scenario;
  doc["planner"] = record.planner;
  doc["seed"] = record.seed;
  doc["success"] = record.success;
  doc["makespan_s"] = record.makespan ? json(*record.makespan) : json(nullptr);
  doc["robots"] = json::array();
  for (const auto& robot : plan::timedPaths(record.path)) {
    json pts = json::array();
    for (const auto& [t, p] : robot) pts.push_back({t, p.x, p.y});
    doc["robots"].push_back({{"waypoints", pts}});
  }
  return doc.dump(2) + "\n";
}

std::vector<std::vector<geom::Vec2>> robotPolylines(const std::vector<plan::CompositeCfg>& path) {
  std::vector<std::vector<geom::Vec2>> out;
  if (path.empty()) return out;
  out.resize(path.front().size());
  for (const auto& q : path)
    for (std::size_t r = 0; r < out.size(); ++r) out[r].push_back(q[r]);
  return out;
}

Suite loadSuite(std::istream& in, const std::string& baseDir) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("suite: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw std::runtime_error("suite: top level must be an object");
  Suite suite;
  try {
    if (!doc.contains("scenarios") || !doc["scenarios"].is_array() || doc["scenarios"].empty())
      throw std::runtime_error("suite: 'scenarios' must be a nonempty array");
    for (const auto& s : doc["scenarios"]) {
      ScenarioSource src;
      if (s.is_string()) {
        src.name = s.get<std::string>();
      } else {
        src.name = s.value("name", "");
        src.file = s.value("file", "");
        src.robots = s.value("robots", 2);
        src.overrides = overridesFromJson(s.value("params", json()), "suite scenario");
      }
      if (src.name.empty() && src.file.empty()) throw std::runtime_error("suite: scenario needs a name or file");
      if (!src.file.empty() && !baseDir.empty() && std::filesystem::path(src.file).is_relative())
        src.file = (std::filesystem::path(baseDir) / src.file).string();
      suite.scenarios.push_back(std::move(src));
    }
    if (doc.contains("planners")) {
      for (const auto& p : doc["planners"]) suite.planners.push_back(plan::parsePlanner(p.get<std::string>()));
    } else {
      suite.planners = plan::allPlanners();
    }
    suite.overrides = overridesFromJson(doc.value("params", json()), "suite");
    if (doc.contains("seeds")) {
      const auto& s = doc["seeds"];
      if (!s.is_array() || s.size() != 2) throw std::runtime_error("suite: 'seeds' must be [first, last]");
      for (auto x = s[0].get<std::uint64_t>(); x <= s[1].get<std::uint64_t>(); ++x) suite.seeds.push_back(x);
    }
    if (doc.contains("time_limit")) suite.timeLimit = doc["time_limit"].get<double>();
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("suite: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("suite: ") + e.what());
  }
  return suite;
}

Suite loadSuiteFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open suite file: " + path);
  return loadSuite(in, std::filesystem::path(path).parent_path().string());
}

std::vector<std::uint64_t> parseSeedRange(const std::string& text) {
  auto number = [&](const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
      throw std::invalid_argument("invalid seed range: " + text);
    return std::stoull(s);
  };
  const auto dots = text.find("..");
  if (dots == std::string::npos) return {number(text)};
  const auto a = number(text.substr(0, dots));
  const auto b = number(text.substr(dots + 2));
  if (b < a) throw std::invalid_argument("invalid seed range: " + text);
  std::vector<std::uint64_t> out;
  for (auto s = a; s <= b; ++s) out.push_back(s);
  return out;
}

std::map<std::string, double> loadOverridesFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open params file: " + path);
  try {
    return overridesFromJson(json::parse(in), "params file");
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("params file: ") + e.what());
  }
}

}  // namespace cdr::bench

#pragma once

// Benchmark harness: suite loading, seeded runs in a worker pool, aggregate
// metrics and CSV / JSON / SVG output.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cdr/planners.hpp"
#include "cdr/scenarios.hpp"
#include "cdr/skeleton.hpp"

namespace cdr::bench {

/// A scenario as named in a suite file: either a builtin generator with a
/// robot count, or an environment file.
struct ScenarioSource {
  std::string name;
  std::string file;  ///< Empty for builtin scenarios.
  int robots = 2;
  std::map<std::string, double> overrides;
};

/// A loaded scenario, or the error that prevented loading it.
struct ScenarioEntry {
  std::string name;
  std::optional<Scenario> scenario;
  std::string error;
};

/// Never throws; failures end up in ScenarioEntry::error.
ScenarioEntry loadScenario(const ScenarioSource& source);

/// Builtin name or environment file path, resolved the way the CLI does.
Scenario resolveScenario(const std::string& nameOrFile, int robots);

struct RunRecord {
  std::string scenario;
  std::string planner;
  std::uint64_t seed = 0;
  bool success = false;
  double timeSeconds = 0.0;
  std::optional<double> makespan;  ///< Absent on failure.
  std::vector<std::pair<std::string, double>> telemetry;
  std::string error;  ///< Load error, planner message or validation failure.
  std::vector<plan::CompositeCfg> path;  ///< Kept only when requested.
};

struct BenchmarkOptions {
  double timeLimit = 600.0;
  unsigned workers = 0;  ///< 0 = hardware concurrency.
  bool keepPaths = false;
  plan::PlannerParams base;  ///< Seed and time limit are overwritten per run.
  std::map<std::string, double> overrides;  ///< Applied before scenario overrides.
};

/// Validation at 10x finer resolution than the planner used: endpoints,
/// every segment, and the reported makespan.
std::optional<std::string> validatePlan(const Problem& problem, const plan::PlanResult& result,
                                        const plan::PlannerParams& params);

/// Runs one (scenario, planner, seed) and validates the outcome. The skeleton
/// is used by the skeleton-guided planners; null builds the default one.
RunRecord runOne(const Scenario& scenario, plan::PlannerKind planner, std::uint64_t seed,
                 const BenchmarkOptions& options, const skel::WorkspaceSkeleton* skeleton = nullptr);

/// Every (scenario, planner, seed) combination. Records come back in
/// combination order regardless of worker scheduling.
std::vector<RunRecord> runBenchmark(const std::vector<ScenarioEntry>& scenarios,
                                    const std::vector<plan::PlannerKind>& planners,
                                    const std::vector<std::uint64_t>& seeds, const BenchmarkOptions& options);

struct Aggregate {
  std::string scenario;
  std::string planner;
  std::size_t runs = 0;
  std::size_t successes = 0;
  double successRate = 0.0;
  double meanTime = 0.0;
  double medianTime = 0.0;
  std::optional<double> meanMakespan;
  std::optional<double> medianMakespan;
  std::optional<double> p25Makespan;
  std::optional<double> p75Makespan;
};

/// Linear-interpolated percentile of unsorted values, q in [0, 1].
double percentile(std::vector<double> values, double q);

/// One aggregate per (scenario, planner), sorted by that pair.
std::vector<Aggregate> aggregate(const std::vector<RunRecord>& records);

/// Telemetry column names in CSV order.
std::vector<std::string> telemetryColumns();

void writeCsv(std::ostream& out, const std::vector<RunRecord>& records);
void emitCsv(const std::vector<RunRecord>& records, const std::string& file);
/// Aggregates plus record-level errors.
std::string summaryJson(const std::vector<RunRecord>& records, double timeLimit);
void emitSummary(const std::vector<RunRecord>& records, double timeLimit, const std::string& file);
/// Per-robot timed paths of one run.
std::string pathJson(const RunRecord& record);

struct SvgScene {
  const geom::Environment* env = nullptr;
  std::vector<const skel::WorkspaceSkeleton*> skeletons;
  std::vector<std::vector<geom::Vec2>> paths;  ///< One polyline per robot.
  std::vector<geom::Vec2> starts;
  std::vector<geom::Vec2> goals;
  double pixelsPerMeter = 50.0;
};

/// Per-robot polylines of a composite path.
std::vector<std::vector<geom::Vec2>> robotPolylines(const std::vector<plan::CompositeCfg>& path);

std::string renderSvg(const SvgScene& scene);
void emitSvg(const SvgScene& scene, const std::string& file);

struct Suite {
  std::vector<ScenarioSource> scenarios;
  std::vector<plan::PlannerKind> planners;
  std::map<std::string, double> overrides;
  std::vector<std::uint64_t> seeds;
  std::optional<double> timeLimit;
};

/// Suite file format:
/// {"scenarios": [{"name": "hallway-cross", "robots": 2, "params": {...}},
///                {"file": "env.json", "name": "custom"}],
///  "planners": ["cdr-rrt", ...], "params": {...}, "seeds": [1, 20],
///  "time_limit": 120}
/// "seeds" is an inclusive range. File paths are relative to the suite file.
/// Throws std::runtime_error on malformed input.
Suite loadSuite(std::istream& in, const std::string& baseDir = {});
Suite loadSuiteFile(const std::string& path);

/// Parses "a..b" (inclusive) or a single seed.
std::vector<std::uint64_t> parseSeedRange(const std::string& text);

/// Planner parameter overrides from a JSON object of numbers or booleans.
std::map<std::string, double> loadOverridesFile(const std::string& path);

}  // namespace cdr::bench

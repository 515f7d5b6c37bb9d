// cdrplan: run one planning query or a benchmark suite.
//
// Exit codes: 0 success, 2 planner failure, 1 usage or configuration error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cdr/bench.hpp"
#include "cdr/planners.hpp"
#include "cdr/scenarios.hpp"
#include "cdr/skeleton.hpp"

namespace fs = std::filesystem;
using namespace cdr;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitPlanner = 2;

struct PlanArgs {
  std::string scenario;
  std::string planner;
  std::uint64_t seed = 1;
  double timeLimit = 600.0;
  std::string out = ".";
  int robots = 2;
  std::string skeletonFile;
  std::string paramsFile;
  bool svg = false;
};

struct BenchArgs {
  std::string suite;
  std::string seeds;
  std::string out = ".";
  std::optional<double> timeLimit;
  unsigned workers = 0;
  bool svg = false;
};

void writeText(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << text;
}

std::string runStem(const bench::RunRecord& r) { return r.scenario + "_" + r.planner + "_" + std::to_string(r.seed); }

void writeSvg(const fs::path& file, const Problem& problem, const skel::WorkspaceSkeleton* skeleton,
              const bench::RunRecord& record) {
  bench::SvgScene scene;
  scene.env = &problem.env;
  if (skeleton) scene.skeletons.push_back(skeleton);
  scene.paths = bench::robotPolylines(record.path);
  scene.starts = problem.starts;
  scene.goals = problem.goals;
  bench::emitSvg(scene, file.string());
}

int runPlan(const PlanArgs& args) {
  std::optional<bench::Scenario> loaded;
  plan::PlannerKind kind;
  bench::BenchmarkOptions options;
  std::optional<skel::WorkspaceSkeleton> skeleton;
  try {
    loaded = bench::resolveScenario(args.scenario, args.robots);
    if (!loaded->problem.wellFormed()) throw std::runtime_error("starts or goals are invalid");
    kind = plan::parsePlanner(args.planner);
    if (!(args.timeLimit > 0.0)) throw std::invalid_argument("--time-limit must be positive");
    options.timeLimit = args.timeLimit;
    if (!args.paramsFile.empty()) options.overrides = bench::loadOverridesFile(args.paramsFile);
    plan::PlannerParams check = options.base;
    plan::applyOverrides(check, options.overrides);
    plan::applyOverrides(check, loaded->paramOverrides);
    if (!args.skeletonFile.empty()) skeleton = skel::loadSkeletonFile(args.skeletonFile, &loaded->problem.env);
    fs::create_directories(args.out);
  } catch (const std::exception& e) {
    std::cerr << "cdrplan: " << e.what() << '\n';
    return kExitConfig;
  }

  const auto& scenario = *loaded;
  options.keepPaths = true;
  const auto record = bench::runOne(scenario, kind, args.seed, options, skeleton ? &*skeleton : nullptr);
  const fs::path out(args.out);
  try {
    bench::emitCsv({record}, (out / "runs.csv").string());
    bench::emitSummary({record}, args.timeLimit, (out / "summary.json").string());
    if (record.success) writeText(out / (runStem(record) + ".json"), bench::pathJson(record));
    if (args.svg) {
      const bool guided = kind == plan::PlannerKind::CdrRrt || kind == plan::PlannerKind::DrRrt;
      std::optional<skel::WorkspaceSkeleton> drawn;
      if (guided && !skeleton) drawn = plan::defaultSkeleton(scenario.problem, options.base);
      const skel::WorkspaceSkeleton* shown = skeleton ? &*skeleton : (drawn ? &*drawn : nullptr);
      writeSvg(out / (runStem(record) + ".svg"), scenario.problem, shown, record);
    }
  } catch (const std::exception& e) {
    std::cerr << "cdrplan: " << e.what() << '\n';
    return kExitConfig;
  }

  if (!record.success) {
    std::cerr << "cdrplan: " << record.planner << " failed on " << record.scenario << ": " << record.error << '\n';
    return kExitPlanner;
  }
  std::printf("%s %s seed=%llu time=%.3fs makespan=%.3f\n", record.scenario.c_str(), record.planner.c_str(),
              static_cast<unsigned long long>(record.seed), record.timeSeconds, *record.makespan);
  return kExitOk;
}

int runBench(const BenchArgs& args) {
  bench::Suite suite;
  std::vector<std::uint64_t> seeds;
  bench::BenchmarkOptions options;
  try {
    suite = bench::loadSuiteFile(args.suite);
    seeds = args.seeds.empty() ? suite.seeds : bench::parseSeedRange(args.seeds);
    if (seeds.empty()) throw std::invalid_argument("no seeds: pass --seeds or list them in the suite");
    options.timeLimit = args.timeLimit.value_or(suite.timeLimit.value_or(600.0));
    if (!(options.timeLimit > 0.0)) throw std::invalid_argument("time limit must be positive");
    options.overrides = suite.overrides;
    plan::PlannerParams check = options.base;
    plan::applyOverrides(check, options.overrides);
    options.workers = args.workers;
    options.keepPaths = args.svg;
    fs::create_directories(args.out);
  } catch (const std::exception& e) {
    std::cerr << "cdrplan: " << e.what() << '\n';
    return kExitConfig;
  }

  std::vector<bench::ScenarioEntry> entries;
  for (const auto& src : suite.scenarios) {
    entries.push_back(bench::loadScenario(src));
    if (!entries.back().scenario) std::cerr << "cdrplan: scenario " << entries.back().name << ": " << entries.back().error << '\n';
  }
  const auto records = bench::runBenchmark(entries, suite.planners, seeds, options);

  const fs::path out(args.out);
  std::size_t failures = 0;
  try {
    bench::emitCsv(records, (out / "runs.csv").string());
    bench::emitSummary(records, options.timeLimit, (out / "summary.json").string());
    for (const auto& r : records) {
      if (!r.success) {
        ++failures;
        continue;
      }
      if (!args.svg) continue;
      for (const auto& e : entries)
        if (e.scenario && e.name == r.scenario) writeSvg(out / (runStem(r) + ".svg"), e.scenario->problem, nullptr, r);
    }
  } catch (const std::exception& e) {
    std::cerr << "cdrplan: " << e.what() << '\n';
    return kExitConfig;
  }

  for (const auto& a : bench::aggregate(records)) {
    std::printf("%-20s %-14s success %zu/%zu  median time %.3fs", a.scenario.c_str(), a.planner.c_str(), a.successes,
                a.runs, a.medianTime);
    if (a.medianMakespan) std::printf("  median makespan %.3f", *a.medianMakespan);
    std::printf("\n");
  }
  return failures == 0 ? kExitOk : kExitPlanner;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-robot motion planning with skeleton-guided sampling"};
  app.require_subcommand(1);

  PlanArgs planArgs;
  auto* plan = app.add_subcommand("plan", "Solve one query");
  plan->add_option("--scenario", planArgs.scenario, "Builtin scenario name or environment file")->required();
  plan->add_option("--planner", planArgs.planner, "cdr-rrt | dr-rrt | composite-rrt | composite-prm | decoupled-prm")
      ->required();
  plan->add_option("--seed", planArgs.seed, "Random seed");
  plan->add_option("--time-limit", planArgs.timeLimit, "Seconds");
  plan->add_option("--out", planArgs.out, "Output directory");
  plan->add_option("--robots", planArgs.robots, "Robot count for builtin scenarios")->check(CLI::PositiveNumber);
  plan->add_option("--skeleton", planArgs.skeletonFile, "Workspace skeleton file")->check(CLI::ExistingFile);
  plan->add_option("--params", planArgs.paramsFile, "JSON object of planner parameter overrides")
      ->check(CLI::ExistingFile);
  plan->add_flag("--svg", planArgs.svg, "Render the solution");

  BenchArgs benchArgs;
  auto* bench = app.add_subcommand("bench", "Run a benchmark suite");
  bench->add_option("--suite", benchArgs.suite, "Suite file")->required()->check(CLI::ExistingFile);
  bench->add_option("--seeds", benchArgs.seeds, "Seed range a..b");
  bench->add_option("--out", benchArgs.out, "Output directory");
  bench->add_option("--time-limit", benchArgs.timeLimit, "Seconds per run");
  bench->add_option("--workers", benchArgs.workers, "Worker threads (0 = all cores)");
  bench->add_flag("--svg", benchArgs.svg, "Render every solved run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  if (plan->parsed()) return runPlan(planArgs);
  return runBench(benchArgs);
}

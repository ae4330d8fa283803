// Command-line front end: run, sweep, compare, geometry-debug, export-lp,
// generate-synthetic.

#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "solarzoning/dataset.hpp"
#include "solarzoning/pipeline.hpp"
#include "solarzoning/synthetic.hpp"

extern char** environ;

namespace fs = std::filesystem;
namespace sz = solarzoning;
using sz::pipeline::Outcome;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> scenario;
  std::optional<double> target;
};

void add_overrides(CLI::App& cmd, Overrides& o) {
  cmd.add_option("--seed", o.seed, "Override the config seed");
  cmd.add_option("--scenario", o.scenario, "unregulated, baseline or progressive");
  cmd.add_option("--target", o.target, "Solar share target in [0, 1]");
}

sz::pipeline::ScenarioConfig load(const fs::path& path, const Overrides& o) {
  auto c = sz::pipeline::load_config(path);
  if (o.seed) c.seed = *o.seed;
  if (o.scenario) {
    try {
      c.scenario = sz::zoning::parse_scenario(*o.scenario);
    } catch (const std::exception& e) {
      throw sz::pipeline::ConfigError(std::string("--scenario: ") + e.what());
    }
  }
  if (o.target) c.solar_share_target = *o.target;
  sz::pipeline::validate(c);
  return c;
}

int report(const Outcome& o) {
  (o.exit_code == 0 ? std::cout : std::cerr) << o.message << '\n';
  return o.exit_code;
}

// Runs `fn`, mapping configuration errors to exit 2.
template <class F>
int with_config(F&& fn) {
  try {
    return fn();
  } catch (const sz::ParseError& e) {
    std::cerr << e.what() << '\n';
    return sz::pipeline::kConfigError;
  } catch (const sz::ValidationError& e) {
    std::cerr << e.what() << '\n';
    return sz::pipeline::kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return sz::pipeline::kInternalError;
  }
}

std::string target_tag(double target) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "t%02d", static_cast<int>(std::lround(target * 100.0)));
  return buf;
}

std::string format_target(double target) {
  std::ostringstream s;
  s << target;
  return s.str();
}

struct Job {
  std::vector<std::string> args;
  std::string label;
};

// Runs each job as an isolated child process of this executable, at most
// `workers` at a time. Returns the first nonzero exit code (or 0).
int run_jobs(const std::vector<Job>& jobs, unsigned workers) {
  const std::string self = fs::read_symlink("/proc/self/exe").string();
  std::vector<std::pair<pid_t, std::size_t>> running;
  std::vector<int> codes(jobs.size(), 0);
  std::size_t next = 0;
  const auto reap = [&] {
    int status = 0;
    const pid_t pid = ::wait(&status);
    const auto it = std::find_if(running.begin(), running.end(), [&](const auto& r) { return r.first == pid; });
    if (it == running.end()) return;
    codes[it->second] = WIFEXITED(status) ? WEXITSTATUS(status) : sz::pipeline::kInternalError;
    std::cout << jobs[it->second].label << ": exit " << codes[it->second] << '\n';
    running.erase(it);
  };
  while (next < jobs.size() || !running.empty()) {
    if (next < jobs.size() && running.size() < workers) {
      std::vector<char*> argv;
      std::vector<std::string> args = jobs[next].args;
      args.insert(args.begin(), self);
      for (auto& a : args) argv.push_back(a.data());
      argv.push_back(nullptr);
      pid_t pid = 0;
      if (::posix_spawn(&pid, self.c_str(), nullptr, nullptr, argv.data(), environ) != 0) {
        std::cerr << jobs[next].label << ": cannot start worker\n";
        codes[next] = sz::pipeline::kInternalError;
      } else {
        running.emplace_back(pid, next);
      }
      ++next;
    } else {
      reap();
    }
  }
  for (int c : codes) {
    if (c != 0) return c;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solar zoning supply and capacity-expansion scenarios"};
  app.set_version_flag("--version", SOLARZONING_VERSION);
  app.require_subcommand(1);

  fs::path config_path, out;
  Overrides overrides;

  auto* run = app.add_subcommand("run", "Run one scenario and write its artifacts");
  run->add_option("--config", config_path, "Scenario config (JSON)")->required();
  run->add_option("--out", out, "Output directory")->required();
  add_overrides(*run, overrides);

  std::vector<double> targets = {0.10, 0.20};
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  auto* sweep = app.add_subcommand("sweep", "Run every scenario at each target in parallel processes");
  sweep->add_option("--config", config_path, "Scenario config (JSON)")->required();
  sweep->add_option("--out", out, "Directory receiving one subdirectory per run")->required();
  sweep->add_option("--seed", overrides.seed, "Override the config seed");
  sweep->add_option("--targets", targets, "Solar share targets")->delimiter(',');
  sweep->add_option("--jobs", jobs, "Concurrent workers")->check(CLI::PositiveNumber);

  fs::path dir_a, dir_b;
  auto* compare = app.add_subcommand("compare", "Compare two run directories");
  compare->add_option("dir_a", dir_a, "Reference run")->required();
  compare->add_option("dir_b", dir_b, "Compared run")->required();
  compare->add_option("--out", out, "Write the CSV here instead of stdout");

  std::optional<std::string> subdivision;
  auto* debug = app.add_subcommand("geometry-debug", "Write parcels, edge classes and developable areas");
  debug->add_option("--config", config_path, "Scenario config (JSON)")->required();
  debug->add_option("--out", out, "Output directory")->required();
  debug->add_option("--subdivision", subdivision, "Only this subdivision");
  add_overrides(*debug, overrides);

  auto* mps = app.add_subcommand("export-lp", "Write the scenario's expansion LP as MPS");
  mps->add_option("--config", config_path, "Scenario config (JSON)")->required();
  mps->add_option("--out", out, "MPS file")->required();
  add_overrides(*mps, overrides);

  sz::synthetic::Spec spec;
  auto* gen = app.add_subcommand("generate-synthetic", "Write a synthetic study area");
  gen->add_option("--out", out, "Data directory")->required();
  gen->add_option("--seed", spec.seed, "Generator seed");
  gen->add_option("--regions", spec.regions, "Number of regions");
  gen->add_option("--columns", spec.columns, "Subdivisions per region east-west");
  gen->add_option("--rows", spec.rows, "Subdivisions per region north-south");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sz::pipeline::kConfigError;
  }

  if (*run) {
    return with_config([&] { return report(sz::pipeline::run_scenario(load(config_path, overrides), out)); });
  }
  if (*debug) {
    return with_config(
        [&] { return report(sz::pipeline::geometry_debug(load(config_path, overrides), out, subdivision)); });
  }
  if (*mps) {
    return with_config([&] { return report(sz::pipeline::export_lp(load(config_path, overrides), out)); });
  }
  if (*compare) {
    return with_config([&] {
      const auto rows = sz::pipeline::compare_runs(dir_a, dir_b);
      if (out.empty()) {
        sz::pipeline::write_comparison(std::cout, rows);
      } else {
        std::ofstream f(out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write '" + out.string() + "'");
        sz::pipeline::write_comparison(f, rows);
      }
      return 0;
    });
  }
  if (*gen) {
    return with_config([&] {
      sz::dataset::write(sz::synthetic::generate(spec), out);
      std::cout << "wrote " << out.string() << '\n';
      return 0;
    });
  }
  if (*sweep) {
    return with_config([&] {
      load(config_path, overrides);  // fail fast on a bad config
      for (double t : targets) {
        if (!(t >= 0.0 && t <= 1.0)) throw sz::pipeline::ConfigError("--targets must lie in [0, 1]");
      }
      fs::create_directories(out);
      std::vector<Job> list;
      for (auto kind : {sz::zoning::ScenarioKind::Unregulated, sz::zoning::ScenarioKind::Baseline,
                        sz::zoning::ScenarioKind::Progressive}) {
        for (double t : targets) {
          const std::string name = std::string(sz::zoning::to_string(kind)) + "_" + target_tag(t);
          Job job{{"run", "--config", config_path.string(), "--out", (out / name).string(), "--scenario",
                   std::string(sz::zoning::to_string(kind)), "--target", format_target(t)},
                  name};
          if (overrides.seed) {
            job.args.push_back("--seed");
            job.args.push_back(std::to_string(*overrides.seed));
          }
          list.push_back(std::move(job));
        }
      }
      const int code = run_jobs(list, jobs);
      if (code != 0) return code;
      for (double t : targets) {
        const fs::path base = out / ("unregulated_" + target_tag(t));
        for (const char* other : {"baseline", "progressive"}) {
          const fs::path report_path = out / ("compare_unregulated_vs_" + std::string(other) + "_" + target_tag(t) + ".csv");
          std::ofstream f(report_path, std::ios::binary);
          sz::pipeline::write_comparison(f, sz::pipeline::compare_runs(base, out / (std::string(other) + "_" + target_tag(t))));
        }
      }
      std::cout << "sweep complete: " << out.string() << '\n';
      return 0;
    });
  }
  return sz::pipeline::kInternalError;
}

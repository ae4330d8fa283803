// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "lp_instances.hpp"
#include "solarzoning/csv.hpp"
#include "solarzoning/parallel.hpp"
#include "solarzoning/pipeline.hpp"
#include "solarzoning/synthetic.hpp"
#include "support.hpp"

using namespace solarzoning;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// Tolerances.
constexpr int kOracleParcels = 200;
constexpr std::size_t kOracleSamples = 1'000'000;
constexpr double kOracleRelTol = 0.01;
constexpr double kOracleSeconds = 60.0;
constexpr double kAdditivityRelTol = 1e-9;
constexpr int kMinSubdivisions = 50;
constexpr double kSilentShareThreshold = 0.40;
constexpr int kDominanceSeeds = 20;
constexpr double kCapacityRelTol = 1e-9;
constexpr double kAnalyticRelTol = 1e-6;
constexpr double kReferenceRelTol = 1e-6;
constexpr double kDirectionalityTarget = 0.10;
constexpr double kDirectionalitySeconds = 300.0;
constexpr std::array<double, 4> kSweepTargets = {0.0, 0.05, 0.10, 0.20};
constexpr double kObjectiveRelTol = 1e-9;
constexpr double kAuditTol = 1e-6;
constexpr double kPctTol = 0.05;

struct Options {
  fs::path config;
  fs::path cli;
  fs::path cbc;
  fs::path work;
};

struct Verdict {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

struct Shell {
  int code;
  std::string output;
};

Shell shell(const std::string& cmd) {
  FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
  if (!pipe) return {-1, "popen failed"};
  std::string out;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) out += buf.data();
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string quote(const fs::path& p) { return "\"" + p.string() + "\""; }

// ---- 1: geometry oracle ----

Verdict geometry_oracle() {
  const auto t0 = Clock::now();
  std::vector<double> rel(kOracleParcels);
  parallel_for(kOracleParcels, [&](std::size_t i) {
    Rng rng(derive_seed(1, "oracle:" + std::to_string(i)));
    const int vertices = 4 + static_cast<int>(uniform_index(rng, 9));
    const auto parcel = sztest::random_parcel(rng, "P" + std::to_string(i), vertices, 300.0);
    zoning::RuleLimits l;
    l.road_setback_m = sztest::uniform(rng, 0, 40);
    l.ppl_setback_m = sztest::uniform(rng, 0, 40);
    l.nppl_setback_m = sztest::uniform(rng, 0, 40);
    const double area = geometry::erode_by_setbacks(parcel, zoning::EffectiveRule::permitted(l)).area_m2;
    const double oracle = sztest::monte_carlo_area(parcel, l, kOracleSamples, rng());
    rel[i] = oracle > 0.0 ? std::abs(area - oracle) / oracle : (area == 0.0 ? 0.0 : 1.0);
  });
  const double worst = *std::max_element(rel.begin(), rel.end());
  const double secs = seconds_since(t0);
  return {worst <= kOracleRelTol && secs < kOracleSeconds,
          std::to_string(kOracleParcels) + " parcels, max rel err " + fmt(100 * worst, 3) + "% (tol " +
              fmt(100 * kOracleRelTol) + "%), " + fmt(secs, 3) + " s (limit " + fmt(kOracleSeconds) + " s)"};
}

// ---- 2: waterfall additivity on the shipped data ----

Verdict waterfall_additivity(const pipeline::ScenarioConfig& config, const dataset::Dataset& data,
                             const pipeline::LandModel& land) {
  const auto w = supply::waterfall(land.parcels, data.ordinances, land.solar, config.unzoned_defaults,
                                   config.solar_power_density_w_per_m2);
  double sum = 0.0, largest = -1.0;
  supply::ReductionLayer largest_layer = supply::ReductionLayer::OutrightBans;
  for (const auto& l : w.layers) {
    sum += l.reduction_mw;
    if (l.reduction_mw > largest) {
      largest = l.reduction_mw;
      largest_layer = l.layer;
    }
  }
  const double residual = std::abs(sum - (w.unregulated_mw - w.baseline_mw)) / std::max(w.unregulated_mw, 1.0);
  const auto baseline = pipeline::evaluate_scenario(data, land, config, zoning::ScenarioKind::Baseline);
  const double scenario_gap = std::abs(baseline.curve.total_mw() - w.baseline_mw) / std::max(w.baseline_mw, 1.0);

  int zoned = 0, silent = 0;
  for (const auto& r : data.ordinances) {
    zoned += r.zoned;
    silent += r.zoned && r.silent;
  }
  const double silent_share = zoned > 0 ? static_cast<double>(silent) / zoned : 0.0;
  const bool premise = silent_share >= kSilentShareThreshold;
  const bool defacto_largest = largest_layer == supply::ReductionLayer::DeFactoBans;
  const int subdivisions = static_cast<int>(data.subdivisions.size());
  const bool pass = subdivisions >= kMinSubdivisions && residual <= kAdditivityRelTol &&
                    scenario_gap <= kAdditivityRelTol && (!premise || defacto_largest);
  return {pass, std::to_string(subdivisions) + " subdivisions, unregulated " + fmt(w.unregulated_mw, 6) +
                    " MW, baseline " + fmt(w.baseline_mw, 6) + " MW, additivity residual " + fmt(residual, 2) +
                    " (tol " + fmt(kAdditivityRelTol) + "), silent share " + fmt(100 * silent_share, 3) +
                    "%, largest layer " + std::string(supply::to_string(largest_layer))};
}

// ---- 3: supply-curve dominance over seeded synthetic regions ----

bool dominates(const supply::SupplyCurve& upper, const supply::SupplyCurve& lower) {
  if (upper.total_mw() > lower.total_mw() * (1 + kCapacityRelTol)) return false;
  std::set<double> q;
  for (const auto* c : {&upper, &lower}) {
    for (const auto& p : c->points) q.insert(p.cumulative_mw);
  }
  std::vector<double> probe;
  double prev = 0.0;
  for (double x : q) {
    if (x > upper.total_mw()) break;
    probe.push_back(0.5 * (prev + x));
    probe.push_back(x);
    prev = x;
  }
  for (double x : probe) {
    if (x <= 0.0) continue;
    if (upper.lcoe_at(x) < lower.lcoe_at(x)) return false;
  }
  return true;
}

Verdict supply_dominance() {
  int ok = 0;
  std::string first_failure;
  for (int s = 1; s <= kDominanceSeeds; ++s) {
    synthetic::Spec spec;
    spec.seed = static_cast<std::uint64_t>(s);
    spec.regions = 1;
    spec.columns = 5;
    spec.rows = 4;
    const auto data = synthetic::generate(spec);
    pipeline::ScenarioConfig config;
    config.seed = spec.seed;
    const auto land = pipeline::build_land_model(data, config);
    const auto unreg = pipeline::evaluate_scenario(data, land, config, zoning::ScenarioKind::Unregulated);
    const auto base = pipeline::evaluate_scenario(data, land, config, zoning::ScenarioKind::Baseline);
    const auto prog = pipeline::evaluate_scenario(data, land, config, zoning::ScenarioKind::Progressive);
    const double u = unreg.curve.total_mw(), b = base.curve.total_mw(), p = prog.curve.total_mw();
    const bool good = dominates(base.curve, unreg.curve) && dominates(prog.curve, unreg.curve) &&
                      b <= p * (1 + kCapacityRelTol) && p <= u * (1 + kCapacityRelTol);
    if (good) {
      ++ok;
    } else if (first_failure.empty()) {
      first_failure = ", first failure seed " + std::to_string(s) + " (unreg " + fmt(u) + ", prog " + fmt(p) +
                      ", base " + fmt(b) + ")";
    }
  }
  return {ok == kDominanceSeeds, std::to_string(ok) + "/" + std::to_string(kDominanceSeeds) + " seeds" + first_failure};
}

// ---- 4: analytic LPs and the reference solver ----

struct ReferenceResult {
  bool ran = false;
  bool optimal = false;
  bool infeasible = false;
  double objective = 0.0;
};

ReferenceResult reference_solve(const fs::path& cbc, const fs::path& mps, const fs::path& solution) {
  ReferenceResult r;
  fs::remove(solution);
  const auto run = shell(quote(cbc) + " " + quote(mps) + " -solve -solu " + quote(solution));
  if (run.code != 0 && !fs::exists(solution)) return r;
  r.ran = true;
  std::ifstream in(solution);
  std::string first;
  std::getline(in, first);
  r.optimal = first.rfind("Optimal", 0) == 0;
  r.infeasible = first.find("nfeasible") != std::string::npos;
  const auto pos = first.find("objective value");
  if (pos != std::string::npos) r.objective = std::stod(first.substr(pos + 15));
  return r;
}

Verdict analytic_lps(const Options& opt, std::vector<expansion::PlanResult>& plans) {
  const fs::path dir = opt.work / "analytic";
  fs::create_directories(dir);
  bool pass = true;
  std::ostringstream detail;
  double worst = 0.0, worst_ref = 0.0;
  const bool have_cbc = !opt.cbc.empty() && fs::exists(opt.cbc);
  for (const auto& in : sztest::analytic_instances()) {
    const auto r = expansion::run_plan(in.problem);
    const auto lp = expansion::assemble_lp(in.problem);
    const auto direct = lp::solve(lp);
    bool ok;
    if (in.feasible) {
      const double e1 = std::abs(r.objective_usd - in.objective) / std::abs(in.objective);
      const double e2 = std::abs(direct.objective - in.objective) / std::abs(in.objective);
      worst = std::max({worst, e1, e2});
      ok = r.status == lp::Status::Optimal && e1 <= kAnalyticRelTol && e2 <= kAnalyticRelTol;
      plans.push_back(r);
    } else {
      ok = r.status == lp::Status::Infeasible && direct.status == lp::Status::Infeasible &&
           r.diagnostic.rfind("solar share unreachable", 0) == 0;
    }
    if (have_cbc) {
      const fs::path mps = dir / (in.name + ".mps");
      lp::write_mps_file(mps.string(), lp, in.name);
      const auto ref = reference_solve(opt.cbc, mps, dir / (in.name + ".sol"));
      if (in.feasible) {
        const double e = std::abs(ref.objective - direct.objective) / std::abs(direct.objective);
        worst_ref = std::max(worst_ref, ref.ran ? e : 1.0);
        ok = ok && ref.optimal && e <= kReferenceRelTol;
      } else {
        ok = ok && ref.infeasible;
      }
    }
    if (!ok) detail << " " << in.name << " failed;";
    pass = pass && ok;
  }
  if (!have_cbc) {
    pass = false;
    detail << " reference solver not found;";
  }
  return {pass, "5 instances, max rel err " + fmt(worst, 2) + " (tol " + fmt(kAnalyticRelTol) +
                    "), reference solver max rel diff " + fmt(worst_ref, 2) + " (tol " + fmt(kReferenceRelTol) + ")" +
                    detail.str()};
}

// ---- 5-7: scenario plans on the shipped data ----

struct ScenarioPlan {
  zoning::ScenarioKind kind;
  double target;
  expansion::PlanningProblem problem;
  expansion::PlanResult result;
};

std::vector<ScenarioPlan> plan_grid(const pipeline::ScenarioConfig& config, const dataset::Dataset& data,
                                    const pipeline::LandModel& land, const std::vector<double>& targets) {
  std::vector<ScenarioPlan> grid;
  for (auto kind : {zoning::ScenarioKind::Unregulated, zoning::ScenarioKind::Baseline,
                    zoning::ScenarioKind::Progressive}) {
    auto cfg = config;
    cfg.scenario = kind;
    const auto supply = pipeline::evaluate_scenario(data, land, cfg, kind);
    for (double t : targets) {
      cfg.solar_share_target = t;
      grid.push_back({kind, t, pipeline::make_problem(data, land, cfg, supply), {}});
    }
  }
  parallel_for(grid.size(), [&](std::size_t i) { grid[i].result = expansion::run_plan(grid[i].problem); });
  return grid;
}

const ScenarioPlan& find(const std::vector<ScenarioPlan>& grid, zoning::ScenarioKind kind, double target) {
  for (const auto& p : grid) {
    if (p.kind == kind && p.target == target) return p;
  }
  throw std::logic_error("missing plan");
}

Verdict directionality(const std::vector<ScenarioPlan>& grid, double secs) {
  const auto& u = find(grid, zoning::ScenarioKind::Unregulated, kDirectionalityTarget);
  const auto& b = find(grid, zoning::ScenarioKind::Baseline, kDirectionalityTarget);
  if (u.result.status != lp::Status::Optimal || b.result.status != lp::Status::Optimal) {
    return {false, "plans not optimal: " + u.result.diagnostic + b.result.diagnostic};
  }
  const double mw_u = u.result.built_mw("solar"), mw_b = b.result.built_mw("solar");
  const double cf_u = u.result.built_solar_mean_cf(u.problem), cf_b = b.result.built_solar_mean_cf(b.problem);
  const double cost_u = u.result.annualized_solar_fixed_cost(), cost_b = b.result.annualized_solar_fixed_cost();

  // A high-cf site is banned if zoning removes capacity from a candidate
  // whose mean cf is at least the unregulated build's mean cf.
  bool banned_high_cf = false;
  for (std::size_t i = 0; i < u.problem.solar_sites.size(); ++i) {
    const auto& su = u.problem.solar_sites[i];
    const auto& sb = b.problem.solar_sites.at(i);
    if (sb.capacity_mw < su.capacity_mw - 1e-9 && su.cf->mean_cf >= cf_u) banned_high_cf = true;
  }
  const bool strict = banned_high_cf;
  const bool pass = (strict ? mw_b > mw_u : mw_b >= mw_u) && (strict ? cf_b < cf_u : cf_b <= cf_u) &&
                    (strict ? cost_b > cost_u : cost_b >= cost_u) && secs < kDirectionalitySeconds;
  return {pass, std::string(strict ? "strict" : "weak") + ": solar MW " + fmt(mw_b, 6) + " vs " + fmt(mw_u, 6) +
                    ", mean cf " + fmt(cf_b, 5) + " vs " + fmt(cf_u, 5) + ", annualized solar cost " +
                    fmt(cost_b / 1e6, 6) + "M vs " + fmt(cost_u / 1e6, 6) + "M (baseline vs unregulated), " +
                    fmt(secs, 3) + " s (limit " + fmt(kDirectionalitySeconds) + " s)"};
}

Verdict monotonicity(const std::vector<ScenarioPlan>& grid) {
  bool pass = true;
  std::ostringstream detail;
  for (auto kind : {zoning::ScenarioKind::Unregulated, zoning::ScenarioKind::Baseline,
                    zoning::ScenarioKind::Progressive}) {
    double prev = -1.0;
    for (double t : kSweepTargets) {
      const auto& p = find(grid, kind, t);
      if (p.result.status != lp::Status::Optimal) {
        pass = false;
        detail << " " << zoning::to_string(kind) << "@" << t << " " << p.result.diagnostic << ";";
        continue;
      }
      if (p.result.objective_usd < prev * (1 - kObjectiveRelTol)) {
        pass = false;
        detail << " " << zoning::to_string(kind) << " decreases at " << t << ";";
      }
      prev = p.result.objective_usd;
    }
  }
  for (double t : kSweepTargets) {
    const double u = find(grid, zoning::ScenarioKind::Unregulated, t).result.objective_usd;
    const double p = find(grid, zoning::ScenarioKind::Progressive, t).result.objective_usd;
    const double b = find(grid, zoning::ScenarioKind::Baseline, t).result.objective_usd;
    if (u > p * (1 + kObjectiveRelTol) || p > b * (1 + kObjectiveRelTol)) {
      pass = false;
      detail << " order broken at " << t << " (" << fmt(u, 12) << ", " << fmt(p, 12) << ", " << fmt(b, 12) << ");";
    }
  }
  return {pass, std::to_string(grid.size()) + " plans over targets {0, 0.05, 0.1, 0.2}, rel tol " +
                    fmt(kObjectiveRelTol) + detail.str()};
}

Verdict conservation(const std::vector<const expansion::PlanResult*>& plans) {
  double balance = 0.0, cycle = 0.0;
  int optimal = 0;
  for (const auto* p : plans) {
    if (p->status != lp::Status::Optimal) continue;
    ++optimal;
    balance = std::max(balance, p->max_balance_residual);
    cycle = std::max(cycle, p->max_storage_cycle_residual);
  }
  return {optimal > 0 && balance <= kAuditTol && cycle <= kAuditTol,
          std::to_string(optimal) + " plans, max balance residual " + fmt(balance, 2) + ", max storage-cycle residual " +
              fmt(cycle, 2) + " (tol " + fmt(kAuditTol) + ")"};
}

// ---- 8: determinism and the comparison report ----

std::vector<fs::path> artifacts(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto ext = e.path().extension();
    if (ext == ".csv" || ext == ".json") out.push_back(e.path().filename());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string check_report(const fs::path& csv_path, int& rows_checked) {
  std::ifstream in(csv_path);
  if (!in) return "missing " + csv_path.filename().string();
  std::string line;
  std::getline(in, line);
  if (line != "metric,run_a,run_b,pct_change") return "bad header in " + csv_path.filename().string();
  while (std::getline(in, line)) {
    const auto f = csv::split_line(line);
    if (f.size() != 4) return "bad row '" + line + "'";
    const double a = std::stod(f[1]), b = std::stod(f[2]);
    if (f[3] == "NA") {
      if (a != 0.0 || b == 0.0) return "NA misused in '" + line + "'";
    } else if (a == 0.0) {
      if (b != 0.0 || std::stod(f[3]) != 0.0) return "zero base in '" + line + "'";
    } else if (std::abs(100.0 * (b - a) / a - std::stod(f[3])) > kPctTol + 1e-9) {
      return "pct mismatch in '" + line + "'";
    }
    ++rows_checked;
  }
  return {};
}

Verdict determinism(const Options& opt) {
  const fs::path dir = opt.work / "cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cli = quote(opt.cli);
  for (const char* run : {"run1", "run2"}) {
    const auto r = shell(cli + " run --config " + quote(opt.config) + " --out " + quote(dir / run));
    if (r.code != 0) return {false, std::string(run) + " exited " + std::to_string(r.code) + ": " + r.output};
  }
  const auto files = artifacts(dir / "run1");
  if (files != artifacts(dir / "run2") || files.empty()) return {false, "artifact sets differ"};
  for (const auto& f : files) {
    if (sztest::slurp(dir / "run1" / f) != sztest::slurp(dir / "run2" / f)) {
      return {false, f.string() + " differs between runs"};
    }
  }

  const auto sweep = shell(cli + " sweep --config " + quote(opt.config) + " --out " + quote(dir / "sweep") +
                           " --targets 0.05,0.1");
  if (sweep.code != 0) return {false, "sweep exited " + std::to_string(sweep.code) + ": " + sweep.output};
  int runs = 0;
  for (const auto& e : fs::directory_iterator(dir / "sweep")) runs += e.is_directory();
  if (runs != 6) return {false, "sweep produced " + std::to_string(runs) + " run directories"};

  int rows = 0, reports = 0;
  for (const auto& e : fs::directory_iterator(dir / "sweep")) {
    if (e.path().extension() != ".csv") continue;
    ++reports;
    if (auto err = check_report(e.path(), rows); !err.empty()) return {false, err};
  }
  // The stand-alone compare subcommand reproduces a sweep report.
  fs::path a, b, report;
  for (const auto& e : fs::directory_iterator(dir / "sweep")) {
    const auto name = e.path().filename().string();
    if (name.rfind("compare_unregulated_vs_baseline_", 0) == 0) {
      report = e.path();
      const std::string tag = name.substr(32, name.size() - 32 - 4);
      a = dir / "sweep" / ("unregulated_" + tag);
      b = dir / "sweep" / ("baseline_" + tag);
      break;
    }
  }
  if (report.empty()) return {false, "no unregulated-vs-baseline report"};
  const auto cmp = shell(cli + " compare " + quote(a) + " " + quote(b) + " --out " + quote(dir / "compare.csv"));
  if (cmp.code != 0) return {false, "compare exited " + std::to_string(cmp.code) + ": " + cmp.output};
  if (sztest::slurp(dir / "compare.csv") != sztest::slurp(report)) return {false, "compare output differs from sweep"};
  return {reports == 4, std::to_string(files.size()) + " artifacts byte-identical, 6 sweep runs, " +
                            std::to_string(reports) + " reports, " + std::to_string(rows) +
                            " rows with pct recomputable to " + fmt(kPctTol)};
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"Acceptance checks"};
  app.add_option("--config", opt.config, "Scenario config for the shipped data")->required();
  app.add_option("--cli", opt.cli, "Command-line binary")->required();
  app.add_option("--cbc", opt.cbc, "Reference LP solver binary");
  app.add_option("--work", opt.work, "Scratch directory")->required();
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(opt.work);

  std::vector<std::pair<std::string, Verdict>> verdicts;
  const auto record = [&](std::string name, auto&& fn) {
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (v.pass ? "PASS" : "FAIL") << "  " << name << ": " << v.detail << std::endl;
    verdicts.emplace_back(std::move(name), std::move(v));
  };

  record("1 geometry oracle", geometry_oracle);

  const auto config = pipeline::load_config(opt.config);
  const auto data = dataset::read(config.inputs);
  const auto land = pipeline::build_land_model(data, config);
  record("2 waterfall additivity", [&] { return waterfall_additivity(config, data, land); });
  record("3 supply-curve dominance", supply_dominance);

  std::vector<expansion::PlanResult> analytic_plans;
  record("4 LP correctness", [&] { return analytic_lps(opt, analytic_plans); });

  std::vector<ScenarioPlan> grid;
  double directional_secs = 0.0;
  record("5 zoning-impact directionality", [&] {
    const auto t0 = Clock::now();
    grid = plan_grid(config, data, land, {kDirectionalityTarget});
    directional_secs = seconds_since(t0);
    return directionality(grid, directional_secs);
  });
  record("6 monotonicity sweeps", [&] {
    auto rest = plan_grid(config, data, land, {0.0, 0.05, 0.20});
    for (auto& p : rest) grid.push_back(std::move(p));
    return monotonicity(grid);
  });
  record("7 conservation audit", [&] {
    std::vector<const expansion::PlanResult*> plans;
    for (const auto& p : analytic_plans) plans.push_back(&p);
    for (const auto& p : grid) plans.push_back(&p.result);
    return conservation(plans);
  });
  record("8 determinism and comparison", [&] { return determinism(opt); });

  const auto failed = std::count_if(verdicts.begin(), verdicts.end(), [](const auto& v) { return !v.second.pass; });
  std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria fail") << std::endl;
  return failed == 0 ? 0 : 1;
}

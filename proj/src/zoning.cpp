#include "solarzoning/zoning.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>

#include "solarzoning/csv.hpp"
#include "solarzoning/errors.hpp"
#include "solarzoning/random.hpp"

namespace solarzoning::zoning {
namespace {

constexpr const char* kColumns[] = {"jurisdiction_id", "zoned",          "silent",
                                    "allows_ses_in_ag", "road_setback_m", "ppl_setback_m",
                                    "nppl_setback_m",   "min_lot_size_m2", "max_lot_size_m2"};

void check_length(const std::optional<double>& v, std::string_view field, const std::string& id) {
  if (!v) return;
  if (!std::isfinite(*v)) {
    throw ValidationError("jurisdiction " + id + ": " + std::string(field) + " is not finite");
  }
  if (*v < 0.0) {
    throw ValidationError("jurisdiction " + id + ": negative " + std::string(field));
  }
}

std::optional<double> optional_number(const std::string& cell, std::string_view context) {
  if (cell.empty()) return std::nullopt;
  return csv::parse_double(cell, context);
}

std::string optional_text(const std::optional<double>& v) {
  return v ? csv::format_double(*v) : std::string{};
}

}  // namespace

bool OrdinanceRecord::has_numeric_rule() const {
  return road_setback_m || ppl_setback_m || nppl_setback_m || min_lot_size_m2 || max_lot_size_m2;
}

EffectiveRule EffectiveRule::permitted(RuleLimits limits) {
  auto finite_nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!finite_nonneg(limits.road_setback_m) || !finite_nonneg(limits.ppl_setback_m) ||
      !finite_nonneg(limits.nppl_setback_m) || !finite_nonneg(limits.min_lot_size_m2) ||
      std::isnan(limits.max_lot_size_m2) || limits.max_lot_size_m2 < 0.0) {
    throw ValidationError("rule limits must be nonnegative and finite");
  }
  if (limits.max_lot_size_m2 < limits.min_lot_size_m2) {
    throw ValidationError("maximum lot size below minimum lot size");
  }
  return EffectiveRule(Kind::Permitted, limits);
}

const RuleLimits& EffectiveRule::limits() const {
  if (kind_ == Kind::Banned) throw ContractViolation("banned rule has no limits");
  return limits_;
}

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Unregulated: return "unregulated";
    case ScenarioKind::Baseline: return "baseline";
    case ScenarioKind::Progressive: return "progressive";
  }
  return "unknown";
}

ScenarioKind parse_scenario(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "unregulated") return ScenarioKind::Unregulated;
  if (lower == "baseline") return ScenarioKind::Baseline;
  if (lower == "progressive") return ScenarioKind::Progressive;
  throw ValidationError("unknown scenario '" + std::string(text) +
                        "' (expected unregulated, baseline or progressive)");
}

RuleLimits default_unzoned_limits() {
  RuleLimits limits;
  limits.road_setback_m = 15.0;
  limits.ppl_setback_m = 15.0;
  limits.nppl_setback_m = 30.0;
  return limits;
}

void validate(const OrdinanceRecord& r) {
  if (r.jurisdiction_id.empty()) throw ValidationError("empty jurisdiction_id");
  if (r.silent && !r.zoned) {
    throw ValidationError("jurisdiction " + r.jurisdiction_id + ": silent but not zoned");
  }
  if (r.silent && r.has_numeric_rule()) {
    throw ValidationError("jurisdiction " + r.jurisdiction_id + ": silent ordinance carries a numeric rule");
  }
  check_length(r.road_setback_m, "road_setback_m", r.jurisdiction_id);
  check_length(r.ppl_setback_m, "ppl_setback_m", r.jurisdiction_id);
  check_length(r.nppl_setback_m, "nppl_setback_m", r.jurisdiction_id);
  check_length(r.min_lot_size_m2, "min_lot_size_m2", r.jurisdiction_id);
  check_length(r.max_lot_size_m2, "max_lot_size_m2", r.jurisdiction_id);
  if (r.min_lot_size_m2 && r.max_lot_size_m2 && *r.max_lot_size_m2 < *r.min_lot_size_m2) {
    throw ValidationError("jurisdiction " + r.jurisdiction_id + ": max_lot_size_m2 below min_lot_size_m2");
  }
}

std::vector<OrdinanceRecord> parse_ordinance_db(std::istream& source) {
  const csv::Table table = csv::read(source);
  std::size_t col[9];
  for (int i = 0; i < 9; ++i) col[i] = table.require(kColumns[i]);

  std::vector<OrdinanceRecord> records;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::string where = "line " + std::to_string(table.line_numbers[i]);
    OrdinanceRecord r;
    r.jurisdiction_id = row[col[0]];
    if (r.jurisdiction_id.empty()) throw ParseError(where + ": empty jurisdiction_id");
    if (!seen.insert(r.jurisdiction_id).second) {
      throw ParseError(where + ": duplicate jurisdiction '" + r.jurisdiction_id + "'");
    }
    r.zoned = csv::parse_bool(row[col[1]], where + " zoned");
    r.silent = row[col[2]].empty() ? false : csv::parse_bool(row[col[2]], where + " silent");
    r.allows_ses_in_ag =
        row[col[3]].empty() ? false : csv::parse_bool(row[col[3]], where + " allows_ses_in_ag");
    r.road_setback_m = optional_number(row[col[4]], where + " road_setback_m");
    r.ppl_setback_m = optional_number(row[col[5]], where + " ppl_setback_m");
    r.nppl_setback_m = optional_number(row[col[6]], where + " nppl_setback_m");
    r.min_lot_size_m2 = optional_number(row[col[7]], where + " min_lot_size_m2");
    r.max_lot_size_m2 = optional_number(row[col[8]], where + " max_lot_size_m2");
    validate(r);
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<OrdinanceRecord> read_ordinance_db(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open ordinance database '" + path + "'");
  try {
    return parse_ordinance_db(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void write_ordinance_db(std::ostream& out, const std::vector<OrdinanceRecord>& records) {
  for (int i = 0; i < 9; ++i) out << (i ? "," : "") << kColumns[i];
  out << '\n';
  for (const auto& r : records) {
    out << csv::escape(r.jurisdiction_id) << ',' << (r.zoned ? "true" : "false") << ','
        << (r.silent ? "true" : "false") << ',' << (r.allows_ses_in_ag ? "true" : "false") << ','
        << optional_text(r.road_setback_m) << ',' << optional_text(r.ppl_setback_m) << ','
        << optional_text(r.nppl_setback_m) << ',' << optional_text(r.min_lot_size_m2) << ','
        << optional_text(r.max_lot_size_m2) << '\n';
  }
}

RuleLimits limits_of(const OrdinanceRecord& r) {
  RuleLimits limits;
  limits.road_setback_m = r.road_setback_m.value_or(0.0);
  limits.ppl_setback_m = r.ppl_setback_m.value_or(0.0);
  limits.nppl_setback_m = r.nppl_setback_m.value_or(0.0);
  limits.min_lot_size_m2 = r.min_lot_size_m2.value_or(0.0);
  limits.max_lot_size_m2 = r.max_lot_size_m2.value_or(std::numeric_limits<double>::infinity());
  return limits;
}

EffectiveRule effective_rule(const OrdinanceRecord& record, ScenarioKind scenario,
                             const RuleLimits& unzoned_defaults,
                             const std::optional<EffectiveRule>& sampled) {
  if (scenario == ScenarioKind::Unregulated) return EffectiveRule::unrestricted();
  if (!record.zoned) return EffectiveRule::permitted(unzoned_defaults);
  if (record.silent) {
    if (scenario == ScenarioKind::Baseline) return EffectiveRule::banned();
    if (!sampled) {
      throw ContractViolation("progressive rule for silent jurisdiction " + record.jurisdiction_id +
                              " requires a sampled ordinance");
    }
    return *sampled;
  }
  if (!record.allows_ses_in_ag) return EffectiveRule::banned();
  return EffectiveRule::permitted(limits_of(record));
}

std::vector<RuleLimits> permissive_pool(const std::vector<OrdinanceRecord>& records) {
  std::vector<RuleLimits> pool;
  for (const auto& r : records) {
    if (!r.is_permissive()) continue;
    RuleLimits limits = limits_of(r);
    if (std::find(pool.begin(), pool.end(), limits) == pool.end()) pool.push_back(limits);
  }
  return pool;
}

std::map<std::string, EffectiveRule> progressive_fill(const std::vector<OrdinanceRecord>& records,
                                                      std::uint64_t seed,
                                                      const RuleLimits& unzoned_defaults) {
  const std::vector<RuleLimits> pool = permissive_pool(records);
  if (pool.empty()) throw ValidationError("no permissive ordinances to sample");

  Rng rng(splitmix64(seed));
  std::map<std::string, EffectiveRule> rules;
  for (const auto& r : records) {
    if (r.zoned && r.silent) {
      const RuleLimits& drawn = pool[uniform_index(rng, pool.size())];
      rules.emplace(r.jurisdiction_id, EffectiveRule::permitted(drawn));
    } else {
      rules.emplace(r.jurisdiction_id, effective_rule(r, ScenarioKind::Baseline, unzoned_defaults));
    }
  }
  return rules;
}

std::map<std::string, EffectiveRule> scenario_rules(const std::vector<OrdinanceRecord>& records,
                                                    ScenarioKind scenario, std::uint64_t seed,
                                                    const RuleLimits& unzoned_defaults) {
  if (scenario == ScenarioKind::Progressive) return progressive_fill(records, seed, unzoned_defaults);
  std::map<std::string, EffectiveRule> rules;
  for (const auto& r : records) rules.emplace(r.jurisdiction_id, effective_rule(r, scenario, unzoned_defaults));
  return rules;
}

}  // namespace solarzoning::zoning

#pragma once

// Jurisdiction-level solar zoning ordinances and their scenario semantics.

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace solarzoning::zoning {

/// One jurisdiction's principal-use solar zoning status and numeric rules.
///
/// `silent` is meaningful only when `zoned`; `allows_ses_in_ag` only when
/// zoned and not silent. An absent rule field means the ordinance does not
/// implement that rule.
struct OrdinanceRecord {
  std::string jurisdiction_id;
  bool zoned = false;
  bool silent = false;
  bool allows_ses_in_ag = false;
  std::optional<double> road_setback_m;
  std::optional<double> ppl_setback_m;
  std::optional<double> nppl_setback_m;
  std::optional<double> min_lot_size_m2;
  std::optional<double> max_lot_size_m2;

  bool has_numeric_rule() const;
  bool is_permissive() const { return zoned && !silent && allows_ses_in_ag; }
  bool is_outright_ban() const { return zoned && !silent && !allows_ses_in_ag; }

  friend bool operator==(const OrdinanceRecord&, const OrdinanceRecord&) = default;
};

/// Numeric limits of a permitted rule. Absent setbacks are 0 and an absent
/// maximum lot size is unbounded.
struct RuleLimits {
  double road_setback_m = 0.0;
  double ppl_setback_m = 0.0;
  double nppl_setback_m = 0.0;
  double min_lot_size_m2 = 0.0;
  double max_lot_size_m2 = std::numeric_limits<double>::infinity();

  friend bool operator==(const RuleLimits&, const RuleLimits&) = default;
};

class EffectiveRule {
 public:
  enum class Kind { Banned, Permitted };

  static EffectiveRule banned() { return EffectiveRule(Kind::Banned, {}); }
  static EffectiveRule permitted(RuleLimits limits);
  static EffectiveRule unrestricted() { return permitted({}); }

  Kind kind() const { return kind_; }
  bool is_banned() const { return kind_ == Kind::Banned; }
  // Limits of a Permitted rule; throws ContractViolation for Banned.
  const RuleLimits& limits() const;

  friend bool operator==(const EffectiveRule&, const EffectiveRule&) = default;

 private:
  EffectiveRule(Kind kind, RuleLimits limits) : kind_(kind), limits_(limits) {}

  Kind kind_;
  RuleLimits limits_;
};

enum class ScenarioKind { Unregulated, Baseline, Progressive };

std::string_view to_string(ScenarioKind kind);
// Accepts "unregulated", "baseline", "progressive" (case-insensitive).
ScenarioKind parse_scenario(std::string_view text);

// Generic agricultural-district rules applied to unzoned jurisdictions.
// Synthetic stand-in values: road 15 m, PPL 15 m, NPPL 30 m, no lot limits.
RuleLimits default_unzoned_limits();

// Throws ValidationError if the record breaks an OrdinanceRecord invariant.
void validate(const OrdinanceRecord& record);

/// Parses the CSV ordinance database. Columns (any order): jurisdiction_id,
/// zoned, silent, allows_ses_in_ag, road_setback_m, ppl_setback_m,
/// nppl_setback_m, min_lot_size_m2, max_lot_size_m2. Empty cell = absent.
std::vector<OrdinanceRecord> parse_ordinance_db(std::istream& source);
std::vector<OrdinanceRecord> read_ordinance_db(const std::string& path);

void write_ordinance_db(std::ostream& out, const std::vector<OrdinanceRecord>& records);

/// Rule in force for `record` under `scenario`. Progressive treatment of a
/// silent record requires `sampled`.
EffectiveRule effective_rule(const OrdinanceRecord& record, ScenarioKind scenario,
                             const RuleLimits& unzoned_defaults,
                             const std::optional<EffectiveRule>& sampled = std::nullopt);

/// The rule a permissive ordinance imposes, absent fields filled with defaults.
RuleLimits limits_of(const OrdinanceRecord& record);

/// Distinct permissive rules in first-appearance order (the progressive
/// sampling pool).
std::vector<RuleLimits> permissive_pool(const std::vector<OrdinanceRecord>& records);

/// Progressive-scenario rule map: each silent jurisdiction draws one rule
/// uniformly with replacement from the permissive pool; all others keep
/// their Baseline rule. Throws ValidationError if the pool is empty.
std::map<std::string, EffectiveRule> progressive_fill(
    const std::vector<OrdinanceRecord>& records, std::uint64_t seed,
    const RuleLimits& unzoned_defaults = default_unzoned_limits());

/// Rule map for any scenario (Progressive delegates to progressive_fill).
std::map<std::string, EffectiveRule> scenario_rules(const std::vector<OrdinanceRecord>& records,
                                                    ScenarioKind scenario, std::uint64_t seed,
                                                    const RuleLimits& unzoned_defaults);

}  // namespace solarzoning::zoning

#pragma once

// Solar/wind resource series, interconnection cost, and levelized cost.

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "solarzoning/geom_types.hpp"

namespace solarzoning::resource {

inline constexpr int kHoursPerYear = 8760;

struct CapacityFactorSeries {
  std::string subdivision_id;
  std::vector<double> values;  // 8760 hourly fractions in [0, 1]
  double mean_cf = 0.0;

  // Builds a series, validating range and length and computing mean_cf.
  static CapacityFactorSeries from_values(std::string subdivision_id, std::vector<double> values);
};

/// Cost inputs for one technology in one model year.
struct CostAssumptions {
  double capex_usd_per_kw = 0.0;
  double fixed_om_usd_per_kw_yr = 0.0;
  double variable_om_usd_per_mwh = 0.0;
  double fuel_usd_per_mwh = 0.0;
  double discount_rate = 0.07;
  int lifetime_yr = 30;
  double interconnect_usd_per_mw_km = 0.0;
  double interconnect_fixed_usd_per_mw = 0.0;
};

// Throws ValidationError unless all costs are nonnegative,
// 0 < discount_rate < 1 and lifetime_yr >= 1.
void validate(const CostAssumptions& costs);

struct TransmissionLine {
  std::string line_id;
  Polyline polyline;
};

/// Fixed electrical cost plus a per-km charge on the straight-line distance
/// from the site to the nearest transmission line. USD per MW.
double interconnection_cost(Point site_centroid, std::span<const TransmissionLine> lines,
                            const CostAssumptions& costs);

// Nearest straight-line distance from the site to any line, meters.
double distance_to_grid_m(Point site_centroid, std::span<const TransmissionLine> lines);

/// Capital recovery factor r(1+r)^n / ((1+r)^n - 1); 1/n as r → 0.
double crf(double discount_rate, int lifetime_yr);

/// Levelized cost of energy in USD/MWh from the mean capacity factor.
double lcoe(double mean_cf, const CostAssumptions& costs, double interconnect_usd_per_mw);

/// Annualized interconnection cost per MWh generated (supply-curve
/// ranking key for the top-site filter).
double levelized_transmission_cost(double mean_cf, const CostAssumptions& costs,
                                   double interconnect_usd_per_mw);

/// Deterministic diurnal-seasonal solar profile with seeded daily
/// clearness noise; zero at night, mean in [0.10, 0.25].
CapacityFactorSeries synthetic_cf(std::string subdivision_id, Point centroid, std::uint64_t seed);

/// Synthetic wind profile (seasonal with night-time peak, seeded noise).
CapacityFactorSeries synthetic_wind_cf(std::string subdivision_id, Point centroid, std::uint64_t seed);

// Whether hour-of-year `hour` is dark in the synthetic solar model.
bool is_night_hour(int hour_of_year);

/// Cost table keyed by (technology, model year). CSV columns: technology,
/// year, capex_usd_per_kw, fixed_om_usd_per_kw_yr, variable_om_usd_per_mwh,
/// fuel_usd_per_mwh, discount_rate, lifetime_yr, interconnect_usd_per_mw_km,
/// interconnect_fixed_usd_per_mw.
class CostTable {
 public:
  void set(const std::string& technology, int year, const CostAssumptions& costs);
  // Exact year if present, otherwise the latest earlier year; throws
  // ValidationError if the technology has no row at or before `year`.
  const CostAssumptions& get(const std::string& technology, int year) const;
  bool has(const std::string& technology) const;
  const std::map<std::string, std::map<int, CostAssumptions>>& rows() const { return rows_; }

 private:
  std::map<std::string, std::map<int, CostAssumptions>> rows_;
};

CostTable read_cost_table(const std::string& path);
void write_cost_table(const std::string& path, const CostTable& table);

/// Capacity-factor override: 8760 rows, one column per subdivision id.
std::map<std::string, CapacityFactorSeries> read_cf_override(const std::string& path);

}  // namespace solarzoning::resource

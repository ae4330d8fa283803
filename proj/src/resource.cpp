#include "solarzoning/resource.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "solarzoning/csv.hpp"
#include "solarzoning/errors.hpp"
#include "solarzoning/planar.hpp"
#include "solarzoning/random.hpp"

namespace solarzoning::resource {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double day_length_h(int day) { return 12.0 + 3.0 * std::sin(kTwoPi * (day - 80) / 365.0); }

// Smooth spatial quality field in [0, 1].
double spatial_quality(Point c, double phase) {
  const double v = 0.5 + 0.45 * std::sin(c.x / 23000.0 + phase) * std::cos(c.y / 31000.0 - 0.5 * phase);
  return std::clamp(v, 0.0, 1.0);
}

double clipped_mean(const std::vector<double>& raw, double k) {
  double s = 0.0;
  for (double v : raw) s += std::min(1.0, k * v);
  return s / static_cast<double>(raw.size());
}

// Scales `raw` by the factor that makes the clipped mean equal `target`.
std::vector<double> scale_to_mean(const std::vector<double>& raw, double target) {
  double lo = 0.0, hi = 1.0;
  while (clipped_mean(raw, hi) < target) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (clipped_mean(raw, mid) < target ? lo : hi) = mid;
  }
  std::vector<double> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = std::min(1.0, hi * raw[i]);
  return out;
}

double require_number(const csv::Table& t, const std::vector<std::string>& row, std::string_view col,
                      const std::string& where) {
  return csv::parse_double(row[t.require(col)], where + " " + std::string(col));
}

}  // namespace

CapacityFactorSeries CapacityFactorSeries::from_values(std::string subdivision_id, std::vector<double> values) {
  if (values.size() != static_cast<std::size_t>(kHoursPerYear)) {
    throw ValidationError("capacity factor series for " + subdivision_id + " has " +
                          std::to_string(values.size()) + " values, expected 8760");
  }
  double sum = 0.0;
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ValidationError("capacity factor outside [0, 1] for " + subdivision_id);
    }
    sum += v;
  }
  CapacityFactorSeries s;
  s.subdivision_id = std::move(subdivision_id);
  s.values = std::move(values);
  s.mean_cf = sum / kHoursPerYear;
  return s;
}

void validate(const CostAssumptions& c) {
  const double fields[] = {c.capex_usd_per_kw,       c.fixed_om_usd_per_kw_yr,     c.variable_om_usd_per_mwh,
                           c.fuel_usd_per_mwh,       c.interconnect_usd_per_mw_km, c.interconnect_fixed_usd_per_mw};
  for (double f : fields) {
    if (!(f >= 0.0) || !std::isfinite(f)) throw ValidationError("cost assumptions must be nonnegative and finite");
  }
  if (!(c.discount_rate > 0.0 && c.discount_rate < 1.0)) throw ValidationError("discount rate must lie in (0, 1)");
  if (c.lifetime_yr < 1) throw ValidationError("lifetime must be at least one year");
}

double distance_to_grid_m(Point site, std::span<const TransmissionLine> lines) {
  if (lines.empty()) throw ValidationError("no transmission network");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& line : lines) {
    if (line.polyline.size() < 2) throw ValidationError("transmission line " + line.line_id + " has fewer than 2 points");
    best = std::min(best, planar::distance(site, line.polyline));
  }
  return best;
}

double interconnection_cost(Point site, std::span<const TransmissionLine> lines, const CostAssumptions& costs) {
  const double km = distance_to_grid_m(site, lines) / 1000.0;
  return costs.interconnect_fixed_usd_per_mw + costs.interconnect_usd_per_mw_km * km;
}

double crf(double r, int n) {
  if (n < 1) throw ValidationError("lifetime must be at least one year");
  if (!(r >= 0.0 && r < 1.0)) throw ValidationError("discount rate must lie in [0, 1)");
  if (r < 1e-9) return 1.0 / n;
  const double g = std::pow(1.0 + r, n);
  return r * g / (g - 1.0);
}

double lcoe(double mean_cf, const CostAssumptions& costs, double interconnect_usd_per_mw) {
  if (!(mean_cf > 0.0)) throw ValidationError("zero-yield site");
  const double annual_fixed =
      crf(costs.discount_rate, costs.lifetime_yr) * (costs.capex_usd_per_kw * 1000.0 + interconnect_usd_per_mw) +
      costs.fixed_om_usd_per_kw_yr * 1000.0;
  return annual_fixed / (mean_cf * kHoursPerYear) + costs.variable_om_usd_per_mwh;
}

double levelized_transmission_cost(double mean_cf, const CostAssumptions& costs, double interconnect_usd_per_mw) {
  if (!(mean_cf > 0.0)) throw ValidationError("zero-yield site");
  return interconnect_usd_per_mw * crf(costs.discount_rate, costs.lifetime_yr) / (mean_cf * kHoursPerYear);
}

bool is_night_hour(int hour_of_year) {
  const int day = hour_of_year / 24;
  const double mid = (hour_of_year % 24) + 0.5;
  const double len = day_length_h(day);
  return mid <= 12.0 - len / 2 || mid >= 12.0 + len / 2;
}

CapacityFactorSeries synthetic_cf(std::string subdivision_id, Point centroid, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "solar:" + subdivision_id));
  const double jitter = unit_uniform(rng);
  const double quality = std::clamp(0.8 * spatial_quality(centroid, 0.7) + 0.2 * jitter, 0.0, 1.0);
  const double target_mean = 0.13 + 0.07 * quality;

  std::vector<double> raw(kHoursPerYear, 0.0);
  double clearness = 0.7;
  for (int day = 0; day < 365; ++day) {
    clearness = 0.55 * clearness + 0.45 * (0.3 + 0.7 * unit_uniform(rng));
    const double len = day_length_h(day);
    const double sunrise = 12.0 - len / 2;
    const double elevation = 0.75 + 0.25 * std::sin(kTwoPi * (day - 80) / 365.0);
    for (int h = 0; h < 24; ++h) {
      const int hour = day * 24 + h;
      if (is_night_hour(hour)) continue;
      const double phase = std::numbers::pi * ((h + 0.5) - sunrise) / len;
      raw[hour] = std::pow(std::sin(phase), 1.3) * elevation * clearness;
    }
  }
  return CapacityFactorSeries::from_values(std::move(subdivision_id), scale_to_mean(raw, target_mean));
}

CapacityFactorSeries synthetic_wind_cf(std::string subdivision_id, Point centroid, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "wind:" + subdivision_id));
  const double jitter = unit_uniform(rng);
  const double quality = std::clamp(0.8 * spatial_quality(centroid, 2.1) + 0.2 * jitter, 0.0, 1.0);
  const double target_mean = 0.28 + 0.10 * quality;

  std::vector<double> raw(kHoursPerYear, 0.0);
  double weather = 1.0;
  for (int hour = 0; hour < kHoursPerYear; ++hour) {
    const int day = hour / 24;
    const int h = hour % 24;
    weather = 0.9 * weather + 0.1 * (2.0 * unit_uniform(rng));
    const double seasonal = 1.0 + 0.25 * std::cos(kTwoPi * (day - 15) / 365.0);
    const double diurnal = 1.0 + 0.2 * std::cos(kTwoPi * (h - 2) / 24.0);
    raw[hour] = std::max(0.0, seasonal * diurnal * weather);
  }
  return CapacityFactorSeries::from_values(std::move(subdivision_id), scale_to_mean(raw, target_mean));
}

void CostTable::set(const std::string& technology, int year, const CostAssumptions& costs) {
  validate(costs);
  rows_[technology][year] = costs;
}

const CostAssumptions& CostTable::get(const std::string& technology, int year) const {
  auto it = rows_.find(technology);
  if (it == rows_.end()) throw ValidationError("no cost assumptions for technology '" + technology + "'");
  auto yr = it->second.upper_bound(year);
  if (yr == it->second.begin()) {
    throw ValidationError("no cost assumptions for '" + technology + "' at or before " + std::to_string(year));
  }
  return std::prev(yr)->second;
}

bool CostTable::has(const std::string& technology) const { return rows_.count(technology) > 0; }

CostTable read_cost_table(const std::string& path) {
  const csv::Table t = csv::read_file(path);
  CostTable table;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const std::string where = path + " line " + std::to_string(t.line_numbers[i]);
    CostAssumptions c;
    c.capex_usd_per_kw = require_number(t, row, "capex_usd_per_kw", where);
    c.fixed_om_usd_per_kw_yr = require_number(t, row, "fixed_om_usd_per_kw_yr", where);
    c.variable_om_usd_per_mwh = require_number(t, row, "variable_om_usd_per_mwh", where);
    if (auto col = t.find("fuel_usd_per_mwh"); col && !row[*col].empty()) {
      c.fuel_usd_per_mwh = csv::parse_double(row[*col], where + " fuel_usd_per_mwh");
    }
    c.discount_rate = require_number(t, row, "discount_rate", where);
    c.lifetime_yr = static_cast<int>(csv::parse_int(row[t.require("lifetime_yr")], where + " lifetime_yr"));
    c.interconnect_usd_per_mw_km = require_number(t, row, "interconnect_usd_per_mw_km", where);
    c.interconnect_fixed_usd_per_mw = require_number(t, row, "interconnect_fixed_usd_per_mw", where);
    const std::string tech = row[t.require("technology")];
    const int year = static_cast<int>(csv::parse_int(row[t.require("year")], where + " year"));
    try {
      table.set(tech, year, c);
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  return table;
}

void write_cost_table(const std::string& path, const CostTable& table) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << "technology,year,capex_usd_per_kw,fixed_om_usd_per_kw_yr,variable_om_usd_per_mwh,fuel_usd_per_mwh,"
         "discount_rate,lifetime_yr,interconnect_usd_per_mw_km,interconnect_fixed_usd_per_mw\n";
  for (const auto& [tech, years] : table.rows()) {
    for (const auto& [year, c] : years) {
      out << tech << ',' << year << ',' << csv::format_double(c.capex_usd_per_kw) << ','
          << csv::format_double(c.fixed_om_usd_per_kw_yr) << ',' << csv::format_double(c.variable_om_usd_per_mwh)
          << ',' << csv::format_double(c.fuel_usd_per_mwh) << ',' << csv::format_double(c.discount_rate) << ','
          << c.lifetime_yr << ',' << csv::format_double(c.interconnect_usd_per_mw_km) << ','
          << csv::format_double(c.interconnect_fixed_usd_per_mw) << '\n';
    }
  }
}

std::map<std::string, CapacityFactorSeries> read_cf_override(const std::string& path) {
  const csv::Table t = csv::read_file(path);
  if (t.rows.size() != static_cast<std::size_t>(kHoursPerYear)) {
    throw ValidationError(path + ": expected 8760 hourly rows, found " + std::to_string(t.rows.size()));
  }
  std::map<std::string, CapacityFactorSeries> out;
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    if (t.header[c] == "hour") continue;
    std::vector<double> values(kHoursPerYear);
    for (int h = 0; h < kHoursPerYear; ++h) {
      values[h] = csv::parse_double(t.rows[h][c], path + " column " + t.header[c]);
    }
    out.emplace(t.header[c], CapacityFactorSeries::from_values(t.header[c], std::move(values)));
  }
  return out;
}

}  // namespace solarzoning::resource

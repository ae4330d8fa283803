#include "solarzoning/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "solarzoning/csv.hpp"
#include "solarzoning/errors.hpp"

// LP naming scheme (years are model years, d<day> the calendar day of a
// representative day, h<hh> the hour):
//   build_<solar|wind>_<site>_<year>, build_<tech>_<region>_<year>,
//   build_battery_<region>_<year>, build_battery_energy_<region>_<year>,
//   txbuild_<a>_<b>_<year>, gen_<tech>_<region>_<year>_d<day>_h<hh>,
//   flow_<a>_<b>_..., charge_/discharge_/soc_<region>_...;
//   rows balance_, cap_, sitelimit_, flowfwd_/flowrev_, socstep_, socmax_,
//   chargemax_/dischargemax_, reserve_<year>, solar_share_<year>.

namespace solarzoning::expansion {
namespace {

using Json = nlohmann::ordered_json;

constexpr int kDaysPerYear = 365;
constexpr double kMwPerKw = 1000.0;

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) c = '_';
  }
  return s;
}

std::string hour_suffix(int year, int day, int h) {
  std::ostringstream s;
  s << year << "_d" << day << "_h" << (h < 10 ? "0" : "") << h;
  return s.str();
}

double clean(double v) { return std::abs(v) < 1e-9 ? 0.0 : v; }

int season_of(int day) {
  if (day < 59 || day >= 334) return 0;  // DJF
  if (day < 151) return 1;               // MAM
  if (day < 243) return 2;               // JJA
  return 3;                              // SON
}

double system_demand(const PlanningProblem& pb, int year, int hour) {
  double s = 0.0;
  for (const auto& r : pb.regions) s += r.demand_8760.at(year)[hour];
  return s;
}

// Capacity already in place before the first modeled period of a solve:
// the existing fleet plus builds carried over from earlier myopic solves.
struct Carried {
  std::vector<double> solar, wind;           // [site]
  std::vector<std::vector<double>> disp;     // [region][tech]
  std::vector<double> battery, battery_e;    // [region]
  std::vector<double> tx;                    // [corridor]
  double annuity = 0.0;                      // yearly capital charge of builds from earlier solves
};

Carried existing_fleet(const PlanningProblem& pb) {
  Carried c;
  c.solar.assign(pb.solar_sites.size(), 0.0);
  c.wind.assign(pb.wind_sites.size(), 0.0);
  c.disp.assign(pb.regions.size(), std::vector<double>(pb.dispatchable_techs.size(), 0.0));
  c.battery.assign(pb.regions.size(), 0.0);
  c.battery_e.assign(pb.regions.size(), 0.0);
  for (std::size_t r = 0; r < pb.regions.size(); ++r) {
    auto it = pb.existing.find(pb.regions[r].region_id);
    if (it == pb.existing.end()) continue;
    for (std::size_t t = 0; t < pb.dispatchable_techs.size(); ++t) {
      if (auto f = it->second.find(pb.dispatchable_techs[t]); f != it->second.end()) c.disp[r][t] = f->second;
    }
    if (auto f = it->second.find("battery"); f != it->second.end()) c.battery[r] = f->second;
    if (auto f = it->second.find("battery_energy"); f != it->second.end()) c.battery_e[r] = f->second;
  }
  for (const auto& cor : pb.corridors) c.tx.push_back(cor.existing_capacity_mw);
  return c;
}

// Variable layout of one LP over a contiguous run of periods.
class Model {
 public:
  Model(const PlanningProblem& pb, std::vector<RepDay> days, std::vector<std::size_t> period_indices, Carried carried)
      : pb_(pb), days_(std::move(days)), ks_(std::move(period_indices)), carried_(std::move(carried)) {
    for (std::size_t r = 0; r < pb_.regions.size(); ++r) region_index_[pb_.regions[r].region_id] = r;
    build();
  }

  const lp::LinearProgram& lp() const { return lp_; }

  void extract(const std::vector<double>& x, PlanResult& out, Carried& next) const;

 private:
  std::size_t nk() const { return ks_.size(); }
  std::size_t nd() const { return days_.size(); }
  std::size_t hidx(std::size_t lk, std::size_t d, int h) const { return (lk * nd() + d) * kHoursPerDay + h; }
  std::size_t nh() const { return nk() * nd() * kHoursPerDay; }
  int year(std::size_t lk) const { return pb_.periods[ks_[lk]]; }
  int hour_of_year(std::size_t d, int h) const { return days_[d].day_index * kHoursPerDay + h; }
  const resource::CostAssumptions& cost(const std::string& tech, std::size_t lk) const {
    return pb_.costs.get(tech, year(lk));
  }
  double crf_of(const std::string& tech, std::size_t lk) const {
    const auto& c = cost(tech, lk);
    return resource::crf(c.discount_rate, c.lifetime_yr);
  }
  // Yearly capital charge of one unit built in period lk, paid in every
  // later period of the horizon.
  double annuity(const std::string& tech, std::size_t lk, double extra_usd_per_mw = 0.0) const {
    if (tech == "battery_energy") return crf_of("battery", lk) * pb_.storage.energy_capex_usd_per_kwh * kMwPerKw;
    return crf_of(tech, lk) * (cost(tech, lk).capex_usd_per_kw * kMwPerKw + extra_usd_per_mw);
  }
  double tx_annuity(std::size_t c) const {
    return resource::crf(pb_.transmission_discount_rate, pb_.transmission_lifetime_yr) * pb_.corridors[c].cost_usd_per_mw;
  }
  double periods_from(std::size_t lk) const { return static_cast<double>(nk() - lk); }
  // Fixed O&M from period lk through the end of this model, USD per MW.
  double fom_tail(const std::string& tech, std::size_t lk) const {
    double s = 0.0;
    for (std::size_t k = lk; k < nk(); ++k) s += cost(tech, k).fixed_om_usd_per_kw_yr * kMwPerKw;
    return s;
  }

  void build();
  void add_site_builds(const std::vector<supply::SupplySite>& sites, const std::string& tech,
                       const std::vector<double>& carried, std::vector<std::vector<int>>& vars);
  // Σ_{k' ≤ lk} builds, as LP terms scaled by `scale`.
  static void cumulative(const std::vector<int>& per_period, std::size_t lk, double scale, std::vector<lp::Term>& terms) {
    for (std::size_t k = 0; k <= lk; ++k) {
      if (per_period[k] >= 0) terms.push_back({per_period[k], scale});
    }
  }

  const PlanningProblem& pb_;
  std::vector<RepDay> days_;
  std::vector<std::size_t> ks_;
  Carried carried_;
  std::map<std::string, std::size_t> region_index_;
  lp::LinearProgram lp_;

  std::vector<std::vector<int>> build_solar_, build_wind_;   // [site][lk]
  std::vector<std::vector<std::vector<int>>> build_disp_;    // [region][tech][lk]
  std::vector<std::vector<int>> build_bat_, build_bat_e_;    // [region][lk]
  std::vector<std::vector<int>> txbuild_;                    // [corridor][lk], -1 if fixed
  std::vector<std::vector<std::vector<int>>> gen_disp_;      // [region][tech][hidx]
  std::vector<std::vector<int>> gen_solar_, gen_wind_;       // [region][hidx], -1 if absent
  std::vector<std::vector<int>> charge_, discharge_, soc_;   // [region][hidx]
  std::vector<std::vector<int>> flow_;                       // [corridor][hidx]
};

void Model::add_site_builds(const std::vector<supply::SupplySite>& sites, const std::string& tech,
                            const std::vector<double>& carried, std::vector<std::vector<int>>& vars) {
  vars.assign(sites.size(), std::vector<int>(nk(), -1));
  for (std::size_t s = 0; s < sites.size(); ++s) {
    std::vector<lp::Term> limit;
    for (std::size_t lk = 0; lk < nk(); ++lk) {
      const double capex =
          periods_from(lk) * annuity(tech, lk, tech == "solar" ? sites[s].interconnect_usd_per_mw : 0.0);
      vars[s][lk] = lp_.add_variable("build_" + tech + "_" + sanitize(sites[s].subdivision_id) + "_" +
                                         std::to_string(year(lk)),
                                     0.0, lp::kInf, capex + fom_tail(tech, lk));
      limit.push_back({vars[s][lk], 1.0});
    }
    lp_.add_le("sitelimit_" + tech + "_" + sanitize(sites[s].subdivision_id), std::move(limit),
               std::max(0.0, sites[s].capacity_mw - carried[s]));
    for (std::size_t lk = 0; lk < nk(); ++lk) {
      lp_.objective_offset += carried[s] * cost(tech, lk).fixed_om_usd_per_kw_yr * kMwPerKw;
    }
  }
}

void Model::build() {
  const std::size_t R = pb_.regions.size();
  const std::size_t T = pb_.dispatchable_techs.size();
  const std::size_t C = pb_.corridors.size();
  const double eta = std::sqrt(pb_.storage.round_trip_efficiency);

  // Investment variables.
  add_site_builds(pb_.solar_sites, "solar", carried_.solar, build_solar_);
  add_site_builds(pb_.wind_sites, "wind", carried_.wind, build_wind_);
  build_disp_.assign(R, std::vector<std::vector<int>>(T, std::vector<int>(nk(), -1)));
  build_bat_.assign(R, std::vector<int>(nk(), -1));
  build_bat_e_.assign(R, std::vector<int>(nk(), -1));
  for (std::size_t r = 0; r < R; ++r) {
    const std::string rid = sanitize(pb_.regions[r].region_id);
    for (std::size_t t = 0; t < T; ++t) {
      const std::string& tech = pb_.dispatchable_techs[t];
      for (std::size_t lk = 0; lk < nk(); ++lk) {
        build_disp_[r][t][lk] =
            lp_.add_variable("build_" + sanitize(tech) + "_" + rid + "_" + std::to_string(year(lk)), 0.0, lp::kInf,
                             periods_from(lk) * annuity(tech, lk) + fom_tail(tech, lk));
        lp_.objective_offset += carried_.disp[r][t] * cost(tech, lk).fixed_om_usd_per_kw_yr * kMwPerKw;
      }
    }
    if (!pb_.storage_enabled) continue;
    for (std::size_t lk = 0; lk < nk(); ++lk) {
      build_bat_[r][lk] =
          lp_.add_variable("build_battery_" + rid + "_" + std::to_string(year(lk)), 0.0, lp::kInf,
                           periods_from(lk) * annuity("battery", lk) + fom_tail("battery", lk));
      build_bat_e_[r][lk] =
          lp_.add_variable("build_battery_energy_" + rid + "_" + std::to_string(year(lk)), 0.0, lp::kInf,
                           periods_from(lk) * annuity("battery_energy", lk));
      lp_.objective_offset += carried_.battery[r] * cost("battery", lk).fixed_om_usd_per_kw_yr * kMwPerKw;
    }
  }
  lp_.objective_offset += carried_.annuity * static_cast<double>(nk());
  txbuild_.assign(C, std::vector<int>(nk(), -1));
  for (std::size_t c = 0; c < C; ++c) {
    if (!pb_.corridors[c].expandable) continue;
    for (std::size_t lk = 0; lk < nk(); ++lk) {
      txbuild_[c][lk] = lp_.add_variable("txbuild_" + sanitize(pb_.corridors[c].region_a) + "_" +
                                             sanitize(pb_.corridors[c].region_b) + "_" + std::to_string(year(lk)),
                                         0.0, lp::kInf, periods_from(lk) * tx_annuity(c));
    }
  }

  // Sites by region.
  std::vector<std::vector<std::size_t>> solar_in(R), wind_in(R);
  for (std::size_t s = 0; s < pb_.solar_sites.size(); ++s) solar_in[region_index_.at(pb_.solar_sites[s].region_id)].push_back(s);
  for (std::size_t s = 0; s < pb_.wind_sites.size(); ++s) wind_in[region_index_.at(pb_.wind_sites[s].region_id)].push_back(s);

  // Operating variables.
  gen_disp_.assign(R, std::vector<std::vector<int>>(T, std::vector<int>(nh(), -1)));
  gen_solar_.assign(R, std::vector<int>(nh(), -1));
  gen_wind_.assign(R, std::vector<int>(nh(), -1));
  charge_.assign(R, std::vector<int>(nh(), -1));
  discharge_.assign(R, std::vector<int>(nh(), -1));
  soc_.assign(R, std::vector<int>(nh(), -1));
  flow_.assign(C, std::vector<int>(nh(), -1));
  for (std::size_t lk = 0; lk < nk(); ++lk) {
    for (std::size_t d = 0; d < nd(); ++d) {
      const double w = days_[d].weight_days;
      for (int h = 0; h < kHoursPerDay; ++h) {
        const std::size_t i = hidx(lk, d, h);
        const std::string suffix = hour_suffix(year(lk), days_[d].day_index, h);
        for (std::size_t r = 0; r < R; ++r) {
          const std::string rid = sanitize(pb_.regions[r].region_id);
          for (std::size_t t = 0; t < T; ++t) {
            const std::string& tech = pb_.dispatchable_techs[t];
            const auto& ct = cost(tech, lk);
            gen_disp_[r][t][i] = lp_.add_variable("gen_" + sanitize(tech) + "_" + rid + "_" + suffix, 0.0, lp::kInf,
                                                  w * (ct.fuel_usd_per_mwh + ct.variable_om_usd_per_mwh));
          }
          if (!solar_in[r].empty()) {
            gen_solar_[r][i] = lp_.add_variable("gen_solar_" + rid + "_" + suffix, 0.0, lp::kInf,
                                                w * cost("solar", lk).variable_om_usd_per_mwh);
          }
          if (!wind_in[r].empty()) {
            gen_wind_[r][i] = lp_.add_variable("gen_wind_" + rid + "_" + suffix, 0.0, lp::kInf,
                                               w * cost("wind", lk).variable_om_usd_per_mwh);
          }
          if (pb_.storage_enabled) {
            charge_[r][i] = lp_.add_variable("charge_" + rid + "_" + suffix, 0.0, lp::kInf, 0.0);
            discharge_[r][i] = lp_.add_variable("discharge_" + rid + "_" + suffix, 0.0, lp::kInf,
                                                w * cost("battery", lk).variable_om_usd_per_mwh);
            soc_[r][i] = lp_.add_variable("soc_" + rid + "_" + suffix, 0.0, lp::kInf, 0.0);
          }
        }
        for (std::size_t c = 0; c < C; ++c) {
          const auto& cor = pb_.corridors[c];
          const double lo = cor.expandable ? -lp::kInf : -carried_.tx[c];
          const double hi = cor.expandable ? lp::kInf : carried_.tx[c];
          flow_[c][i] = lp_.add_variable("flow_" + sanitize(cor.region_a) + "_" + sanitize(cor.region_b) + "_" + suffix,
                                         lo, hi, 0.0);
        }
      }
    }
  }

  // Hourly constraints.
  for (std::size_t lk = 0; lk < nk(); ++lk) {
    for (std::size_t d = 0; d < nd(); ++d) {
      for (int h = 0; h < kHoursPerDay; ++h) {
        const std::size_t i = hidx(lk, d, h);
        const int hy = hour_of_year(d, h);
        const std::string suffix = hour_suffix(year(lk), days_[d].day_index, h);
        for (std::size_t r = 0; r < R; ++r) {
          const std::string rid = sanitize(pb_.regions[r].region_id);
          std::vector<lp::Term> balance;
          for (std::size_t t = 0; t < T; ++t) {
            balance.push_back({gen_disp_[r][t][i], 1.0});
            std::vector<lp::Term> cap{{gen_disp_[r][t][i], 1.0}};
            cumulative(build_disp_[r][t], lk, -1.0, cap);
            lp_.add_le("cap_" + sanitize(pb_.dispatchable_techs[t]) + "_" + rid + "_" + suffix, std::move(cap),
                       carried_.disp[r][t]);
          }
          const auto renewable_cap = [&](const std::string& tech, int gen_var, const std::vector<std::size_t>& in,
                                         const std::vector<supply::SupplySite>& sites,
                                         const std::vector<std::vector<int>>& builds, const std::vector<double>& carried) {
            if (gen_var < 0) return;
            balance.push_back({gen_var, 1.0});
            std::vector<lp::Term> cap{{gen_var, 1.0}};
            double rhs = 0.0;
            for (std::size_t s : in) {
              const double cf = sites[s].cf->values[hy];
              cumulative(builds[s], lk, -cf, cap);
              rhs += cf * carried[s];
            }
            lp_.add_le("cap_" + tech + "_" + rid + "_" + suffix, std::move(cap), rhs);
          };
          renewable_cap("solar", gen_solar_[r][i], solar_in[r], pb_.solar_sites, build_solar_, carried_.solar);
          renewable_cap("wind", gen_wind_[r][i], wind_in[r], pb_.wind_sites, build_wind_, carried_.wind);

          if (pb_.storage_enabled) {
            balance.push_back({discharge_[r][i], 1.0});
            balance.push_back({charge_[r][i], -1.0});
            const std::size_t next = hidx(lk, d, (h + 1) % kHoursPerDay);
            lp_.add_eq("socstep_" + rid + "_" + suffix,
                       {{soc_[r][next], 1.0}, {soc_[r][i], -1.0}, {charge_[r][i], -eta}, {discharge_[r][i], 1.0 / eta}},
                       0.0);
            std::vector<lp::Term> socmax{{soc_[r][i], 1.0}};
            cumulative(build_bat_e_[r], lk, -1.0, socmax);
            lp_.add_le("socmax_" + rid + "_" + suffix, std::move(socmax), carried_.battery_e[r]);
            std::vector<lp::Term> chmax{{charge_[r][i], 1.0}};
            cumulative(build_bat_[r], lk, -1.0, chmax);
            lp_.add_le("chargemax_" + rid + "_" + suffix, std::move(chmax), carried_.battery[r]);
            std::vector<lp::Term> dismax{{discharge_[r][i], 1.0}};
            cumulative(build_bat_[r], lk, -1.0, dismax);
            lp_.add_le("dischargemax_" + rid + "_" + suffix, std::move(dismax), carried_.battery[r]);
          }
          for (std::size_t c = 0; c < C; ++c) {
            if (pb_.corridors[c].region_a == pb_.regions[r].region_id) balance.push_back({flow_[c][i], -1.0});
            if (pb_.corridors[c].region_b == pb_.regions[r].region_id) balance.push_back({flow_[c][i], 1.0});
          }
          lp_.add_eq("balance_" + rid + "_" + suffix, std::move(balance),
                     pb_.regions[r].demand_8760.at(year(lk))[hy]);
        }
        for (std::size_t c = 0; c < C; ++c) {
          if (!pb_.corridors[c].expandable) continue;
          const std::string cid = sanitize(pb_.corridors[c].region_a) + "_" + sanitize(pb_.corridors[c].region_b);
          std::vector<lp::Term> fwd{{flow_[c][i], 1.0}}, rev{{flow_[c][i], -1.0}};
          cumulative(txbuild_[c], lk, -1.0, fwd);
          cumulative(txbuild_[c], lk, -1.0, rev);
          lp_.add_le("flowfwd_" + cid + "_" + suffix, std::move(fwd), carried_.tx[c]);
          lp_.add_le("flowrev_" + cid + "_" + suffix, std::move(rev), carried_.tx[c]);
        }
      }
    }
  }

  // Planning reserve at the system peak rep-day hour of each period.
  for (std::size_t lk = 0; lk < nk(); ++lk) {
    std::size_t peak_d = 0;
    int peak_h = 0;
    double peak = -1.0;
    for (std::size_t d = 0; d < nd(); ++d) {
      for (int h = 0; h < kHoursPerDay; ++h) {
        const double v = system_demand(pb_, year(lk), hour_of_year(d, h));
        if (v > peak) {
          peak = v;
          peak_d = d;
          peak_h = h;
        }
      }
    }
    const int hy = hour_of_year(peak_d, peak_h);
    std::vector<lp::Term> firm;
    double firm_existing = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
      for (std::size_t t = 0; t < T; ++t) {
        cumulative(build_disp_[r][t], lk, 1.0, firm);
        firm_existing += carried_.disp[r][t];
      }
      if (pb_.storage_enabled) {
        cumulative(build_bat_[r], lk, 1.0, firm);
        firm_existing += carried_.battery[r];
      }
    }
    for (std::size_t s = 0; s < pb_.solar_sites.size(); ++s) {
      const double cf = pb_.solar_sites[s].cf->values[hy];
      cumulative(build_solar_[s], lk, cf, firm);
      firm_existing += cf * carried_.solar[s];
    }
    for (std::size_t s = 0; s < pb_.wind_sites.size(); ++s) {
      const double cf = pb_.wind_sites[s].cf->values[hy];
      cumulative(build_wind_[s], lk, cf, firm);
      firm_existing += cf * carried_.wind[s];
    }
    const double required = (1.0 + pb_.reserve_margin) * peak - firm_existing;
    if (!firm.empty()) {
      lp_.add_ge("reserve_" + std::to_string(year(lk)), std::move(firm), required);
    } else if (required > 1e-9) {
      // Nothing can be built: keep the infeasibility visible to the solver.
      const int slack = lp_.add_variable("reserve_shortfall_" + std::to_string(year(lk)), 0.0, 0.0, 0.0);
      lp_.add_ge("reserve_" + std::to_string(year(lk)), {{slack, 1.0}}, required);
    }
  }

  // Solar share in the final period.
  const std::size_t last = pb_.periods.size() - 1;
  if (pb_.solar_share_target > 0.0 && ks_.back() == last) {
    const std::size_t lk = nk() - 1;
    std::vector<lp::Term> share;
    double demand = 0.0;
    for (std::size_t d = 0; d < nd(); ++d) {
      for (int h = 0; h < kHoursPerDay; ++h) {
        demand += days_[d].weight_days * system_demand(pb_, year(lk), hour_of_year(d, h));
        for (std::size_t r = 0; r < R; ++r) {
          if (gen_solar_[r][hidx(lk, d, h)] >= 0) share.push_back({gen_solar_[r][hidx(lk, d, h)], days_[d].weight_days});
        }
      }
    }
    const double required = pb_.solar_share_target * demand;
    if (share.empty()) {
      const int none = lp_.add_variable("solar_generation_unavailable", 0.0, 0.0, 0.0);
      share.push_back({none, 1.0});
    }
    lp_.add_ge("solar_share_" + std::to_string(year(lk)), std::move(share), required);
  }
}

void Model::extract(const std::vector<double>& x, PlanResult& out, Carried& next) const {
  const std::size_t R = pb_.regions.size();
  const std::size_t T = pb_.dispatchable_techs.size();
  const auto val = [&](int var) { return var < 0 ? 0.0 : x[var]; };

  next = carried_;
  for (std::size_t lk = 0; lk < nk(); ++lk) {
    const int y = year(lk);
    for (std::size_t s = 0; s < pb_.solar_sites.size(); ++s) {
      const double b = val(build_solar_[s][lk]);
      next.solar[s] += b;
      next.annuity += b * annuity("solar", lk, pb_.solar_sites[s].interconnect_usd_per_mw);
      out.builds.push_back({y, pb_.solar_sites[s].region_id, "solar", pb_.solar_sites[s].subdivision_id, b, 0.0});
    }
    for (std::size_t s = 0; s < pb_.wind_sites.size(); ++s) {
      const double b = val(build_wind_[s][lk]);
      next.wind[s] += b;
      next.annuity += b * annuity("wind", lk);
      out.builds.push_back({y, pb_.wind_sites[s].region_id, "wind", pb_.wind_sites[s].subdivision_id, b, 0.0});
    }
    for (std::size_t r = 0; r < R; ++r) {
      for (std::size_t t = 0; t < T; ++t) {
        const double b = val(build_disp_[r][t][lk]);
        next.disp[r][t] += b;
        next.annuity += b * annuity(pb_.dispatchable_techs[t], lk);
        out.builds.push_back({y, pb_.regions[r].region_id, pb_.dispatchable_techs[t], "", b, 0.0});
      }
      if (pb_.storage_enabled) {
        const double bp = val(build_bat_[r][lk]), be = val(build_bat_e_[r][lk]);
        next.battery[r] += bp;
        next.battery_e[r] += be;
        next.annuity += bp * annuity("battery", lk) + be * annuity("battery_energy", lk);
        out.builds.push_back({y, pb_.regions[r].region_id, "battery", "", bp, 0.0});
        out.builds.push_back({y, pb_.regions[r].region_id, "battery_energy", "", be, 0.0});
      }
    }
    for (std::size_t c = 0; c < pb_.corridors.size(); ++c) {
      const double b = val(txbuild_[c][lk]);
      next.tx[c] += b;
      if (b != 0.0) next.annuity += b * tx_annuity(c);
      if (pb_.corridors[c].expandable) {
        out.transmission.push_back({y, pb_.corridors[c].region_a, pb_.corridors[c].region_b, b, 0.0});
      }
    }

    PeriodResult pr;
    pr.period = y;
    for (std::size_t d = 0; d < nd(); ++d) {
      DayDispatch dd;
      dd.day = days_[d];
      dd.flows.assign(pb_.corridors.size(), std::vector<double>(kHoursPerDay, 0.0));
      for (std::size_t r = 0; r < R; ++r) {
        HourlyDispatch hd;
        for (std::size_t t = 0; t < T; ++t) hd.generation[pb_.dispatchable_techs[t]].assign(kHoursPerDay, 0.0);
        if (gen_solar_[r][hidx(lk, d, 0)] >= 0) hd.generation["solar"].assign(kHoursPerDay, 0.0);
        if (gen_wind_[r][hidx(lk, d, 0)] >= 0) hd.generation["wind"].assign(kHoursPerDay, 0.0);
        hd.charge.assign(kHoursPerDay, 0.0);
        hd.discharge.assign(kHoursPerDay, 0.0);
        hd.soc.assign(kHoursPerDay, 0.0);
        hd.demand.assign(kHoursPerDay, 0.0);
        for (int h = 0; h < kHoursPerDay; ++h) {
          const std::size_t i = hidx(lk, d, h);
          for (std::size_t t = 0; t < T; ++t) hd.generation[pb_.dispatchable_techs[t]][h] = val(gen_disp_[r][t][i]);
          if (gen_solar_[r][i] >= 0) hd.generation["solar"][h] = val(gen_solar_[r][i]);
          if (gen_wind_[r][i] >= 0) hd.generation["wind"][h] = val(gen_wind_[r][i]);
          hd.charge[h] = val(charge_[r][i]);
          hd.discharge[h] = val(discharge_[r][i]);
          hd.soc[h] = val(soc_[r][i]);
          hd.demand[h] = pb_.regions[r].demand_8760.at(y)[hour_of_year(d, h)];
        }
        dd.regions.emplace(pb_.regions[r].region_id, std::move(hd));
      }
      for (std::size_t c = 0; c < pb_.corridors.size(); ++c) {
        for (int h = 0; h < kHoursPerDay; ++h) dd.flows[c][h] = val(flow_[c][hidx(lk, d, h)]);
      }
      pr.dispatch.push_back(std::move(dd));
    }
    out.periods.push_back(std::move(pr));
  }
}

std::vector<RepDay> rep_days_for(const PlanningProblem& pb) {
  if (!pb.rep_days.empty()) return pb.rep_days;
  const int final_year = pb.periods.back();
  std::vector<double> demand(resource::kHoursPerYear, 0.0);
  for (int h = 0; h < resource::kHoursPerYear; ++h) demand[h] = system_demand(pb, final_year, h);
  std::vector<const resource::CapacityFactorSeries*> series;
  for (const auto& s : pb.solar_sites) series.push_back(s.cf.get());
  for (const auto& s : pb.wind_sites) series.push_back(s.cf.get());
  return select_rep_days(demand, series, pb.days_per_season);
}

// Period costs, per-build annualized costs, shares and audits, all
// recomputed from the extracted plan rather than read from the LP.
void account(const PlanningProblem& pb, PlanResult& res) {
  const double eta = std::sqrt(pb.storage.round_trip_efficiency);
  const double tx_crf = resource::crf(pb.transmission_discount_rate, pb.transmission_lifetime_yr);
  const Carried fleet = existing_fleet(pb);
  std::map<std::string, double> interconnect;
  for (const auto& s : pb.solar_sites) interconnect[s.subdivision_id] = s.interconnect_usd_per_mw;

  const auto fom = [&](const std::string& tech, int y) {
    const std::string key = tech == "battery_energy" ? "battery" : tech;
    return tech == "battery_energy" ? 0.0 : pb.costs.get(key, y).fixed_om_usd_per_kw_yr * kMwPerKw;
  };
  const auto capex = [&](const BuildRecord& b) {
    const std::string key = b.technology == "battery_energy" ? "battery" : b.technology;
    const auto& c = pb.costs.get(key, b.period);
    const double per_mw = b.technology == "battery_energy" ? pb.storage.energy_capex_usd_per_kwh * kMwPerKw
                                                           : c.capex_usd_per_kw * kMwPerKw;
    const double ic = b.technology == "solar" ? interconnect.at(b.site_id) : 0.0;
    return resource::crf(c.discount_rate, c.lifetime_yr) * (per_mw + ic);
  };

  for (auto& b : res.builds) {
    b.annualized_cost_usd = 0.0;
    for (int y : pb.periods) {
      if (y >= b.period) b.annualized_cost_usd += (capex(b) + fom(b.technology, y)) * b.built_mw;
    }
  }
  const auto corridor_cost = [&](const TransmissionBuild& t) {
    const auto it = std::find_if(pb.corridors.begin(), pb.corridors.end(), [&](const TransmissionCorridor& c) {
      return c.region_a == t.region_a && c.region_b == t.region_b;
    });
    return it->cost_usd_per_mw;
  };
  for (auto& t : res.transmission) {
    const auto later = std::count_if(pb.periods.begin(), pb.periods.end(), [&](int y) { return y >= t.period; });
    t.annualized_cost_usd = static_cast<double>(later) * tx_crf * corridor_cost(t) * t.built_mw;
  }

  res.max_balance_residual = 0.0;
  res.max_storage_cycle_residual = 0.0;
  for (auto& pr : res.periods) {
    const int y = pr.period;
    double cost = 0.0;
    for (const auto& b : res.builds) {
      if (b.period <= y) cost += (capex(b) + fom(b.technology, y)) * b.built_mw;
    }
    for (const auto& t : res.transmission) {
      if (t.period <= y) cost += tx_crf * corridor_cost(t) * t.built_mw;
    }
    for (std::size_t r = 0; r < pb.regions.size(); ++r) {
      for (std::size_t t = 0; t < pb.dispatchable_techs.size(); ++t) cost += fom(pb.dispatchable_techs[t], y) * fleet.disp[r][t];
      if (pb.storage_enabled) cost += fom("battery", y) * fleet.battery[r];
    }

    pr.solar_generation_mwh = 0.0;
    pr.demand_mwh = 0.0;
    for (const auto& dd : pr.dispatch) {
      const double w = dd.day.weight_days;
      std::map<std::string, double> net_import;
      for (const auto& [rid, hd] : dd.regions) {
        for (const auto& [tech, values] : hd.generation) {
          double per_mwh = 0.0;
          const auto& c = pb.costs.get(tech, y);
          per_mwh = c.variable_om_usd_per_mwh + c.fuel_usd_per_mwh;
          for (double v : values) cost += w * per_mwh * v;
          if (tech == "solar") {
            for (double v : values) pr.solar_generation_mwh += w * v;
          }
        }
        if (pb.storage_enabled) {
          const double vom = pb.costs.get("battery", y).variable_om_usd_per_mwh;
          for (double v : hd.discharge) cost += w * vom * v;
        }
        for (double v : hd.demand) pr.demand_mwh += w * v;
      }
      for (int h = 0; h < kHoursPerDay; ++h) {
        for (const auto& [rid, hd] : dd.regions) {
          double supply = hd.discharge[h] - hd.charge[h];
          for (const auto& [tech, values] : hd.generation) supply += values[h];
          for (std::size_t c = 0; c < pb.corridors.size(); ++c) {
            if (pb.corridors[c].region_a == rid) supply -= dd.flows[c][h];
            if (pb.corridors[c].region_b == rid) supply += dd.flows[c][h];
          }
          res.max_balance_residual =
              std::max(res.max_balance_residual, std::abs(supply - hd.demand[h]) / std::max(hd.demand[h], 1.0));
          const int n = (h + 1) % kHoursPerDay;
          const double step = hd.soc[h] + eta * hd.charge[h] - hd.discharge[h] / eta;
          const double scale = std::max({1.0, hd.soc[h], hd.soc[n]});
          res.max_storage_cycle_residual = std::max(res.max_storage_cycle_residual, std::abs(hd.soc[n] - step) / scale);
        }
      }
    }
    pr.solar_share = pr.demand_mwh > 0.0 ? pr.solar_generation_mwh / pr.demand_mwh : 0.0;
    pr.objective_usd = cost;
  }
}

std::string infeasibility_report(const PlanningProblem& pb, const std::vector<RepDay>& days) {
  const int y = pb.periods.back();
  double demand = 0.0;
  for (const auto& d : days) {
    for (int h = 0; h < kHoursPerDay; ++h) demand += d.weight_days * system_demand(pb, y, d.day_index * kHoursPerDay + h);
  }
  const double required = pb.solar_share_target * demand;
  const double available = max_solar_energy_mwh(pb, days);
  std::ostringstream msg;
  msg << "solar share unreachable: a " << pb.solar_share_target << " share in " << y << " requires " << required
      << " MWh of solar; site limits allow at most " << available << " MWh";
  if (available >= required) msg << " before hourly absorption limits";
  return msg.str();
}

}  // namespace

std::vector<RepDay> select_rep_days(const std::vector<double>& demand_8760,
                                    const std::vector<const resource::CapacityFactorSeries*>& cf_series,
                                    int days_per_season) {
  if (days_per_season < 1) throw ValidationError("days_per_season must be at least 1");
  if (demand_8760.size() != static_cast<std::size_t>(resource::kHoursPerYear)) {
    throw ValidationError("demand series must have 8760 values");
  }
  std::vector<double> mean_cf(resource::kHoursPerYear, 0.0);
  for (const auto* s : cf_series) {
    for (int h = 0; h < resource::kHoursPerYear; ++h) mean_cf[h] += s->values[h] / static_cast<double>(cf_series.size());
  }
  const double dmax = *std::max_element(demand_8760.begin(), demand_8760.end());
  const double cmax = *std::max_element(mean_cf.begin(), mean_cf.end());
  const auto feature = [&](int day, int k) {
    const int h = day * kHoursPerDay + (k % kHoursPerDay);
    if (k < kHoursPerDay) return dmax > 0.0 ? demand_8760[h] / dmax : 0.0;
    return cmax > 0.0 ? mean_cf[h] / cmax : 0.0;
  };

  int peak_day = 0;
  double peak = -1.0;
  for (int h = 0; h < resource::kHoursPerYear; ++h) {
    if (demand_8760[h] > peak) {
      peak = demand_8760[h];
      peak_day = h / kHoursPerDay;
    }
  }

  std::vector<RepDay> out;
  for (int season = 0; season < 4; ++season) {
    std::vector<int> members;
    for (int d = 0; d < kDaysPerYear; ++d) {
      if (season_of(d) != season) continue;
      if (d != peak_day) members.push_back(d);
    }
    if (members.empty()) continue;
    std::vector<double> centroid(2 * kHoursPerDay, 0.0);
    for (int d : members) {
      for (int k = 0; k < 2 * kHoursPerDay; ++k) centroid[k] += feature(d, k) / static_cast<double>(members.size());
    }
    std::vector<std::pair<double, int>> dist;
    for (int d : members) {
      double s = 0.0;
      for (int k = 0; k < 2 * kHoursPerDay; ++k) s += (feature(d, k) - centroid[k]) * (feature(d, k) - centroid[k]);
      dist.emplace_back(s, d);
    }
    std::sort(dist.begin(), dist.end());
    const std::size_t take = std::min<std::size_t>(days_per_season, dist.size());
    const double weight = static_cast<double>(members.size()) / static_cast<double>(take);
    for (std::size_t i = 0; i < take; ++i) out.push_back({dist[i].second, weight, false});
  }
  out.push_back({peak_day, 1.0, true});
  std::sort(out.begin(), out.end(), [](const RepDay& a, const RepDay& b) { return a.day_index < b.day_index; });
  return out;
}

void validate(const PlanningProblem& pb) {
  if (pb.periods.empty()) throw ValidationError("no model periods");
  for (std::size_t i = 1; i < pb.periods.size(); ++i) {
    if (pb.periods[i] <= pb.periods[i - 1]) throw ValidationError("model periods must be strictly increasing");
  }
  if (pb.regions.empty()) throw ValidationError("no regions");
  std::set<std::string> regions;
  for (const auto& r : pb.regions) {
    if (!regions.insert(r.region_id).second) throw ValidationError("duplicate region '" + r.region_id + "'");
    for (int y : pb.periods) {
      auto it = r.demand_8760.find(y);
      if (it == r.demand_8760.end() || it->second.size() != static_cast<std::size_t>(resource::kHoursPerYear)) {
        throw ValidationError("region " + r.region_id + " needs 8760 demand values for " + std::to_string(y));
      }
      for (double v : it->second) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("negative demand in region " + r.region_id);
      }
    }
  }
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& c : pb.corridors) {
    if (c.region_a == c.region_b) throw ValidationError("corridor connects a region to itself");
    if (!regions.count(c.region_a) || !regions.count(c.region_b)) throw ValidationError("corridor references an unknown region");
    if (!pairs.insert(std::minmax(c.region_a, c.region_b)).second) {
      throw ValidationError("more than one corridor between " + c.region_a + " and " + c.region_b);
    }
    if (!(c.existing_capacity_mw >= 0.0) || !(c.cost_usd_per_mw >= 0.0)) throw ValidationError("negative corridor data");
  }
  const auto check_sites = [&](const std::vector<supply::SupplySite>& sites, const std::string& tech) {
    std::set<std::string> ids;
    for (const auto& s : sites) {
      supply::validate(s);
      if (!ids.insert(s.subdivision_id).second) throw ValidationError("duplicate " + tech + " site " + s.subdivision_id);
      if (!regions.count(s.region_id)) throw ValidationError(tech + " site " + s.subdivision_id + " maps to no region");
      if (!s.cf || s.cf->values.size() != static_cast<std::size_t>(resource::kHoursPerYear)) {
        throw ValidationError(tech + " site " + s.subdivision_id + " lacks a capacity factor series");
      }
    }
    if (!sites.empty()) {
      for (int y : pb.periods) pb.costs.get(tech, y);
    }
  };
  check_sites(pb.solar_sites, "solar");
  check_sites(pb.wind_sites, "wind");
  for (const auto& t : pb.dispatchable_techs) {
    if (t == "solar" || t == "wind" || t == "battery" || t == "battery_energy") {
      throw ValidationError("'" + t + "' is not a dispatchable technology");
    }
    for (int y : pb.periods) pb.costs.get(t, y);
  }
  if (pb.storage_enabled) {
    for (int y : pb.periods) pb.costs.get("battery", y);
    if (!(pb.storage.round_trip_efficiency > 0.0 && pb.storage.round_trip_efficiency <= 1.0)) {
      throw ValidationError("storage round-trip efficiency must lie in (0, 1]");
    }
    if (!(pb.storage.energy_capex_usd_per_kwh >= 0.0)) throw ValidationError("negative storage energy cost");
  }
  if (!(pb.solar_share_target >= 0.0 && pb.solar_share_target <= 1.0)) {
    throw ValidationError("solar share target must lie in [0, 1]");
  }
  if (!(pb.reserve_margin >= 0.0)) throw ValidationError("reserve margin must be nonnegative");
  if (pb.days_per_season < 1) throw ValidationError("days_per_season must be at least 1");
  if (!(pb.transmission_discount_rate > 0.0 && pb.transmission_discount_rate < 1.0) || pb.transmission_lifetime_yr < 1) {
    throw ValidationError("invalid transmission financing parameters");
  }
  for (const auto& [rid, techs] : pb.existing) {
    if (!regions.count(rid)) throw ValidationError("existing fleet in unknown region '" + rid + "'");
    for (const auto& [tech, mw] : techs) {
      const bool known = std::find(pb.dispatchable_techs.begin(), pb.dispatchable_techs.end(), tech) !=
                             pb.dispatchable_techs.end() ||
                         (pb.storage_enabled && (tech == "battery" || tech == "battery_energy"));
      if (!known) throw ValidationError("existing fleet lists unsupported technology '" + tech + "'");
      if (!(mw >= 0.0)) throw ValidationError("negative existing capacity");
    }
  }
  double weight = 0.0;
  for (const auto& d : pb.rep_days) {
    if (!(d.weight_days > 0.0) || d.day_index < 0 || d.day_index >= kDaysPerYear) throw ValidationError("invalid rep day");
    weight += d.weight_days;
  }
  if (!pb.rep_days.empty() && std::abs(weight - kDaysPerYear) > 1e-9) throw ValidationError("rep-day weights must sum to 365");
}

lp::LinearProgram assemble_lp(const PlanningProblem& problem) {
  validate(problem);
  std::vector<std::size_t> all(problem.periods.size());
  std::iota(all.begin(), all.end(), 0);
  return Model(problem, rep_days_for(problem), all, existing_fleet(problem)).lp();
}

double max_solar_energy_mwh(const PlanningProblem& pb, const std::vector<RepDay>& days) {
  double e = 0.0;
  for (const auto& s : pb.solar_sites) {
    double per_mw = 0.0;
    for (const auto& d : days) {
      for (int h = 0; h < kHoursPerDay; ++h) per_mw += d.weight_days * s.cf->values[d.day_index * kHoursPerDay + h];
    }
    e += s.capacity_mw * per_mw;
  }
  return e;
}

PlanResult run_plan(const PlanningProblem& problem, const lp::SolveOptions& options) {
  validate(problem);
  PlanResult res;
  res.rep_days = rep_days_for(problem);

  std::vector<std::vector<std::size_t>> solves;
  if (problem.myopic) {
    for (std::size_t k = 0; k < problem.periods.size(); ++k) solves.push_back({k});
  } else {
    solves.emplace_back(problem.periods.size());
    std::iota(solves[0].begin(), solves[0].end(), 0);
  }

  Carried carried = existing_fleet(problem);
  double objective = 0.0;
  for (const auto& ks : solves) {
    const Model model(problem, res.rep_days, ks, carried);
    const lp::Solution sol = lp::solve(model.lp(), options);
    if (sol.status != lp::Status::Optimal) {
      res.status = sol.status;
      res.diagnostic = sol.status == lp::Status::Infeasible ? infeasibility_report(problem, res.rep_days) : sol.diagnostic;
      res.builds.clear();
      res.transmission.clear();
      res.periods.clear();
      return res;
    }
    objective += sol.objective;
    model.extract(sol.x, res, carried);
  }
  res.status = lp::Status::Optimal;
  res.objective_usd = objective;
  account(problem, res);
  return res;
}

double PlanResult::built_mw(const std::string& technology) const {
  double s = 0.0;
  for (const auto& b : builds) {
    if (b.technology == technology) s += b.built_mw;
  }
  return s;
}

double PlanResult::annualized_solar_fixed_cost() const {
  double s = 0.0;
  for (const auto& b : builds) {
    if (b.technology == "solar") s += b.annualized_cost_usd;
  }
  return s;
}

double PlanResult::built_solar_mean_cf(const PlanningProblem& problem) const {
  std::map<std::string, double> cf;
  for (const auto& s : problem.solar_sites) cf[s.subdivision_id] = s.cf->mean_cf;
  double mw = 0.0, weighted = 0.0;
  for (const auto& b : builds) {
    if (b.technology != "solar") continue;
    mw += b.built_mw;
    weighted += b.built_mw * cf.at(b.site_id);
  }
  return mw > 0.0 ? weighted / mw : 0.0;
}

void write_plan_json(std::ostream& out, const PlanningProblem& problem, const PlanResult& result) {
  const auto arr = [](const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(clean(x));
    return a;
  };
  Json j;
  j["status"] = std::string(lp::to_string(result.status));
  j["diagnostic"] = result.diagnostic;
  j["mode"] = problem.myopic ? "myopic" : "joint";
  j["objective_usd"] = clean(result.objective_usd);
  j["solar_share_target"] = problem.solar_share_target;
  j["reserve_margin"] = problem.reserve_margin;
  j["storage_round_trip_efficiency"] = problem.storage.round_trip_efficiency;
  Json rep = Json::array();
  for (const auto& d : result.rep_days) rep.push_back({{"day_index", d.day_index}, {"weight_days", d.weight_days}, {"is_peak", d.is_peak}});
  j["rep_days"] = rep;
  j["summary"] = {{"built_solar_mw", clean(result.built_mw("solar"))},
                  {"built_wind_mw", clean(result.built_mw("wind"))},
                  {"built_solar_mean_cf", clean(result.built_solar_mean_cf(problem))},
                  {"annualized_solar_fixed_cost_usd", clean(result.annualized_solar_fixed_cost())}};
  j["audit"] = {{"max_balance_residual", result.max_balance_residual},
                {"max_storage_cycle_residual", result.max_storage_cycle_residual}};

  Json periods = Json::array();
  for (const auto& pr : result.periods) {
    Json p;
    p["period"] = pr.period;
    p["objective_usd"] = clean(pr.objective_usd);
    p["solar_share"] = clean(pr.solar_share);
    p["solar_generation_mwh"] = clean(pr.solar_generation_mwh);
    p["demand_mwh"] = clean(pr.demand_mwh);
    Json builds = Json::array();
    for (const auto& b : result.builds) {
      if (b.period != pr.period) continue;
      Json e = {{"region", b.region_id}, {"technology", b.technology}};
      if (!b.site_id.empty()) e["site_id"] = b.site_id;
      e["built_mw"] = clean(b.built_mw);
      e["annualized_cost_usd"] = clean(b.annualized_cost_usd);
      builds.push_back(e);
    }
    p["builds"] = builds;
    Json tx = Json::array();
    for (const auto& t : result.transmission) {
      if (t.period != pr.period) continue;
      tx.push_back({{"region_a", t.region_a}, {"region_b", t.region_b}, {"built_mw", clean(t.built_mw)},
                    {"annualized_cost_usd", clean(t.annualized_cost_usd)}});
    }
    p["transmission"] = tx;
    Json dispatch = Json::array();
    for (const auto& dd : pr.dispatch) {
      Json day = {{"day_index", dd.day.day_index}, {"weight_days", dd.day.weight_days}, {"is_peak", dd.day.is_peak}};
      Json regions = Json::object();
      for (const auto& [rid, hd] : dd.regions) {
        Json gen = Json::object();
        for (const auto& [tech, v] : hd.generation) gen[tech] = arr(v);
        regions[rid] = {{"demand", arr(hd.demand)}, {"generation", gen}, {"charge", arr(hd.charge)},
                        {"discharge", arr(hd.discharge)}, {"soc", arr(hd.soc)}};
      }
      day["regions"] = regions;
      Json flows = Json::array();
      for (std::size_t c = 0; c < dd.flows.size(); ++c) {
        flows.push_back({{"region_a", problem.corridors[c].region_a},
                         {"region_b", problem.corridors[c].region_b},
                         {"flow_mw", arr(dd.flows[c])}});
      }
      day["flows"] = flows;
      dispatch.push_back(day);
    }
    p["dispatch"] = dispatch;
    periods.push_back(p);
  }
  j["periods"] = periods;
  out << j.dump(1) << '\n';
}

void write_investments_csv(std::ostream& out, const PlanResult& result) {
  std::map<std::tuple<int, std::string, std::string>, std::pair<double, double>> rows;
  for (const auto& b : result.builds) {
    auto& r = rows[{b.period, b.region_id, b.technology}];
    r.first += b.built_mw;
    r.second += b.annualized_cost_usd;
  }
  for (const auto& t : result.transmission) {
    auto& r = rows[{t.period, t.region_a + "|" + t.region_b, "transmission"}];
    r.first += t.built_mw;
    r.second += t.annualized_cost_usd;
  }
  out << "period,region,technology,built_mw,annualized_cost_usd\n";
  for (const auto& [key, v] : rows) {
    out << std::get<0>(key) << ',' << csv::escape(std::get<1>(key)) << ',' << csv::escape(std::get<2>(key)) << ','
        << csv::format_double(clean(v.first)) << ',' << csv::format_double(clean(v.second)) << '\n';
  }
}

}  // namespace solarzoning::expansion

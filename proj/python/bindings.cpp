#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>

#include "solarzoning/errors.hpp"
#include "solarzoning/geometry.hpp"
#include "solarzoning/lp.hpp"
#include "solarzoning/pipeline.hpp"
#include "solarzoning/planar.hpp"
#include "solarzoning/resource.hpp"
#include "solarzoning/supply.hpp"

namespace py = pybind11;
namespace sz = solarzoning;
namespace fs = std::filesystem;

namespace {

using XY = std::pair<double, double>;

sz::Ring to_ring(const std::vector<XY>& xy) {
  sz::Ring r;
  r.reserve(xy.size());
  for (const auto& [x, y] : xy) r.push_back({x, y});
  return r;
}

std::vector<XY> from_ring(const sz::Ring& r) {
  std::vector<XY> out;
  out.reserve(r.size());
  for (const auto& p : r) out.emplace_back(p.x, p.y);
  return out;
}

py::dict developable_area(const std::vector<XY>& outer, const std::vector<std::string>& edge_classes,
                          double road_setback_m, double ppl_setback_m, double nppl_setback_m, double min_lot_size_m2,
                          std::optional<double> max_lot_size_m2) {
  sz::Polygon poly{to_ring(outer), {}};
  sz::planar::normalize(poly);
  auto parcel = sz::parcels::Parcel::make("parcel", "subdivision", poly);
  if (!edge_classes.empty()) {
    if (edge_classes.size() != parcel.edge_classes[0].size()) {
      throw sz::ValidationError("edge_classes must have one entry per vertex");
    }
    // Classes follow the caller's vertex order; normalize may reverse it.
    const bool reversed = poly.outer != to_ring(outer);
    const std::size_t n = edge_classes.size();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t src = reversed ? (2 * n - i - 2) % n : i;
      parcel.edge_classes[0][i] = sz::parcels::parse_edge_class(edge_classes[src]);
    }
  }
  sz::zoning::RuleLimits limits;
  limits.road_setback_m = road_setback_m;
  limits.ppl_setback_m = ppl_setback_m;
  limits.nppl_setback_m = nppl_setback_m;
  limits.min_lot_size_m2 = min_lot_size_m2;
  if (max_lot_size_m2) limits.max_lot_size_m2 = *max_lot_size_m2;
  const auto d = sz::geometry::developable_area(parcel, sz::zoning::EffectiveRule::permitted(limits));
  py::list parts;
  for (const auto& part : d.polygon_parts) {
    py::list holes;
    for (const auto& h : part.holes) holes.append(from_ring(h));
    parts.append(py::make_tuple(from_ring(part.outer), holes));
  }
  py::dict out;
  out["area_m2"] = d.area_m2;
  out["limiting_rule"] = std::string(sz::geometry::to_string(d.limiting_rule));
  out["parts"] = parts;
  return out;
}

// Sites as (subdivision_id, capacity_mw, lcoe_usd_per_mwh) tuples.
std::vector<py::tuple> supply_curve(const std::vector<std::tuple<std::string, double, double>>& sites) {
  std::vector<sz::supply::SupplySite> in;
  for (const auto& [id, mw, lcoe] : sites) {
    sz::supply::SupplySite s;
    s.subdivision_id = id;
    s.capacity_mw = mw;
    s.lcoe_usd_per_mwh = lcoe;
    in.push_back(std::move(s));
  }
  std::vector<py::tuple> out;
  for (const auto& p : sz::supply::build_supply_curve(in, "curve").points) {
    out.push_back(py::make_tuple(p.subdivision_id, p.capacity_mw, p.lcoe_usd_per_mwh, p.cumulative_mw));
  }
  return out;
}

std::pair<int, std::string> run_scenario(const fs::path& config_path, const fs::path& out_dir,
                                         std::optional<std::string> scenario, std::optional<double> target,
                                         std::optional<std::uint64_t> seed) {
  auto config = sz::pipeline::load_config(config_path);
  if (scenario) config.scenario = sz::zoning::parse_scenario(*scenario);
  if (target) config.solar_share_target = *target;
  if (seed) config.seed = *seed;
  sz::pipeline::validate(config);
  py::gil_scoped_release release;
  const auto o = sz::pipeline::run_scenario(config, out_dir);
  return {o.exit_code, o.message};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Zoning-constrained solar supply and capacity expansion";

  py::register_exception<sz::ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<sz::ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<sz::ContractViolation>(m, "ContractViolation", PyExc_RuntimeError);

  m.attr("SOLAR_POWER_DENSITY_W_M2") = sz::supply::kSolarPowerDensity_w_m2;
  m.attr("WIND_POWER_DENSITY_W_M2") = sz::supply::kWindPowerDensity_w_m2;

  py::class_<sz::resource::CostAssumptions>(m, "CostAssumptions")
      .def(py::init<>())
      .def_readwrite("capex_usd_per_kw", &sz::resource::CostAssumptions::capex_usd_per_kw)
      .def_readwrite("fixed_om_usd_per_kw_yr", &sz::resource::CostAssumptions::fixed_om_usd_per_kw_yr)
      .def_readwrite("variable_om_usd_per_mwh", &sz::resource::CostAssumptions::variable_om_usd_per_mwh)
      .def_readwrite("fuel_usd_per_mwh", &sz::resource::CostAssumptions::fuel_usd_per_mwh)
      .def_readwrite("discount_rate", &sz::resource::CostAssumptions::discount_rate)
      .def_readwrite("lifetime_yr", &sz::resource::CostAssumptions::lifetime_yr)
      .def_readwrite("interconnect_usd_per_mw_km", &sz::resource::CostAssumptions::interconnect_usd_per_mw_km)
      .def_readwrite("interconnect_fixed_usd_per_mw", &sz::resource::CostAssumptions::interconnect_fixed_usd_per_mw);

  m.def("crf", &sz::resource::crf, py::arg("discount_rate"), py::arg("lifetime_yr"));
  m.def("lcoe", &sz::resource::lcoe, py::arg("cf"), py::arg("costs"), py::arg("interconnect_usd_per_mw") = 0.0);
  m.def("site_capacity", &sz::supply::site_capacity, py::arg("developable_area_m2"),
        py::arg("power_density_w_per_m2") = sz::supply::kSolarPowerDensity_w_m2);
  m.def(
      "polygon_area", [](const std::vector<XY>& ring) { return sz::planar::polygon_area(to_ring(ring)); },
      py::arg("ring"), "Signed shoelace area; counter-clockwise rings are positive.");
  m.def("developable_area", &developable_area, py::arg("outer"), py::arg("edge_classes") = std::vector<std::string>{},
        py::arg("road_setback_m") = 0.0, py::arg("ppl_setback_m") = 0.0, py::arg("nppl_setback_m") = 0.0,
        py::arg("min_lot_size_m2") = 0.0, py::arg("max_lot_size_m2") = std::nullopt,
        "Developable area of one parcel. Edge i runs from vertex i to i+1; classes are "
        "'road', 'ppl' or 'nppl' (default).");
  m.def("supply_curve", &supply_curve, py::arg("sites"),
        "Sorts (id, capacity_mw, lcoe) sites into (id, capacity_mw, lcoe, cumulative_mw) steps.");
  m.def(
      "load_config", [](const fs::path& p) { return sz::pipeline::config_json(sz::pipeline::load_config(p)); },
      py::arg("path"), "The config with defaults filled in, as JSON text.");
  m.def("run_scenario", &run_scenario, py::arg("config"), py::arg("out_dir"), py::arg("scenario") = std::nullopt,
        py::arg("target") = std::nullopt, py::arg("seed") = std::nullopt,
        "Runs one scenario; returns (exit_code, message).");
  m.def(
      "compare",
      [](const fs::path& a, const fs::path& b) {
        std::vector<std::tuple<std::string, double, double>> rows;
        for (const auto& r : sz::pipeline::compare_runs(a, b)) rows.emplace_back(r.metric, r.run_a, r.run_b);
        return rows;
      },
      py::arg("dir_a"), py::arg("dir_b"));
  m.def("solver_version", &sz::lp::solver_version);
}

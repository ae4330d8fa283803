#pragma once

// Plain SVG charts for run outputs.

#include <iosfwd>
#include <map>
#include <span>
#include <string>

#include "solarzoning/supply.hpp"

namespace solarzoning::svg {

/// Step plot of cumulative capacity (x) against lcoe (y), one series per curve.
void supply_curves(std::ostream& out, std::span<const supply::SupplyCurve> curves);

/// Grouped bars: region → technology → MW.
void capacity_bars(std::ostream& out, const std::map<std::string, std::map<std::string, double>>& capacity,
                   const std::string& title);

}  // namespace solarzoning::svg

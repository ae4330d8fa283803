#pragma once

// Deterministic synthetic study areas for demos and tests.

#include <cstdint>

#include "solarzoning/dataset.hpp"

namespace solarzoning::synthetic {

struct Spec {
  std::uint64_t seed = 2040;
  int regions = 2;
  int columns = 8;  // subdivisions per region, east-west
  int rows = 5;     // subdivisions per region, north-south
  double subdivision_size_m = 3000.0;
  double unzoned_fraction = 0.15;
  // Shares among zoned jurisdictions; permissive gets the remainder.
  double silent_fraction = 0.45;
  double ban_fraction = 0.15;
  double mean_demand_mw = 100.0;  // per region, before regional scaling
  // Ban (as silent) the highest-cf subdivision among the top-ranked sites.
  bool ban_best_site = true;
  double top_site_fraction = 0.2;
  int first_year = 2020;
  int last_year = 2040;
};

/// Grid of square subdivisions per region with roads on every grid line
/// and a north-south road through alternate subdivisions, urban exclusion
/// patches, two transmission lines per region, a shuffled ordinance mix
/// with exact category counts, winter-evening-peaking demand, a cost table
/// for every model year, a gas fleet and one inter-region corridor per
/// adjacent pair.
dataset::Dataset generate(const Spec& spec);

}  // namespace solarzoning::synthetic

#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "coverpath/grid_map.hpp"

namespace coverpath {

// Charging-station placement strategies.  Strategic spreads stations by
// greedy max-min Manhattan distance (base counts as an existing site);
// Random samples uniformly over free cells; PathConstrained restricts
// stations to border cells; Sparse is Strategic with ceil(count/3) stations.
enum class LayoutStrategy { Strategic, Random, PathConstrained, Sparse };

std::string to_string(LayoutStrategy s);
LayoutStrategy layout_from_string(const std::string& name);

struct MapSpec {
  int n = 15;
  double density = 0.10;  // obstacle fraction, in [0, 0.5]
  int stations = 4;       // number of 'C' cells (the base is a charger too)
  LayoutStrategy layout = LayoutStrategy::Strategic;
  uint64_t seed = 0;
};

// Random map with floor(density * n^2) obstacles and stations per the
// layout strategy.  Obstacle sets that disconnect any free cell from the
// base are rejected and resampled (up to 1000 attempts).  The base sits at
// (0,0).  Throws std::invalid_argument on bad specs and std::runtime_error
// when generation fails.
GridMap generate(const MapSpec& spec);

// The three shipped evaluation maps: 1 = scattered obstacles with four
// evenly spread stations, 2 = rectangular obstacle clusters with five
// stations, 3 = irregular obstacle strands with six stations.
GridMap builtin_map(int id);

// Map text with "# key=value" header comments carrying the generation
// metadata (layout label, density, stations, seed) ahead of the grid.
std::string write_map_text(const GridMap& map, const MapSpec& spec);

// Parses the "# key=value" comment lines preceding the N= header.
std::map<std::string, std::string> read_header_metadata(
    const std::string& text);

}  // namespace coverpath

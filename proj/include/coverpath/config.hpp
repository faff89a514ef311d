#pragma once

#include <string>

#include "coverpath/baselines.hpp"
#include "coverpath/env.hpp"
#include "coverpath/mapgen.hpp"
#include "coverpath/sac.hpp"

namespace coverpath {

struct SweepConfig {
  int runs = 10;  // evaluation runs per weight configuration
};

// Everything a run can be configured with, grouped by the owning module.
// Settings live in a flat key-value text format with dotted section
// prefixes (env., agent., planner., map., sweep.); command-line flags
// override file values.  Derived trunk fields (grid size, input channels,
// action count) follow from the map and are not addressable.
struct RunConfig {
  EnvConfig env;
  SacConfig agent;
  PlannerConfig planner;
  MapSpec map;
  SweepConfig sweep;
};

// Applies one "section.key" assignment.  Throws std::invalid_argument on
// unknown keys or unparseable values, naming the offending key.
void apply_setting(RunConfig& cfg, const std::string& key,
                   const std::string& value);

// Parses config text: one `key = value` per line, `#` comments, blank
// lines ignored.  Errors carry the line number.
void apply_config_text(RunConfig& cfg, const std::string& text);

void apply_config_file(RunConfig& cfg, const std::string& path);

// Every addressable key with its current value, one per line, suitable for
// re-parsing.  Written into output directories so results stay
// reproducible.
std::string resolved_config_text(const RunConfig& cfg);

}  // namespace coverpath

#pragma once

#include <string>

#include "abcage/experiments.hpp"

namespace abcage {

/// Loads a scenario config: JSON with // and /* */ comments permitted.
/// A top-level "preset" key selects a named preset as the base; every other
/// key overrides fields on top of it. Angles are written in units of pi
/// (keys ending in _over_pi); complex matrix entries are [re, im] pairs.
Scenario load_scenario(const std::string& path);

/// Same, from an in-memory string. `origin` names the source in diagnostics.
Scenario scenario_from_json_text(const std::string& text, const std::string& origin = "<config>");

/// Serializes the scenario back to the config schema.
std::string scenario_to_json_text(const Scenario& s);

} // namespace abcage

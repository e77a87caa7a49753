#pragma once

// Operational validity checks on finished designs.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridgram/generator.hpp"

namespace gridgram {

struct CountBound {
  std::size_t min = 0;
  std::optional<std::size_t> max;

  friend bool operator==(const CountBound&, const CountBound&) = default;
};

struct ValidationProfile {
  std::string name;
  bool require_complete = false;
  bool require_connected = false;
  // Every component node has degree >= 1 unless it is the only node.
  bool forbid_isolated = false;
  std::map<Symbol, CountBound> counts;
};

// "none": no checks. "structural": complete, connected, no isolated nodes.
// "demo": structural plus exactly one Fuselage and at least four Rotors.
std::optional<ValidationProfile> named_profile(const std::string& name);

// A profile name, or a path to a YAML/JSON profile file:
//   {name, complete, connected, no_isolated, counts: {Rotor: {min, max}}}
ValidationProfile load_profile(const std::string& name_or_path);

struct ValidationCheck {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;

  bool ok() const;
};

ValidationReport validate_design(const Design& design, const ValidationProfile& profile);

// Number of connected components of the component graph (0 for no nodes).
std::size_t component_graph_parts(const Design& design);

}  // namespace gridgram

#include "gridgram/validation.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <stdexcept>

#include "gridgram/io.hpp"

namespace gridgram {

std::optional<ValidationProfile> named_profile(const std::string& name) {
  if (name == "none" || name == "empty") return ValidationProfile{name, false, false, false, {}};
  if (name == "structural" || name == "demo") {
    ValidationProfile p{name, true, true, true, {}};
    if (name == "demo") {
      p.counts[Symbol::Fuselage] = {1, 1};
      p.counts[Symbol::Rotor] = {4, std::nullopt};
    }
    return p;
  }
  return std::nullopt;
}

namespace {

ValidationProfile parse_profile(const YAML::Node& root, const std::string& fallback_name) {
  if (!root.IsMap()) throw FormatError("profile must be a mapping");
  ValidationProfile p;
  p.name = root["name"] ? root["name"].as<std::string>() : fallback_name;
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    if (key == "name") continue;
    if (key == "complete") {
      p.require_complete = kv.second.as<bool>();
    } else if (key == "connected") {
      p.require_connected = kv.second.as<bool>();
    } else if (key == "no_isolated") {
      p.forbid_isolated = kv.second.as<bool>();
    } else if (key == "counts") {
      for (const auto& c : kv.second) {
        auto sym = symbol_from_name(c.first.as<std::string>());
        if (!sym || !is_storable(*sym)) throw FormatError("bad symbol in profile counts");
        CountBound b;
        if (c.second["min"]) b.min = c.second["min"].as<std::size_t>();
        if (c.second["max"]) b.max = c.second["max"].as<std::size_t>();
        p.counts[*sym] = b;
      }
    } else {
      throw FormatError("unknown profile key '" + key + "'");
    }
  }
  return p;
}

}  // namespace

ValidationProfile load_profile(const std::string& name_or_path) {
  if (auto p = named_profile(name_or_path)) return *p;
  if (!std::filesystem::exists(name_or_path)) {
    throw std::invalid_argument("unknown validation profile '" + name_or_path + "'");
  }
  try {
    return parse_profile(YAML::Load(read_file(name_or_path)), name_or_path);
  } catch (const YAML::Exception& e) {
    throw FormatError("profile '" + name_or_path + "': " + e.what());
  }
}

bool ValidationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

namespace {

std::size_t node_position(const Design& design, Point p) {
  const auto it = std::lower_bound(design.nodes.begin(), design.nodes.end(), p,
                                   [](const ComponentNode& n, Point q) { return n.point < q; });
  return static_cast<std::size_t>(it - design.nodes.begin());
}

}  // namespace

std::size_t component_graph_parts(const Design& design) {
  std::vector<std::size_t> parent(design.nodes.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  std::size_t parts = design.nodes.size();
  for (const Edge& e : design.edges) {
    const std::size_t a = find(node_position(design, e.a));
    const std::size_t b = find(node_position(design, e.b));
    if (a != b) {
      parent[a] = b;
      --parts;
    }
  }
  return parts;
}

ValidationReport validate_design(const Design& design, const ValidationProfile& profile) {
  ValidationReport report;
  if (profile.require_complete) {
    const std::size_t left = design.counts.count(Symbol::Unoccupied)
                                 ? design.counts.at(Symbol::Unoccupied)
                                 : 0;
    report.checks.push_back({"complete", left == 0,
                             std::to_string(left) + " nonterminal point(s) remain"});
  }
  if (profile.require_connected) {
    const std::size_t parts = component_graph_parts(design);
    report.checks.push_back({"connected", parts <= 1,
                             std::to_string(parts) + " connected part(s) over " +
                                 std::to_string(design.nodes.size()) + " component(s)"});
  }
  if (profile.forbid_isolated) {
    std::vector<std::size_t> degree(design.nodes.size(), 0);
    for (const Edge& e : design.edges) {
      ++degree[node_position(design, e.a)];
      ++degree[node_position(design, e.b)];
    }
    std::size_t isolated = 0;
    if (design.nodes.size() > 1) {
      isolated = static_cast<std::size_t>(std::count(degree.begin(), degree.end(), 0));
    }
    report.checks.push_back({"no-isolated", isolated == 0,
                             std::to_string(isolated) + " isolated component(s)"});
  }
  for (const auto& [sym, bound] : profile.counts) {
    const std::size_t n = design.counts.count(sym) ? design.counts.at(sym) : 0;
    const bool ok = n >= bound.min && (!bound.max || n <= *bound.max);
    std::string range = "[" + std::to_string(bound.min) + ", " +
                        (bound.max ? std::to_string(*bound.max) : std::string("inf")) + "]";
    report.checks.push_back({"count:" + std::string(symbol_name(sym)), ok,
                             std::to_string(n) + " in " + range});
  }
  return report;
}

}  // namespace gridgram

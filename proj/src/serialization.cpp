#include <fstream>
#include <json.hpp>
#include <sstream>

#include "gridgram/hash.hpp"
#include "gridgram/io.hpp"

namespace gridgram {

namespace {

using ojson = nlohmann::ordered_json;

constexpr std::string_view kDesignFormat = "gridgram-design/1";
constexpr std::string_view kLogFormat = "gridgram-log/1";

// Top-level keys on their own lines, arrays one compact element per line.
std::string canonical_dump(const ojson& root) {
  std::string out = "{\n";
  std::size_t i = 0;
  for (const auto& [key, value] : root.items()) {
    out += "  " + ojson(key).dump() + ": ";
    if (value.is_array() && !value.empty()) {
      out += "[\n";
      for (std::size_t k = 0; k < value.size(); ++k) {
        out += "    " + value[k].dump() + (k + 1 < value.size() ? ",\n" : "\n");
      }
      out += "  ]";
    } else {
      out += value.dump();
    }
    out += (++i < root.size() ? ",\n" : "\n");
  }
  out += "}\n";
  return out;
}

ojson point_json(Point p) { return ojson::array({p.x, p.y, p.z}); }

ojson grid_config_json(const GridConfig& c) { return {{"n_half", c.n_half}, {"unit", c.unit}}; }

template <typename Json>
void require_keys(const Json& obj, std::initializer_list<std::string_view> keys,
                  std::string_view what) {
  if (!obj.is_object()) throw FormatError(std::string(what) + " must be an object");
  for (auto k : keys) {
    if (!obj.contains(std::string(k))) {
      throw FormatError(std::string(what) + " is missing '" + std::string(k) + "'");
    }
  }
  for (const auto& [key, value] : obj.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw FormatError(std::string(what) + " has unknown key '" + key + "'");
    }
  }
}

Point point_from(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw FormatError("point must be [x, y, z]");
  return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>()};
}

GridConfig grid_config_from(const nlohmann::json& j) {
  require_keys(j, {"n_half", "unit"}, "grid");
  GridConfig c{j["n_half"].get<int>(), j["unit"].get<std::string>()};
  if (c.n_half < 0 || c.n_half > 64) throw FormatError("n_half out of range");
  return c;
}

nlohmann::json parse_json(std::string_view text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(e.what());
  }
}

Symbol symbol_named(const std::string& name) {
  auto s = symbol_from_name(name);
  if (!s) throw FormatError("unknown symbol '" + name + "'");
  return *s;
}

}  // namespace

std::string serialize_design(const Design& design) {
  ojson root;
  root["format"] = std::string(kDesignFormat);
  root["grid"] = grid_config_json(design.grid.config());
  std::string cells;
  cells.reserve(design.grid.size());
  for (Symbol s : design.grid.symbols()) cells.push_back(symbol_code(s));
  root["cells"] = cells;
  root["nodes"] = ojson::array();
  for (const ComponentNode& n : design.nodes) {
    root["nodes"].push_back({{"point", point_json(n.point)},
                             {"symbol", std::string(symbol_name(n.symbol))}});
  }
  root["edges"] = ojson::array();
  for (const Edge& e : design.edges) {
    root["edges"].push_back(ojson::array({point_json(e.a), point_json(e.b)}));
  }
  ojson counts = ojson::object();
  for (const auto& [sym, n] : design.counts) counts[std::string(symbol_name(sym))] = n;
  root["counts"] = counts;
  return canonical_dump(root);
}

Design parse_design(std::string_view text) {
  const nlohmann::json root = parse_json(text);
  try {
    require_keys(root, {"format", "grid", "cells", "nodes", "edges", "counts"}, "design");
    if (root["format"].get<std::string>() != kDesignFormat) throw FormatError("unsupported design format");
    Grid grid(grid_config_from(root["grid"]));
    const auto cells = root["cells"].get<std::string>();
    if (cells.size() != grid.size()) {
      throw FormatError("design has " + std::to_string(cells.size()) + " cells, expected " +
                        std::to_string(grid.size()));
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      auto s = symbol_from_code(cells[i]);
      if (!s || !is_storable(*s)) throw FormatError(std::string("bad cell code '") + cells[i] + "'");
      grid.set_symbol(grid.point_at(i), *s);
    }
    for (const auto& e : root["edges"]) {
      if (!e.is_array() || e.size() != 2) throw FormatError("edge must be a pair of points");
      const Point a = point_from(e[0]);
      const Point b = point_from(e[1]);
      if (!grid.contains(a) || !grid.contains(b)) throw FormatError("edge leaves the grid");
      bool adjacent = false;
      for (Direction d : kAllDirections) {
        if (d != Direction::Ego && neighbor(a, d) == b) {
          grid.add_edge(a, d);
          adjacent = true;
        }
      }
      if (!adjacent) throw FormatError("edge joins non-adjacent points");
    }
    Design design = make_design(grid);
    if (design.edges.size() != root["edges"].size()) throw FormatError("duplicate edges");

    std::vector<ComponentNode> nodes;
    for (const auto& n : root["nodes"]) {
      require_keys(n, {"point", "symbol"}, "node");
      nodes.push_back({point_from(n["point"]), symbol_named(n["symbol"].get<std::string>())});
    }
    if (nodes != design.nodes) throw FormatError("nodes disagree with the grid cells");

    std::map<Symbol, std::size_t> counts;
    for (const auto& [name, n] : root["counts"].items()) counts[symbol_named(name)] = n.get<std::size_t>();
    if (counts != design.counts) throw FormatError("counts disagree with the grid cells");
    return design;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed design: ") + e.what());
  } catch (const GridError& e) {
    throw FormatError(std::string("malformed design: ") + e.what());
  }
}

std::string design_hash(const Design& design) { return sha256_hex(serialize_design(design)); }

std::string serialize_log(const DerivationLog& log) {
  ojson root;
  root["format"] = std::string(kLogFormat);
  root["grammar_fingerprint"] = log.grammar_fingerprint;
  root["grid"] = grid_config_json(log.grid);
  ojson gen;
  gen["seed"] = log.generation.seed;
  gen["point_strategy"] = std::string(point_strategy_name(log.generation.point_strategy));
  gen["rule_strategy"] = std::string(rule_strategy_name(log.generation.rule_strategy));
  gen["max_steps"] = log.generation.max_steps ? ojson(*log.generation.max_steps) : ojson(nullptr);
  root["generation"] = gen;
  root["steps"] = ojson::array();
  for (const DerivationStep& st : log.steps) {
    root["steps"].push_back({{"index", st.index},
                             {"point", point_json(st.point)},
                             {"rule", st.rule_name},
                             {"pre_state", state_code(st.pre_state)}});
  }
  root["outcome"] = std::string(outcome_name(log.outcome));
  root["design_hash"] = log.design_hash;
  return canonical_dump(root);
}

DerivationLog parse_log(std::string_view text) {
  const nlohmann::json root = parse_json(text);
  try {
    require_keys(root, {"format", "grammar_fingerprint", "grid", "generation", "steps", "outcome",
                        "design_hash"},
                 "log");
    if (root["format"].get<std::string>() != kLogFormat) throw FormatError("unsupported log format");
    DerivationLog log;
    log.grammar_fingerprint = root["grammar_fingerprint"].get<std::string>();
    log.grid = grid_config_from(root["grid"]);

    const auto& gen = root["generation"];
    require_keys(gen, {"seed", "point_strategy", "rule_strategy", "max_steps"}, "generation");
    if (!gen["seed"].is_number_unsigned()) throw FormatError("seed must be an unsigned integer");
    log.generation.seed = gen["seed"].get<std::uint64_t>();
    auto ps = point_strategy_from_name(gen["point_strategy"].get<std::string>());
    auto rs = rule_strategy_from_name(gen["rule_strategy"].get<std::string>());
    if (!ps || !rs) throw FormatError("unknown strategy name");
    log.generation.point_strategy = *ps;
    log.generation.rule_strategy = *rs;
    if (!gen["max_steps"].is_null()) {
      log.generation.max_steps = gen["max_steps"].get<std::uint64_t>();
      if (*log.generation.max_steps == 0) throw FormatError("max_steps must be positive");
    }

    for (const auto& s : root["steps"]) {
      require_keys(s, {"index", "point", "rule", "pre_state"}, "step");
      DerivationStep st;
      st.index = s["index"].get<std::uint64_t>();
      st.point = point_from(s["point"]);
      st.rule_name = s["rule"].get<std::string>();
      auto pre = state_from_code(s["pre_state"].get<std::string>());
      if (!pre) throw FormatError("bad pre_state code");
      st.pre_state = *pre;
      log.steps.push_back(std::move(st));
    }
    auto outcome = outcome_from_name(root["outcome"].get<std::string>());
    if (!outcome) throw FormatError("unknown outcome");
    log.outcome = *outcome;
    log.design_hash = root["design_hash"].get<std::string>();
    return log;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed log: ") + e.what());
  }
}

namespace {

std::string node_label(const ComponentNode& n) {
  return std::string(symbol_name(n.symbol)) + "@" + to_string(n.point);
}

std::size_t node_index(const Design& design, Point p) {
  const auto it = std::lower_bound(design.nodes.begin(), design.nodes.end(), p,
                                   [](const ComponentNode& n, Point q) { return n.point < q; });
  return static_cast<std::size_t>(it - design.nodes.begin());
}

}  // namespace

std::string export_dot(const Design& design) {
  std::ostringstream out;
  out << "graph design {\n";
  for (std::size_t i = 0; i < design.nodes.size(); ++i) {
    out << "  n" << i << " [label=\"" << node_label(design.nodes[i]) << "\"];\n";
  }
  for (const Edge& e : design.edges) {
    out << "  n" << node_index(design, e.a) << " -- n" << node_index(design, e.b) << ";\n";
  }
  out << "}\n";
  return out.str();
}

std::string export_graph_json(const Design& design) {
  ojson root;
  root["nodes"] = ojson::array();
  for (std::size_t i = 0; i < design.nodes.size(); ++i) {
    root["nodes"].push_back({{"id", i},
                             {"label", node_label(design.nodes[i])},
                             {"point", point_json(design.nodes[i].point)},
                             {"symbol", std::string(symbol_name(design.nodes[i].symbol))}});
  }
  root["edges"] = ojson::array();
  for (const Edge& e : design.edges) {
    root["edges"].push_back(ojson::array({node_index(design, e.a), node_index(design, e.b)}));
  }
  return canonical_dump(root);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace gridgram

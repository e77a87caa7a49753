#include "gridgram/grammar.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <bit>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "gridgram/hash.hpp"

namespace gridgram {

int SymbolSet::size() const { return std::popcount(static_cast<unsigned>(bits_)); }

std::vector<Symbol> SymbolSet::members() const {
  std::vector<Symbol> out;
  for (Symbol s : kAllSymbols) {
    if (contains(s)) out.push_back(s);
  }
  return out;
}

ContextPattern ContextPattern::exactly(const Context& ctx) {
  ContextPattern p;
  for (std::size_t i = 0; i < kDirectionCount; ++i) p.allowed[i] = SymbolSet{ctx.sym_at[i]};
  return p;
}

const Rule* Grammar::find(std::string_view rule_name) const {
  for (const Rule& r : rules) {
    if (r.name == rule_name) return &r;
  }
  return nullptr;
}

std::string_view grammar_error_kind_name(GrammarErrorKind kind) {
  switch (kind) {
    case GrammarErrorKind::Syntax: return "syntax-error";
    case GrammarErrorKind::UnknownKey: return "unknown-key";
    case GrammarErrorKind::UnknownSymbol: return "unknown-symbol";
    case GrammarErrorKind::UnknownDirection: return "unknown-direction";
    case GrammarErrorKind::DuplicateRule: return "duplicate-rule";
    case GrammarErrorKind::EgoNotNonterminal: return "ego-not-nonterminal";
    case GrammarErrorKind::EmptyWithConnection: return "empty-with-connection";
    case GrammarErrorKind::ProductionNotTerminal: return "production-not-terminal";
    case GrammarErrorKind::InvalidWeight: return "invalid-weight";
  }
  return "unknown";
}

bool is_semantic(GrammarErrorKind kind) {
  switch (kind) {
    case GrammarErrorKind::DuplicateRule:
    case GrammarErrorKind::EgoNotNonterminal:
    case GrammarErrorKind::EmptyWithConnection:
    case GrammarErrorKind::ProductionNotTerminal:
      return true;
    default:
      return false;
  }
}

namespace {

std::string located(const std::string& message, int line, int column) {
  if (line <= 0) return message;
  return std::to_string(line) + ":" + std::to_string(column) + ": " + message;
}

}  // namespace

GrammarError::GrammarError(GrammarErrorKind kind, std::string message, int line, int column)
    : std::runtime_error(located(std::string(grammar_error_kind_name(kind)) + ": " + message,
                                 line, column)),
      kind_(kind),
      line_(line),
      column_(column) {}

namespace {

[[noreturn]] void fail(GrammarErrorKind kind, const std::string& message, const YAML::Node& at) {
  const YAML::Mark mark = at.Mark();
  if (mark.is_null()) throw GrammarError(kind, message);
  throw GrammarError(kind, message, mark.line + 1, mark.column + 1);
}

std::string scalar(const YAML::Node& node, const std::string& what) {
  if (!node.IsScalar()) fail(GrammarErrorKind::Syntax, what + " must be a scalar", node);
  return node.Scalar();
}

void reject_unknown_keys(const YAML::Node& map, std::initializer_list<std::string_view> allowed,
                         const std::string& where) {
  for (const auto& kv : map) {
    const std::string key = scalar(kv.first, "key in " + where);
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(GrammarErrorKind::UnknownKey, "unknown key '" + key + "' in " + where, kv.first);
    }
  }
}

YAML::Node require_map(const YAML::Node& node, const std::string& what) {
  if (!node.IsMap()) fail(GrammarErrorKind::Syntax, what + " must be a mapping", node);
  return node;
}

Symbol parse_symbol(const YAML::Node& node) {
  const std::string name = scalar(node, "symbol");
  auto sym = symbol_from_name(name);
  if (!sym) fail(GrammarErrorKind::UnknownSymbol, "unknown symbol '" + name + "'", node);
  return *sym;
}

SymbolSet parse_entry(const YAML::Node& node, Direction d) {
  if (node.IsScalar()) {
    if (node.Scalar() == "*") return wildcard_for(d);
    return SymbolSet{parse_symbol(node)};
  }
  if (node.IsSequence()) {
    SymbolSet set;
    for (const auto& item : node) set.insert(parse_symbol(item));
    return set;
  }
  fail(GrammarErrorKind::Syntax,
       "entry for '" + std::string(direction_name(d)) +
           "' must be a symbol name, a list of symbol names, or \"*\"",
       node);
}

ContextPattern parse_context(const YAML::Node& node) {
  require_map(node, "context");
  ContextPattern pattern;
  for (Direction d : kAllDirections) pattern[d] = wildcard_for(d);
  bool has_ego = false;
  for (const auto& kv : node) {
    const std::string key = scalar(kv.first, "context key");
    auto d = direction_from_name(key);
    if (!d) fail(GrammarErrorKind::UnknownDirection, "unknown direction '" + key + "'", kv.first);
    pattern[*d] = parse_entry(kv.second, *d);
    if (*d == Direction::Ego) {
      has_ego = true;
      if (!pattern[*d].subset_of(SymbolSet{Symbol::Unoccupied})) {
        fail(GrammarErrorKind::EgoNotNonterminal,
             "ego entry may only admit nonterminal symbols", kv.second);
      }
    }
  }
  if (!has_ego) fail(GrammarErrorKind::Syntax, "context is missing the 'ego' entry", node);
  return pattern;
}

bool valid_identifier(const std::string& name) {
  if (name.empty()) return false;
  const auto ok_first = [](char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  };
  const auto ok_rest = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  };
  return ok_first(name.front()) && std::all_of(name.begin() + 1, name.end(), ok_rest);
}

Rule parse_rule(const YAML::Node& node) {
  require_map(node, "rule");
  reject_unknown_keys(node, {"name", "contexts", "produce", "weight"}, "rule");
  Rule rule;
  if (!node["name"]) fail(GrammarErrorKind::Syntax, "rule is missing 'name'", node);
  rule.name = scalar(node["name"], "rule name");
  if (!valid_identifier(rule.name)) {
    fail(GrammarErrorKind::Syntax, "rule name '" + rule.name + "' is not an identifier",
         node["name"]);
  }
  const std::string where = "rule '" + rule.name + "'";

  const YAML::Node contexts = node["contexts"];
  if (!contexts) fail(GrammarErrorKind::Syntax, where + " is missing 'contexts'", node);
  if (!contexts.IsSequence()) fail(GrammarErrorKind::Syntax, "'contexts' must be a list", contexts);
  for (const auto& c : contexts) rule.omega.push_back(parse_context(c));

  const YAML::Node produce = node["produce"];
  if (!produce) fail(GrammarErrorKind::Syntax, where + " is missing 'produce'", node);
  require_map(produce, "produce");
  reject_unknown_keys(produce, {"symbol", "connect"}, "produce of " + where);
  if (!produce["symbol"]) fail(GrammarErrorKind::Syntax, "produce is missing 'symbol'", produce);
  rule.production.sym = parse_symbol(produce["symbol"]);
  if (!is_terminal(rule.production.sym)) {
    fail(GrammarErrorKind::ProductionNotTerminal,
         where + " must produce a terminal symbol", produce["symbol"]);
  }
  if (produce["connect"]) {
    const std::string dir = scalar(produce["connect"], "connect");
    auto d = direction_from_name(dir);
    if (!d) fail(GrammarErrorKind::UnknownDirection, "unknown direction '" + dir + "'", produce["connect"]);
    rule.production.dir = *d;
  }
  if (rule.production.sym == Symbol::Empty && rule.production.dir != Direction::Ego) {
    fail(GrammarErrorKind::EmptyWithConnection,
         where + " produces Empty with a connection", produce);
  }

  if (node["weight"]) {
    const YAML::Node w = node["weight"];
    long long value = 0;
    try {
      value = w.as<long long>();
    } catch (const YAML::Exception&) {
      fail(GrammarErrorKind::InvalidWeight, "weight must be a positive integer", w);
    }
    if (value < 1 || value > 1'000'000) {
      fail(GrammarErrorKind::InvalidWeight, "weight must be in [1, 1000000]", w);
    }
    rule.weight = static_cast<std::uint32_t>(value);
  }
  return rule;
}

}  // namespace

Grammar parse_grammar(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw GrammarError(GrammarErrorKind::Syntax, e.msg, e.mark.line + 1, e.mark.column + 1);
  }
  if (!root.IsMap()) {
    throw GrammarError(GrammarErrorKind::Syntax, "top level must be a mapping", 1, 1);
  }
  reject_unknown_keys(root, {"name", "version", "rules"}, "grammar");

  Grammar grammar;
  if (root["name"]) grammar.name = scalar(root["name"], "grammar name");
  if (root["version"]) grammar.version = scalar(root["version"], "grammar version");
  const YAML::Node rules = root["rules"];
  if (!rules) fail(GrammarErrorKind::Syntax, "grammar is missing 'rules'", root);
  if (!rules.IsSequence()) fail(GrammarErrorKind::Syntax, "'rules' must be a list", rules);

  std::set<std::string> names;
  for (const auto& r : rules) {
    Rule rule = parse_rule(r);
    if (!names.insert(rule.name).second) {
      fail(GrammarErrorKind::DuplicateRule, "duplicate rule name '" + rule.name + "'", r["name"]);
    }
    grammar.rules.push_back(std::move(rule));
  }
  return grammar;
}

Grammar load_grammar(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read grammar file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_grammar(buf.str());
}

namespace {

nlohmann::ordered_json entry_json(SymbolSet set, Direction d) {
  if (set == wildcard_for(d)) return "*";
  const auto members = set.members();
  if (members.size() == 1) return std::string(symbol_name(members.front()));
  auto list = nlohmann::ordered_json::array();
  for (Symbol s : members) list.push_back(std::string(symbol_name(s)));
  return list;
}

}  // namespace

std::string serialize_grammar(const Grammar& grammar) {
  nlohmann::ordered_json root;
  root["name"] = grammar.name;
  root["version"] = grammar.version;
  root["rules"] = nlohmann::ordered_json::array();
  for (const Rule& rule : grammar.rules) {
    nlohmann::ordered_json r;
    r["name"] = rule.name;
    r["contexts"] = nlohmann::ordered_json::array();
    for (const ContextPattern& p : rule.omega) {
      nlohmann::ordered_json c;
      for (Direction d : kAllDirections) c[std::string(direction_name(d))] = entry_json(p[d], d);
      r["contexts"].push_back(std::move(c));
    }
    r["produce"] = {{"symbol", std::string(symbol_name(rule.production.sym))},
                    {"connect", std::string(direction_name(rule.production.dir))}};
    if (rule.weight != 1) r["weight"] = rule.weight;
    root["rules"].push_back(std::move(r));
  }
  return root.dump(2) + "\n";
}

std::string grammar_fingerprint(const Grammar& grammar) {
  return sha256_hex(serialize_grammar(grammar));
}

std::size_t expansion_size(const ContextPattern& pattern) {
  std::size_t n = 1;
  for (SymbolSet s : pattern.allowed) n *= static_cast<std::size_t>(s.size());
  return n;
}

std::vector<Context> expand(const ContextPattern& pattern) {
  std::vector<Context> out;
  out.reserve(expansion_size(pattern));
  std::array<std::vector<Symbol>, kDirectionCount> choices;
  for (std::size_t i = 0; i < kDirectionCount; ++i) {
    choices[i] = pattern.allowed[i].members();
    if (choices[i].empty()) return out;
  }
  // Odometer over the choice lists, last direction fastest.
  std::array<std::size_t, kDirectionCount> pos{};
  while (true) {
    Context ctx;
    for (std::size_t i = 0; i < kDirectionCount; ++i) ctx.sym_at[i] = choices[i][pos[i]];
    out.push_back(ctx);
    std::size_t i = kDirectionCount;
    while (i > 0) {
      --i;
      if (++pos[i] < choices[i].size()) break;
      pos[i] = 0;
      if (i == 0) return out;
    }
  }
}

std::vector<Context> expand_rule(const Rule& rule) {
  std::vector<std::uint32_t> packed;
  for (const ContextPattern& p : rule.omega) {
    for (const Context& c : expand(p)) packed.push_back(pack(c));
  }
  std::sort(packed.begin(), packed.end());
  packed.erase(std::unique(packed.begin(), packed.end()), packed.end());
  std::vector<Context> out;
  out.reserve(packed.size());
  for (std::uint32_t v : packed) out.push_back(unpack(v));
  return out;
}

bool matches(const Rule& rule, const State& state) {
  return std::any_of(rule.omega.begin(), rule.omega.end(),
                     [&](const ContextPattern& p) { return p.admits(state); });
}

std::vector<std::size_t> applicable_rules(const Grammar& grammar, const Grid& grid, Point p) {
  const State s = grid.state_of(p);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < grammar.rules.size(); ++i) {
    if (matches(grammar.rules[i], s)) out.push_back(i);
  }
  return out;
}

void apply_production(Grid& grid, Point p, const Rule& rule) {
  const State s = grid.state_of(p);
  if (!matches(rule, s)) {
    throw MatchFailure("rule '" + rule.name + "' does not match state " + state_code(s) +
                       " at " + to_string(p));
  }
  grid.set_symbol(p, rule.production.sym);
  if (rule.production.dir == Direction::Ego) return;
  try {
    grid.add_edge(p, rule.production.dir);
  } catch (const GridError& e) {
    grid.set_symbol(p, s[Direction::Ego]);
    throw InternalConsistencyError("rule '" + rule.name + "' cannot connect at " +
                                   to_string(p) + ": " + e.what());
  }
}

std::string_view severity_name(Severity s) {
  switch (s) {
    case Severity::Info: return "info";
    case Severity::Warning: return "warning";
    case Severity::Error: return "error";
  }
  return "info";
}

namespace {

bool patterns_overlap(const ContextPattern& a, const ContextPattern& b) {
  for (std::size_t i = 0; i < kDirectionCount; ++i) {
    if ((a.allowed[i] & b.allowed[i]).empty()) return false;
  }
  return true;
}

bool pattern_empty(const ContextPattern& p) {
  return std::any_of(p.allowed.begin(), p.allowed.end(), [](SymbolSet s) { return s.empty(); });
}

}  // namespace

std::vector<Diagnostic> lint_grammar(const Grammar& grammar) {
  std::vector<Diagnostic> out;
  auto report = [&](Severity sev, std::string code, const std::string& rule, std::string msg) {
    out.push_back({sev, std::move(code), rule, std::move(msg)});
  };

  std::set<std::string> names;
  SymbolSet produced;
  for (const Rule& rule : grammar.rules) {
    if (!names.insert(rule.name).second) {
      report(Severity::Error, "duplicate-rule", rule.name, "rule name is used more than once");
    }
    const Production& prod = rule.production;
    produced.insert(prod.sym);
    if (!is_terminal(prod.sym)) {
      report(Severity::Error, "production-not-terminal", rule.name,
             "produces " + std::string(symbol_name(prod.sym)) + ", which is not terminal");
    }
    if (prod.sym == Symbol::Empty && prod.dir != Direction::Ego) {
      report(Severity::Error, "empty-with-connection", rule.name,
             "produces Empty with a connection");
    }
    bool any_reachable = false;
    for (std::size_t k = 0; k < rule.omega.size(); ++k) {
      const ContextPattern& p = rule.omega[k];
      const std::string ctx = "context " + std::to_string(k);
      if (!p[Direction::Ego].subset_of(SymbolSet{Symbol::Unoccupied})) {
        report(Severity::Error, "ego-not-nonterminal", rule.name,
               ctx + " admits a non-rewritable ego symbol");
      }
      if (pattern_empty(p)) continue;
      any_reachable = true;
      if (prod.dir != Direction::Ego && !p[prod.dir].subset_of(SymbolSet::components())) {
        report(Severity::Error, "edge-target-not-component", rule.name,
               ctx + " admits a non-component symbol at connection direction " +
                   std::string(direction_name(prod.dir)));
      }
    }
    if (!any_reachable) {
      report(Severity::Warning, "unreachable-rule", rule.name,
             "no concrete context: every pattern has an empty entry");
    }
  }

  for (std::size_t i = 0; i < grammar.rules.size(); ++i) {
    for (std::size_t j = i + 1; j < grammar.rules.size(); ++j) {
      const Rule& a = grammar.rules[i];
      const Rule& b = grammar.rules[j];
      bool overlap = false;
      for (const auto& pa : a.omega) {
        for (const auto& pb : b.omega) {
          if (patterns_overlap(pa, pb)) {
            overlap = true;
            break;
          }
        }
        if (overlap) break;
      }
      if (overlap) {
        report(Severity::Info, "overlapping-rules", a.name,
               "shares at least one concrete context with rule '" + b.name + "'");
      }
    }
  }

  SymbolSet dead;
  for (Symbol s : kAllSymbols) {
    if (is_terminal(s) && !produced.contains(s)) {
      dead.insert(s);
      report(Severity::Info, "dead-symbol", "",
             "terminal " + std::string(symbol_name(s)) + " is never produced");
    }
  }
  if (!dead.empty()) {
    for (const Rule& rule : grammar.rules) {
      const bool needs_dead = !rule.omega.empty() &&
          std::all_of(rule.omega.begin(), rule.omega.end(), [&](const ContextPattern& p) {
            return std::any_of(p.allowed.begin() + 1, p.allowed.end(), [&](SymbolSet s) {
              return !s.empty() && s.subset_of(dead);
            });
          });
      if (needs_dead) {
        report(Severity::Warning, "requires-dead-symbol", rule.name,
               "every context requires a symbol no rule produces");
      }
    }
  }
  return out;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

}  // namespace gridgram

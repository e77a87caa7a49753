#include "gridgram/constraint_matcher.hpp"

#include <algorithm>
#include <future>
#include <limits>
#include <json.hpp>
#include <numeric>
#include <sstream>

namespace gridgram {

DirectionAssignment::DirectionAssignment()
    : DirectionAssignment(std::array<int, kDirectionCount>{0, 1, 2, 3, 4, 5, 6}) {}

DirectionAssignment::DirectionAssignment(const std::array<int, kDirectionCount>& values)
    : to_int_(values) {
  std::array<bool, kDirectionCount> seen{};
  for (std::size_t i = 0; i < kDirectionCount; ++i) {
    const int v = values[i];
    if (v < 0 || v > kMaxDirectionValue || seen[static_cast<std::size_t>(v)]) {
      throw std::invalid_argument("direction assignment must be a bijection onto 0..6");
    }
    seen[static_cast<std::size_t>(v)] = true;
    from_int_[static_cast<std::size_t>(v)] = kAllDirections[i];
  }
}

std::string DirectionAssignment::fingerprint() const {
  std::string out;
  for (int v : to_int_) out.push_back(static_cast<char>('0' + v));
  return out;
}

std::string DirectionAssignment::to_json() const {
  nlohmann::ordered_json j;
  for (Direction d : kAllDirections) j[std::string(direction_name(d))] = (*this)(d);
  return j.dump(2) + "\n";
}

DirectionAssignment DirectionAssignment::from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad assignment: ") + e.what());
  }
  if (!j.is_object() || j.size() != kDirectionCount) {
    throw std::invalid_argument("assignment must map all seven directions");
  }
  std::array<int, kDirectionCount> values{};
  for (Direction d : kAllDirections) {
    const std::string key(direction_name(d));
    if (!j.contains(key) || !j[key].is_number_integer()) {
      throw std::invalid_argument("assignment is missing integer for '" + key + "'");
    }
    values[index(d)] = j[key].get<int>();
  }
  return DirectionAssignment(values);
}

std::vector<DirectionAssignment> DirectionAssignment::all() {
  std::vector<DirectionAssignment> out;
  out.reserve(kAssignmentCount);
  std::array<int, kDirectionCount> v{0, 1, 2, 3, 4, 5, 6};
  do {
    out.emplace_back(v);
  } while (std::next_permutation(v.begin(), v.end()));
  return out;
}

IntervalSet IntervalSet::from_mask(std::uint8_t mask) {
  IntervalSet s;
  s.mask_ = mask & 0x7Fu;
  int v = 0;
  while (v <= kMaxDirectionValue) {
    if (!((s.mask_ >> v) & 1u)) {
      ++v;
      continue;
    }
    const int lo = v;
    while (v + 1 <= kMaxDirectionValue && ((s.mask_ >> (v + 1)) & 1u)) ++v;
    s.intervals_[s.count_++] = {static_cast<std::int8_t>(lo), static_cast<std::int8_t>(v)};
    ++v;
  }
  return s;
}

IntervalSet IntervalSet::from_values(const std::vector<int>& values) {
  std::uint8_t mask = 0;
  for (int v : values) {
    if (v < 0 || v > kMaxDirectionValue) throw std::out_of_range("interval value outside 0..6");
    mask = static_cast<std::uint8_t>(mask | (1u << v));
  }
  return from_mask(mask);
}

std::vector<SymbolConstraint> encode_context(const Context& ctx, const DirectionAssignment& a) {
  std::array<std::uint8_t, kSymbolCount> masks{};
  for (Direction d : kAllDirections) {
    masks[index(ctx[d])] = static_cast<std::uint8_t>(masks[index(ctx[d])] | (1u << a(d)));
  }
  std::vector<SymbolConstraint> out;
  for (Symbol s : kAllSymbols) {
    if (masks[index(s)]) out.push_back({s, IntervalSet::from_mask(masks[index(s)])});
  }
  return out;
}

Context decode_context(const std::vector<SymbolConstraint>& constraints,
                       const DirectionAssignment& a) {
  Context ctx;
  std::uint8_t covered = 0;
  for (const SymbolConstraint& c : constraints) {
    if (covered & c.dirs.mask()) throw std::invalid_argument("constraints overlap");
    covered = static_cast<std::uint8_t>(covered | c.dirs.mask());
    for (int v = 0; v <= kMaxDirectionValue; ++v) {
      if (c.dirs.contains(v)) ctx[a.direction_at(v)] = c.symbol;
    }
  }
  if (covered != 0x7Fu) throw std::invalid_argument("constraints do not cover 0..6");
  return ctx;
}

std::size_t constraint_count(const Context& ctx, const DirectionAssignment& a) {
  std::size_t n = 0;
  for (const SymbolConstraint& c : encode_context(ctx, a)) n += c.dirs.interval_count();
  return n;
}

namespace {

// differ[i][j]: contexts whose symbols at directions i and j differ.
using PairCounts = std::array<std::array<std::uint64_t, kDirectionCount>, kDirectionCount>;

// Interval count of one context = 1 + number of adjacent value pairs (k-1, k)
// whose directions hold different symbols, so a grammar's total is a sum of
// pairwise disagreement counts along the assignment's value order.
std::uint64_t total_for(const DirectionAssignment& a, const PairCounts& differ,
                        std::uint64_t contexts) {
  std::uint64_t total = contexts;
  for (int k = 1; k <= kMaxDirectionValue; ++k) {
    total += differ[index(a.direction_at(k - 1))][index(a.direction_at(k))];
  }
  return total;
}

struct ScanBest {
  std::optional<DirectionAssignment> best;
  std::uint64_t total = std::numeric_limits<std::uint64_t>::max();
  std::size_t ties = 0;
  std::size_t scanned = 0;
};

void merge(ScanBest& into, const ScanBest& from) {
  into.scanned += from.scanned;
  if (!from.best) return;
  if (from.total < into.total) {
    into.best = from.best;
    into.total = from.total;
    into.ties = from.ties;
  } else if (from.total == into.total) {
    into.ties += from.ties;
    if (*from.best < *into.best) into.best = from.best;
  }
}

}  // namespace

AssignmentResult optimal_assignment(const Grammar& grammar, unsigned threads) {
  PairCounts differ{};
  std::uint64_t contexts = 0;
  for (const Rule& rule : grammar.rules) {
    for (const Context& ctx : expand_rule(rule)) {
      ++contexts;
      for (std::size_t i = 0; i < kDirectionCount; ++i) {
        for (std::size_t j = i + 1; j < kDirectionCount; ++j) {
          if (ctx.sym_at[i] != ctx.sym_at[j]) {
            ++differ[i][j];
            ++differ[j][i];
          }
        }
      }
    }
  }
  if (contexts == 0) throw EmptyGrammarError("grammar has no concrete contexts");

  const std::vector<DirectionAssignment> candidates = DirectionAssignment::all();
  // Chunks are the 7 values of Dir(ego); each chunk is contiguous in lexicographic order.
  const std::size_t chunk = candidates.size() / kDirectionCount;
  auto scan = [&](std::size_t begin, std::size_t end) {
    ScanBest local;
    for (std::size_t i = begin; i < end; ++i) {
      const std::uint64_t t = total_for(candidates[i], differ, contexts);
      ++local.scanned;
      if (t < local.total) {
        local.total = t;
        local.best = candidates[i];
        local.ties = 1;
      } else if (t == local.total) {
        ++local.ties;
      }
    }
    return local;
  };

  ScanBest best;
  if (threads <= 1) {
    best = scan(0, candidates.size());
  } else {
    std::vector<std::future<ScanBest>> parts;
    for (std::size_t c = 0; c < kDirectionCount; ++c) {
      parts.push_back(std::async(std::launch::async, scan, c * chunk, (c + 1) * chunk));
    }
    for (auto& f : parts) merge(best, f.get());
  }
  return {*best.best, best.total, static_cast<std::size_t>(contexts), best.scanned, best.ties};
}

ContractUnion state_to_contract_union(const State& state, const DirectionAssignment& a) {
  ContractUnion u{{}, a};
  u.members.push_back({{}, encode_context(state, a), std::nullopt});
  return u;
}

namespace {

ProductionGuarantee production_guarantee(const Production& prod, const DirectionAssignment& a) {
  ProductionGuarantee g{prod.sym, std::nullopt};
  if (prod.dir != Direction::Ego) g.edge_dir = a(prod.dir);
  return g;
}

}  // namespace

ContractUnion rule_to_contract_union(const Rule& rule, const DirectionAssignment& a) {
  ContractUnion u{{}, a};
  const ProductionGuarantee g = production_guarantee(rule.production, a);
  const std::vector<Context> contexts = expand_rule(rule);
  u.members.reserve(contexts.size());
  for (const Context& ctx : contexts) u.members.push_back({encode_context(ctx, a), {}, g});
  return u;
}

ConjunctiveContract abstract_contract(const ConjunctiveContract& member, SymbolSet present_symbols) {
  ConjunctiveContract out = member;
  std::erase_if(out.assumptions,
                [&](const SymbolConstraint& c) { return !present_symbols.contains(c.symbol); });
  return out;
}

namespace {

SymbolSet symbols_of(const std::vector<SymbolConstraint>& constraints) {
  SymbolSet s;
  for (const auto& c : constraints) s.insert(c.symbol);
  return s;
}

// Guarantees => assumptions of `rule` abstracted to `present`, without
// materializing the abstraction.
bool guarantees_imply(const std::vector<SymbolConstraint>& guarantees,
                      const ConjunctiveContract& rule, SymbolSet present) {
  for (const SymbolConstraint& g : guarantees) {
    const IntervalSet* allowed = nullptr;
    for (const SymbolConstraint& r : rule.assumptions) {
      if (r.symbol == g.symbol && present.contains(r.symbol)) {
        allowed = &r.dirs;
        break;
      }
    }
    if (allowed == nullptr) {
      if (!g.dirs.empty()) return false;
    } else if (!allowed->includes(g.dirs)) {
      return false;
    }
  }
  return true;
}

std::uint64_t encoding_key(const std::vector<SymbolConstraint>& constraints) {
  std::uint64_t key = 0;
  for (const auto& c : constraints) {
    key |= static_cast<std::uint64_t>(c.dirs.mask()) << (7 * index(c.symbol));
  }
  return key;
}

}  // namespace

bool compose_matches(const ContractUnion& state_union, const ContractUnion& rule_union) {
  if (state_union.assignment.fingerprint() != rule_union.assignment.fingerprint()) {
    throw AssignmentMismatch("contract unions use different direction assignments (" +
                             state_union.assignment.fingerprint() + " vs " +
                             rule_union.assignment.fingerprint() + ")");
  }
  for (const ConjunctiveContract& s : state_union.members) {
    const SymbolSet present = symbols_of(s.guarantees) | symbols_of(s.assumptions);
    const bool composes =
        std::any_of(rule_union.members.begin(), rule_union.members.end(),
                    [&](const ConjunctiveContract& r) { return guarantees_imply(s.guarantees, r, present); });
    if (!composes) return false;
  }
  return true;
}

std::string constraint_text(const std::vector<SymbolConstraint>& constraints) {
  if (constraints.empty()) return "true";
  std::string out;
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    const SymbolConstraint& c = constraints[i];
    const char var = symbol_variable(c.symbol);
    std::vector<std::string> parts;
    for (const Interval& iv : c.dirs.intervals()) {
      if (iv.lo == iv.hi) {
        parts.push_back(std::string(1, var) + " = " + std::to_string(iv.lo));
      } else {
        parts.push_back(std::to_string(iv.lo) + " <= " + var + " <= " + std::to_string(iv.hi));
      }
    }
    if (i > 0) out += " and ";
    if (parts.empty()) {
      out += "false";
    } else if (parts.size() == 1) {
      out += parts.front();
    } else {
      out += "(";
      for (std::size_t k = 0; k < parts.size(); ++k) out += (k ? " or " : "") + parts[k];
      out += ")";
    }
  }
  return out;
}

std::string contract_text(const ContractUnion& u) {
  std::ostringstream out;
  out << "contract-union assignment=";
  for (Direction d : kAllDirections) {
    out << (d == Direction::Ego ? "" : ",") << direction_name(d) << ":" << u.assignment(d);
  }
  out << " members=" << u.members.size() << "\n";
  for (std::size_t i = 0; i < u.members.size(); ++i) {
    const ConjunctiveContract& m = u.members[i];
    out << "member " << i + 1 << "\n";
    out << "  A: " << constraint_text(m.assumptions) << "\n";
    std::string g = m.guarantees.empty() ? "" : constraint_text(m.guarantees);
    if (m.production) {
      std::string prod = std::string(1, symbol_variable(m.production->ego_symbol)) + " = " +
                         std::to_string(u.assignment(Direction::Ego));
      if (m.production->edge_dir) prod += " and edge = " + std::to_string(*m.production->edge_dir);
      g = g.empty() ? prod : g + " and " + prod;
    }
    out << "  G: " << (g.empty() ? "true" : g) << "\n";
  }
  return out.str();
}

ContractMatcher::ContractMatcher(const Grammar& grammar, DirectionAssignment assignment)
    : assignment_(assignment) {
  unions_.reserve(grammar.rules.size());
  index_.resize(grammar.rules.size());
  for (std::size_t r = 0; r < grammar.rules.size(); ++r) {
    unions_.push_back(rule_to_contract_union(grammar.rules[r], assignment_));
    const auto& members = unions_.back().members;
    index_[r].reserve(members.size());
    for (std::size_t m = 0; m < members.size(); ++m) {
      index_[r].emplace(encoding_key(members[m].assumptions), static_cast<std::uint32_t>(m));
    }
  }
}

bool ContractMatcher::matches(std::size_t rule_index, const State& state) const {
  const ContractUnion s = state_to_contract_union(state, assignment_);
  const ConjunctiveContract& member = s.members.front();
  // For concrete encodings both sides partition 0..6, so containment holds
  // exactly when the encodings are equal and the index finds the only candidate.
  const auto it = index_[rule_index].find(encoding_key(member.guarantees));
  if (it == index_[rule_index].end()) return false;
  const ConjunctiveContract& candidate = unions_[rule_index].members[it->second];
  return guarantees_imply(member.guarantees, candidate, symbols_of(member.guarantees));
}

}  // namespace gridgram

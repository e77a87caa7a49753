#include "gridgram/core.hpp"

#include <cstdlib>

namespace gridgram {

namespace {

constexpr std::array<std::string_view, kSymbolCount> kSymbolNames = {
    "Fuselage", "Rotor", "Wing", "Connector", "Empty", "Unoccupied", "Boundary"};
constexpr std::array<char, kSymbolCount> kSymbolCodes = {'F', 'R', 'W', 'C',
                                                         'E', 'U', 'B'};
constexpr std::array<std::string_view, kDirectionCount> kDirectionNames = {
    "ego", "front", "rear", "left", "right", "top", "bottom"};

struct Offset {
  int dx, dy, dz;
};
constexpr std::array<Offset, kDirectionCount> kOffsets = {{
    {0, 0, 0},   // ego
    {1, 0, 0},   // front
    {-1, 0, 0},  // rear
    {0, -1, 0},  // left
    {0, 1, 0},   // right
    {0, 0, 1},   // top
    {0, 0, -1},  // bottom
}};

}  // namespace

std::string_view symbol_name(Symbol s) { return kSymbolNames[index(s)]; }

std::optional<Symbol> symbol_from_name(std::string_view name) {
  for (Symbol s : kAllSymbols) {
    if (kSymbolNames[index(s)] == name) return s;
  }
  return std::nullopt;
}

char symbol_code(Symbol s) { return kSymbolCodes[index(s)]; }

std::optional<Symbol> symbol_from_code(char c) {
  for (Symbol s : kAllSymbols) {
    if (kSymbolCodes[index(s)] == c) return s;
  }
  return std::nullopt;
}

char symbol_variable(Symbol s) {
  return static_cast<char>(kSymbolCodes[index(s)] - 'A' + 'a');
}

std::string_view direction_name(Direction d) { return kDirectionNames[index(d)]; }

std::optional<Direction> direction_from_name(std::string_view name) {
  for (Direction d : kAllDirections) {
    if (kDirectionNames[index(d)] == name) return d;
  }
  return std::nullopt;
}

Direction opposite(Direction d) {
  switch (d) {
    case Direction::Ego: return Direction::Ego;
    case Direction::Front: return Direction::Rear;
    case Direction::Rear: return Direction::Front;
    case Direction::Left: return Direction::Right;
    case Direction::Right: return Direction::Left;
    case Direction::Top: return Direction::Bottom;
    case Direction::Bottom: return Direction::Top;
  }
  return Direction::Ego;
}

std::string to_string(const Point& p) {
  return "(" + std::to_string(p.x) + "," + std::to_string(p.y) + "," +
         std::to_string(p.z) + ")";
}

Point neighbor(Point p, Direction d) {
  const Offset& o = kOffsets[index(d)];
  return {p.x + o.dx, p.y + o.dy, p.z + o.dz};
}

void check_config(const GridConfig& config) {
  if (config.n_half < 0) {
    throw GridError("n_half must be non-negative, got " +
                    std::to_string(config.n_half));
  }
}

bool in_grid(const GridConfig& config, Point p) {
  const int n = config.n_half;
  return std::abs(p.x) <= n && std::abs(p.y) <= n && std::abs(p.z) <= n;
}

std::size_t grid_point_count(const GridConfig& config) {
  const auto side = static_cast<std::size_t>(2 * config.n_half + 1);
  return side * side * side;
}

State State::filled(Symbol s) {
  State st;
  st.sym_at.fill(s);
  return st;
}

std::uint32_t pack(const State& s) {
  std::uint32_t out = 0;
  for (std::size_t i = 0; i < kDirectionCount; ++i) {
    out |= static_cast<std::uint32_t>(s.sym_at[i]) << (3 * i);
  }
  return out;
}

State unpack(std::uint32_t packed) {
  State s;
  for (std::size_t i = 0; i < kDirectionCount; ++i) {
    s.sym_at[i] = static_cast<Symbol>((packed >> (3 * i)) & 0x7u);
  }
  return s;
}

std::string state_code(const State& s) {
  std::string out(kDirectionCount, '?');
  for (std::size_t i = 0; i < kDirectionCount; ++i) out[i] = symbol_code(s.sym_at[i]);
  return out;
}

std::optional<State> state_from_code(std::string_view code) {
  if (code.size() != kDirectionCount) return std::nullopt;
  State s;
  for (std::size_t i = 0; i < kDirectionCount; ++i) {
    auto sym = symbol_from_code(code[i]);
    if (!sym) return std::nullopt;
    s.sym_at[i] = *sym;
  }
  return s;
}

Edge Edge::between(Point p, Point q) {
  return p < q ? Edge{p, q} : Edge{q, p};
}

OutOfGridError::OutOfGridError(Point p)
    : GridError("point " + to_string(p) + " is outside the grid") {}

BoundaryWriteError::BoundaryWriteError(Point p)
    : GridError("cannot store Boundary at " + to_string(p)) {}

EgoEdgeError::EgoEdgeError(Point p)
    : GridError("edge from " + to_string(p) + " must name a non-ego direction") {}

NonComponentEndpointError::NonComponentEndpointError(Point p, Symbol s)
    : GridError("edge endpoint " + to_string(p) + " holds " +
                std::string(symbol_name(s)) + ", not a component") {}

Grid::Grid(GridConfig config) : config_(std::move(config)) {
  check_config(config_);
  side_ = 2 * config_.n_half + 1;
  symbols_.assign(grid_point_count(config_), Symbol::Unoccupied);
}

std::size_t Grid::index_of(Point p) const {
  if (!contains(p)) throw OutOfGridError(p);
  const int n = config_.n_half;
  return static_cast<std::size_t>(((p.x + n) * side_ + (p.y + n)) * side_ + (p.z + n));
}

Point Grid::point_at(std::size_t i) const {
  const int n = config_.n_half;
  const int idx = static_cast<int>(i);
  return {idx / (side_ * side_) - n, (idx / side_) % side_ - n, idx % side_ - n};
}

Symbol Grid::at(Point p) const { return symbols_[index_of(p)]; }

State Grid::state_of(Point p) const {
  State s;
  s[Direction::Ego] = at(p);
  for (std::size_t i = 1; i < kDirectionCount; ++i) {
    const Point q = neighbor(p, kAllDirections[i]);
    s.sym_at[i] = contains(q) ? symbols_[index_of(q)] : Symbol::Boundary;
  }
  return s;
}

void Grid::set_symbol(Point p, Symbol s) {
  const std::size_t i = index_of(p);
  if (!is_storable(s)) throw BoundaryWriteError(p);
  symbols_[i] = s;
}

void Grid::add_edge(Point p, Direction d) {
  if (d == Direction::Ego) throw EgoEdgeError(p);
  const Point q = neighbor(p, d);
  const Symbol sp = at(p);
  const Symbol sq = at(q);
  if (!is_component(sp)) throw NonComponentEndpointError(p, sp);
  if (!is_component(sq)) throw NonComponentEndpointError(q, sq);
  edges_.insert(Edge::between(p, q));
}

std::vector<std::string> audit_grid(const Grid& grid) {
  std::vector<std::string> problems;
  if (grid.size() != grid_point_count(grid.config())) {
    problems.push_back("grid holds " + std::to_string(grid.size()) +
                       " points, expected " +
                       std::to_string(grid_point_count(grid.config())));
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!is_storable(grid.symbols()[i])) {
      problems.push_back("Boundary stored at " + to_string(grid.point_at(i)));
    }
  }
  for (const Edge& e : grid.edges()) {
    const std::string label = to_string(e.a) + "-" + to_string(e.b);
    if (!(e.a < e.b)) {
      problems.push_back("edge " + label + " is a self-loop or not normalized");
      continue;
    }
    if (!grid.contains(e.a) || !grid.contains(e.b)) {
      problems.push_back("edge " + label + " leaves the grid");
      continue;
    }
    const int dist = std::abs(e.a.x - e.b.x) + std::abs(e.a.y - e.b.y) +
                     std::abs(e.a.z - e.b.z);
    if (dist != 1) problems.push_back("edge " + label + " joins non-adjacent points");
    if (!is_component(grid.at(e.a)) || !is_component(grid.at(e.b))) {
      problems.push_back("edge " + label + " has a non-component endpoint");
    }
  }
  return problems;
}

}  // namespace gridgram

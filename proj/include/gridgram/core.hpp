#pragma once

// Grid, symbol alphabet, directions and primitive grid mutations.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gridgram {

enum class Symbol : std::uint8_t {
  Fuselage,
  Rotor,
  Wing,
  Connector,
  Empty,
  Unoccupied,
  // Reported by state_of for out-of-grid neighbors; never stored in a grid.
  Boundary,
};

inline constexpr std::size_t kSymbolCount = 7;

inline constexpr std::array<Symbol, kSymbolCount> kAllSymbols = {
    Symbol::Fuselage, Symbol::Rotor,      Symbol::Wing,    Symbol::Connector,
    Symbol::Empty,    Symbol::Unoccupied, Symbol::Boundary};

constexpr bool is_terminal(Symbol s) {
  return s == Symbol::Fuselage || s == Symbol::Rotor || s == Symbol::Wing ||
         s == Symbol::Connector || s == Symbol::Empty;
}
constexpr bool is_nonterminal(Symbol s) { return s == Symbol::Unoccupied; }
constexpr bool is_component(Symbol s) {
  return s == Symbol::Fuselage || s == Symbol::Rotor || s == Symbol::Wing ||
         s == Symbol::Connector;
}
constexpr bool is_storable(Symbol s) { return s != Symbol::Boundary; }

std::string_view symbol_name(Symbol s);
std::optional<Symbol> symbol_from_name(std::string_view name);
// One-letter code used in compact serializations: F R W C E U B.
char symbol_code(Symbol s);
std::optional<Symbol> symbol_from_code(char c);
// Lower-case constraint variable: f r w c e u b.
char symbol_variable(Symbol s);

enum class Direction : std::uint8_t { Ego, Front, Rear, Left, Right, Top, Bottom };

inline constexpr std::size_t kDirectionCount = 7;

inline constexpr std::array<Direction, kDirectionCount> kAllDirections = {
    Direction::Ego,   Direction::Front, Direction::Rear,  Direction::Left,
    Direction::Right, Direction::Top,   Direction::Bottom};

std::string_view direction_name(Direction d);
std::optional<Direction> direction_from_name(std::string_view name);
// Opposite of ego is ego.
Direction opposite(Direction d);

constexpr std::size_t index(Direction d) { return static_cast<std::size_t>(d); }
constexpr std::size_t index(Symbol s) { return static_cast<std::size_t>(s); }

struct Point {
  int x = 0;
  int y = 0;
  int z = 0;

  friend auto operator<=>(const Point&, const Point&) = default;
};

std::string to_string(const Point& p);

// Axis mapping: front=+x, rear=-x, right=+y, left=-y, top=+z, bottom=-z.
Point neighbor(Point p, Direction d);

struct GridConfig {
  int n_half = 0;
  // Physical length of one lattice unit. Carried along, never interpreted.
  std::string unit = "1";

  friend bool operator==(const GridConfig&, const GridConfig&) = default;
};

void check_config(const GridConfig& config);
bool in_grid(const GridConfig& config, Point p);
std::size_t grid_point_count(const GridConfig& config);

// Seven symbols indexed by Direction. Concrete contexts share this type.
struct State {
  std::array<Symbol, kDirectionCount> sym_at{};

  Symbol operator[](Direction d) const { return sym_at[index(d)]; }
  Symbol& operator[](Direction d) { return sym_at[index(d)]; }

  static State filled(Symbol s);

  friend auto operator<=>(const State&, const State&) = default;
};

using Context = State;

// 3 bits per direction, ego in the low bits.
std::uint32_t pack(const State& s);
State unpack(std::uint32_t packed);
// Letter codes in direction order, e.g. "UFUUUUB".
std::string state_code(const State& s);
std::optional<State> state_from_code(std::string_view code);

// Unordered pair of adjacent points, stored with a < b.
struct Edge {
  Point a;
  Point b;

  static Edge between(Point p, Point q);
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

class GridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class OutOfGridError : public GridError {
 public:
  explicit OutOfGridError(Point p);
};
class BoundaryWriteError : public GridError {
 public:
  explicit BoundaryWriteError(Point p);
};
class EgoEdgeError : public GridError {
 public:
  explicit EgoEdgeError(Point p);
};
class NonComponentEndpointError : public GridError {
 public:
  NonComponentEndpointError(Point p, Symbol s);
};

class Grid {
 public:
  explicit Grid(GridConfig config);

  const GridConfig& config() const { return config_; }
  int side() const { return side_; }
  std::size_t size() const { return symbols_.size(); }

  bool contains(Point p) const { return in_grid(config_, p); }
  // Lexicographic (x, y, z) rank of an in-grid point.
  std::size_t index_of(Point p) const;
  Point point_at(std::size_t i) const;

  Symbol at(Point p) const;
  std::span<const Symbol> symbols() const { return symbols_; }
  const std::set<Edge>& edges() const { return edges_; }

  State state_of(Point p) const;
  void set_symbol(Point p, Symbol s);
  void add_edge(Point p, Direction d);

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  GridConfig config_;
  int side_;
  std::vector<Symbol> symbols_;
  std::set<Edge> edges_;
};

inline Grid grid_new(const GridConfig& config) { return Grid(config); }

// Lists every violated grid invariant; empty when the grid is well formed.
std::vector<std::string> audit_grid(const Grid& grid);

}  // namespace gridgram

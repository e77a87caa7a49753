#pragma once

// Canonical text forms for designs and derivation logs, and graph export.
//
// Both formats are JSON with a fixed key order, one array element per line
// and no floating-point values, so equal values serialize to equal bytes.
// Grid cells and states are strings of one-letter symbol codes
// (F R W C E U B); cells are listed in lexicographic (x, y, z) order and
// states in direction order (ego front rear left right top bottom).

#include <stdexcept>
#include <string>
#include <string_view>

#include "gridgram/generator.hpp"

namespace gridgram {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string serialize_design(const Design& design);
// Rejects any design whose nodes, edges or counts disagree with its cells.
Design parse_design(std::string_view text);
// SHA-256 of serialize_design.
std::string design_hash(const Design& design);

std::string serialize_log(const DerivationLog& log);
DerivationLog parse_log(std::string_view text);

// Undirected graph, one node per component labeled "Symbol@(x,y,z)".
std::string export_dot(const Design& design);
std::string export_graph_json(const Design& design);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace gridgram

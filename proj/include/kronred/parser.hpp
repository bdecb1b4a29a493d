#ifndef KRONRED_PARSER_HPP
#define KRONRED_PARSER_HPP

#include <string>
#include <string_view>

#include "kronred/network.hpp"

namespace kronred {

struct ParseOptions {
  /// Strict mode requires every species to be declared with a `species` line
  /// before use.
  bool strict = false;
};

/// Parses the line-oriented network DSL:
///
///   # comment
///   species X1, X2, X3
///   reaction r1: X1 + 2 X2 <-> X3 ; massaction kf=1 kr=1
///   reaction r2: X3 -> X4 ; mm kf=2 Km(X3)=0.5 Km(X4)=1
///   boundary X1+2 X2: constant 0.05
///   boundary X4: linear X4 -0.1
///
/// Each complex may carry at most one boundary entry.
///
/// Species and complexes are indexed in first-appearance order. Errors throw
/// ParseError with 1-based line/column.
Network parse_network(std::string_view source, const ParseOptions& options = {});

/// Reads and parses a DSL (.dsl/.txt) or JSON (.json) network file.
Network load_network_file(const std::string& path, const ParseOptions& options = {});

/// Renders a Network back to canonical DSL text; parsing the result yields an
/// identical Network.
std::string serialize_dsl(const Network& net);

/// Formats a double with enough digits to round-trip exactly.
std::string format_double(double v);

}  // namespace kronred

#endif  // KRONRED_PARSER_HPP

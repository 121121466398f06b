#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "ptmsa/circuit.hpp"

namespace ptmsa {

/// Parses the netlist dialect described in docs/netlist.md.
/// Throws ParseError, DuplicateName or UnknownNode.
Circuit parse_netlist(std::string_view text);

/// Canonical text: options that differ from the defaults, node guesses,
/// elements sorted by name, then `.end`.
std::string print_netlist(const Circuit& circuit);

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

/// Plain or engineering-suffixed number ("1k", "2.5meg", "10f").
std::optional<double> parse_number(std::string_view token);

}  // namespace ptmsa

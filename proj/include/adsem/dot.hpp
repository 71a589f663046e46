#pragma once

#include "adsem/diagram.hpp"

#include <string>

namespace adsem
{

/// Graphviz digraph: one cluster per role, node shape by kind, decision
/// branches labelled with their guards.
[[nodiscard]] std::string export_dot( const ActivityDiagram& ad );

/// Escapes a string for use inside a double-quoted DOT identifier.
[[nodiscard]] std::string dot_escape( const std::string& s );

} // namespace adsem

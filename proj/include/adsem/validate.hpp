#pragma once

#include "adsem/diagnostics.hpp"
#include "adsem/diagram.hpp"

#include <optional>
#include <string>
#include <vector>

namespace adsem
{

enum class Profile
{
    general,
    /// Single-thread atomic-action methods: no fork/join, no roles,
    /// control-only pins, one output pin per non-decision node.
    variant1
};

[[nodiscard]] const char* to_string( Profile profile );
[[nodiscard]] std::optional< Profile > profile_from_string( const std::string& text );

/// Context conditions of a pin-complete diagram. Pure and order-stable:
/// diagnostics follow node then transition declaration order.
[[nodiscard]] std::vector< Diagnostic > validate( const ActivityDiagram& ad, Profile profile = Profile::general );

} // namespace adsem

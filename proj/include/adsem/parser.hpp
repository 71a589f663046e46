#pragma once

#include "adsem/diagnostics.hpp"
#include "adsem/diagram.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace adsem
{

struct ParseResult
{
    std::optional< ActivityDiagram > diagram;
    std::vector< Diagnostic > diagnostics;

    [[nodiscard]] bool ok() const { return diagram.has_value(); }
};

/// Parses the `.ad` text format. The returned diagram is pin-complete:
/// elided edge endpoints receive synthesized control pins named `_iN`/`_oN`.
[[nodiscard]] ParseResult parse( std::string_view text );

/// Canonical text; parse( print( ad ) ) reproduces `ad` exactly.
[[nodiscard]] std::string print( const ActivityDiagram& ad );

/// Reads and parses a file; I/O failures are reported as an "io" diagnostic.
[[nodiscard]] ParseResult parse_file( const std::string& path );

} // namespace adsem

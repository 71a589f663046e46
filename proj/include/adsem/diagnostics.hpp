#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace adsem
{

enum class Severity
{
    error,
    warning
};

struct Diagnostic
{
    Severity severity = Severity::error;
    std::string code;     // stable identifier, e.g. "unknown-node"
    std::string location; // node, "node.pin" or transition key
    std::string message;
    int line = 0; // 1-based source position when known
    int column = 0;

    bool operator==( const Diagnostic& ) const = default;
};

[[nodiscard]] const char* to_string( Severity severity );
[[nodiscard]] bool has_errors( const std::vector< Diagnostic >& diagnostics );
std::ostream& operator<<( std::ostream& os, const Diagnostic& d );

} // namespace adsem

#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace adsem
{

// JSON-lines trace: a header object, then one state (or configuration) per line.
struct TraceHeader
{
    std::string diagram;
    std::string variant; // "token", "v1" or "v2"
    nlohmann::json params = nlohmann::json::object();
    bool truncated = false;
};

struct TraceFile
{
    TraceHeader header;
    std::vector< nlohmann::json > lines;
};

void write_trace( std::ostream& os, const TraceFile& file );
/// Throws ModelError on malformed input.
[[nodiscard]] TraceFile read_trace( std::istream& is );

} // namespace adsem

#include "adsem/trace_file.hpp"

#include "adsem/system_model.hpp"

namespace adsem
{

void write_trace( std::ostream& os, const TraceFile& file )
{
    nlohmann::json head{ { "diagram", file.header.diagram },
                         { "variant", file.header.variant },
                         { "params", file.header.params },
                         { "truncated", file.header.truncated } };
    os << head.dump() << "\n";
    for ( const auto& line : file.lines )
        os << line.dump() << "\n";
}

TraceFile read_trace( std::istream& is )
{
    TraceFile out;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while ( std::getline( is, line ) )
    {
        ++lineno;
        if ( line.find_first_not_of( " \t\r" ) == std::string::npos )
            continue;
        nlohmann::json j;
        try
        {
            j = nlohmann::json::parse( line );
        }
        catch ( const nlohmann::json::parse_error& e )
        {
            throw ModelError( "trace line " + std::to_string( lineno ) + ": " + e.what() );
        }
        if ( !have_header )
        {
            if ( !j.is_object() || !j.contains( "variant" ) )
                throw ModelError( "trace line " + std::to_string( lineno ) + ": expected a header object" );
            out.header.diagram = j.value( "diagram", std::string() );
            out.header.variant = j.at( "variant" ).get< std::string >();
            out.header.params = j.value( "params", nlohmann::json::object() );
            out.header.truncated = j.value( "truncated", false );
            have_header = true;
            continue;
        }
        out.lines.push_back( std::move( j ) );
    }
    if ( !have_header )
        throw ModelError( "empty trace file" );
    return out;
}

} // namespace adsem

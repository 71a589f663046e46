#include "adsem/dot.hpp"

#include <algorithm>
#include <sstream>
#include <vector>

namespace adsem
{

std::string dot_escape( const std::string& s )
{
    std::string out;
    for ( char c : s )
    {
        if ( c == '"' || c == '\\' )
            out += '\\';
        if ( c == '\n' )
        {
            out += "\\n";
            continue;
        }
        out += c;
    }
    return out;
}

namespace
{

const char* node_style( NodeKind kind )
{
    switch ( kind )
    {
    case NodeKind::action: return "shape=box, style=rounded";
    case NodeKind::initial: return "shape=circle, style=filled, fillcolor=black, width=0.25";
    case NodeKind::final: return "shape=doublecircle, style=filled, fillcolor=black, width=0.2";
    case NodeKind::forkjoin: return "shape=box, style=filled, fillcolor=black, height=0.08";
    case NodeKind::decisionmerge: return "shape=diamond";
    }
    return "";
}

} // namespace

std::string export_dot( const ActivityDiagram& ad )
{
    std::ostringstream os;
    os << "digraph \"" << dot_escape( ad.name() ) << "\" {\n";
    os << "  rankdir=TB;\n";

    std::vector< std::string > roles;
    for ( const auto& n : ad.nodes() )
        if ( std::find( roles.begin(), roles.end(), n.role ) == roles.end() )
            roles.push_back( n.role );

    for ( std::size_t r = 0; r < roles.size(); ++r )
    {
        os << "  subgraph \"cluster_" << r << "\" {\n";
        os << "    label=\"" << dot_escape( roles[ r ] ) << "\";\n";
        for ( const auto& n : ad.nodes() )
        {
            if ( n.role != roles[ r ] )
                continue;
            os << "    \"" << dot_escape( n.name ) << "\" [" << node_style( n.kind );
            if ( n.kind == NodeKind::action || n.kind == NodeKind::decisionmerge )
                os << ", label=\"" << dot_escape( n.name ) << "\"";
            else
                os << ", label=\"\", xlabel=\"" << dot_escape( n.name ) << "\"";
            os << "];\n";
        }
        os << "  }\n";
    }

    for ( const auto& t : ad.transitions() )
    {
        os << "  \"" << dot_escape( t.src ) << "\" -> \"" << dot_escape( t.dst ) << "\"";
        std::vector< std::string > attrs;
        const auto& guard = ad.guard_of( t );
        if ( guard != default_guard )
            attrs.push_back( "label=\"[" + dot_escape( guard ) + "]\"" );
        const auto& type = ad.out_type( t );
        if ( !type.is_control() )
            attrs.push_back( "taillabel=\"" + dot_escape( t.out_pin + ": " + type.describe() ) + "\"" );
        if ( !attrs.empty() )
        {
            os << " [";
            for ( std::size_t i = 0; i < attrs.size(); ++i )
                os << ( i ? ", " : "" ) << attrs[ i ];
            os << "]";
        }
        os << ";\n";
    }
    os << "}\n";
    return os.str();
}

} // namespace adsem

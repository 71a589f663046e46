#include "adsem/diagram.hpp"

namespace adsem
{

const char* to_string( NodeKind kind )
{
    switch ( kind )
    {
    case NodeKind::action: return "action";
    case NodeKind::initial: return "initial";
    case NodeKind::final: return "final";
    case NodeKind::forkjoin: return "forkjoin";
    case NodeKind::decisionmerge: return "decisionmerge";
    }
    return "?";
}

std::optional< NodeKind > node_kind_from_string( const std::string& text )
{
    for ( auto kind : { NodeKind::action, NodeKind::initial, NodeKind::final, NodeKind::forkjoin,
                        NodeKind::decisionmerge } )
        if ( text == to_string( kind ) )
            return kind;
    return std::nullopt;
}

std::string PinType::describe() const
{
    switch ( kind )
    {
    case Kind::control: return "control";
    case Kind::top: return "any";
    case Kind::data: return name;
    }
    return "?";
}

bool compatible( const PinType& a, const PinType& b )
{
    return meet( a, b ).has_value();
}

std::optional< PinType > meet( const PinType& a, const PinType& b )
{
    if ( a.is_top() )
        return b;
    if ( b.is_top() )
        return a;
    if ( a == b )
        return a;
    return std::nullopt;
}

const Pin* Node::in_pin( const std::string& pin ) const
{
    for ( const auto& p : in_pins )
        if ( p.name == pin )
            return &p;
    return nullptr;
}

const Pin* Node::out_pin( const std::string& pin ) const
{
    for ( const auto& p : out_pins )
        if ( p.name == pin )
            return &p;
    return nullptr;
}

std::string Transition::key() const
{
    return src + "." + out_pin + "->" + dst + "." + in_pin;
}

ActivityDiagram::ActivityDiagram( std::string name, std::vector< Node > nodes, std::vector< Transition > transitions )
    : _name( std::move( name ) ), _nodes( std::move( nodes ) ), _transitions( std::move( transitions ) ),
      _in( _nodes.size() ), _out( _nodes.size() )
{
    for ( std::size_t i = 0; i < _nodes.size(); ++i )
        if ( !_by_name.emplace( _nodes[ i ].name, i ).second )
            throw DiagramError( "duplicate node '" + _nodes[ i ].name + "'" );

    for ( std::size_t i = 0; i < _transitions.size(); ++i )
    {
        const auto& t = _transitions[ i ];
        auto src = find_node( t.src );
        auto dst = find_node( t.dst );
        if ( !src || !dst )
            throw DiagramError( "transition " + t.key() + " references an unknown node" );
        if ( !_nodes[ *src ].out_pin( t.out_pin ) || !_nodes[ *dst ].in_pin( t.in_pin ) )
            throw DiagramError( "transition " + t.key() + " references an undeclared pin" );
        _out[ *src ].push_back( i );
        _in[ *dst ].push_back( i );
    }
}

std::optional< std::size_t > ActivityDiagram::find_node( const std::string& name ) const
{
    auto it = _by_name.find( name );
    if ( it == _by_name.end() )
        return std::nullopt;
    return it->second;
}

std::size_t ActivityDiagram::node_index( const std::string& name ) const
{
    auto idx = find_node( name );
    if ( !idx )
        throw DiagramError( "unknown node '" + name + "'" );
    return *idx;
}

const Node& ActivityDiagram::node( const std::string& name ) const
{
    return _nodes[ node_index( name ) ];
}

const std::string& ActivityDiagram::role_of( const std::string& node_name ) const
{
    return node( node_name ).role;
}

const PinType& ActivityDiagram::pin_type( const std::string& qualified_pin ) const
{
    auto dot = qualified_pin.find( '.' );
    if ( dot == std::string::npos )
        throw DiagramError( "pin name '" + qualified_pin + "' is not qualified" );
    const auto& n = node( qualified_pin.substr( 0, dot ) );
    auto pin = qualified_pin.substr( dot + 1 );
    if ( const auto* p = n.in_pin( pin ) )
        return p->type;
    if ( const auto* p = n.out_pin( pin ) )
        return p->type;
    throw DiagramError( "unknown pin '" + qualified_pin + "'" );
}

const std::string& ActivityDiagram::guard( const std::string& node_name, const std::string& out_pin ) const
{
    const auto* p = node( node_name ).out_pin( out_pin );
    if ( !p )
        throw DiagramError( "unknown output pin '" + node_name + "." + out_pin + "'" );
    return p->guard;
}

const PinType& ActivityDiagram::out_type( const Transition& t ) const
{
    return node( t.src ).out_pin( t.out_pin )->type;
}

const PinType& ActivityDiagram::in_type( const Transition& t ) const
{
    return node( t.dst ).in_pin( t.in_pin )->type;
}

const std::string& ActivityDiagram::guard_of( const Transition& t ) const
{
    return guard( t.src, t.out_pin );
}

std::vector< Transition > inT( const ActivityDiagram& ad, const std::string& node )
{
    std::vector< Transition > result;
    for ( auto i : ad.in_indices( ad.node_index( node ) ) )
        result.push_back( ad.transition( i ) );
    return result;
}

std::vector< Transition > outT( const ActivityDiagram& ad, const std::string& node )
{
    std::vector< Transition > result;
    for ( auto i : ad.out_indices( ad.node_index( node ) ) )
        result.push_back( ad.transition( i ) );
    return result;
}

} // namespace adsem

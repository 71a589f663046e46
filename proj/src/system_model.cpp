#include "adsem/system_model.hpp"

#include <algorithm>

namespace adsem
{

std::string to_string( const Value& v )
{
    struct Visitor
    {
        std::string operator()( std::int64_t i ) const { return std::to_string( i ); }
        std::string operator()( bool b ) const { return b ? "true" : "false"; }
        std::string operator()( const std::string& s ) const { return s; }
        std::string operator()( const Ref& r ) const { return "@" + r.oid; }
    };
    return std::visit( Visitor{}, v );
}

const ClassName& Universe::classOf( const Oid& oid ) const
{
    auto it = class_of.find( oid );
    if ( it == class_of.end() )
        throw ModelError( "no class for object '" + oid + "'" );
    return it->second;
}

const ClassName& Universe::definedIn( const MethodName& m ) const
{
    auto it = defined_in.find( m );
    if ( it == defined_in.end() )
        throw ModelError( "method '" + m + "' is not defined in any class" );
    return it->second;
}

const std::vector< ProgramCounter >& Universe::pcOf( const MethodName& m ) const
{
    auto it = pc_of.find( m );
    if ( it == pc_of.end() )
        throw ModelError( "no program counters for method '" + m + "'" );
    return it->second;
}

std::vector< std::string > Universe::check() const
{
    std::vector< std::string > problems;
    for ( const auto& oid : oids )
    {
        auto it = class_of.find( oid );
        if ( it == class_of.end() )
            problems.push_back( "object " + oid + " has no class" );
        else if ( !classes.count( it->second ) )
            problems.push_back( "object " + oid + " has unknown class " + it->second );
    }
    for ( const auto& m : methods )
    {
        auto it = defined_in.find( m );
        if ( it == defined_in.end() || !classes.count( it->second ) )
            problems.push_back( "method " + m + " is not defined in a known class" );
        auto pcs = pc_of.find( m );
        if ( pcs == pc_of.end() || pcs->second.empty() )
            problems.push_back( "method " + m + " has no program counters" );
    }
    return problems;
}

std::vector< std::string > Universe::check( const SystemState& s ) const
{
    std::vector< std::string > problems;
    for ( const auto& [ oid, store ] : s.data )
        if ( !oids.count( oid ) )
            problems.push_back( "data store mentions unknown object " + oid );
    for ( const auto& [ oid, stacks ] : s.control )
    {
        if ( !oids.count( oid ) )
            problems.push_back( "control store mentions unknown object " + oid );
        for ( const auto& [ th, stack ] : stacks )
        {
            if ( !threads.count( th ) )
                problems.push_back( "control store mentions unknown thread " + th );
            for ( const auto& f : stack )
            {
                if ( !methods.count( f.method ) )
                {
                    problems.push_back( "frame for unknown method " + f.method );
                    continue;
                }
                const auto& pcs = pc_of.at( f.method );
                if ( std::find( pcs.begin(), pcs.end(), f.pc ) == pcs.end() )
                    problems.push_back( "frame of " + f.method + " has foreign pc " + f.pc );
            }
        }
    }
    for ( const auto& [ oid, msgs ] : s.events )
        if ( !oids.count( oid ) )
            problems.push_back( "event store mentions unknown object " + oid );
    return problems;
}

const Frame* top_frame( const SystemState& s, const Oid& oid, const ThreadId& thread )
{
    auto obj = s.control.find( oid );
    if ( obj == s.control.end() )
        return nullptr;
    auto th = obj->second.find( thread );
    if ( th == obj->second.end() || th->second.empty() )
        return nullptr;
    return &th->second.back();
}

std::optional< Frame > topFrame( const Universe& u, const SystemState& s, const Oid& oid, const ThreadId& thread )
{
    if ( !u.oids.count( oid ) )
        throw ModelError( "unknown object '" + oid + "'" );
    if ( !u.threads.count( thread ) )
        throw ModelError( "unknown thread '" + thread + "'" );
    if ( const auto* f = top_frame( s, oid, thread ) )
        return *f;
    return std::nullopt;
}

Stack incPC( Stack stack, const std::vector< ProgramCounter >& pc_order )
{
    if ( stack.empty() )
        throw ModelError( "incPC on an empty stack" );
    auto& pc = stack.back().pc;
    auto it = std::find( pc_order.begin(), pc_order.end(), pc );
    if ( it == pc_order.end() )
        throw ModelError( "pc '" + pc + "' is not in the method's pc order" );
    if ( std::next( it ) == pc_order.end() )
        throw ModelError( "pc '" + pc + "' is terminal" );
    pc = *std::next( it );
    return stack;
}

SystemState with_attribute( SystemState s, const Oid& oid, const VarName& var, Value value )
{
    s.data[ oid ][ var ] = std::move( value );
    return s;
}

std::vector< SystemState > canonical_successors( const TransitionRelation& delta, const SystemState& s )
{
    std::vector< std::pair< std::string, SystemState > > keyed;
    for ( auto& next : delta( s ) )
    {
        auto key = serialize( next );
        keyed.emplace_back( std::move( key ), std::move( next ) );
    }
    std::sort( keyed.begin(), keyed.end(),
               []( const auto& a, const auto& b ) { return a.first < b.first; } );
    keyed.erase( std::unique( keyed.begin(), keyed.end(),
                              []( const auto& a, const auto& b ) { return a.first == b.first; } ),
                 keyed.end() );
    std::vector< SystemState > out;
    out.reserve( keyed.size() );
    for ( auto& [ key, st ] : keyed )
        out.push_back( std::move( st ) );
    return out;
}

namespace
{

void extend( const TransitionRelation& delta, std::vector< SystemState >& prefix, std::size_t depth,
             std::size_t fanout, std::vector< Trace >& out )
{
    auto next = canonical_successors( delta, prefix.back() );
    if ( next.empty() )
    {
        out.push_back( { prefix, false } );
        return;
    }
    if ( prefix.size() == depth + 1 )
    {
        out.push_back( { prefix, true } );
        return;
    }
    if ( next.size() > fanout )
        next.resize( fanout );
    for ( auto& s : next )
    {
        prefix.push_back( std::move( s ) );
        extend( delta, prefix, depth, fanout, out );
        prefix.pop_back();
    }
}

} // namespace

std::vector< Trace > generateTraces( const TransitionRelation& delta, const SystemState& s0, std::size_t depth,
                                     std::size_t fanout )
{
    std::vector< Trace > out;
    std::vector< SystemState > prefix{ s0 };
    if ( fanout == 0 )
        return { Trace{ prefix, !canonical_successors( delta, s0 ).empty() } };
    extend( delta, prefix, depth, fanout, out );
    return out;
}

bool is_trace_of( const Trace& t, const TransitionRelation& delta )
{
    for ( std::size_t i = 0; i + 1 < t.states.size(); ++i )
    {
        auto next = delta( t.states[ i ] );
        if ( std::find( next.begin(), next.end(), t.states[ i + 1 ] ) == next.end() )
            return false;
    }
    return !t.states.empty();
}

nlohmann::json to_json( const Value& v )
{
    struct Visitor
    {
        nlohmann::json operator()( std::int64_t i ) const { return i; }
        nlohmann::json operator()( bool b ) const { return b; }
        nlohmann::json operator()( const std::string& s ) const { return s; }
        nlohmann::json operator()( const Ref& r ) const { return { { "ref", r.oid } }; }
    };
    return std::visit( Visitor{}, v );
}

Value value_from_json( const nlohmann::json& j )
{
    if ( j.is_boolean() )
        return j.get< bool >();
    if ( j.is_number_integer() )
        return j.get< std::int64_t >();
    if ( j.is_string() )
        return j.get< std::string >();
    if ( j.is_object() && j.size() == 1 && j.contains( "ref" ) && j[ "ref" ].is_string() )
        return Ref{ j[ "ref" ].get< std::string >() };
    throw ModelError( "unsupported value " + j.dump() );
}

namespace
{

nlohmann::json store_to_json( const Store& store )
{
    auto j = nlohmann::json::object();
    for ( const auto& [ var, val ] : store )
        j[ var ] = to_json( val );
    return j;
}

Store store_from_json( const nlohmann::json& j )
{
    if ( !j.is_object() )
        throw ModelError( "expected an object of variables, got " + j.dump() );
    Store store;
    for ( const auto& [ var, val ] : j.items() )
        store.emplace( var, value_from_json( val ) );
    return store;
}

} // namespace

nlohmann::json to_json( const Frame& f )
{
    return { { "callee", f.callee }, { "m", f.method }, { "vars", store_to_json( f.vars ) },
             { "pc", f.pc },         { "caller", f.caller } };
}

Frame frame_from_json( const nlohmann::json& j )
{
    try
    {
        return { j.at( "callee" ).get< std::string >(), j.at( "m" ).get< std::string >(),
                 store_from_json( j.at( "vars" ) ), j.at( "pc" ).get< std::string >(),
                 j.at( "caller" ).get< std::string >() };
    }
    catch ( const nlohmann::json::exception& e )
    {
        throw ModelError( std::string( "malformed frame: " ) + e.what() );
    }
}

nlohmann::json to_json( const SystemState& s )
{
    nlohmann::json ds = nlohmann::json::object(), cs = nlohmann::json::object(), es = nlohmann::json::object();
    for ( const auto& [ oid, store ] : s.data )
        ds[ oid ] = store_to_json( store );
    for ( const auto& [ oid, stacks ] : s.control )
    {
        auto per = nlohmann::json::object();
        for ( const auto& [ th, stack ] : stacks )
        {
            auto frames = nlohmann::json::array();
            for ( auto it = stack.rbegin(); it != stack.rend(); ++it )
                frames.push_back( to_json( *it ) );
            per[ th ] = frames;
        }
        cs[ oid ] = per;
    }
    for ( const auto& [ oid, msgs ] : s.events )
        es[ oid ] = msgs;
    return { { "ds", ds }, { "cs", cs }, { "es", es } };
}

SystemState state_from_json( const nlohmann::json& j )
{
    if ( !j.is_object() )
        throw ModelError( "state snapshot must be an object" );
    SystemState s;
    try
    {
        if ( j.contains( "ds" ) )
            for ( const auto& [ oid, store ] : j.at( "ds" ).items() )
                s.data.emplace( oid, store_from_json( store ) );
        if ( j.contains( "cs" ) )
            for ( const auto& [ oid, stacks ] : j.at( "cs" ).items() )
                for ( const auto& [ th, frames ] : stacks.items() )
                {
                    Stack stack;
                    for ( auto it = frames.rbegin(); it != frames.rend(); ++it )
                        stack.push_back( frame_from_json( *it ) );
                    s.control[ oid ][ th ] = std::move( stack );
                }
        if ( j.contains( "es" ) )
            for ( const auto& [ oid, msgs ] : j.at( "es" ).items() )
                s.events[ oid ] = msgs.get< std::vector< std::string > >();
    }
    catch ( const nlohmann::json::exception& e )
    {
        throw ModelError( std::string( "malformed state snapshot: " ) + e.what() );
    }
    return s;
}

std::string serialize( const SystemState& s )
{
    return to_json( s ).dump();
}

} // namespace adsem

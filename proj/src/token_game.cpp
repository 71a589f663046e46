#include "adsem/token_game.hpp"

#include "adsem/dot.hpp"

#include <algorithm>
#include <deque>
#include <optional>
#include <random>
#include <sstream>

namespace adsem
{

std::size_t Configuration::token_count() const
{
    std::size_t n = 0;
    for ( const auto& b : buffers )
        n += b.size();
    return n;
}

GuardOracle default_guard_oracle()
{
    return []( const std::string& guard, const Configuration& ) {
        return guard == default_guard ? GuardDecision::yes : GuardDecision::either;
    };
}

const char* to_string( StepMode mode )
{
    return mode == StepMode::interleaving ? "interleaving" : "concurrent";
}

const char* to_string( ActionMode mode )
{
    return mode == ActionMode::instant ? "instant" : "twoPhase";
}

std::optional< StepMode > step_mode_from_string( const std::string& text )
{
    if ( text == "interleaving" )
        return StepMode::interleaving;
    if ( text == "concurrent" )
        return StepMode::concurrent;
    return std::nullopt;
}

std::optional< ActionMode > action_mode_from_string( const std::string& text )
{
    if ( text == "instant" )
        return ActionMode::instant;
    if ( text == "twoPhase" )
        return ActionMode::two_phase;
    return std::nullopt;
}

const char* to_string( StepKind kind )
{
    switch ( kind )
    {
    case StepKind::stutter: return "stutter";
    case StepKind::start: return "start";
    case StepKind::finish: return "finish";
    case StepKind::instant: return "instant";
    case StepKind::forkjoin: return "forkjoin";
    case StepKind::decision: return "decision";
    }
    return "?";
}

std::string StepChoice::label( const ActivityDiagram& ad ) const
{
    std::string out = node + ":" + to_string( kind );
    if ( kind == StepKind::decision )
        out += "(" + ad.transition( in_edge ).in_pin + "->" + ad.transition( out_edge ).out_pin + ")";
    return out;
}

Token representative( const ActivityDiagram& ad, const Transition& t, const std::string& producer )
{
    auto type = meet( ad.out_type( t ), ad.in_type( t ) );
    if ( !type )
        throw DiagramError( "transition " + t.key() + " joins incompatible pin types" );
    if ( type->is_data() )
        return Token::data( type->name, producer );
    return Token::control();
}

Configuration initialConfig( const ActivityDiagram& ad, const TokenSeeder& seeder )
{
    Configuration c;
    c.buffers.resize( ad.transitions().size() );
    c.executing.assign( ad.nodes().size(), false );
    bool any = false;
    for ( std::size_t n = 0; n < ad.nodes().size(); ++n )
    {
        const auto& node = ad.node( n );
        if ( node.kind != NodeKind::initial )
            continue;
        any = true;
        for ( auto i : ad.out_indices( n ) )
        {
            const auto& t = ad.transition( i );
            if ( seeder )
            {
                auto type = meet( ad.out_type( t ), ad.in_type( t ) );
                if ( !type )
                    throw DiagramError( "transition " + t.key() + " joins incompatible pin types" );
                c.buffers[ i ].push_back( seeder( t, *type ) );
            }
            else
                c.buffers[ i ].push_back( representative( ad, t, node.name ) );
        }
    }
    if ( !any )
        throw DiagramError( "diagram '" + ad.name() + "' has no initial node" );
    return c;
}

bool is_initial_config( const ActivityDiagram& ad, const Configuration& c )
{
    bool some = false;
    for ( std::size_t n = 0; n < ad.nodes().size(); ++n )
    {
        const auto& outs = ad.out_indices( n );
        bool all_full = std::all_of( outs.begin(), outs.end(), [ & ]( auto i ) { return !c.buffers[ i ].empty(); } );
        bool all_empty = std::all_of( outs.begin(), outs.end(), [ & ]( auto i ) { return c.buffers[ i ].empty(); } );
        if ( ad.node( n ).kind == NodeKind::initial )
            some = some || all_full;
        else if ( !all_empty || c.executing[ n ] )
            return false;
    }
    return some;
}

bool is_final_config( const ActivityDiagram& ad, const Configuration& c )
{
    bool some = false;
    for ( std::size_t n = 0; n < ad.nodes().size(); ++n )
    {
        const auto& ins = ad.in_indices( n );
        bool any_full = std::any_of( ins.begin(), ins.end(), [ & ]( auto i ) { return !c.buffers[ i ].empty(); } );
        if ( ad.node( n ).kind == NodeKind::final )
            some = some || any_full;
        else if ( any_full || c.executing[ n ] )
            return false;
    }
    return some;
}

namespace
{

struct Move
{
    std::size_t node;
    StepChoice choice;
    std::vector< std::size_t > consumes;
    std::vector< std::pair< std::size_t, Token > > produces;
    std::optional< bool > flag;
    const std::string* guard = nullptr;

    [[nodiscard]] std::vector< std::size_t > touched() const
    {
        auto out = consumes;
        for ( const auto& [ i, tok ] : produces )
            out.push_back( i );
        std::sort( out.begin(), out.end() );
        return out;
    }
};

bool all_nonempty( const Configuration& c, const std::vector< std::size_t >& idx )
{
    return std::all_of( idx.begin(), idx.end(), [ & ]( auto i ) { return !c.buffers[ i ].empty(); } );
}

std::vector< Move > enabled_moves( const ActivityDiagram& ad, const Configuration& c, const ExploreOptions& opt )
{
    std::vector< Move > moves;
    for ( std::size_t n = 0; n < ad.nodes().size(); ++n )
    {
        const auto& node = ad.node( n );
        const auto& ins = ad.in_indices( n );
        const auto& outs = ad.out_indices( n );
        auto produce_all = [ & ]( Move& m ) {
            for ( auto o : outs )
                m.produces.emplace_back( o, representative( ad, ad.transition( o ), node.name ) );
        };

        switch ( node.kind )
        {
        case NodeKind::initial:
        case NodeKind::final: break;

        case NodeKind::action:
            if ( opt.actions == ActionMode::instant )
            {
                if ( ( ins.empty() && outs.empty() ) || !all_nonempty( c, ins ) )
                    break;
                Move m{ n, { node.name, StepKind::instant }, ins, {}, std::nullopt };
                produce_all( m );
                moves.push_back( std::move( m ) );
            }
            else if ( !c.executing[ n ] )
            {
                if ( !all_nonempty( c, ins ) )
                    break;
                moves.push_back( { n, { node.name, StepKind::start }, ins, {}, true } );
            }
            else
            {
                Move m{ n, { node.name, StepKind::finish }, {}, {}, false };
                produce_all( m );
                moves.push_back( std::move( m ) );
            }
            break;

        case NodeKind::forkjoin:
        {
            if ( ( ins.empty() && outs.empty() ) || !all_nonempty( c, ins ) )
                break;
            Move m{ n, { node.name, StepKind::forkjoin }, ins, {}, std::nullopt };
            produce_all( m );
            moves.push_back( std::move( m ) );
            break;
        }

        case NodeKind::decisionmerge:
            for ( auto i : ins )
            {
                if ( c.buffers[ i ].empty() )
                    continue;
                const auto& passing = c.buffers[ i ].front();
                for ( auto o : outs )
                {
                    const auto& t = ad.transition( o );
                    Token tok = admits( ad.out_type( t ), passing ) && admits( ad.in_type( t ), passing )
                                    ? passing
                                    : representative( ad, t, node.name );
                    Move m{ n, { node.name, StepKind::decision, i, o }, { i }, {}, std::nullopt };
                    m.produces.emplace_back( o, std::move( tok ) );
                    m.guard = &ad.guard_of( t );
                    moves.push_back( std::move( m ) );
                }
            }
            break;
        }
    }
    return moves;
}

void apply( Configuration& c, const Move& m )
{
    for ( auto i : m.consumes )
        c.buffers[ i ].erase( c.buffers[ i ].begin() );
    for ( const auto& [ i, tok ] : m.produces )
        c.buffers[ i ].push_back( tok );
    if ( m.flag )
        c.executing[ m.node ] = *m.flag;
}

bool guards_allow( const std::vector< const Move* >& chosen, const Configuration& next, const GuardOracle& oracle )
{
    for ( const auto* m : chosen )
        if ( m->guard && oracle( *m->guard, next ) == GuardDecision::no )
            return false;
    return true;
}

void emit( const Configuration& c, const std::vector< const Move* >& chosen, const GuardOracle& oracle,
           std::vector< Successor >& out )
{
    Successor s{ {}, c };
    for ( const auto* m : chosen )
    {
        apply( s.next, *m );
        s.choices.push_back( m->choice );
    }
    if ( s.next == c || !guards_allow( chosen, s.next, oracle ) )
        return;
    out.push_back( std::move( s ) );
}

void combine( const Configuration& c, const std::vector< Move >& moves, std::size_t k,
              std::vector< const Move* >& chosen, std::vector< bool >& node_used, std::vector< bool >& edge_used,
              const GuardOracle& oracle, std::vector< Successor >& out )
{
    if ( k == moves.size() )
    {
        if ( !chosen.empty() )
            emit( c, chosen, oracle, out );
        return;
    }
    combine( c, moves, k + 1, chosen, node_used, edge_used, oracle, out );

    const auto& m = moves[ k ];
    if ( node_used[ m.node ] )
        return;
    auto touched = m.touched();
    if ( std::adjacent_find( touched.begin(), touched.end() ) != touched.end() )
        return; // a self-loop touches one buffer twice
    for ( auto i : touched )
        if ( edge_used[ i ] )
            return;
    node_used[ m.node ] = true;
    for ( auto i : touched )
        edge_used[ i ] = true;
    chosen.push_back( &m );
    combine( c, moves, k + 1, chosen, node_used, edge_used, oracle, out );
    chosen.pop_back();
    for ( auto i : touched )
        edge_used[ i ] = false;
    node_used[ m.node ] = false;
}

} // namespace

std::vector< Successor > successors( const ActivityDiagram& ad, const Configuration& c, const ExploreOptions& options )
{
    auto oracle = options.guards ? options.guards : default_guard_oracle();
    auto moves = enabled_moves( ad, c, options );
    std::vector< Successor > out;
    if ( options.mode == StepMode::interleaving )
    {
        for ( const auto& m : moves )
            emit( c, { &m }, oracle, out );
    }
    else
    {
        std::vector< const Move* > chosen;
        std::vector< bool > node_used( ad.nodes().size(), false );
        std::vector< bool > edge_used( ad.transitions().size(), false );
        combine( c, moves, 0, chosen, node_used, edge_used, oracle, out );
    }
    std::sort( out.begin(), out.end() );
    out.erase( std::unique( out.begin(), out.end() ), out.end() );
    return out;
}

std::vector< std::size_t > ReachabilityGraph::maximal() const
{
    std::vector< bool > has_out( configs.size(), false );
    for ( const auto& e : edges )
        has_out[ e.from ] = true;
    std::vector< std::size_t > out;
    for ( std::size_t i = 0; i < configs.size(); ++i )
        if ( !has_out[ i ] )
            out.push_back( i );
    return out;
}

ReachabilityGraph reachable( const ActivityDiagram& ad, const ExploreOptions& options, std::size_t bound )
{
    ReachabilityGraph g;
    std::map< Configuration, std::size_t > index;
    auto init = initialConfig( ad );
    index.emplace( init, 0 );
    g.configs.push_back( init );

    std::deque< std::size_t > frontier{ 0 };
    while ( !frontier.empty() )
    {
        auto cur = frontier.front();
        frontier.pop_front();
        for ( auto& succ : successors( ad, g.configs[ cur ], options ) )
        {
            auto it = index.find( succ.next );
            if ( it == index.end() )
            {
                if ( g.configs.size() >= bound )
                {
                    g.truncated = true;
                    continue;
                }
                it = index.emplace( succ.next, g.configs.size() ).first;
                g.configs.push_back( succ.next );
                frontier.push_back( it->second );
            }
            g.edges.push_back( { cur, it->second, std::move( succ.choices ) } );
        }
    }
    return g;
}

Analysis analyze( const ActivityDiagram& ad, const ReachabilityGraph& graph )
{
    Analysis a;
    a.configurations = graph.configs.size();
    a.edges = graph.edges.size();
    a.truncated = graph.truncated;

    for ( auto m : graph.maximal() )
        if ( !is_final_config( ad, graph.configs[ m ] ) )
        {
            a.deadlocks.push_back( m );
            a.all_maximal_final = false;
        }

    for ( std::size_t n = 0; n < ad.nodes().size(); ++n )
    {
        const auto& node = ad.node( n );
        if ( node.kind == NodeKind::final )
            for ( auto i : ad.in_indices( n ) )
            {
                bool hit = std::any_of( graph.configs.begin(), graph.configs.end(),
                                        [ & ]( const Configuration& c ) { return !c.buffers[ i ].empty(); } );
                a.final_reached[ ad.transition( i ).key() ] = hit;
            }
        if ( node.kind == NodeKind::decisionmerge )
            for ( const auto& pin : node.out_pins )
                a.branch_covered[ node.name + "." + pin.name ] = false;
    }

    std::set< std::string > fired;
    for ( const auto& e : graph.edges )
        for ( const auto& ch : e.choices )
        {
            fired.insert( ch.node );
            if ( ch.kind == StepKind::decision )
            {
                const auto& t = ad.transition( ch.out_edge );
                a.branch_covered[ t.src + "." + t.out_pin ] = true;
            }
        }
    for ( const auto& node : ad.nodes() )
        if ( node.kind != NodeKind::initial && node.kind != NodeKind::final && !fired.count( node.name ) )
            a.never_fired.push_back( node.name );
    return a;
}

nlohmann::json to_json( const Analysis& a )
{
    return { { "configurations", a.configurations },
             { "edges", a.edges },
             { "truncated", a.truncated },
             { "deadlocks", a.deadlocks },
             { "allMaximalFinal", a.all_maximal_final },
             { "finalReached", a.final_reached },
             { "branchCovered", a.branch_covered },
             { "neverFired", a.never_fired } };
}

namespace
{

void runs_from( const ActivityDiagram& ad, const ExploreOptions& opt, std::vector< Configuration >& path,
                std::size_t max_steps, std::size_t limit, bool include_cut,
                std::vector< std::vector< Configuration > >& out )
{
    if ( out.size() >= limit )
        return;
    auto next = successors( ad, path.back(), opt );
    if ( next.empty() )
    {
        out.push_back( path );
        return;
    }
    if ( path.size() > max_steps )
    {
        if ( include_cut )
            out.push_back( path );
        return;
    }
    for ( auto& s : next )
    {
        path.push_back( std::move( s.next ) );
        runs_from( ad, opt, path, max_steps, limit, include_cut, out );
        path.pop_back();
        if ( out.size() >= limit )
            return;
    }
}

} // namespace

std::vector< std::vector< Configuration > > enumerate_runs( const ActivityDiagram& ad, const ExploreOptions& options,
                                                            std::size_t max_steps, std::size_t limit,
                                                            bool include_cut )
{
    std::vector< std::vector< Configuration > > out;
    std::vector< Configuration > path{ initialConfig( ad ) };
    runs_from( ad, options, path, max_steps, limit, include_cut, out );
    return out;
}

std::vector< Configuration > random_run( const ActivityDiagram& ad, const ExploreOptions& options, std::uint64_t seed,
                                         std::size_t max_steps )
{
    std::mt19937_64 rng( seed );
    std::vector< Configuration > run{ initialConfig( ad ) };
    for ( std::size_t k = 0; k < max_steps; ++k )
    {
        auto next = successors( ad, run.back(), options );
        if ( next.empty() )
            break;
        run.push_back( std::move( next[ rng() % next.size() ].next ) );
    }
    return run;
}

SystemState lift( const ActivityDiagram& ad, const Configuration& c )
{
    SystemState s;
    s.data[ buffer_object ];
    auto& flags = s.data[ exec_object ];
    for ( std::size_t i = 0; i < ad.transitions().size(); ++i )
        write_mailbox( s, buffer_object, ad.transition( i ).key(), c.buffers.at( i ) );
    for ( std::size_t n = 0; n < ad.nodes().size(); ++n )
        if ( ad.node( n ).kind == NodeKind::action )
            flags[ ad.node( n ).name ] = static_cast< bool >( c.executing.at( n ) );
    return s;
}

namespace
{

bool flag_of( const SystemState& s, const std::string& node )
{
    auto obj = s.data.find( exec_object );
    if ( obj == s.data.end() )
        return false;
    auto it = obj->second.find( node );
    if ( it == obj->second.end() )
        return false;
    const auto* b = std::get_if< bool >( &it->second );
    if ( !b )
        throw BindingError( "execution flag of '" + node + "' is not a boolean" );
    return *b;
}

} // namespace

Configuration lower( const ActivityDiagram& ad, const SystemState& s )
{
    Configuration c;
    for ( const auto& t : ad.transitions() )
        c.buffers.push_back( read_mailbox( s, buffer_object, t.key() ) );
    for ( const auto& n : ad.nodes() )
        c.executing.push_back( n.kind == NodeKind::action && flag_of( s, n.name ) );
    return c;
}

VariationBinding token_binding( std::shared_ptr< const ActivityDiagram > ad, GuardOracle guards )
{
    VariationBinding b;
    b.diagram = ad;
    b.executing = []( const Node& n, const SystemState& s ) {
        return n.kind == NodeKind::action && flag_of( s, n.name );
    };
    b.elems = []( const PinType& type, const Token& tok ) { return admits( type, tok ); };
    b.bufState = []( const Transition& t, const SystemState& s ) {
        try
        {
            return read_mailbox( s, buffer_object, t.key() );
        }
        catch ( const ModelError& e )
        {
            throw BindingError( e.what() );
        }
    };
    auto oracle = guards ? std::move( guards ) : default_guard_oracle();
    b.eval = [ ad, oracle ]( const std::string& guard, const SystemState& s ) {
        return oracle( guard, lower( *ad, s ) ) != GuardDecision::no;
    };
    derive_cons_prod( b );
    return b;
}

LiftedRun asBinding( std::shared_ptr< const ActivityDiagram > ad, const std::vector< Configuration >& run,
                     GuardOracle guards )
{
    LiftedRun out{ token_binding( ad, std::move( guards ) ), {} };
    for ( const auto& c : run )
        out.trace.states.push_back( lift( *ad, c ) );
    out.trace.truncated = run.empty() || !is_final_config( *ad, run.back() );
    return out;
}

nlohmann::json to_json( const ActivityDiagram& ad, const Configuration& c )
{
    auto buffers = nlohmann::json::object();
    for ( std::size_t i = 0; i < ad.transitions().size(); ++i )
    {
        auto arr = nlohmann::json::array();
        for ( const auto& tok : c.buffers.at( i ) )
            arr.push_back( to_string( tok ) );
        buffers[ ad.transition( i ).key() ] = arr;
    }
    auto exec = nlohmann::json::object();
    for ( std::size_t n = 0; n < ad.nodes().size(); ++n )
        if ( ad.node( n ).kind == NodeKind::action )
            exec[ ad.node( n ).name ] = static_cast< bool >( c.executing.at( n ) );
    return { { "buffers", buffers }, { "exec", exec } };
}

Configuration configuration_from_json( const ActivityDiagram& ad, const nlohmann::json& j )
{
    Configuration c;
    c.buffers.resize( ad.transitions().size() );
    c.executing.assign( ad.nodes().size(), false );
    try
    {
        const auto& buffers = j.at( "buffers" );
        for ( std::size_t i = 0; i < ad.transitions().size(); ++i )
        {
            auto key = ad.transition( i ).key();
            if ( buffers.contains( key ) )
                for ( const auto& tok : buffers.at( key ) )
                    c.buffers[ i ].push_back( token_from_string( tok.get< std::string >() ) );
        }
        for ( const auto& [ key, _ ] : buffers.items() )
        {
            bool known = std::any_of( ad.transitions().begin(), ad.transitions().end(),
                                      [ &k = key ]( const Transition& t ) { return t.key() == k; } );
            if ( !known )
                throw ModelError( "unknown transition '" + key + "' in configuration" );
        }
        if ( j.contains( "exec" ) )
            for ( const auto& [ name, flag ] : j.at( "exec" ).items() )
            {
                auto idx = ad.find_node( name );
                if ( !idx || ad.node( *idx ).kind != NodeKind::action )
                    throw ModelError( "execution flag for non-action '" + name + "'" );
                c.executing[ *idx ] = flag.get< bool >();
            }
    }
    catch ( const nlohmann::json::exception& e )
    {
        throw ModelError( std::string( "malformed configuration: " ) + e.what() );
    }
    return c;
}

std::string export_dot( const ActivityDiagram& ad, const ReachabilityGraph& graph )
{
    std::ostringstream os;
    os << "digraph \"" << dot_escape( ad.name() ) << " reachability\" {\n";
    for ( std::size_t i = 0; i < graph.configs.size(); ++i )
    {
        const auto& c = graph.configs[ i ];
        std::string label;
        for ( std::size_t t = 0; t < c.buffers.size(); ++t )
            if ( !c.buffers[ t ].empty() )
                label += ad.transition( t ).key() + " " + to_string( c.buffers[ t ] ) + "\n";
        for ( std::size_t n = 0; n < c.executing.size(); ++n )
            if ( c.executing[ n ] )
                label += ad.node( n ).name + " running\n";
        os << "  c" << i << " [shape=box, label=\"" << dot_escape( label ) << "\"";
        if ( is_final_config( ad, c ) )
            os << ", peripheries=2";
        os << "];\n";
    }
    for ( const auto& e : graph.edges )
    {
        std::string label;
        for ( const auto& ch : e.choices )
            label += ( label.empty() ? "" : ", " ) + ch.label( ad );
        os << "  c" << e.from << " -> c" << e.to << " [label=\"" << dot_escape( label ) << "\"];\n";
    }
    os << "}\n";
    return os.str();
}

} // namespace adsem

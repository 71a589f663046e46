#include "adsem/variant_methods.hpp"

#include <algorithm>
#include <random>

namespace adsem
{

namespace
{

template < typename T >
std::vector< T > one_or_many( const nlohmann::json& j )
{
    if ( j.is_array() )
        return j.get< std::vector< T > >();
    return { j.get< T >() };
}

std::string meth_pc( const MethodName& m, int k )
{
    return m + "@" + std::to_string( k );
}

} // namespace

Scenario scenario_from_json( const nlohmann::json& j )
{
    Scenario sc;
    try
    {
        if ( !j.is_object() )
            throw ModelError( "scenario must be a JSON object" );
        sc.seed = j.value( "seed", std::uint64_t{ 0 } );
        if ( j.contains( "decisions" ) )
            for ( const auto& [ node, v ] : j.at( "decisions" ).items() )
                sc.decisions[ node ] = one_or_many< std::string >( v );
        if ( j.contains( "durations" ) )
            for ( const auto& [ node, v ] : j.at( "durations" ).items() )
                sc.durations[ node ] = one_or_many< int >( v );
        sc.sub_variant = j.value( "subVariant", true );
        auto caller = j.value( "caller", std::string( "role" ) );
        if ( caller != "role" && caller != "command" )
            throw ModelError( "caller must be 'role' or 'command'" );
        sc.caller = caller == "role" ? CallerMode::role : CallerMode::command;
        sc.max_steps = j.value( "maxSteps", std::size_t{ 1000 } );
    }
    catch ( const nlohmann::json::exception& e )
    {
        throw ModelError( std::string( "malformed scenario: " ) + e.what() );
    }
    return sc;
}

nlohmann::json to_json( const Scenario& sc )
{
    return { { "seed", sc.seed },
             { "decisions", sc.decisions },
             { "durations", sc.durations },
             { "subVariant", sc.sub_variant },
             { "caller", sc.caller == CallerMode::role ? "role" : "command" },
             { "maxSteps", sc.max_steps } };
}

Oid MethodsInstance::caller_of( const ActivityDiagram& ad, const std::string& node ) const
{
    if ( caller == CallerMode::command )
        return "cmd:" + node;
    return rrep.at( ad.role_of( node ) );
}

MethodsInstance make_methods_instance( const ActivityDiagram& ad, bool sub_variant, CallerMode caller )
{
    MethodsInstance inst;
    inst.sub_variant = sub_variant;
    inst.caller = caller;
    auto& u = inst.universe;

    for ( const auto& n : ad.nodes() )
    {
        auto r = "role:" + n.role;
        if ( inst.rrep.emplace( n.role, r ).second )
        {
            u.oids.insert( r );
            u.classes.insert( n.role );
            u.class_of[ r ] = n.role;
        }
    }
    for ( auto [ box, cls ] : { std::pair{ mailbox_object, "Mailbox" }, std::pair{ outcome_object, "Outcome" } } )
    {
        u.oids.insert( box );
        u.classes.insert( cls );
        u.class_of[ box ] = cls;
    }
    if ( !sub_variant )
    {
        u.oids.insert( "activity" );
        u.classes.insert( "Activity" );
        u.class_of[ "activity" ] = "Activity";
    }

    std::size_t actions = 0;
    for ( const auto& n : ad.nodes() )
    {
        if ( n.kind != NodeKind::action )
            continue;
        ++actions;
        inst.meth[ n.name ] = n.name;
        inst.oid[ n.name ] = sub_variant ? inst.rrep.at( n.role ) : "activity";
        u.methods.insert( n.name );
        u.defined_in[ n.name ] = sub_variant ? n.role : "Activity";
        auto& pcs = u.pc_of[ n.name ];
        for ( int k = 0; k <= max_duration; ++k )
            pcs.push_back( meth_pc( n.name, k ) );
        if ( caller == CallerMode::command )
        {
            auto cmd = "cmd:" + n.name;
            u.oids.insert( cmd );
            u.classes.insert( "Command" );
            u.class_of[ cmd ] = "Command";
        }
    }
    for ( std::size_t i = 0; i < std::max< std::size_t >( actions, 1 ); ++i )
        inst.threads.insert( "th" + std::to_string( i ) );
    u.threads = inst.threads;
    return inst;
}

bool executingV2( const ActivityDiagram&, const MethodsInstance& inst, const Node& n, const SystemState& s )
{
    if ( n.kind != NodeKind::action )
        return false;
    auto oid = inst.oid.find( n.name );
    if ( oid == inst.oid.end() )
        throw ModelError( "action '" + n.name + "' has no object" );
    const auto& meth = inst.meth.at( n.name );
    auto obj = s.control.find( oid->second );
    if ( obj == s.control.end() )
        return false;
    for ( const auto& [ th, stack ] : obj->second )
    {
        if ( !inst.threads.count( th ) )
            continue;
        for ( const auto& f : stack )
            if ( f.callee == oid->second && f.method == meth )
                return true;
    }
    return false;
}

bool evalV2( const std::string& guard, const SystemState& s )
{
    if ( guard == default_guard )
        return true;
    auto obj = s.data.find( outcome_object );
    if ( obj == s.data.end() )
        return false;
    return std::any_of( obj->second.begin(), obj->second.end(),
                        [ & ]( const auto& kv ) { return kv.second == Value( guard ); } );
}

VariationBinding bindingV2( std::shared_ptr< const ActivityDiagram > ad, const MethodsInstance& inst )
{
    VariationBinding b;
    b.diagram = ad;
    b.executing = [ ad, inst ]( const Node& n, const SystemState& s ) { return executingV2( *ad, inst, n, s ); };
    b.elems = []( const PinType& type, const Token& tok ) { return admits( type, tok ); };
    b.bufState = []( const Transition& t, const SystemState& s ) {
        try
        {
            return read_mailbox( s, mailbox_object, t.key() );
        }
        catch ( const ModelError& e )
        {
            throw BindingError( e.what() );
        }
    };
    b.eval = evalV2;
    derive_cons_prod( b );
    return b;
}

PinController::PinController( std::vector< std::string > pins ) : _pins( std::move( pins ) )
{
    for ( const auto& p : _pins )
        _set[ p ] = false;
}

bool PinController::deliver( const std::string& pin, Value value )
{
    auto it = _set.find( pin );
    if ( it == _set.end() )
        throw ModelError( "unknown input pin '" + pin + "'" );
    if ( it->second )
        throw ModelError( "double-delivery on pin '" + pin + "'" );
    it->second = true;
    _stash[ pin ] = std::move( value );
    if ( !std::all_of( _set.begin(), _set.end(), []( const auto& kv ) { return kv.second; } ) )
        return false;
    _fired = std::move( _stash );
    _stash.clear();
    for ( auto& [ p, flag ] : _set )
        flag = false;
    return true;
}

bool PinController::is_set( const std::string& pin ) const
{
    auto it = _set.find( pin );
    return it != _set.end() && it->second;
}

PinController PinController::load( const SystemState& s, const Oid& oid, const Node& node )
{
    std::vector< std::string > pins;
    for ( const auto& p : node.in_pins )
        pins.push_back( p.name );
    PinController c( pins );
    auto obj = s.data.find( oid );
    if ( obj == s.data.end() )
        return c;
    for ( const auto& p : pins )
    {
        auto flag = obj->second.find( node.name + "." + p + ".set" );
        if ( flag == obj->second.end() || flag->second != Value( true ) )
            continue;
        c._set[ p ] = true;
        auto val = obj->second.find( node.name + "." + p );
        if ( val != obj->second.end() )
            c._stash[ p ] = val->second;
    }
    return c;
}

void PinController::store( SystemState& s, const Oid& oid, const Node& node ) const
{
    auto& ds = s.data[ oid ];
    for ( const auto& p : _pins )
    {
        bool set = _set.at( p );
        ds[ node.name + "." + p + ".set" ] = set;
        if ( set )
            ds[ node.name + "." + p ] = _stash.at( p );
        else
            ds.erase( node.name + "." + p );
    }
}

namespace
{

struct Event
{
    enum Kind
    {
        deliver,
        progress,
        finish,
        fork,
        decide
    } kind;
    std::size_t node;
    std::string pin; // deliver only
};

class Simulator
{
public:
    Simulator( const ActivityDiagram& ad, const MethodsInstance& inst, const Scenario& sc )
        : _ad( ad ), _inst( inst ), _sc( sc ), _rng( sc.seed )
    {
    }

    V2Run run()
    {
        V2Run out;
        SystemState s;
        s.data[ mailbox_object ];
        s.data[ outcome_object ];
        for ( std::size_t n = 0; n < _ad.nodes().size(); ++n )
            if ( _ad.node( n ).kind == NodeKind::initial )
                for ( auto i : _ad.out_indices( n ) )
                    push( s, i, call_token( i, _ad.node( n ).name ) );
        out.trace.states.push_back( s );

        for ( std::size_t step = 0;; ++step )
        {
            auto events = enabled( out.trace.states.back() );
            if ( events.empty() )
            {
                out.stuck = !final_config( out.trace.states.back() );
                break;
            }
            if ( step == _sc.max_steps )
            {
                out.trace.truncated = true;
                break;
            }
            const auto& ev = events[ _rng() % events.size() ];
            std::string label;
            auto next = apply( out.trace.states.back(), ev, label );
            out.events.push_back( std::move( label ) );
            out.trace.states.push_back( std::move( next ) );
        }
        return out;
    }

private:
    const Transition& tr( std::size_t i ) const { return _ad.transition( i ); }

    TokenSeq buf( const SystemState& s, std::size_t i ) const
    {
        return read_mailbox( s, mailbox_object, tr( i ).key() );
    }

    void push( SystemState& s, std::size_t i, Token tok ) const
    {
        auto seq = buf( s, i );
        seq.push_back( std::move( tok ) );
        write_mailbox( s, mailbox_object, tr( i ).key(), seq );
    }

    Token pop( SystemState& s, std::size_t i ) const
    {
        auto seq = buf( s, i );
        auto tok = seq.front();
        seq.erase( seq.begin() );
        write_mailbox( s, mailbox_object, tr( i ).key(), seq );
        return tok;
    }

    Token call_token( std::size_t i, const std::string& value ) const
    {
        const auto& t = tr( i );
        auto type = meet( _ad.out_type( t ), _ad.in_type( t ) );
        if ( !type )
            throw DiagramError( "transition " + t.key() + " joins incompatible pin types" );
        if ( type->is_data() )
            return Token::data( type->name, t.out_pin + "=" + value );
        return Token::control();
    }

    Token pass_or_fresh( std::size_t i, const Token* passing, const std::string& producer ) const
    {
        const auto& t = tr( i );
        if ( passing && admits( _ad.out_type( t ), *passing ) && admits( _ad.in_type( t ), *passing ) )
            return *passing;
        return call_token( i, producer );
    }

    std::vector< std::size_t > pin_inputs( std::size_t n, const std::string& pin ) const
    {
        std::vector< std::size_t > out;
        for ( auto i : _ad.in_indices( n ) )
            if ( tr( i ).in_pin == pin )
                out.push_back( i );
        return out;
    }

    // (thread, frame) of the running method of action n
    std::optional< ThreadId > running_thread( const SystemState& s, std::size_t n ) const
    {
        const auto& name = _ad.node( n ).name;
        auto obj = s.control.find( _inst.oid.at( name ) );
        if ( obj == s.control.end() )
            return std::nullopt;
        for ( const auto& [ th, stack ] : obj->second )
            if ( !stack.empty() && stack.back().method == _inst.meth.at( name ) )
                return th;
        return std::nullopt;
    }

    ThreadId free_thread( const SystemState& s ) const
    {
        for ( const auto& th : _inst.threads )
        {
            bool busy = false;
            for ( const auto& [ oid, stacks ] : s.control )
            {
                auto it = stacks.find( th );
                busy = busy || ( it != stacks.end() && !it->second.empty() );
            }
            if ( !busy )
                return th;
        }
        throw ModelError( "no free thread" );
    }

    bool final_config( const SystemState& s ) const
    {
        auto ad = std::make_shared< ActivityDiagram >( _ad );
        return isFinal( bindingV2( ad, _inst ), s );
    }

    std::vector< Event > enabled( const SystemState& s ) const
    {
        std::vector< Event > out;
        for ( std::size_t n = 0; n < _ad.nodes().size(); ++n )
        {
            const auto& node = _ad.node( n );
            const auto& ins = _ad.in_indices( n );
            auto nonempty = [ & ]( std::size_t i ) { return !buf( s, i ).empty(); };
            switch ( node.kind )
            {
            case NodeKind::initial:
            case NodeKind::final: break;
            case NodeKind::action:
                if ( auto th = running_thread( s, n ) )
                {
                    const auto& f = s.control.at( _inst.oid.at( node.name ) ).at( *th ).back();
                    auto steps = std::get< std::int64_t >( f.vars.at( "$steps" ) );
                    out.push_back( { f.pc == meth_pc( f.method, static_cast< int >( steps ) ) ? Event::finish
                                                                                               : Event::progress,
                                     n,
                                     {} } );
                }
                else
                {
                    auto ctl = PinController::load( s, _inst.oid.at( node.name ), node );
                    for ( const auto& p : ctl.pins() )
                    {
                        auto feeding = pin_inputs( n, p );
                        if ( !ctl.is_set( p ) && !feeding.empty() &&
                             std::all_of( feeding.begin(), feeding.end(), nonempty ) )
                            out.push_back( { Event::deliver, n, p } );
                    }
                    if ( ctl.pins().empty() )
                        out.push_back( { Event::deliver, n, {} } );
                }
                break;
            case NodeKind::forkjoin:
                if ( ( !ins.empty() || !_ad.out_indices( n ).empty() ) &&
                     std::all_of( ins.begin(), ins.end(), nonempty ) )
                    out.push_back( { Event::fork, n, {} } );
                break;
            case NodeKind::decisionmerge:
                if ( std::any_of( ins.begin(), ins.end(), nonempty ) )
                    out.push_back( { Event::decide, n, {} } );
                break;
            }
        }
        return out;
    }

    std::vector< std::size_t > branches( std::size_t n ) const
    {
        std::vector< std::size_t > out;
        for ( const auto& pin : _ad.node( n ).out_pins )
            for ( auto i : _ad.out_indices( n ) )
                if ( tr( i ).out_pin == pin.name )
                    out.push_back( i );
        return out;
    }

    // Guard the next visit of decision d takes.
    std::string choose( std::size_t d )
    {
        const auto& name = _ad.node( d ).name;
        auto options = branches( d );
        if ( options.empty() )
            throw ModelError( "decision '" + name + "' has no outgoing transition" );
        auto visit = _visits[ name ]++;
        if ( auto it = _sc.decisions.find( name ); it != _sc.decisions.end() && !it->second.empty() )
        {
            const auto& g = it->second[ visit % it->second.size() ];
            for ( auto i : options )
                if ( _ad.guard_of( tr( i ) ) == g )
                    return g;
            throw ModelError( "decision '" + name + "' has no branch guarded by '" + g + "'" );
        }
        return _ad.guard_of( tr( options[ ( _sc.seed + visit ) % options.size() ] ) );
    }

    int duration( const std::string& node )
    {
        auto firing = _firings[ node ]++;
        if ( auto it = _sc.durations.find( node ); it != _sc.durations.end() && !it->second.empty() )
            return std::clamp( it->second[ firing % it->second.size() ], 1, max_duration );
        return 1 + static_cast< int >( _rng() % 3 );
    }

    SystemState apply( const SystemState& s, const Event& ev, std::string& label )
    {
        SystemState next = s;
        const auto& node = _ad.node( ev.node );
        const auto& oid = node.kind == NodeKind::action ? _inst.oid.at( node.name ) : Oid{};
        switch ( ev.kind )
        {
        case Event::deliver:
        {
            auto ctl = PinController::load( s, oid, node );
            bool fire = true;
            label = "deliver " + node.name;
            if ( !ev.pin.empty() )
            {
                label += "." + ev.pin;
                auto feeding = pin_inputs( ev.node, ev.pin );
                fire = ctl.deliver( ev.pin, to_string( buf( s, feeding.front() ).front() ) );
            }
            ctl.store( next, oid, node );
            if ( !fire )
                break;
            for ( auto i : _ad.in_indices( ev.node ) )
                pop( next, i );
            Frame f{ oid, _inst.meth.at( node.name ), ctl.fired(), meth_pc( _inst.meth.at( node.name ), 0 ),
                     _inst.caller_of( _ad, node.name ) };
            f.vars[ "$steps" ] = std::int64_t{ duration( node.name ) };
            auto th = free_thread( s );
            next.control[ oid ][ th ].push_back( std::move( f ) );
            label += "; start " + node.name + " on " + th;
            break;
        }
        case Event::progress:
        {
            auto th = *running_thread( s, ev.node );
            auto& stack = next.control[ oid ][ th ];
            stack = incPC( stack, _inst.universe.pcOf( stack.back().method ) );
            label = "progress " + node.name;
            break;
        }
        case Event::finish:
        {
            auto th = *running_thread( s, ev.node );
            next.control[ oid ][ th ].pop_back();
            for ( auto i : _ad.out_indices( ev.node ) )
            {
                push( next, i, call_token( i, node.name ) );
                if ( _ad.node( tr( i ).dst ).kind == NodeKind::decisionmerge )
                    next.data[ outcome_object ][ node.name ] = choose( _ad.node_index( tr( i ).dst ) );
            }
            label = "finish " + node.name;
            break;
        }
        case Event::fork:
        {
            TokenSeq taken;
            for ( auto i : _ad.in_indices( ev.node ) )
                taken.push_back( pop( next, i ) );
            const auto& outs = _ad.out_indices( ev.node );
            for ( std::size_t k = 0; k < outs.size(); ++k )
            {
                const Token* passing = taken.empty() ? nullptr : &taken[ std::min( k, taken.size() - 1 ) ];
                push( next, outs[ k ], pass_or_fresh( outs[ k ], passing, node.name ) );
            }
            label = "fire " + node.name;
            break;
        }
        case Event::decide:
        {
            const auto& ins = _ad.in_indices( ev.node );
            auto from = *std::find_if( ins.begin(), ins.end(), [ & ]( auto i ) { return !buf( s, i ).empty(); } );
            auto tok = pop( next, from );
            auto options = branches( ev.node );
            std::optional< std::size_t > chosen;
            for ( auto i : options )
                if ( evalV2( _ad.guard_of( tr( i ) ), s ) )
                {
                    chosen = i;
                    break;
                }
            if ( !chosen )
            {
                // nothing upstream recorded an outcome: decide here
                auto g = choose( ev.node );
                next.data[ outcome_object ][ node.name ] = g;
                for ( auto i : options )
                    if ( _ad.guard_of( tr( i ) ) == g )
                    {
                        chosen = i;
                        break;
                    }
            }
            push( next, *chosen, pass_or_fresh( *chosen, &tok, node.name ) );
            label = "decide " + node.name + " -> " + tr( *chosen ).out_pin;
            break;
        }
        }
        return next;
    }

    const ActivityDiagram& _ad;
    const MethodsInstance& _inst;
    const Scenario& _sc;
    std::mt19937_64 _rng;
    std::map< std::string, std::size_t > _visits;
    std::map< std::string, std::size_t > _firings;
};

} // namespace

V2Run simulate( const ActivityDiagram& ad, const MethodsInstance& inst, const Scenario& scenario )
{
    return Simulator( ad, inst, scenario ).run();
}

std::optional< std::string > check_two_phase( const VariationBinding& b, const Trace& trace )
{
    const auto& ad = b.ad();
    if ( trace.states.empty() )
        return std::nullopt;
    for ( const auto& n : ad.nodes() )
    {
        if ( n.kind != NodeKind::action )
            continue;
        bool running = b.executing( n, trace.states.front() );
        for ( std::size_t j = 0; j + 1 < trace.states.size(); ++j )
        {
            const auto& s = trace.states[ j ];
            const auto& s2 = trace.states[ j + 1 ];
            auto where = n.name + " at step " + std::to_string( j );
            if ( b.executing( n, s ) != running )
                return where + ": execution flag out of phase";
            if ( stutter( b, n, s, s2 ) )
                continue;
            if ( startAct( b, n, s, s2 ) )
            {
                if ( running )
                    return where + ": started twice";
                running = true;
            }
            else if ( finishAct( b, n, s, s2 ) )
            {
                if ( !running )
                    return where + ": finished without start";
                running = false;
            }
            else
                return where + ": neither start nor finish";
        }
    }
    return std::nullopt;
}

std::optional< std::string > check_role_constraint( const ActivityDiagram& ad, const MethodsInstance& inst,
                                                    const Trace& trace )
{
    std::map< MethodName, std::string > node_of;
    for ( const auto& [ node, m ] : inst.meth )
        node_of[ m ] = node;
    const auto& u = inst.universe;
    for ( std::size_t j = 0; j < trace.states.size(); ++j )
        for ( const auto& [ oid, stacks ] : trace.states[ j ].control )
            for ( const auto& [ th, stack ] : stacks )
                for ( const auto& f : stack )
                {
                    auto it = node_of.find( f.method );
                    if ( it == node_of.end() )
                        continue;
                    auto where = "state " + std::to_string( j ) + ", method " + f.method + " on " + oid;
                    try
                    {
                        if ( u.classOf( oid ) != u.definedIn( f.method ) )
                            return where + ": object class " + u.classOf( oid ) + " does not define it";
                        if ( inst.sub_variant &&
                             u.definedIn( f.method ) != u.classOf( inst.rrep.at( ad.role_of( it->second ) ) ) )
                            return where + ": not defined by the class of its role";
                    }
                    catch ( const ModelError& e )
                    {
                        return where + ": " + e.what();
                    }
                }
    return std::nullopt;
}

} // namespace adsem

#include "adsem/variant_atomic.hpp"

#include "adsem/validate.hpp"

#include <charconv>

namespace adsem
{

MethodExecutionInstance make_instance( const ActivityDiagram& ad, std::vector< VarName > params )
{
    MethodExecutionInstance inst;
    inst.meth = ad.name();
    inst.params = std::move( params );
    for ( std::size_t i = 0; i < ad.nodes().size(); ++i )
        inst.pcMap[ ad.node( i ).name ] = "pc" + std::to_string( i );
    return inst;
}

std::vector< ProgramCounter > pc_order( const ActivityDiagram& ad, const MethodExecutionInstance& inst )
{
    std::vector< ProgramCounter > out;
    for ( const auto& n : ad.nodes() )
        out.push_back( inst.pcMap.at( n.name ) );
    return out;
}

Universe universe_of( const ActivityDiagram& ad, const MethodExecutionInstance& inst )
{
    const ClassName owner = inst.meth + "Class";
    Universe u;
    u.oids = { inst.caller, inst.callee };
    u.classes = { "Caller", owner };
    u.methods = { inst.meth };
    u.threads = { inst.thread };
    u.class_of = { { inst.caller, "Caller" }, { inst.callee, owner } };
    u.defined_in = { { inst.meth, owner } };
    u.pc_of = { { inst.meth, pc_order( ad, inst ) } };
    return u;
}

std::optional< std::size_t > node_at_pc( const ActivityDiagram& ad, const MethodExecutionInstance& inst,
                                         const SystemState& s )
{
    const auto* f = top_frame( s, inst.callee, inst.thread );
    if ( !f )
        return std::nullopt;
    for ( std::size_t i = 0; i < ad.nodes().size(); ++i )
        if ( inst.pcMap.at( ad.node( i ).name ) == f->pc )
            return i;
    return std::nullopt;
}

TokenSeq bufStateV1( const ActivityDiagram& ad, const MethodExecutionInstance& inst, const Transition& t,
                     const SystemState& s )
{
    const auto* f = top_frame( s, inst.callee, inst.thread );
    if ( !f || f->pc != inst.pcMap.at( t.dst ) )
        return {};
    if ( ad.in_indices( ad.node_index( t.dst ) ).size() == 1 )
        return { Token::control() };
    auto via = f->vars.find( via_var );
    if ( via != f->vars.end() && via->second == Value( t.key() ) )
        return { Token::control() };
    return {};
}

bool elemsV1( const PinType& type, const Token& tok )
{
    if ( type.is_data() )
        throw BindingError( "data pin type " + type.describe() + " outside the atomic-action variant" );
    return type.is_top() || tok.is_control();
}

Stack follow( const ActivityDiagram&, const MethodExecutionInstance& inst, const Transition& t, Stack stack )
{
    if ( stack.empty() )
        throw ModelError( "pc move on an empty stack" );
    stack.back().pc = inst.pcMap.at( t.dst );
    stack.back().vars[ via_var ] = t.key();
    return stack;
}

VariationBinding bindingV1( std::shared_ptr< const ActivityDiagram > ad, const MethodExecutionInstance& inst )
{
    VariationBinding b;
    b.diagram = ad;
    b.executing = []( const Node&, const SystemState& ) { return false; };
    b.elems = elemsV1;
    b.bufState = [ ad, inst ]( const Transition& t, const SystemState& s ) { return bufStateV1( *ad, inst, t, s ); };
    b.eval = []( const std::string&, const SystemState& ) { return true; };
    derive_cons_prod( b );
    return b;
}

namespace
{

const Transition& unique_successor( const ActivityDiagram& ad, std::size_t node )
{
    const auto& outs = ad.out_indices( node );
    if ( outs.size() != 1 )
        throw ModelError( "node '" + ad.node( node ).name + "' has " + std::to_string( outs.size() ) +
                          " outgoing transitions, expected one" );
    return ad.transition( outs.front() );
}

const Store& attrs_of( const SystemState& s, const Oid& oid )
{
    static const Store none;
    auto it = s.data.find( oid );
    return it == s.data.end() ? none : it->second;
}

// Outgoing transitions of a decision in pin declaration order.
std::vector< std::size_t > branches( const ActivityDiagram& ad, std::size_t node )
{
    std::vector< std::size_t > out;
    for ( const auto& pin : ad.node( node ).out_pins )
        for ( auto i : ad.out_indices( node ) )
            if ( ad.transition( i ).out_pin == pin.name )
                out.push_back( i );
    return out;
}

bool guard_holds( const ActivityDiagram& ad, const Transition& t, const SystemState& s,
                  const MethodExecutionInstance& inst )
{
    const auto* f = top_frame( s, inst.callee, inst.thread );
    return eval_guard( *parse_guard( ad.guard_of( t ) ), attrs_of( s, inst.callee ), f->vars );
}

SystemState moved( const ActivityDiagram& ad, const MethodExecutionInstance& inst, const Transition& t,
                   SystemState s )
{
    auto& stack = s.control[ inst.callee ][ inst.thread ];
    stack = follow( ad, inst, t, stack );
    return s;
}

} // namespace

V1Run runMethod( const ActivityDiagram& ad, const MethodExecutionInstance& inst, const Store& attrs,
                 const Store& params, std::size_t maxSteps )
{
    for ( const auto& d : validate( ad, Profile::variant1 ) )
        if ( d.severity == Severity::error )
            throw DiagramError( "not an atomic-action diagram: " + d.message );

    std::optional< std::size_t > initial;
    for ( std::size_t i = 0; i < ad.nodes().size() && !initial; ++i )
        if ( ad.node( i ).kind == NodeKind::initial )
            initial = i;
    if ( !initial )
        throw DiagramError( "diagram '" + ad.name() + "' has no initial node" );
    const auto& entry = unique_successor( ad, *initial );

    Frame frame{ inst.callee, inst.meth, {}, {}, inst.caller };
    for ( const auto& p : inst.params )
    {
        auto it = params.find( p );
        if ( it == params.end() )
            throw ModelError( "missing parameter '" + p + "'" );
        frame.vars[ p ] = it->second;
    }

    SystemState s;
    s.data[ inst.callee ] = attrs;
    s.control[ inst.callee ][ inst.thread ] = follow( ad, inst, entry, { frame } );

    V1Run run;
    run.trace.states.push_back( s );
    for ( std::size_t steps = 0;; ++steps )
    {
        const auto& cur = run.trace.states.back();
        auto at = node_at_pc( ad, inst, cur );
        if ( !at )
            throw ModelError( "pc outside the method body" );
        const auto& node = ad.node( *at );
        if ( node.kind == NodeKind::final )
        {
            auto popped = cur;
            popped.control[ inst.callee ][ inst.thread ].pop_back();
            run.returned = std::move( popped );
            break;
        }
        if ( steps == maxSteps )
        {
            run.trace.truncated = true;
            break;
        }

        SystemState next;
        if ( node.kind == NodeKind::action )
        {
            const auto& t = unique_successor( ad, *at );
            next = apply_stmt( parse_stmt( node.effect ), inst.callee, inst.thread, cur,
                               [ & ]( const Stack& st ) { return follow( ad, inst, t, st ); } );
        }
        else if ( node.kind == NodeKind::decisionmerge )
        {
            std::optional< std::size_t > chosen;
            for ( auto i : branches( ad, *at ) )
                if ( guard_holds( ad, ad.transition( i ), cur, inst ) )
                {
                    chosen = i;
                    break;
                }
            if ( !chosen )
                throw ModelError( "stuck-decision at '" + node.name + "'" );
            next = moved( ad, inst, ad.transition( *chosen ), cur );
        }
        else
            throw ModelError( "pc at " + std::string( to_string( node.kind ) ) + " node '" + node.name + "'" );

        run.firings.push_back( node.name );
        run.trace.states.push_back( std::move( next ) );
    }
    run.terminal = attrs_of( run.trace.states.back(), inst.callee );
    return run;
}

std::optional< std::size_t > effect_violation( const ActivityDiagram& ad, const MethodExecutionInstance& inst,
                                               const Trace& trace )
{
    for ( std::size_t j = 0; j + 1 < trace.states.size(); ++j )
    {
        const auto& s = trace.states[ j ];
        const auto& s2 = trace.states[ j + 1 ];
        if ( s == s2 )
            continue;
        auto at = node_at_pc( ad, inst, s );
        if ( !at )
            return j;
        const auto& node = ad.node( *at );
        bool ok = false;
        try
        {
            if ( node.kind == NodeKind::action )
            {
                const auto& t = unique_successor( ad, *at );
                ok = semStmt( parse_stmt( node.effect ), inst.callee, inst.thread, s, s2,
                              [ & ]( const Stack& st ) { return follow( ad, inst, t, st ); } );
            }
            else if ( node.kind == NodeKind::decisionmerge )
            {
                for ( auto i : branches( ad, *at ) )
                {
                    const auto& t = ad.transition( i );
                    if ( guard_holds( ad, t, s, inst ) && moved( ad, inst, t, s ) == s2 )
                    {
                        ok = true;
                        break;
                    }
                }
            }
        }
        catch ( const ModelError& )
        {
            ok = false;
        }
        catch ( const ActionError& )
        {
            ok = false;
        }
        if ( !ok )
            return j;
    }
    return std::nullopt;
}

bool checkEffectConstraint( const ActivityDiagram& ad, const MethodExecutionInstance& inst, const Trace& trace )
{
    return !effect_violation( ad, inst, trace );
}

std::pair< VarName, Value > parse_assignment( const std::string& text )
{
    auto eq = text.find( '=' );
    if ( eq == std::string::npos || eq == 0 )
        throw ActionError( "expected name=value, got '" + text + "'" );
    auto name = text.substr( 0, eq );
    auto raw = text.substr( eq + 1 );
    std::int64_t n = 0;
    auto [ ptr, ec ] = std::from_chars( raw.data(), raw.data() + raw.size(), n );
    if ( ec == std::errc() && ptr == raw.data() + raw.size() && !raw.empty() )
        return { name, n };
    if ( raw == "true" || raw == "false" )
        return { name, raw == "true" };
    return { name, raw };
}

} // namespace adsem

#include "adsem/semantics.hpp"

#include <algorithm>

namespace adsem
{

FifoDelta fifo_delta( const TokenSeq& before, const TokenSeq& after )
{
    for ( std::size_t c = 0; c <= before.size(); ++c )
    {
        std::size_t rest = before.size() - c;
        if ( rest > after.size() )
            continue;
        if ( std::equal( before.begin() + c, before.end(), after.begin() ) )
            return { TokenSeq( before.begin(), before.begin() + c ), TokenSeq( after.begin() + rest, after.end() ) };
    }
    return { before, after }; // unreachable: c == before.size() always matches
}

void derive_cons_prod( VariationBinding& binding )
{
    auto buf = binding.bufState;
    binding.cons = [ buf ]( const Transition& t, const SystemState& s, const SystemState& s2 ) {
        return fifo_delta( buf( t, s ), buf( t, s2 ) ).consumed;
    };
    binding.prod = [ buf ]( const Transition& t, const SystemState& s, const SystemState& s2 ) {
        return fifo_delta( buf( t, s ), buf( t, s2 ) ).produced;
    };
}

bool bufEmpty( const VariationBinding& b, const Transition& t, const SystemState& s )
{
    return b.bufState( t, s ).empty();
}

bool bufNonEmpty( const VariationBinding& b, const Transition& t, const SystemState& s )
{
    return !bufEmpty( b, t, s );
}

bool buffer_typed( const VariationBinding& b, const Transition& t, const SystemState& s )
{
    const auto& ad = b.ad();
    for ( const auto& tok : b.bufState( t, s ) )
        if ( !b.elems( ad.in_type( t ), tok ) || !b.elems( ad.out_type( t ), tok ) )
            return false;
    return true;
}

namespace
{

template < typename Pred >
bool all_in( const VariationBinding& b, const Node& n, Pred pred )
{
    const auto& ad = b.ad();
    for ( auto i : ad.in_indices( ad.node_index( n.name ) ) )
        if ( !pred( ad.transition( i ) ) )
            return false;
    return true;
}

template < typename Pred >
bool all_out( const VariationBinding& b, const Node& n, Pred pred )
{
    const auto& ad = b.ad();
    for ( auto i : ad.out_indices( ad.node_index( n.name ) ) )
        if ( !pred( ad.transition( i ) ) )
            return false;
    return true;
}

bool no_consumption( const VariationBinding& b, const Node& n, const SystemState& s, const SystemState& s2 )
{
    return all_in( b, n, [ & ]( const Transition& t ) { return b.cons( t, s, s2 ).empty(); } );
}

bool no_production( const VariationBinding& b, const Node& n, const SystemState& s, const SystemState& s2 )
{
    return all_out( b, n, [ & ]( const Transition& t ) { return b.prod( t, s, s2 ).empty(); } );
}

bool one_consumed_each( const VariationBinding& b, const Node& n, const SystemState& s, const SystemState& s2 )
{
    return all_in( b, n, [ & ]( const Transition& t ) { return b.cons( t, s, s2 ).size() == 1; } );
}

bool one_produced_each( const VariationBinding& b, const Node& n, const SystemState& s, const SystemState& s2 )
{
    return all_out( b, n, [ & ]( const Transition& t ) { return b.prod( t, s, s2 ).size() == 1; } );
}

// Shared by instant actions and fork/join nodes; the two formulas coincide.
bool consume_all_produce_all( const VariationBinding& b, const Node& n, const SystemState& s,
                              const SystemState& s2 )
{
    return one_consumed_each( b, n, s, s2 ) && one_produced_each( b, n, s, s2 );
}

} // namespace

bool isInitial( const VariationBinding& b, const SystemState& s )
{
    const auto& ad = b.ad();
    bool some_initial = false;
    for ( const auto& n : ad.nodes() )
    {
        if ( n.kind == NodeKind::initial )
        {
            if ( !some_initial &&
                 all_out( b, n, [ & ]( const Transition& t ) { return bufNonEmpty( b, t, s ); } ) )
                some_initial = true;
            continue;
        }
        if ( !all_out( b, n, [ & ]( const Transition& t ) { return bufEmpty( b, t, s ); } ) ||
             b.executing( n, s ) )
            return false;
    }
    return some_initial;
}

bool isFinal( const VariationBinding& b, const SystemState& s )
{
    const auto& ad = b.ad();
    bool some_final = false;
    for ( const auto& n : ad.nodes() )
    {
        if ( n.kind == NodeKind::final )
        {
            if ( !some_final &&
                 !all_in( b, n, [ & ]( const Transition& t ) { return bufEmpty( b, t, s ); } ) )
                some_final = true;
            continue;
        }
        if ( !all_in( b, n, [ & ]( const Transition& t ) { return bufEmpty( b, t, s ); } ) ||
             b.executing( n, s ) )
            return false;
    }
    return some_final;
}

bool stutter( const VariationBinding& b, const Node& n, const SystemState& s, const SystemState& s2 )
{
    return b.executing( n, s ) == b.executing( n, s2 ) && no_consumption( b, n, s, s2 ) &&
           no_production( b, n, s, s2 );
}

bool startAct( const VariationBinding& b, const Node& n, const SystemState& s, const SystemState& s2 )
{
    return !b.executing( n, s ) && b.executing( n, s2 ) && one_consumed_each( b, n, s, s2 ) &&
           no_production( b, n, s, s2 );
}

bool finishAct( const VariationBinding& b, const Node& n, const SystemState& s, const SystemState& s2 )
{
    return b.executing( n, s ) && !b.executing( n, s2 ) && one_produced_each( b, n, s, s2 ) &&
           no_consumption( b, n, s, s2 );
}

bool stepInst( const VariationBinding& b, const Node& n, const SystemState& s, const SystemState& s2 )
{
    return consume_all_produce_all( b, n, s, s2 );
}

bool stepForkJoin( const VariationBinding& b, const Node& n, const SystemState& s, const SystemState& s2 )
{
    return consume_all_produce_all( b, n, s, s2 );
}

bool stepDecisionMerge( const VariationBinding& b, const Node& n, const SystemState& s, const SystemState& s2 )
{
    const auto& ad = b.ad();
    auto idx = ad.node_index( n.name );

    std::size_t consuming = 0;
    for ( auto i : ad.in_indices( idx ) )
    {
        auto c = b.cons( ad.transition( i ), s, s2 ).size();
        if ( c > 1 )
            return false;
        consuming += c;
    }
    if ( consuming != 1 )
        return false;

    std::size_t producing = 0;
    for ( auto i : ad.out_indices( idx ) )
    {
        const auto& t = ad.transition( i );
        auto p = b.prod( t, s, s2 ).size();
        if ( p > 1 )
            return false;
        if ( p == 1 )
        {
            if ( !b.eval( ad.guard_of( t ), s2 ) )
                return false;
            ++producing;
        }
    }
    return producing == 1;
}

bool step( const VariationBinding& b, const Node& n, const SystemState& s, const SystemState& s2 )
{
    if ( stutter( b, n, s, s2 ) )
        return true;
    switch ( n.kind )
    {
    case NodeKind::action: return startAct( b, n, s, s2 ) || finishAct( b, n, s, s2 ) || stepInst( b, n, s, s2 );
    case NodeKind::forkjoin: return stepForkJoin( b, n, s, s2 );
    case NodeKind::decisionmerge: return stepDecisionMerge( b, n, s, s2 );
    case NodeKind::initial:
    case NodeKind::final: return false;
    }
    return false;
}

std::string step_predicate_name( NodeKind kind )
{
    switch ( kind )
    {
    case NodeKind::action: return "startAct|finishAct|stepInst";
    case NodeKind::forkjoin: return "stepForkJoin";
    case NodeKind::decisionmerge: return "stepDecisionMerge";
    case NodeKind::initial:
    case NodeKind::final: return "stutter";
    }
    return "step";
}

bool checkBufferLaw( const VariationBinding& b, const Transition& t, const SystemState& s, const SystemState& s2 )
{
    auto before = b.bufState( t, s );
    auto after = b.bufState( t, s2 );
    auto consumed = b.cons( t, s, s2 );
    auto produced = b.prod( t, s, s2 );
    if ( consumed.size() > before.size() || !std::equal( consumed.begin(), consumed.end(), before.begin() ) )
        return false;
    TokenSeq expected( before.begin() + consumed.size(), before.end() );
    expected.insert( expected.end(), produced.begin(), produced.end() );
    return expected == after;
}

const char* to_string( Verdict::Kind kind )
{
    switch ( kind )
    {
    case Verdict::Kind::satisfied: return "Satisfied";
    case Verdict::Kind::satisfied_so_far: return "SatisfiedSoFar";
    case Verdict::Kind::no_initial_found: return "NoInitialFound";
    case Verdict::Kind::violated: return "Violated";
    }
    return "?";
}

nlohmann::json to_json( const Verdict& v )
{
    nlohmann::json j{ { "verdict", to_string( v.kind ) } };
    if ( v.kind != Verdict::Kind::no_initial_found )
        j[ "initial" ] = v.initial;
    if ( v.kind == Verdict::Kind::violated )
    {
        j[ "index" ] = v.index;
        j[ "node" ] = v.node;
        j[ "predicate" ] = v.predicate;
    }
    return j;
}

std::ostream& operator<<( std::ostream& os, const Verdict& v )
{
    os << to_string( v.kind );
    if ( v.kind == Verdict::Kind::violated )
        os << " at step " << v.index << " (node " << v.node << ", " << v.predicate << ")";
    return os;
}

Verdict satisfies( const Trace& trace, const VariationBinding& binding )
{
    const auto& states = trace.states;
    const auto& ad = binding.ad();

    std::size_t start = states.size();
    for ( std::size_t i = 0; i < states.size(); ++i )
        if ( isInitial( binding, states[ i ] ) )
        {
            start = i;
            break;
        }
    if ( start == states.size() )
        return { Verdict::Kind::no_initial_found, 0, {}, {}, 0 };

    bool final_now = isFinal( binding, states[ start ] );
    for ( std::size_t j = start; j + 1 < states.size(); ++j )
    {
        const auto& s = states[ j ];
        const auto& s2 = states[ j + 1 ];
        bool final_next = isFinal( binding, s2 );
        if ( final_now && !final_next )
        {
            std::string culprit;
            for ( const auto& n : ad.nodes() )
                if ( n.kind == NodeKind::final &&
                     !all_in( binding, n, [ & ]( const Transition& t ) { return bufEmpty( binding, t, s ); } ) )
                {
                    culprit = n.name;
                    break;
                }
            return { Verdict::Kind::violated, j, culprit, final_persistence, start };
        }
        for ( const auto& n : ad.nodes() )
            if ( !step( binding, n, s, s2 ) )
                return { Verdict::Kind::violated, j, n.name, step_predicate_name( n.kind ), start };
        final_now = final_next;
    }
    return { trace.truncated ? Verdict::Kind::satisfied_so_far : Verdict::Kind::satisfied, 0, {}, {}, start };
}

} // namespace adsem

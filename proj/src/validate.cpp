#include "adsem/validate.hpp"

#include <set>

namespace adsem
{

const char* to_string( Profile profile )
{
    return profile == Profile::general ? "general" : "variant1";
}

std::optional< Profile > profile_from_string( const std::string& text )
{
    if ( text == "general" )
        return Profile::general;
    if ( text == "variant1" )
        return Profile::variant1;
    return std::nullopt;
}

std::vector< Diagnostic > validate( const ActivityDiagram& ad, Profile profile )
{
    std::vector< Diagnostic > out;
    auto report = [ & ]( Severity sev, std::string code, std::string loc, std::string msg ) {
        out.push_back( { sev, std::move( code ), std::move( loc ), std::move( msg ), 0, 0 } );
    };

    bool any_initial = false;
    for ( std::size_t i = 0; i < ad.nodes().size(); ++i )
    {
        const auto& n = ad.node( i );
        if ( n.kind == NodeKind::initial )
        {
            any_initial = true;
            if ( !n.in_pins.empty() )
                report( Severity::error, "initial-has-inputs", n.name, "initial nodes take no input pins" );
        }
        if ( n.kind == NodeKind::final && !n.out_pins.empty() )
            report( Severity::error, "final-has-outputs", n.name, "final nodes have no output pins" );

        for ( const auto& p : n.out_pins )
            if ( p.guard != default_guard && n.kind != NodeKind::decisionmerge )
                report( Severity::warning, "guard-ignored", n.name + "." + p.name,
                        "guard \"" + p.guard + "\" is only consulted on decision/merge nodes" );

        if ( profile != Profile::variant1 )
            continue;
        if ( n.kind == NodeKind::forkjoin )
            report( Severity::error, "forkjoin-excluded", n.name, "fork/join nodes need more than one thread" );
        if ( n.role != default_role )
            report( Severity::error, "role-excluded", n.name, "roles are not part of a single method body" );
        for ( const auto* pins : { &n.in_pins, &n.out_pins } )
            for ( const auto& p : *pins )
                if ( !p.type.is_control() )
                    report( Severity::error, "data-pin-type", n.name + "." + p.name,
                            "pin type " + p.type.describe() + " is not allowed; only control flow is modelled" );
        if ( n.kind != NodeKind::decisionmerge && n.out_pins.size() > 1 )
            report( Severity::error, "multiple-outputs", n.name,
                    "only decision nodes may have more than one output pin" );
    }
    if ( !any_initial )
        report( Severity::warning, "no-initial", ad.name(), "diagram has no initial node" );

    std::set< Transition > seen;
    for ( const auto& t : ad.transitions() )
    {
        if ( !seen.insert( t ).second )
            report( Severity::error, "duplicate-transition", t.key(), "transition declared twice" );
        if ( !compatible( ad.out_type( t ), ad.in_type( t ) ) )
            report( Severity::error, "incompatible-pin-types", t.key(),
                    "output type " + ad.out_type( t ).describe() + " does not meet input type " +
                        ad.in_type( t ).describe() );
        if ( t.src == t.dst )
            report( Severity::warning, "self-loop", t.key(),
                    "consumption and production on the same buffer cannot be told apart" );
    }
    return out;
}

} // namespace adsem

#include "adsem/cli.hpp"

#include "adsem/dot.hpp"
#include "adsem/parser.hpp"
#include "adsem/semantics.hpp"
#include "adsem/token_game.hpp"
#include "adsem/trace_file.hpp"
#include "adsem/validate.hpp"
#include "adsem/variant_atomic.hpp"
#include "adsem/variant_methods.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace adsem
{

namespace
{

struct Exit
{
    int code;
};

nlohmann::json to_json( const Diagnostic& d )
{
    return { { "severity", to_string( d.severity ) }, { "code", d.code },     { "location", d.location },
             { "message", d.message },                { "line", d.line },     { "column", d.column } };
}

nlohmann::json to_json( const Store& store )
{
    auto j = nlohmann::json::object();
    for ( const auto& [ k, v ] : store )
        j[ k ] = to_json( v );
    return j;
}

std::shared_ptr< const ActivityDiagram > load( const std::string& path, std::ostream& err )
{
    auto r = parse_file( path );
    for ( const auto& d : r.diagnostics )
        if ( d.severity == Severity::error )
        {
            err << path << ": " << d << "\n";
            if ( d.code == "io" )
                throw Exit{ exit_usage };
        }
    if ( !r.ok() )
        throw Exit{ exit_failure };
    return std::make_shared< const ActivityDiagram >( std::move( *r.diagram ) );
}

void emit_trace( const TraceFile& file, const std::string& out_path, std::ostream& out )
{
    if ( out_path.empty() )
    {
        write_trace( out, file );
        return;
    }
    std::ofstream os( out_path );
    if ( !os )
        throw std::ios_base::failure( "cannot write '" + out_path + "'" );
    write_trace( os, file );
}

std::optional< std::uint64_t > env_seed()
{
    const char* text = std::getenv( "ADSEM_SEED" );
    if ( !text || !*text )
        return std::nullopt;
    try
    {
        return std::stoull( text );
    }
    catch ( const std::exception& )
    {
        throw std::invalid_argument( std::string( "ADSEM_SEED is not a number: " ) + text );
    }
}

ExploreOptions explore_options( const std::string& mode, const std::string& actions )
{
    ExploreOptions opt;
    auto m = step_mode_from_string( mode );
    auto a = action_mode_from_string( actions );
    if ( !m || !a )
        throw std::invalid_argument( "unknown --mode or --actions value" );
    opt.mode = *m;
    opt.actions = *a;
    return opt;
}

std::string describe( const ActivityDiagram& ad, const Configuration& c )
{
    std::ostringstream os;
    bool any = false;
    for ( std::size_t i = 0; i < c.buffers.size(); ++i )
        if ( !c.buffers[ i ].empty() )
        {
            os << ( any ? "  " : "" ) << ad.transition( i ).key() << " " << to_string( c.buffers[ i ] );
            any = true;
        }
    for ( std::size_t n = 0; n < c.executing.size(); ++n )
        if ( c.executing[ n ] )
        {
            os << ( any ? "  " : "" ) << ad.node( n ).name << " running";
            any = true;
        }
    return any ? os.str() : "(empty)";
}

struct Flags
{
    bool human = false;
    std::string file, second, profile = "general", mode = "interleaving", actions = "instant", out, dot,
                                variant;
    std::size_t bound = 0;
    std::optional< std::uint64_t > seed;
    std::size_t max_steps = 10000;
    std::vector< std::string > assignments, params;
};

int cmd_validate( const Flags& f, std::ostream& out, std::ostream& err )
{
    auto profile = profile_from_string( f.profile );
    if ( !profile )
        throw std::invalid_argument( "unknown profile '" + f.profile + "'" );
    auto r = parse_file( f.file );
    auto diags = r.diagnostics;
    for ( const auto& d : diags )
        if ( d.code == "io" )
        {
            err << f.file << ": " << d << "\n";
            return exit_usage;
        }
    if ( r.ok() )
        for ( auto& d : validate( *r.diagram, *profile ) )
            diags.push_back( std::move( d ) );
    bool clean = r.ok() && !has_errors( diags );

    if ( f.human )
    {
        for ( const auto& d : diags )
            out << f.file << ": " << d << "\n";
        out << ( clean ? "ok" : "invalid" ) << " (" << to_string( *profile ) << ")\n";
    }
    else
    {
        auto arr = nlohmann::json::array();
        for ( const auto& d : diags )
            arr.push_back( to_json( d ) );
        out << nlohmann::json{ { "file", f.file }, { "profile", to_string( *profile ) }, { "ok", clean },
                               { "diagnostics", arr } }
                   .dump()
            << "\n";
    }
    return clean ? exit_ok : exit_failure;
}

int cmd_render( const Flags& f, std::ostream& out, std::ostream& err )
{
    out << export_dot( *load( f.file, err ) );
    return exit_ok;
}

int cmd_simulate( const Flags& f, std::ostream& out, std::ostream& err )
{
    auto ad = load( f.file, err );
    auto opt = explore_options( f.mode, f.actions );
    auto seed = f.seed ? *f.seed : env_seed().value_or( 0 );
    auto steps = f.bound ? f.bound : 1000;
    auto run = random_run( *ad, opt, seed, steps );

    TraceFile file;
    file.header = { ad->name(),
                    "token",
                    { { "mode", f.mode }, { "actions", f.actions }, { "seed", seed } },
                    !successors( *ad, run.back(), opt ).empty() };
    if ( f.human )
    {
        for ( std::size_t k = 0; k < run.size(); ++k )
            out << k << ": " << describe( *ad, run[ k ] ) << "\n";
        out << ( is_final_config( *ad, run.back() ) ? "final" : file.header.truncated ? "cut" : "deadlock" )
            << "\n";
        return exit_ok;
    }
    for ( const auto& c : run )
        file.lines.push_back( to_json( *ad, c ) );
    emit_trace( file, f.out, out );
    return exit_ok;
}

int cmd_reach( const Flags& f, std::ostream& out, std::ostream& err )
{
    auto ad = load( f.file, err );
    auto opt = explore_options( f.mode, f.actions );
    auto graph = reachable( *ad, opt, f.bound ? f.bound : default_bound );
    auto a = analyze( *ad, graph );
    if ( !f.dot.empty() )
    {
        std::ofstream os( f.dot );
        if ( !os )
            throw std::ios_base::failure( "cannot write '" + f.dot + "'" );
        os << export_dot( *ad, graph );
    }
    if ( f.human )
    {
        out << ad->name() << " (" << f.mode << ", " << f.actions << ")\n"
            << "configurations: " << a.configurations << ( a.truncated ? " (bound hit)" : "" ) << "\n"
            << "edges: " << a.edges << "\n"
            << "deadlocks: " << a.deadlocks.size() << "\n"
            << "all maximal final: " << ( a.all_maximal_final ? "yes" : "no" ) << "\n";
        for ( const auto& [ branch, hit ] : a.branch_covered )
            out << "branch " << branch << ": " << ( hit ? "reached" : "never" ) << "\n";
        for ( const auto& n : a.never_fired )
            out << "never fires: " << n << "\n";
        return exit_ok;
    }
    auto j = to_json( a );
    j[ "diagram" ] = ad->name();
    j[ "mode" ] = f.mode;
    j[ "actions" ] = f.actions;
    out << j.dump() << "\n";
    return exit_ok;
}

int cmd_run_v1( const Flags& f, std::ostream& out, std::ostream& err )
{
    auto ad = load( f.file, err );
    Store attrs, params;
    std::vector< VarName > names;
    for ( const auto& a : f.assignments )
        attrs.insert( parse_assignment( a ) );
    for ( const auto& p : f.params )
    {
        auto kv = parse_assignment( p );
        names.push_back( kv.first );
        params.insert( kv );
    }
    auto inst = make_instance( *ad, names );
    auto run = runMethod( *ad, inst, attrs, params, f.max_steps );

    if ( !f.out.empty() )
    {
        TraceFile file;
        file.header = { ad->name(), "v1", { { "params", names } }, run.trace.truncated };
        for ( const auto& s : run.trace.states )
            file.lines.push_back( to_json( s ) );
        emit_trace( file, f.out, out );
    }
    if ( f.human )
    {
        for ( const auto& [ k, v ] : run.terminal )
            out << k << " = " << to_string( v ) << "\n";
        out << run.firings.size() << " steps" << ( run.trace.truncated ? " (truncated)" : "" ) << "\n";
        return exit_ok;
    }
    out << nlohmann::json{ { "terminal", to_json( run.terminal ) },
                           { "steps", run.firings.size() },
                           { "firings", run.firings },
                           { "truncated", run.trace.truncated },
                           { "returned", run.returned.has_value() } }
               .dump()
        << "\n";
    return exit_ok;
}

nlohmann::json read_json_file( const std::string& path )
{
    std::ifstream is( path );
    if ( !is )
        throw std::ios_base::failure( "cannot read '" + path + "'" );
    try
    {
        return nlohmann::json::parse( is );
    }
    catch ( const nlohmann::json::parse_error& e )
    {
        throw ModelError( path + ": " + e.what() );
    }
}

int cmd_run_v2( const Flags& f, std::ostream& out, std::ostream& err )
{
    auto ad = load( f.file, err );
    auto sc = scenario_from_json( read_json_file( f.second ) );
    if ( auto s = env_seed() )
        sc.seed = *s;
    auto inst = make_methods_instance( *ad, sc.sub_variant, sc.caller );
    auto run = simulate( *ad, inst, sc );

    if ( !f.out.empty() )
    {
        TraceFile file;
        file.header = { ad->name(), "v2", to_json( sc ), run.trace.truncated };
        for ( const auto& s : run.trace.states )
            file.lines.push_back( to_json( s ) );
        emit_trace( file, f.out, out );
    }
    if ( f.human )
    {
        for ( const auto& e : run.events )
            out << e << "\n";
        out << ( run.stuck ? "stuck" : run.trace.truncated ? "truncated" : "done" ) << "\n";
    }
    else
        out << nlohmann::json{ { "steps", run.events.size() },
                               { "events", run.events },
                               { "seed", sc.seed },
                               { "stuck", run.stuck },
                               { "truncated", run.trace.truncated } }
                   .dump()
            << "\n";
    if ( run.stuck )
    {
        err << "stuck configuration after " << run.events.size() << " steps\n";
        return exit_failure;
    }
    return exit_ok;
}

int cmd_check_trace( const Flags& f, std::ostream& out, std::ostream& err )
{
    if ( f.variant != "token" && f.variant != "v1" && f.variant != "v2" )
        throw std::invalid_argument( "--variant must be token, v1 or v2" );
    auto ad = load( f.file, err );
    std::ifstream is( f.second );
    if ( !is )
        throw std::ios_base::failure( "cannot read '" + f.second + "'" );
    auto file = read_trace( is );
    if ( file.header.variant != f.variant )
        throw std::invalid_argument( "trace was written for variant '" + file.header.variant + "'" );
    if ( !file.header.diagram.empty() && file.header.diagram != ad->name() )
        throw std::invalid_argument( "trace belongs to diagram '" + file.header.diagram + "'" );

    Trace trace;
    trace.truncated = file.header.truncated;
    for ( const auto& line : file.lines )
        trace.states.push_back( f.variant == "token" && line.contains( "buffers" )
                                    ? lift( *ad, configuration_from_json( *ad, line ) )
                                    : state_from_json( line ) );

    nlohmann::json extra = nlohmann::json::object();
    VariationBinding binding;
    if ( f.variant == "token" )
        binding = token_binding( ad );
    else if ( f.variant == "v1" )
    {
        auto inst = make_instance( *ad, file.header.params.value( "params", std::vector< std::string >{} ) );
        binding = bindingV1( ad, inst );
        auto bad = effect_violation( *ad, inst, trace );
        extra[ "effectConstraint" ] = !bad;
        if ( bad )
            extra[ "effectViolationAt" ] = *bad;
    }
    else
    {
        auto sc = scenario_from_json( file.header.params );
        auto inst = make_methods_instance( *ad, sc.sub_variant, sc.caller );
        binding = bindingV2( ad, inst );
        auto phase = check_two_phase( binding, trace );
        auto role = check_role_constraint( *ad, inst, trace );
        extra[ "twoPhase" ] = phase ? nlohmann::json( *phase ) : nlohmann::json( true );
        extra[ "roleConstraint" ] = role ? nlohmann::json( *role ) : nlohmann::json( true );
    }

    auto verdict = satisfies( trace, binding );
    if ( f.human )
    {
        out << verdict << "\n";
        for ( const auto& [ k, v ] : extra.items() )
            out << k << ": " << ( v.is_string() ? v.get< std::string >() : v.dump() ) << "\n";
    }
    else
    {
        auto j = to_json( verdict );
        j.update( extra );
        out << j.dump() << "\n";
    }
    return verdict.accepted() ? exit_ok : exit_rejected;
}

} // namespace

int run_cli( const std::vector< std::string >& args, std::ostream& out, std::ostream& err )
{
    CLI::App app{ "activity diagram semantics toolkit", "adsem" };
    app.require_subcommand( 1 );
    Flags f;
    app.add_flag( "--human", f.human, "readable output instead of JSON" );

    auto* validate_cmd = app.add_subcommand( "validate", "check well-formedness" );
    validate_cmd->add_option( "file", f.file )->required();
    validate_cmd->add_option( "--profile", f.profile, "general or variant1" );

    auto* render_cmd = app.add_subcommand( "render", "DOT export" );
    render_cmd->add_option( "file", f.file )->required();

    auto* simulate_cmd = app.add_subcommand( "simulate", "seeded token-game run as JSON lines" );
    auto* reach_cmd = app.add_subcommand( "reach", "reachability analysis" );
    for ( auto* c : { simulate_cmd, reach_cmd } )
    {
        c->add_option( "file", f.file )->required();
        c->add_option( "--mode", f.mode, "interleaving or concurrent" );
        c->add_option( "--actions", f.actions, "instant or twoPhase" );
        c->add_option( "--bound", f.bound, "max steps (simulate) or configurations (reach)" );
    }
    simulate_cmd->add_option( "--seed", f.seed );
    simulate_cmd->add_option( "--out", f.out, "trace file (default stdout)" );
    reach_cmd->add_option( "--dot", f.dot, "write the reachability graph here" );

    auto* v1_cmd = app.add_subcommand( "run-v1", "run a diagram as one method" );
    v1_cmd->add_option( "file", f.file )->required();
    v1_cmd->add_option( "assignments", f.assignments, "initial attributes name=value" );
    v1_cmd->add_option( "--param", f.params, "method parameter name=value" );
    v1_cmd->add_option( "--max-steps", f.max_steps );
    v1_cmd->add_option( "--out", f.out, "trace file" );

    auto* v2_cmd = app.add_subcommand( "run-v2", "simulate actions as methods" );
    v2_cmd->add_option( "file", f.file )->required();
    v2_cmd->add_option( "scenario", f.second )->required();
    v2_cmd->add_option( "--out", f.out, "trace file" );

    auto* check_cmd = app.add_subcommand( "check-trace", "check a trace file against a diagram" );
    check_cmd->add_option( "file", f.file )->required();
    check_cmd->add_option( "trace", f.second )->required();
    check_cmd->add_option( "--variant", f.variant, "token, v1 or v2" )->required();

    for ( auto* c : app.get_subcommands( {} ) )
        c->fallthrough();

    try
    {
        std::vector< std::string > reversed( args.rbegin(), args.rend() );
        app.parse( reversed );
    }
    catch ( const CLI::ParseError& e )
    {
        app.exit( e, out, err );
        return e.get_exit_code() == 0 ? exit_ok : exit_usage;
    }

    try
    {
        if ( *validate_cmd )
            return cmd_validate( f, out, err );
        if ( *render_cmd )
            return cmd_render( f, out, err );
        if ( *simulate_cmd )
            return cmd_simulate( f, out, err );
        if ( *reach_cmd )
            return cmd_reach( f, out, err );
        if ( *v1_cmd )
            return cmd_run_v1( f, out, err );
        if ( *v2_cmd )
            return cmd_run_v2( f, out, err );
        return cmd_check_trace( f, out, err );
    }
    catch ( const Exit& e )
    {
        return e.code;
    }
    catch ( const std::invalid_argument& e )
    {
        err << "adsem: " << e.what() << "\n";
        return exit_usage;
    }
    catch ( const std::ios_base::failure& e )
    {
        err << "adsem: " << e.what() << "\n";
        return exit_usage;
    }
    catch ( const std::exception& e )
    {
        err << "adsem: " << e.what() << "\n";
        return exit_failure;
    }
}

} // namespace adsem

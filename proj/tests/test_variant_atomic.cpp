#include "configs.hpp"
#include "corpus.hpp"
#include "replay.hpp"

#include "adsem/variant_atomic.hpp"

#include <doctest.h>

using namespace adsem;

namespace
{

std::int64_t attr( const Store& s, const std::string& name )
{
    return std::get< std::int64_t >( s.at( name ) );
}

std::int64_t factorial( std::int64_t n )
{
    return n <= 1 ? 1 : n * factorial( n - 1 );
}

V1Run fac_run( std::int64_t n )
{
    auto ad = corpus( "fac.ad" );
    return runMethod( *ad, make_instance( *ad ), { { "n", n } } );
}

// callee "o" on thread "t" with one frame at pc "p1"
SystemState one_frame( Store attrs, Store locals )
{
    SystemState s;
    s.data[ "o" ] = std::move( attrs );
    s.control[ "o" ][ "t" ] = { Frame{ "o", "m", std::move( locals ), "p1", "c" } };
    return s;
}

const std::vector< ProgramCounter > linear{ "p1", "p2", "p3" };

PcAdvance inc()
{
    return []( const Stack& st ) { return incPC( st, linear ); };
}

std::size_t tokens( const VariationBinding& b, const SystemState& s )
{
    std::size_t n = 0;
    for ( const auto& t : b.ad().transitions() )
        n += b.bufState( t, s ).size();
    return n;
}

} // namespace

TEST_CASE( "action language" )
{
    CHECK( parse_stmt( "" ).kind == ActionStmt::Kind::skip );
    CHECK( parse_stmt( "skip" ).kind == ActionStmt::Kind::skip );
    auto set = parse_stmt( "res := res * n" );
    CHECK( set.kind == ActionStmt::Kind::set_attr );
    CHECK( set.target == "res" );
    CHECK( to_string( set ) == "res := res * n" );
    CHECK( parse_stmt( "local k := 2" ).kind == ActionStmt::Kind::set_local );

    Store attrs{ { "n", std::int64_t{ 3 } } };
    Store locals{ { "n", std::int64_t{ 10 } } };
    CHECK( eval_expr( *parse_stmt( "x := 2 + n * 3" ).expr, attrs, {} ) == 11 );
    CHECK( eval_expr( *parse_stmt( "x := (2 + n) * 3" ).expr, attrs, {} ) == 15 );
    CHECK( eval_expr( *parse_stmt( "x := n" ).expr, attrs, locals ) == 10 );
    CHECK( eval_expr( *parse_stmt( "x := -n − 1" ).expr, attrs, {} ) == -4 );

    CHECK( eval_guard( *parse_guard( "n > 1" ), attrs, {} ) );
    CHECK( eval_guard( *parse_guard( "n ≤ 3" ), attrs, {} ) );
    CHECK_FALSE( eval_guard( *parse_guard( "n ≠ 3" ), attrs, {} ) );
    CHECK( eval_guard( *parse_guard( "true" ), {}, {} ) );
    CHECK_FALSE( eval_guard( *parse_guard( "false" ), {}, {} ) );

    CHECK_THROWS_AS( (void)parse_stmt( "res := " ), ActionError );
    CHECK_THROWS_AS( (void)parse_guard( "n + 1" ), ActionError );
    CHECK_THROWS_AS( (void)eval_expr( *parse_stmt( "x := ghost" ).expr, attrs, {} ), ActionError );
    CHECK_THROWS_AS( (void)eval_expr( *parse_stmt( "x := b" ).expr, { { "b", true } }, {} ), ActionError );
}

TEST_CASE( "semStmt" )
{
    auto s = one_frame( { { "res", std::int64_t{ 6 } } }, { { "i", std::int64_t{ 4 } } } );
    auto stmt = parse_stmt( "res := res * i" );

    auto good = s;
    good.data[ "o" ][ "res" ] = std::int64_t{ 24 };
    good.control[ "o" ][ "t" ].back().pc = "p2";
    CHECK( semStmt( stmt, "o", "t", s, good, inc() ) );
    CHECK( apply_stmt( stmt, "o", "t", s, inc() ) == good );

    auto stale_pc = good;
    stale_pc.control[ "o" ][ "t" ].back().pc = "p1";
    CHECK_FALSE( semStmt( stmt, "o", "t", s, stale_pc, inc() ) );

    auto side_effect = good;
    side_effect.data[ "o" ][ "other" ] = std::int64_t{ 1 };
    CHECK_FALSE( semStmt( stmt, "o", "t", s, side_effect, inc() ) );

    auto skipped = s;
    skipped.control[ "o" ][ "t" ].back().pc = "p2";
    CHECK( semStmt( parse_stmt( "skip" ), "o", "t", s, skipped, inc() ) );

    auto local = apply_stmt( parse_stmt( "local i := i + 1" ), "o", "t", s, inc() );
    CHECK( attr( local.control[ "o" ][ "t" ].back().vars, "i" ) == 5 );
    CHECK( local.data == s.data );

    SystemState no_frame;
    CHECK_THROWS_AS( (void)apply_stmt( stmt, "o", "t", no_frame, inc() ), ModelError );
}

TEST_CASE( "bufStateV1" )
{
    auto ad = corpus( "fac.ad" );
    auto inst = make_instance( *ad );
    auto run = runMethod( *ad, inst, { { "n", std::int64_t{ 2 } } } );
    const auto& init_to_loop = ad->transition( transition_index( *ad, "Init->Loop" ) );
    const auto& dec_to_loop = ad->transition( transition_index( *ad, "Dec->Loop" ) );

    // states: Init, Loop (via Init), Mul, Dec, Loop (via Dec), end
    const auto& first_loop = run.trace[ 1 ];
    CHECK( bufStateV1( *ad, inst, init_to_loop, first_loop ) == TokenSeq{ Token::control() } );
    CHECK( bufStateV1( *ad, inst, dec_to_loop, first_loop ).empty() );
    const auto& second_loop = run.trace[ 4 ];
    CHECK( bufStateV1( *ad, inst, init_to_loop, second_loop ).empty() );
    CHECK( bufStateV1( *ad, inst, dec_to_loop, second_loop ) == TokenSeq{ Token::control() } );

    const auto& start_to_init = ad->transition( transition_index( *ad, "start->Init" ) );
    CHECK( bufStateV1( *ad, inst, start_to_init, run.trace[ 0 ] ) == TokenSeq{ Token::control() } );
    CHECK( bufStateV1( *ad, inst, start_to_init, run.trace[ 1 ] ).empty() );
    CHECK( bufStateV1( *ad, inst, start_to_init, SystemState{} ).empty() );

    CHECK( elemsV1( PinType::control(), Token::control() ) );
    CHECK_THROWS_AS( (void)elemsV1( PinType::data( "Int" ), Token::control() ), BindingError );
}

TEST_CASE( "factorial" )
{
    for ( std::int64_t n = 0; n <= 5; ++n )
    {
        CAPTURE( n );
        auto run = fac_run( n );
        CHECK( attr( run.terminal, "res" ) == factorial( n ) );
        CHECK_FALSE( run.trace.truncated );
        REQUIRE( run.returned );
        CHECK( run.returned->control.at( "self" ).at( "main" ).empty() );
        auto loops = n > 1 ? n - 1 : 0;
        CHECK( run.firings.size() == static_cast< std::size_t >( 2 + 3 * loops ) );
    }
    auto five = fac_run( 5 );
    CHECK( five.firings.size() == 14 );
    CHECK( five.firings.front() == "Init" );
    CHECK( five.firings.back() == "Loop" );
}

TEST_CASE( "atomic runs satisfy the semantics" )
{
    auto ad = corpus( "fac.ad" );
    auto inst = make_instance( *ad );
    auto b = bindingV1( ad, inst );
    auto u = universe_of( *ad, inst );
    CHECK( u.check().empty() );
    for ( std::int64_t n = 0; n <= 5; ++n )
    {
        CAPTURE( n );
        auto run = runMethod( *ad, inst, { { "n", n } } );
        CHECK( satisfies( run.trace, b ).kind == Verdict::Kind::satisfied );
        CHECK( checkEffectConstraint( *ad, inst, run.trace ) );
        for ( const auto& s : run.trace.states )
        {
            CHECK( tokens( b, s ) == 1 );
            CHECK( u.check( s ).empty() );
        }
        CHECK( run.trace == runMethod( *ad, inst, { { "n", n } } ).trace );
    }
}

TEST_CASE( "atomic runs agree with data-filtered token runs" )
{
    auto ad = corpus( "fac.ad" );
    for ( std::int64_t n = 0; n <= 5; ++n )
    {
        CAPTURE( n );
        auto v1 = fac_run( n );
        auto runs = enumerate_runs( *ad, {}, v1.firings.size() + 1, 100000 );
        std::vector< std::vector< std::string > > kept;
        for ( const auto& run : runs )
            if ( auto f = replay_firings( *ad, run, { { "n", n } } ) )
                kept.push_back( *f );
        REQUIRE( kept.size() == 1 );
        CHECK( kept.front() == v1.firings );
    }
}

TEST_CASE( "mutated atomic traces" )
{
    auto ad = corpus( "fac.ad" );
    auto inst = make_instance( *ad );
    auto b = bindingV1( ad, inst );
    auto run = fac_run( 3 );

    SUBCASE( "corrupted effect keeps the control flow" )
    {
        auto bad = run.trace;
        for ( std::size_t i = 3; i < bad.states.size(); ++i )
            bad.states[ i ].data[ "self" ][ "res" ] = std::int64_t{ 99 };
        CHECK( satisfies( bad, b ).kind == Verdict::Kind::satisfied );
        CHECK( effect_violation( *ad, inst, bad ) == std::optional< std::size_t >{ 2 } );
    }
    SUBCASE( "pc jump" )
    {
        auto bad = run.trace;
        bad.states[ 3 ].control[ "self" ][ "main" ].back().pc = inst.pcMap.at( "end" );
        auto v = satisfies( bad, b );
        CHECK( v.kind == Verdict::Kind::violated );
        CHECK( v.index == 2 );
        CHECK_FALSE( checkEffectConstraint( *ad, inst, bad ) );
    }
    SUBCASE( "wrong branch" )
    {
        auto bad = run.trace;
        // leave through done although n > 1
        bad.states.resize( 2 );
        auto loop_exit = bad.states[ 1 ];
        auto& top = loop_exit.control[ "self" ][ "main" ].back();
        top.pc = inst.pcMap.at( "end" );
        top.vars[ via_var ] = ad->transition( transition_index( *ad, "Loop->end" ) ).key();
        bad.states.push_back( loop_exit );
        CHECK( satisfies( bad, b ).kind == Verdict::Kind::satisfied );
        CHECK( effect_violation( *ad, inst, bad ) == std::optional< std::size_t >{ 1 } );
    }
}

TEST_CASE( "stuck decisions, truncation and profile" )
{
    auto stuck = diagram( "activity S { initial i; action A effect \"x := 0\"; "
                          "decisionmerge D out a guard \"x > 0\", b guard \"x < 0\"; final f; "
                          "i -> A; A -> D; D.a -> f; D.b -> f; }" );
    CHECK_THROWS_WITH_AS( (void)runMethod( *stuck, make_instance( *stuck ), {} ),
                          doctest::Contains( "stuck-decision" ), ModelError );

    auto spin = diagram( "activity L { initial i; action A effect \"x := x + 1\"; "
                         "decisionmerge D out again guard \"true\", stop guard \"false\"; final f; "
                         "i -> D; D.again -> A; A -> D; D.stop -> f; }" );
    auto cut = runMethod( *spin, make_instance( *spin ), { { "x", std::int64_t{ 0 } } }, {}, 10 );
    CHECK( cut.trace.truncated );
    CHECK_FALSE( cut.returned );
    CHECK( cut.trace.size() == 11 );
    CHECK( satisfies( cut.trace, bindingV1( spin, make_instance( *spin ) ) ).kind ==
           Verdict::Kind::satisfied_so_far );

    auto grade = corpus( "grade_thesis.ad" );
    CHECK_THROWS_AS( (void)runMethod( *grade, make_instance( *grade ), {} ), DiagramError );

    auto fac = corpus( "fac.ad" );
    CHECK_THROWS_AS( (void)runMethod( *fac, make_instance( *fac ), {} ), ActionError );

    auto param = diagram( "activity P { initial i; action A effect \"res := k * 2\"; final f; i -> A; A -> f; }" );
    auto pinst = make_instance( *param, { "k" } );
    auto with_k = runMethod( *param, pinst, {}, { { "k", std::int64_t{ 21 } } } );
    CHECK( attr( with_k.terminal, "res" ) == 42 );
    CHECK_THROWS_AS( (void)runMethod( *param, pinst, {} ), ModelError );
}

TEST_CASE( "assignments" )
{
    CHECK( parse_assignment( "n=5" ) == std::pair< VarName, Value >{ "n", std::int64_t{ 5 } } );
    CHECK( parse_assignment( "n=-2" ).second == Value( std::int64_t{ -2 } ) );
    CHECK( parse_assignment( "ok=true" ).second == Value( true ) );
    CHECK( parse_assignment( "s=hi" ).second == Value( std::string( "hi" ) ) );
    CHECK( parse_assignment( "s=" ).second == Value( std::string() ) );
    CHECK_THROWS_AS( (void)parse_assignment( "=3" ), ActionError );
    CHECK_THROWS_AS( (void)parse_assignment( "n" ), ActionError );
}

#include "configs.hpp"
#include "corpus.hpp"

#include "adsem/variant_methods.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace adsem;

namespace
{

Frame frame_of( const std::string& method, const Oid& oid )
{
    return { oid, method, {}, method + "@0", "caller" };
}

std::size_t index_of( const std::vector< std::string >& events, const std::string& prefix )
{
    for ( std::size_t i = 0; i < events.size(); ++i )
        if ( events[ i ].find( prefix ) != std::string::npos )
            return i;
    return events.size();
}

std::size_t count_of( const std::vector< std::string >& events, const std::string& label )
{
    return std::count( events.begin(), events.end(), label );
}

} // namespace

TEST_CASE( "objects and classes" )
{
    auto ad = corpus( "grade_thesis.ad" );
    auto inst = make_methods_instance( *ad );
    const auto& u = inst.universe;
    CHECK( u.check().empty() );
    CHECK( u.definedIn( "Evaluate" ) == u.classOf( inst.rrep.at( "Referee1" ) ) );
    CHECK( inst.oid.at( "ReviewThesis2" ) == "role:Referee2" );
    CHECK( inst.threads.size() == 6 );
    CHECK( u.pcOf( "FileThesis" ).size() == max_duration + 1 );
    CHECK( inst.caller_of( *ad, "Evaluate" ) == "role:Referee1" );

    auto flat = make_methods_instance( *ad, false );
    CHECK( flat.oid.at( "ReviewThesis1" ) == "activity" );
    CHECK( flat.universe.definedIn( "Evaluate" ) == "Activity" );

    auto cmd = make_methods_instance( *ad, true, CallerMode::command );
    CHECK( cmd.caller_of( *ad, "Evaluate" ) == "cmd:Evaluate" );
    CHECK( cmd.universe.classOf( "cmd:Evaluate" ) == "Command" );
}

TEST_CASE( "executingV2" )
{
    auto ad = corpus( "grade_thesis.ad" );
    auto inst = make_methods_instance( *ad );
    const auto& eval = ad->node( "Evaluate" );

    SystemState s;
    CHECK_FALSE( executingV2( *ad, inst, eval, s ) );

    s.control[ "role:Referee1" ][ "th0" ] = { frame_of( "Evaluate", "role:Referee1" ) };
    CHECK( executingV2( *ad, inst, eval, s ) );
    CHECK_FALSE( executingV2( *ad, inst, ad->node( "CreateCert" ), s ) );
    CHECK_FALSE( executingV2( *ad, inst, ad->node( "D1" ), s ) );

    SystemState foreign;
    foreign.control[ "role:Referee1" ][ "elsewhere" ] = { frame_of( "Evaluate", "role:Referee1" ) };
    CHECK_FALSE( executingV2( *ad, inst, eval, foreign ) );

    SystemState buried;
    buried.control[ "role:Referee1" ][ "th2" ] = { frame_of( "Evaluate", "role:Referee1" ),
                                                   frame_of( "CreateCert", "role:Referee1" ) };
    CHECK( executingV2( *ad, inst, eval, buried ) );

    auto orphan = inst;
    orphan.oid.erase( "Evaluate" );
    CHECK_THROWS_AS( (void)executingV2( *ad, orphan, eval, s ), ModelError );
}

TEST_CASE( "evalV2" )
{
    SystemState s;
    CHECK( evalV2( "true", s ) );
    CHECK_FALSE( evalV2( "passed", s ) );
    s.data[ outcome_object ][ "Evaluate" ] = std::string( "passed" );
    CHECK( evalV2( "passed", s ) );
    CHECK_FALSE( evalV2( "failed", s ) );
}

TEST_CASE( "pin controller" )
{
    PinController order1( { "r1", "r2" } );
    CHECK_FALSE( order1.deliver( "r1", std::string( "a" ) ) );
    CHECK( order1.is_set( "r1" ) );
    CHECK( order1.deliver( "r2", std::string( "b" ) ) );
    CHECK_FALSE( order1.is_set( "r1" ) );
    CHECK_FALSE( order1.is_set( "r2" ) );

    PinController order2( { "r1", "r2" } );
    CHECK_FALSE( order2.deliver( "r2", std::string( "b" ) ) );
    CHECK( order2.deliver( "r1", std::string( "a" ) ) );
    CHECK( order1.fired() == order2.fired() );
    CHECK( order1.fired().at( "r1" ) == Value( std::string( "a" ) ) );

    PinController twice( { "r1", "r2" } );
    CHECK_FALSE( twice.deliver( "r1", std::int64_t{ 1 } ) );
    CHECK_THROWS_AS( (void)twice.deliver( "r1", std::int64_t{ 2 } ), ModelError );
    CHECK_THROWS_AS( (void)twice.deliver( "r9", std::int64_t{ 2 } ), ModelError );

    auto ad = corpus( "grade_thesis.ad" );
    const auto& eval = ad->node( "Evaluate" );
    SystemState s;
    twice.store( s, "role:Referee1", eval );
    CHECK( s.data.at( "role:Referee1" ).at( "Evaluate.r1.set" ) == Value( true ) );
    auto back = PinController::load( s, "role:Referee1", eval );
    CHECK( back.is_set( "r1" ) );
    CHECK_FALSE( back.is_set( "r2" ) );
    CHECK( back.deliver( "r2", std::int64_t{ 3 } ) );
    CHECK( back.fired().at( "r1" ) == Value( std::int64_t{ 1 } ) );
}

TEST_CASE( "seeded simulations of grade thesis" )
{
    auto ad = corpus( "grade_thesis.ad" );
    bool passed = false, failed = false, one_first = false, two_first = false;
    for ( bool sub : { true, false } )
        for ( auto caller : { CallerMode::role, CallerMode::command } )
        {
            auto inst = make_methods_instance( *ad, sub, caller );
            auto b = bindingV2( ad, inst );
            for ( std::uint64_t seed = 0; seed < 25; ++seed )
            {
                CAPTURE( seed );
                CAPTURE( sub );
                Scenario sc;
                sc.seed = seed;
                auto run = simulate( *ad, inst, sc );
                REQUIRE_FALSE( run.stuck );
                REQUIRE_FALSE( run.trace.truncated );
                CHECK( run.events.size() + 1 == run.trace.size() );
                CHECK( satisfies( run.trace, b ).kind == Verdict::Kind::satisfied );
                CHECK_FALSE( check_two_phase( b, run.trace ) );
                CHECK_FALSE( check_role_constraint( *ad, inst, run.trace ) );
                for ( std::size_t j = 0; j + 1 < run.trace.size(); ++j )
                {
                    CHECK( inst.universe.check( run.trace[ j ] ).empty() );
                    for ( const auto& t : ad->transitions() )
                        CHECK( checkBufferLaw( b, t, run.trace[ j ], run.trace[ j + 1 ] ) );
                }
                for ( const auto& s : run.trace.states )
                    for ( const auto& [ oid, stacks ] : s.control )
                        for ( const auto& [ th, stack ] : stacks )
                            for ( const auto& f : stack )
                                CHECK( f.caller == inst.caller_of( *ad, f.method ) );

                passed = passed || count_of( run.events, "finish CreateCert" ) == 1;
                failed = failed || count_of( run.events, "finish DetainFailure" ) == 1;
                CHECK( count_of( run.events, "finish CreateCert" ) + count_of( run.events, "finish DetainFailure" ) == 1 );
                auto r1 = index_of( run.events, "start ReviewThesis1" );
                auto r2 = index_of( run.events, "start ReviewThesis2" );
                one_first = one_first || r1 < r2;
                two_first = two_first || r2 < r1;
            }
        }
    CHECK( passed );
    CHECK( failed );
    CHECK( one_first );
    CHECK( two_first );
}

TEST_CASE( "scenarios steer decisions and durations" )
{
    auto ad = corpus( "grade_thesis.ad" );
    auto inst = make_methods_instance( *ad );
    Scenario sc;
    sc.seed = 4;
    sc.decisions[ "D1" ] = { "failed" };
    sc.durations[ "Evaluate" ] = { 20 };
    sc.durations[ "FileThesis" ] = { 0 };
    auto run = simulate( *ad, inst, sc );
    CHECK( count_of( run.events, "finish DetainFailure" ) == 1 );
    CHECK( count_of( run.events, "progress Evaluate" ) == max_duration );
    CHECK( count_of( run.events, "progress FileThesis" ) == 1 );
    CHECK( run.trace == simulate( *ad, inst, sc ).trace );

    sc.decisions[ "D1" ] = { "maybe" };
    CHECK_THROWS_AS( (void)simulate( *ad, inst, sc ), ModelError );

    Scenario short_run;
    short_run.max_steps = 5;
    auto cut = simulate( *ad, inst, short_run );
    CHECK( cut.trace.truncated );
    CHECK( cut.trace.size() == 6 );
    CHECK( satisfies( cut.trace, bindingV2( ad, inst ) ).kind == Verdict::Kind::satisfied_so_far );
}

TEST_CASE( "a decision with no upstream outcome decides itself" )
{
    auto ad = diagram( "activity X { initial i; decisionmerge D out a guard \"x\", b guard \"y\"; "
                       "action A; action B; decisionmerge M; final f; "
                       "i -> D; D.a -> A; D.b -> B; A -> M; B -> M; M -> f; }" );
    auto inst = make_methods_instance( *ad );
    auto b = bindingV2( ad, inst );
    std::set< std::string > taken;
    for ( std::uint64_t seed = 0; seed < 6; ++seed )
    {
        Scenario sc;
        sc.seed = seed;
        auto run = simulate( *ad, inst, sc );
        CHECK_FALSE( run.stuck );
        CHECK( satisfies( run.trace, b ).kind == Verdict::Kind::satisfied );
        CHECK_FALSE( check_two_phase( b, run.trace ) );
        REQUIRE( run.events.size() > 0 );
        taken.insert( run.events.front() );
        CHECK( std::get< std::string >( run.trace.states.back().data.at( outcome_object ).at( "D" ) ) ==
               ( seed % 2 ? "y" : "x" ) );
    }
    CHECK( taken == std::set< std::string >{ "decide D -> a", "decide D -> b" } );

    auto mc = corpus( "merge_choice.ad" );
    auto mc_inst = make_methods_instance( *mc );
    Scenario low;
    low.decisions[ "Choose" ] = { "low" };
    auto run = simulate( *mc, mc_inst, low );
    CHECK( satisfies( run.trace, bindingV2( mc, mc_inst ) ).kind == Verdict::Kind::satisfied );
    CHECK( count_of( run.events, "finish Small" ) == 1 );
    CHECK( count_of( run.events, "finish Big" ) == 0 );
}

TEST_CASE( "a starved join leaves the simulation stuck" )
{
    auto ad = corpus( "starved_join.ad" );
    auto inst = make_methods_instance( *ad );
    auto run = simulate( *ad, inst, {} );
    CHECK( run.stuck );
    CHECK( satisfies( run.trace, bindingV2( ad, inst ) ).accepted() );
}

TEST_CASE( "mutated method traces" )
{
    auto ad = corpus( "grade_thesis.ad" );
    auto inst = make_methods_instance( *ad );
    auto b = bindingV2( ad, inst );
    Scenario sc;
    sc.seed = 1;
    auto run = simulate( *ad, inst, sc );
    auto start = index_of( run.events, "start Evaluate" );
    REQUIRE( start < run.events.size() );

    SUBCASE( "start consuming only one input" )
    {
        auto bad = run.trace;
        auto key = ad->transition( transition_index( *ad, "J1.e2->Evaluate.r2" ) ).key();
        auto keep = read_mailbox( bad[ start ], mailbox_object, key );
        REQUIRE_FALSE( keep.empty() );
        for ( std::size_t j = start + 1; j < bad.size(); ++j )
            write_mailbox( bad.states[ j ], mailbox_object, key, keep );
        auto v = satisfies( bad, b );
        CHECK( v.kind == Verdict::Kind::violated );
        CHECK( v.index == start );
        CHECK( v.node == "Evaluate" );
    }
    SUBCASE( "frame on an object of the wrong class" )
    {
        auto bad = run.trace;
        auto& s = bad.states[ start + 1 ];
        auto& stacks = s.control.at( "role:Referee1" );
        for ( auto& [ th, stack ] : stacks )
            if ( !stack.empty() )
            {
                s.control[ "role:Student" ][ th ] = stack;
                stack.clear();
            }
        auto msg = check_role_constraint( *ad, inst, bad );
        REQUIRE( msg );
        CHECK( msg->find( "role:Student" ) != std::string::npos );
    }
    SUBCASE( "finish without start" )
    {
        auto bad = run.trace;
        for ( auto& s : bad.states )
            s.control.erase( "role:Referee1" );
        CHECK( check_two_phase( b, bad ) );
        CHECK( satisfies( bad, b ).kind == Verdict::Kind::violated );
    }
}

TEST_CASE( "scenario json" )
{
    auto sc = scenario_from_json( nlohmann::json::parse(
        R"({"seed": 3, "decisions": {"D1": "failed"}, "durations": {"Evaluate": [2, 5]}, "caller": "command"})" ) );
    CHECK( sc.seed == 3 );
    CHECK( sc.decisions.at( "D1" ) == std::vector< std::string >{ "failed" } );
    CHECK( sc.durations.at( "Evaluate" ) == std::vector< int >{ 2, 5 } );
    CHECK( sc.caller == CallerMode::command );
    CHECK( sc.sub_variant );

    auto again = scenario_from_json( to_json( sc ) );
    CHECK( to_json( again ) == to_json( sc ) );

    CHECK_THROWS_AS( (void)scenario_from_json( nlohmann::json::array() ), ModelError );
    CHECK_THROWS_AS( (void)scenario_from_json( { { "caller", "nobody" } } ), ModelError );
    CHECK_THROWS_AS( (void)scenario_from_json( { { "seed", "x" } } ), ModelError );
}

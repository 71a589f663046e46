#pragma once

#include "adsem/diagram.hpp"
#include "adsem/semantics.hpp"
#include "adsem/system_model.hpp"
#include "adsem/token.hpp"

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

namespace adsem
{

/// Pure token-level state of one diagram instance. Buffers are indexed like
/// the diagram's transitions and flags like its nodes; only action nodes
/// ever carry a raised flag.
struct Configuration
{
    std::vector< TokenSeq > buffers;
    std::vector< bool > executing;

    [[nodiscard]] std::size_t token_count() const;
    auto operator<=>( const Configuration& ) const = default;
};

enum class StepMode
{
    interleaving, // exactly one node moves
    concurrent    // any nonempty set of nodes touching pairwise disjoint buffers
};

enum class ActionMode
{
    instant,  // actions consume and produce in one step
    two_phase // actions start (consume) and later finish (produce)
};

enum class GuardDecision
{
    yes,
    no,
    either
};

/// Decides a guard in the configuration reached by the decision step.
using GuardOracle = std::function< GuardDecision( const std::string& guard, const Configuration& ) >;

/// "true" is always taken; every other guard may go either way.
[[nodiscard]] GuardOracle default_guard_oracle();

struct ExploreOptions
{
    StepMode mode = StepMode::interleaving;
    ActionMode actions = ActionMode::instant;
    GuardOracle guards = default_guard_oracle();
};

[[nodiscard]] const char* to_string( StepMode mode );
[[nodiscard]] const char* to_string( ActionMode mode );
[[nodiscard]] std::optional< StepMode > step_mode_from_string( const std::string& text );
[[nodiscard]] std::optional< ActionMode > action_mode_from_string( const std::string& text );

enum class StepKind
{
    stutter,
    start,
    finish,
    instant,
    forkjoin,
    decision
};

[[nodiscard]] const char* to_string( StepKind kind );

struct StepChoice
{
    std::string node;
    StepKind kind = StepKind::stutter;
    std::size_t in_edge = 0; // decision only: transition indices
    std::size_t out_edge = 0;

    [[nodiscard]] std::string label( const ActivityDiagram& ad ) const;
    auto operator<=>( const StepChoice& ) const = default;
};

struct Successor
{
    std::vector< StepChoice > choices; // sorted by node declaration order
    Configuration next;

    auto operator<=>( const Successor& ) const = default;
};

/// Seeds the token put on an outgoing transition of an initial node; gets the
/// transition and the meet of its pin types.
using TokenSeeder = std::function< Token( const Transition&, const PinType& ) >;

/// Token a node produces on a transition when nothing is passed through:
/// control for control/top, otherwise a data token whose payload names the
/// producer.
[[nodiscard]] Token representative( const ActivityDiagram& ad, const Transition& t, const std::string& producer );

/// One token on every outgoing transition of every initial node.
/// Throws DiagramError when the diagram has no initial node.
[[nodiscard]] Configuration initialConfig( const ActivityDiagram& ad, const TokenSeeder& seeder = {} );

[[nodiscard]] bool is_initial_config( const ActivityDiagram& ad, const Configuration& c );
[[nodiscard]] bool is_final_config( const ActivityDiagram& ad, const Configuration& c );

/// Every configuration reachable in one step, with the node moves taken.
/// Sorted and free of duplicates.
[[nodiscard]] std::vector< Successor > successors( const ActivityDiagram& ad, const Configuration& c,
                                                   const ExploreOptions& options = {} );

inline constexpr std::size_t default_bound = 100000;

struct ReachabilityGraph
{
    struct Edge
    {
        std::size_t from;
        std::size_t to;
        std::vector< StepChoice > choices;
    };

    std::vector< Configuration > configs; // configs[0] is the initial configuration
    std::vector< Edge > edges;
    bool truncated = false;

    [[nodiscard]] std::vector< std::size_t > maximal() const; // configurations without outgoing edges
};

/// Breadth-first closure of successors() from initialConfig, stopping at
/// `bound` configurations.
[[nodiscard]] ReachabilityGraph reachable( const ActivityDiagram& ad, const ExploreOptions& options = {},
                                           std::size_t bound = default_bound );

struct Analysis
{
    std::size_t configurations = 0;
    std::size_t edges = 0;
    bool truncated = false;
    std::vector< std::size_t > deadlocks;             // maximal and not final
    bool all_maximal_final = true;
    std::map< std::string, bool > final_reached;      // final-incoming transition key -> ever nonempty
    std::map< std::string, bool > branch_covered;     // "decision.pin" -> some step produced there
    std::vector< std::string > never_fired;           // non-passive nodes that never moved
};

[[nodiscard]] Analysis analyze( const ActivityDiagram& ad, const ReachabilityGraph& graph );
[[nodiscard]] nlohmann::json to_json( const Analysis& a );

/// All runs from the initial configuration that end in a configuration
/// without successors, or reach `max_steps` steps (the latter only when
/// `include_cut` is set). Stops after `limit` runs.
[[nodiscard]] std::vector< std::vector< Configuration > > enumerate_runs( const ActivityDiagram& ad,
                                                                          const ExploreOptions& options,
                                                                          std::size_t max_steps,
                                                                          std::size_t limit,
                                                                          bool include_cut = false );

/// A seeded random walk through successors().
[[nodiscard]] std::vector< Configuration > random_run( const ActivityDiagram& ad, const ExploreOptions& options,
                                                       std::uint64_t seed, std::size_t max_steps );

// Lifting into the system model: buffers live in mailbox slots of
// `buffer_object`, action flags as booleans on `exec_object`.
inline constexpr const char* buffer_object = "$buffers";
inline constexpr const char* exec_object = "$exec";

[[nodiscard]] SystemState lift( const ActivityDiagram& ad, const Configuration& c );
[[nodiscard]] Configuration lower( const ActivityDiagram& ad, const SystemState& s );

/// Binding that reads buffers and flags straight off lifted states.
[[nodiscard]] VariationBinding token_binding( std::shared_ptr< const ActivityDiagram > ad,
                                              GuardOracle guards = default_guard_oracle() );

struct LiftedRun
{
    VariationBinding binding;
    Trace trace; // truncated unless the run ends in a final configuration
};

[[nodiscard]] LiftedRun asBinding( std::shared_ptr< const ActivityDiagram > ad,
                                   const std::vector< Configuration >& run,
                                   GuardOracle guards = default_guard_oracle() );

[[nodiscard]] nlohmann::json to_json( const ActivityDiagram& ad, const Configuration& c );
[[nodiscard]] Configuration configuration_from_json( const ActivityDiagram& ad, const nlohmann::json& j );

/// Configurations as nodes, step labels on edges.
[[nodiscard]] std::string export_dot( const ActivityDiagram& ad, const ReachabilityGraph& graph );

} // namespace adsem

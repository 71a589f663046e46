#pragma once

#include "adsem/diagram.hpp"
#include "adsem/semantics.hpp"
#include "adsem/system_model.hpp"
#include "adsem/token.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace adsem
{

enum class CallerMode
{
    role,   // the role object of the node calls
    command // a per-node command object calls
};

struct Scenario
{
    std::uint64_t seed = 0;
    std::map< std::string, std::vector< std::string > > decisions; // node -> guard per visit, cycled
    std::map< std::string, std::vector< int > > durations;          // action -> progress steps per firing, cycled
    bool sub_variant = true;
    CallerMode caller = CallerMode::role;
    std::size_t max_steps = 1000;
};

[[nodiscard]] Scenario scenario_from_json( const nlohmann::json& j );
[[nodiscard]] nlohmann::json to_json( const Scenario& sc );

/// Actions are methods of objects. With the sub-variant each role is one
/// object whose class defines the methods of the role's actions; without it
/// every method lives on one shared activity object.
struct MethodsInstance
{
    std::map< std::string, MethodName > meth; // action node -> method
    std::set< ThreadId > threads;
    std::map< std::string, Oid > oid;         // action node -> object
    std::map< std::string, Oid > rrep;        // role -> object
    bool sub_variant = true;
    CallerMode caller = CallerMode::role;
    Universe universe;

    [[nodiscard]] Oid caller_of( const ActivityDiagram& ad, const std::string& node ) const;
};

/// Longest method body; progress steps per firing are capped by it.
inline constexpr int max_duration = 8;

inline constexpr const char* mailbox_object = "$mailbox";
inline constexpr const char* outcome_object = "$outcome";

[[nodiscard]] MethodsInstance make_methods_instance( const ActivityDiagram& ad, bool sub_variant = true,
                                                     CallerMode caller = CallerMode::role );

/// Some thread of the instance holds a frame of meth(n) on oid(n) anywhere in
/// its stack. Throws ModelError for a node without an object.
[[nodiscard]] bool executingV2( const ActivityDiagram& ad, const MethodsInstance& inst, const Node& n,
                                const SystemState& s );

/// A guard holds when it is "true" or some recorded outcome equals it.
[[nodiscard]] bool evalV2( const std::string& guard, const SystemState& s );

[[nodiscard]] VariationBinding bindingV2( std::shared_ptr< const ActivityDiagram > ad, const MethodsInstance& inst );

/// Input-pin bookkeeping of one action: the method may run once every input
/// pin has been set.
class PinController
{
public:
    explicit PinController( std::vector< std::string > pins );

    /// Sets the pin and stashes the value; true when this completes the set,
    /// in which case the stashed arguments move to fired() and all pins reset.
    /// Throws ModelError for an unknown pin or a pin that is already set.
    bool deliver( const std::string& pin, Value value );

    [[nodiscard]] bool is_set( const std::string& pin ) const;
    [[nodiscard]] const std::vector< std::string >& pins() const { return _pins; }
    [[nodiscard]] const Store& fired() const { return _fired; }

    // Attribute encoding on the node's object: "<node>.<pin>.set" and "<node>.<pin>".
    [[nodiscard]] static PinController load( const SystemState& s, const Oid& oid, const Node& node );
    void store( SystemState& s, const Oid& oid, const Node& node ) const;

private:
    std::vector< std::string > _pins;
    std::map< std::string, bool > _set;
    Store _stash;
    Store _fired;
};

struct V2Run
{
    Trace trace;
    std::vector< std::string > events; // one scheduler event per step
    bool stuck = false;                // no event enabled before a final configuration
};

/// Seeded simulation of the object system from the initial configuration
/// until no event is enabled or max_steps steps were taken (truncated).
[[nodiscard]] V2Run simulate( const ActivityDiagram& ad, const MethodsInstance& inst, const Scenario& scenario );

/// Every action's non-stutter steps alternate startAct and finishAct, and the
/// action executes exactly in between. Returns the first problem found.
[[nodiscard]] std::optional< std::string > check_two_phase( const VariationBinding& b, const Trace& trace );

/// Every frame of an action method sits on an object of the class defining
/// it, which under the sub-variant is also the class of the role object.
[[nodiscard]] std::optional< std::string > check_role_constraint( const ActivityDiagram& ad,
                                                                  const MethodsInstance& inst, const Trace& trace );

} // namespace adsem

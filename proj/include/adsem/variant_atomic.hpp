#pragma once

#include "adsem/action_language.hpp"
#include "adsem/diagram.hpp"
#include "adsem/semantics.hpp"
#include "adsem/system_model.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace adsem
{

/// The whole diagram is one method body executed by `callee` on `thread`;
/// every node has its own pc.
struct MethodExecutionInstance
{
    Oid caller = "caller";
    MethodName meth;
    std::vector< VarName > params;
    Oid callee = "self";
    std::map< std::string, ProgramCounter > pcMap;
    ThreadId thread = "main";
};

/// Frame local recording the transition the pc was reached through. Only
/// consulted for nodes with several incoming transitions.
inline constexpr const char* via_var = "$via";

[[nodiscard]] MethodExecutionInstance make_instance( const ActivityDiagram& ad, std::vector< VarName > params = {} );

/// pcs in node declaration order.
[[nodiscard]] std::vector< ProgramCounter > pc_order( const ActivityDiagram& ad, const MethodExecutionInstance& inst );
[[nodiscard]] Universe universe_of( const ActivityDiagram& ad, const MethodExecutionInstance& inst );

/// Node whose pc the top frame holds, if any.
[[nodiscard]] std::optional< std::size_t > node_at_pc( const ActivityDiagram& ad, const MethodExecutionInstance& inst,
                                                       const SystemState& s );

/// [⊥] when the top frame sits at t.dst and was reached through t, else empty.
[[nodiscard]] TokenSeq bufStateV1( const ActivityDiagram& ad, const MethodExecutionInstance& inst,
                                   const Transition& t, const SystemState& s );

/// Control pins admit the control token; data types are not part of this variant.
[[nodiscard]] bool elemsV1( const PinType& type, const Token& tok );

/// Pc move along transition t: pc of t.dst and via = t.
[[nodiscard]] Stack follow( const ActivityDiagram& ad, const MethodExecutionInstance& inst, const Transition& t,
                            Stack stack );

[[nodiscard]] VariationBinding bindingV1( std::shared_ptr< const ActivityDiagram > ad,
                                          const MethodExecutionInstance& inst );

struct V1Run
{
    Trace trace;                          // initial configuration up to the final one
    std::optional< SystemState > returned; // after the frame pop, when the method returned
    std::vector< std::string > firings;   // nodes in firing order
    Store terminal;                       // callee attributes at the end
};

/// Deterministic execution. Decisions take the first true guard in pin order.
/// Throws DiagramError if the diagram is not clean under the variant1
/// profile, ModelError("stuck-decision") when no guard holds, and
/// ActionError for bad effects or guards.
[[nodiscard]] V1Run runMethod( const ActivityDiagram& ad, const MethodExecutionInstance& inst, const Store& attrs,
                               const Store& params = {}, std::size_t maxSteps = 10000 );

/// First step index where an action step disagrees with its effect or a
/// decision step with its guard; nothing if every step agrees.
[[nodiscard]] std::optional< std::size_t > effect_violation( const ActivityDiagram& ad,
                                                            const MethodExecutionInstance& inst, const Trace& trace );
[[nodiscard]] bool checkEffectConstraint( const ActivityDiagram& ad, const MethodExecutionInstance& inst,
                                          const Trace& trace );

/// Parses a command-line style "name=value": integers, true/false, else string.
[[nodiscard]] std::pair< VarName, Value > parse_assignment( const std::string& text );

} // namespace adsem

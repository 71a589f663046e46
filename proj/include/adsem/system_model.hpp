#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace adsem
{

using Oid = std::string;
using ClassName = std::string;
using VarName = std::string;
using MethodName = std::string;
using ThreadId = std::string;
using ProgramCounter = std::string;

/// Opaque object reference as a value.
struct Ref
{
    Oid oid;
    auto operator<=>( const Ref& ) const = default;
};

/// Value space: integers, booleans, strings and references.
using Value = std::variant< std::int64_t, bool, std::string, Ref >;

[[nodiscard]] std::string to_string( const Value& v );

using Store = std::map< VarName, Value >;

struct Frame
{
    Oid callee;
    MethodName method;
    Store vars;
    ProgramCounter pc;
    Oid caller;

    auto operator<=>( const Frame& ) const = default;
};

/// Call stack; back() is the top.
using Stack = std::vector< Frame >;

struct SystemState
{
    std::map< Oid, Store > data;                           // dsOf
    std::map< Oid, std::map< ThreadId, Stack > > control; // csOf
    std::map< Oid, std::vector< std::string > > events;   // esOf, carried but never interpreted

    auto operator<=>( const SystemState& ) const = default;
};

class ModelError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Finite, explicitly enumerated static part of a system.
struct Universe
{
    std::set< Oid > oids;
    std::set< ClassName > classes;
    std::set< MethodName > methods;
    std::set< ThreadId > threads;
    std::map< Oid, ClassName > class_of;
    std::map< MethodName, ClassName > defined_in;
    std::map< MethodName, std::vector< ProgramCounter > > pc_of; // ordered

    [[nodiscard]] const ClassName& classOf( const Oid& oid ) const;
    [[nodiscard]] const ClassName& definedIn( const MethodName& m ) const;
    [[nodiscard]] const std::vector< ProgramCounter >& pcOf( const MethodName& m ) const;

    /// Totality of class_of/defined_in and nonempty pc sets.
    [[nodiscard]] std::vector< std::string > check() const;
    /// Every oid, thread and frame in `s` is known and frames are well-formed.
    [[nodiscard]] std::vector< std::string > check( const SystemState& s ) const;
};

/// Top frame of (oid, thread), or nothing for an empty stack.
/// Throws ModelError when the oid or thread is not in the universe.
[[nodiscard]] std::optional< Frame > topFrame( const Universe& u, const SystemState& s, const Oid& oid,
                                               const ThreadId& thread );
/// Same, without universe membership checks.
[[nodiscard]] const Frame* top_frame( const SystemState& s, const Oid& oid, const ThreadId& thread );

/// Replaces the top frame's pc by its successor in `pc_order`.
/// Throws ModelError for an empty stack, an unknown pc, or a terminal pc.
[[nodiscard]] Stack incPC( Stack stack, const std::vector< ProgramCounter >& pc_order );

/// Functional override ds ⊕ [var ↦ value] on one object.
[[nodiscard]] SystemState with_attribute( SystemState s, const Oid& oid, const VarName& var, Value value );

struct Trace
{
    std::vector< SystemState > states;
    bool truncated = false; // finite prefix of a longer (possibly infinite) run

    [[nodiscard]] std::size_t size() const { return states.size(); }
    const SystemState& operator[]( std::size_t i ) const { return states.at( i ); }
    bool operator==( const Trace& ) const = default;
};

using TransitionRelation = std::function< std::vector< SystemState >( const SystemState& ) >;

/// Successors sorted by their canonical serialization, duplicates removed.
[[nodiscard]] std::vector< SystemState > canonical_successors( const TransitionRelation& delta,
                                                               const SystemState& s );

/// All traces from s0 of at most depth+1 states, exploring at most `fanout`
/// successors per state in canonical order. Traces shorter than depth+1 end
/// in states without successors; full-length traces are marked truncated when
/// the last state still has successors.
[[nodiscard]] std::vector< Trace > generateTraces( const TransitionRelation& delta, const SystemState& s0,
                                                   std::size_t depth, std::size_t fanout );

/// Adjacency under delta: s[i+1] ∈ delta(s[i]) for all i.
[[nodiscard]] bool is_trace_of( const Trace& t, const TransitionRelation& delta );

// JSON snapshot format: {"ds": {...}, "cs": {oid: {thread: [frame...]}}, "es": {...}}.
// Frames are listed top first.
[[nodiscard]] nlohmann::json to_json( const Value& v );
[[nodiscard]] Value value_from_json( const nlohmann::json& j );
[[nodiscard]] nlohmann::json to_json( const Frame& f );
[[nodiscard]] Frame frame_from_json( const nlohmann::json& j );
[[nodiscard]] nlohmann::json to_json( const SystemState& s );
[[nodiscard]] SystemState state_from_json( const nlohmann::json& j );
[[nodiscard]] std::string serialize( const SystemState& s );

} // namespace adsem

#pragma once

#include "adsem/diagram.hpp"
#include "adsem/system_model.hpp"
#include "adsem/token.hpp"

#include <functional>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace adsem
{

/// Raised by binding functions that cannot answer for a state; satisfies()
/// lets it propagate instead of turning it into a verdict.
class BindingError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// The variation points of the inner semantics, already bound to a single
/// diagram instance. Every function must be pure.
struct VariationBinding
{
    std::shared_ptr< const ActivityDiagram > diagram;

    std::function< bool( const Node&, const SystemState& ) > executing;
    /// Token membership of a pin type (the set is usually infinite).
    std::function< bool( const PinType&, const Token& ) > elems;
    std::function< TokenSeq( const Transition&, const SystemState& ) > bufState;
    std::function< TokenSeq( const Transition&, const SystemState&, const SystemState& ) > cons;
    std::function< TokenSeq( const Transition&, const SystemState&, const SystemState& ) > prod;
    std::function< bool( const std::string& guard, const SystemState& ) > eval;

    [[nodiscard]] const ActivityDiagram& ad() const { return *diagram; }
};

struct FifoDelta
{
    TokenSeq consumed;
    TokenSeq produced;
};

/// Explains `after` as `before` minus a consumed prefix plus an appended
/// suffix, consuming as little as possible. Always succeeds (worst case:
/// everything consumed, everything produced).
[[nodiscard]] FifoDelta fifo_delta( const TokenSeq& before, const TokenSeq& after );

/// Fills cons/prod from bufState via fifo_delta.
void derive_cons_prod( VariationBinding& binding );

[[nodiscard]] bool bufEmpty( const VariationBinding& b, const Transition& t, const SystemState& s );
[[nodiscard]] bool bufNonEmpty( const VariationBinding& b, const Transition& t, const SystemState& s );

/// Every buffered token lies in the elems of both connected pin types.
[[nodiscard]] bool buffer_typed( const VariationBinding& b, const Transition& t, const SystemState& s );

[[nodiscard]] bool isInitial( const VariationBinding& b, const SystemState& s );
[[nodiscard]] bool isFinal( const VariationBinding& b, const SystemState& s );

[[nodiscard]] bool stutter( const VariationBinding& b, const Node& n, const SystemState& s, const SystemState& s2 );
[[nodiscard]] bool startAct( const VariationBinding& b, const Node& n, const SystemState& s, const SystemState& s2 );
[[nodiscard]] bool finishAct( const VariationBinding& b, const Node& n, const SystemState& s, const SystemState& s2 );
[[nodiscard]] bool stepInst( const VariationBinding& b, const Node& n, const SystemState& s, const SystemState& s2 );
[[nodiscard]] bool stepForkJoin( const VariationBinding& b, const Node& n, const SystemState& s,
                                 const SystemState& s2 );
[[nodiscard]] bool stepDecisionMerge( const VariationBinding& b, const Node& n, const SystemState& s,
                                      const SystemState& s2 );

/// Either the node stutters or it takes the step its kind allows. Initial and
/// final nodes may only stutter.
[[nodiscard]] bool step( const VariationBinding& b, const Node& n, const SystemState& s, const SystemState& s2 );

/// Name of the predicate a failed step() is reported under.
[[nodiscard]] std::string step_predicate_name( NodeKind kind );

/// FIFO law: bufState(s) = cons ++ rest and bufState(s') = rest ++ prod.
[[nodiscard]] bool checkBufferLaw( const VariationBinding& b, const Transition& t, const SystemState& s,
                                   const SystemState& s2 );

struct Verdict
{
    enum class Kind
    {
        satisfied,
        satisfied_so_far,
        no_initial_found,
        violated
    };

    Kind kind = Kind::satisfied;
    std::size_t index = 0;   // pre-state of the failing step (violated only)
    std::string node;        // failing node (violated only)
    std::string predicate;   // failing predicate (violated only)
    std::size_t initial = 0; // index of the initial state (when found)

    [[nodiscard]] bool accepted() const { return kind == Kind::satisfied || kind == Kind::satisfied_so_far; }
    bool operator==( const Verdict& ) const = default;
};

inline constexpr const char* final_persistence = "final-persistence";

[[nodiscard]] const char* to_string( Verdict::Kind kind );
[[nodiscard]] nlohmann::json to_json( const Verdict& v );
std::ostream& operator<<( std::ostream& os, const Verdict& v );

/// Checks a trace against the instance behind `binding`: the first state
/// satisfying isInitial anchors the check; from there every step must be
/// allowed for every node and a final configuration must stay final.
[[nodiscard]] Verdict satisfies( const Trace& trace, const VariationBinding& binding );

} // namespace adsem

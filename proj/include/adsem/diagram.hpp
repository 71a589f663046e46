#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace adsem
{

enum class NodeKind
{
    action,
    initial,
    final,
    forkjoin,
    decisionmerge
};

[[nodiscard]] const char* to_string( NodeKind kind );
[[nodiscard]] std::optional< NodeKind > node_kind_from_string( const std::string& text );

/// Pin type: control (bottom), top (any token) or a nominal data type.
struct PinType
{
    enum class Kind
    {
        control,
        top,
        data
    };

    Kind kind = Kind::control;
    std::string name; // data type name, empty otherwise

    static PinType control() { return {}; }
    static PinType top() { return { Kind::top, {} }; }
    static PinType data( std::string name ) { return { Kind::data, std::move( name ) }; }

    [[nodiscard]] bool is_control() const { return kind == Kind::control; }
    [[nodiscard]] bool is_top() const { return kind == Kind::top; }
    [[nodiscard]] bool is_data() const { return kind == Kind::data; }
    [[nodiscard]] std::string describe() const;

    auto operator<=>( const PinType& ) const = default;
};

/// Nominal compatibility: top meets everything, control meets only control,
/// data types meet when their names are equal.
[[nodiscard]] bool compatible( const PinType& a, const PinType& b );

/// The most specific type admitted by both sides, if any.
[[nodiscard]] std::optional< PinType > meet( const PinType& a, const PinType& b );

inline constexpr const char* default_role = "unassigned";
inline constexpr const char* default_guard = "true";

struct Pin
{
    std::string name;
    PinType type;
    std::string guard = default_guard; // only meaningful on output pins

    auto operator<=>( const Pin& ) const = default;
};

struct Node
{
    NodeKind kind = NodeKind::action;
    std::string name;
    std::string role = default_role;
    std::vector< Pin > in_pins;
    std::vector< Pin > out_pins;
    std::string effect;

    [[nodiscard]] const Pin* in_pin( const std::string& pin ) const;
    [[nodiscard]] const Pin* out_pin( const std::string& pin ) const;

    auto operator<=>( const Node& ) const = default;
};

struct Transition
{
    std::string src;
    std::string out_pin;
    std::string dst;
    std::string in_pin;

    /// Stable textual identity "src.out->dst.in", used as a key in files.
    [[nodiscard]] std::string key() const;

    auto operator<=>( const Transition& ) const = default;
};

class DiagramError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Pin-complete activity diagram. Immutable once built; every transition
/// endpoint refers to an existing node and pin (checked on construction).
class ActivityDiagram
{
public:
    ActivityDiagram() = default;
    ActivityDiagram( std::string name, std::vector< Node > nodes, std::vector< Transition > transitions );

    [[nodiscard]] const std::string& name() const { return _name; }
    [[nodiscard]] const std::vector< Node >& nodes() const { return _nodes; }
    [[nodiscard]] const std::vector< Transition >& transitions() const { return _transitions; }

    [[nodiscard]] std::optional< std::size_t > find_node( const std::string& name ) const;
    [[nodiscard]] std::size_t node_index( const std::string& name ) const; // throws DiagramError
    [[nodiscard]] const Node& node( const std::string& name ) const;
    [[nodiscard]] const Node& node( std::size_t index ) const { return _nodes.at( index ); }
    [[nodiscard]] const Transition& transition( std::size_t index ) const { return _transitions.at( index ); }

    [[nodiscard]] const std::string& role_of( const std::string& node ) const;
    /// Type of a pin addressed as "node.pin"; throws DiagramError when undeclared.
    [[nodiscard]] const PinType& pin_type( const std::string& qualified_pin ) const;
    [[nodiscard]] const std::string& guard( const std::string& node, const std::string& out_pin ) const;

    [[nodiscard]] const PinType& out_type( const Transition& t ) const;
    [[nodiscard]] const PinType& in_type( const Transition& t ) const;
    [[nodiscard]] const std::string& guard_of( const Transition& t ) const;

    // Transition indices in declaration order.
    [[nodiscard]] const std::vector< std::size_t >& in_indices( std::size_t node ) const { return _in.at( node ); }
    [[nodiscard]] const std::vector< std::size_t >& out_indices( std::size_t node ) const { return _out.at( node ); }

    bool operator==( const ActivityDiagram& other ) const
    {
        return _name == other._name && _nodes == other._nodes && _transitions == other._transitions;
    }

private:
    std::string _name;
    std::vector< Node > _nodes;
    std::vector< Transition > _transitions;
    std::map< std::string, std::size_t > _by_name;
    std::vector< std::vector< std::size_t > > _in;
    std::vector< std::vector< std::size_t > > _out;
};

[[nodiscard]] std::vector< Transition > inT( const ActivityDiagram& ad, const std::string& node );
[[nodiscard]] std::vector< Transition > outT( const ActivityDiagram& ad, const std::string& node );

} // namespace adsem

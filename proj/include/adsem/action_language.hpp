#pragma once

#include "adsem/system_model.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>

namespace adsem
{

class ActionError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct Expr
{
    enum class Op
    {
        literal,
        variable,
        add,
        sub,
        mul,
        lt,
        le,
        eq,
        ne,
        ge,
        gt
    };

    Op op = Op::literal;
    std::int64_t value = 0; // literal
    std::string name;       // variable
    std::shared_ptr< const Expr > lhs, rhs;

    [[nodiscard]] bool is_comparison() const { return op >= Op::lt; }
};

struct ActionStmt
{
    enum class Kind
    {
        skip,
        set_attr,
        set_local
    };

    Kind kind = Kind::skip;
    std::string target;
    std::shared_ptr< const Expr > expr;
};

// Grammar:
//   stmt  := "" | "skip" | IDENT ":=" expr | "local" IDENT ":=" expr
//   guard := "true" | "false" | expr CMP expr
//   expr  := term (("+"|"-") term)*,  term := atom ("*" atom)*
//   atom  := INT | IDENT | "(" expr ")" | "-" atom
// CMP is one of < <= ≤ = == != ≠ >= ≥ >; "−" is accepted for "-".
[[nodiscard]] ActionStmt parse_stmt( const std::string& text );
[[nodiscard]] std::shared_ptr< const Expr > parse_guard( const std::string& text );
[[nodiscard]] std::string to_string( const Expr& e );
[[nodiscard]] std::string to_string( const ActionStmt& s );

/// Reads locals first, then attributes. Throws ActionError on unknown or
/// non-integer variables.
[[nodiscard]] std::int64_t eval_expr( const Expr& e, const Store& attrs, const Store& locals );
[[nodiscard]] bool eval_guard( const Expr& e, const Store& attrs, const Store& locals );

/// How a statement moves the pc of the executing stack.
using PcAdvance = std::function< Stack( const Stack& ) >;

/// The state a statement leads to: the store update on `oid` (attribute) or
/// the top frame (local), plus `advance` applied to the (oid, thread) stack.
/// Throws ModelError without a top frame.
[[nodiscard]] SystemState apply_stmt( const ActionStmt& stmt, const Oid& oid, const ThreadId& thread,
                                      const SystemState& s, const PcAdvance& advance );

/// s2 is exactly the state apply_stmt yields.
[[nodiscard]] bool semStmt( const ActionStmt& stmt, const Oid& oid, const ThreadId& thread, const SystemState& s,
                            const SystemState& s2, const PcAdvance& advance );

} // namespace adsem

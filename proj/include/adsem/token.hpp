#pragma once

#include "adsem/diagram.hpp"
#include "adsem/system_model.hpp"

#include <compare>
#include <string>
#include <vector>

namespace adsem
{

/// A control token (empty type) or a data token carrying an opaque payload.
struct Token
{
    std::string type;
    std::string value;

    static Token control() { return {}; }
    static Token data( std::string type, std::string value ) { return { std::move( type ), std::move( value ) }; }

    [[nodiscard]] bool is_control() const { return type.empty(); }

    auto operator<=>( const Token& ) const = default;
};

using TokenSeq = std::vector< Token >;

/// Text form: "⊥" for control, "Type:payload" for data.
[[nodiscard]] std::string to_string( const Token& t );
[[nodiscard]] Token token_from_string( const std::string& text );
[[nodiscard]] std::string to_string( const TokenSeq& seq );

/// Standard token membership for a pin type: control admits only the control
/// token, top admits everything, a data type admits its own data tokens.
[[nodiscard]] bool admits( const PinType& type, const Token& token );

/// Buffers kept in the data store of a bookkeeping object: one string slot
/// per token, named "<key>[i]".
[[nodiscard]] TokenSeq read_mailbox( const SystemState& s, const Oid& box, const std::string& key );
void write_mailbox( SystemState& s, const Oid& box, const std::string& key, const TokenSeq& tokens );

} // namespace adsem

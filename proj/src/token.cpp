#include "adsem/token.hpp"

namespace adsem
{

namespace
{
constexpr const char* control_text = "⊥";

std::string slot( const std::string& key, std::size_t i )
{
    return key + "[" + std::to_string( i ) + "]";
}
} // namespace

std::string to_string( const Token& t )
{
    return t.is_control() ? control_text : t.type + ":" + t.value;
}

Token token_from_string( const std::string& text )
{
    if ( text == control_text )
        return Token::control();
    auto colon = text.find( ':' );
    if ( colon == std::string::npos || colon == 0 )
        throw ModelError( "malformed token '" + text + "'" );
    return Token::data( text.substr( 0, colon ), text.substr( colon + 1 ) );
}

std::string to_string( const TokenSeq& seq )
{
    std::string out = "[";
    for ( std::size_t i = 0; i < seq.size(); ++i )
        out += ( i ? ", " : "" ) + to_string( seq[ i ] );
    return out + "]";
}

bool admits( const PinType& type, const Token& token )
{
    switch ( type.kind )
    {
    case PinType::Kind::top: return true;
    case PinType::Kind::control: return token.is_control();
    case PinType::Kind::data: return token.type == type.name;
    }
    return false;
}

TokenSeq read_mailbox( const SystemState& s, const Oid& box, const std::string& key )
{
    TokenSeq out;
    auto obj = s.data.find( box );
    if ( obj == s.data.end() )
        return out;
    for ( std::size_t i = 0;; ++i )
    {
        auto it = obj->second.find( slot( key, i ) );
        if ( it == obj->second.end() )
            return out;
        const auto* text = std::get_if< std::string >( &it->second );
        if ( !text )
            throw ModelError( "mailbox slot " + slot( key, i ) + " does not hold a token" );
        out.push_back( token_from_string( *text ) );
    }
}

void write_mailbox( SystemState& s, const Oid& box, const std::string& key, const TokenSeq& tokens )
{
    auto& store = s.data[ box ];
    for ( std::size_t i = 0;; ++i )
    {
        auto it = store.find( slot( key, i ) );
        if ( i < tokens.size() )
            store[ slot( key, i ) ] = to_string( tokens[ i ] );
        else if ( it != store.end() )
            store.erase( it );
        else
            break;
    }
}

} // namespace adsem

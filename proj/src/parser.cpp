#include "adsem/parser.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace adsem
{

const char* to_string( Severity severity )
{
    return severity == Severity::error ? "error" : "warning";
}

bool has_errors( const std::vector< Diagnostic >& diagnostics )
{
    for ( const auto& d : diagnostics )
        if ( d.severity == Severity::error )
            return true;
    return false;
}

std::ostream& operator<<( std::ostream& os, const Diagnostic& d )
{
    if ( d.line > 0 )
        os << d.line << ":" << d.column << ": ";
    os << to_string( d.severity ) << " [" << d.code << "]";
    if ( !d.location.empty() )
        os << " " << d.location;
    return os << ": " << d.message;
}

namespace
{

enum class Tok
{
    ident,
    string,
    bottom, // ⊥
    top,    // ⊤
    lbrace,
    rbrace,
    semi,
    comma,
    colon,
    dot,
    arrow,
    end
};

struct Token
{
    Tok kind;
    std::string text;
    int line;
    int column;
};

struct SyntaxError
{
    std::string message;
    int line;
    int column;
};

class Lexer
{
public:
    explicit Lexer( std::string_view src ) : _src( src ) {}

    std::vector< Token > run()
    {
        std::vector< Token > out;
        for ( ;; )
        {
            skip_space();
            int line = _line, col = _col;
            if ( _pos >= _src.size() )
            {
                out.push_back( { Tok::end, "", line, col } );
                return out;
            }
            char c = _src[ _pos ];
            if ( std::isalpha( static_cast< unsigned char >( c ) ) || c == '_' )
            {
                std::string word;
                while ( _pos < _src.size() &&
                        ( std::isalnum( static_cast< unsigned char >( _src[ _pos ] ) ) || _src[ _pos ] == '_' ) )
                    word += advance();
                out.push_back( { Tok::ident, word, line, col } );
            }
            else if ( c == '"' )
                out.push_back( { Tok::string, string_literal(), line, col } );
            else if ( _src.substr( _pos, 3 ) == "⊥" )
            {
                advance_bytes( 3 );
                out.push_back( { Tok::bottom, "⊥", line, col } );
            }
            else if ( _src.substr( _pos, 3 ) == "⊤" )
            {
                advance_bytes( 3 );
                out.push_back( { Tok::top, "⊤", line, col } );
            }
            else if ( c == '-' && _pos + 1 < _src.size() && _src[ _pos + 1 ] == '>' )
            {
                advance_bytes( 2 );
                out.push_back( { Tok::arrow, "->", line, col } );
            }
            else
            {
                Tok kind;
                switch ( c )
                {
                case '{': kind = Tok::lbrace; break;
                case '}': kind = Tok::rbrace; break;
                case ';': kind = Tok::semi; break;
                case ',': kind = Tok::comma; break;
                case ':': kind = Tok::colon; break;
                case '.': kind = Tok::dot; break;
                default: throw SyntaxError{ "unexpected character '" + printable( c ) + "'", line, col };
                }
                advance();
                out.push_back( { kind, std::string( 1, c ), line, col } );
            }
        }
    }

private:
    static std::string printable( char c )
    {
        if ( std::isprint( static_cast< unsigned char >( c ) ) )
            return std::string( 1, c );
        std::ostringstream os;
        os << "\\x" << std::hex << ( static_cast< unsigned >( static_cast< unsigned char >( c ) ) );
        return os.str();
    }

    char advance()
    {
        char c = _src[ _pos++ ];
        if ( c == '\n' )
        {
            ++_line;
            _col = 1;
        }
        else if ( ( static_cast< unsigned char >( c ) & 0xC0 ) != 0x80 )
            ++_col; // count code points, not continuation bytes
        return c;
    }

    void advance_bytes( std::size_t n )
    {
        for ( std::size_t i = 0; i < n; ++i )
            advance();
    }

    void skip_space()
    {
        while ( _pos < _src.size() )
        {
            char c = _src[ _pos ];
            if ( std::isspace( static_cast< unsigned char >( c ) ) )
                advance();
            else if ( c == '/' && _pos + 1 < _src.size() && _src[ _pos + 1 ] == '/' )
                while ( _pos < _src.size() && _src[ _pos ] != '\n' )
                    advance();
            else
                break;
        }
    }

    std::string string_literal()
    {
        int line = _line, col = _col;
        advance(); // opening quote
        std::string value;
        for ( ;; )
        {
            if ( _pos >= _src.size() || _src[ _pos ] == '\n' )
                throw SyntaxError{ "unterminated string literal", line, col };
            char c = advance();
            if ( c == '"' )
                return value;
            if ( c != '\\' )
            {
                value += c;
                continue;
            }
            if ( _pos >= _src.size() )
                throw SyntaxError{ "unterminated string literal", line, col };
            char e = advance();
            switch ( e )
            {
            case 'n': value += '\n'; break;
            case 't': value += '\t'; break;
            case '"': value += '"'; break;
            case '\\': value += '\\'; break;
            default: throw SyntaxError{ std::string( "unknown escape '\\" ) + e + "'", _line, _col - 1 };
            }
        }
    }

    std::string_view _src;
    std::size_t _pos = 0;
    int _line = 1;
    int _col = 1;
};

bool is_kind_keyword( const std::string& word )
{
    return node_kind_from_string( word ).has_value();
}

struct EdgeDecl
{
    std::string src, out_pin, dst, in_pin; // empty pin = elided
    int line, column;
};

struct NodeDecl
{
    Node node;
    int line, column;
};

class Parser
{
public:
    explicit Parser( std::vector< Token > tokens ) : _toks( std::move( tokens ) ) {}

    ParseResult run()
    {
        ParseResult result;
        expect_keyword( "activity" );
        std::string name = expect( Tok::ident, "activity name" ).text;
        expect( Tok::lbrace, "'{'" );
        while ( peek().kind != Tok::rbrace )
        {
            if ( peek().kind == Tok::end )
                throw SyntaxError{ "unexpected end of input, expected '}'", peek().line, peek().column };
            item();
        }
        expect( Tok::rbrace, "'}'" );
        if ( peek().kind != Tok::end )
            throw SyntaxError{ "unexpected '" + peek().text + "' after activity", peek().line, peek().column };

        return build( std::move( name ) );
    }

private:
    const Token& peek( std::size_t ahead = 0 ) const
    {
        return _toks[ std::min( _pos + ahead, _toks.size() - 1 ) ];
    }

    const Token& next() { return _toks[ std::min( _pos++, _toks.size() - 1 ) ]; }

    const Token& expect( Tok kind, const char* what )
    {
        const auto& t = peek();
        if ( t.kind != kind )
            throw SyntaxError{ std::string( "expected " ) + what + ", found " + describe( t ), t.line, t.column };
        return next();
    }

    void expect_keyword( const char* word )
    {
        const auto& t = peek();
        if ( t.kind != Tok::ident || t.text != word )
            throw SyntaxError{ std::string( "expected '" ) + word + "', found " + describe( t ), t.line, t.column };
        next();
    }

    bool accept_keyword( const char* word )
    {
        if ( peek().kind == Tok::ident && peek().text == word )
        {
            next();
            return true;
        }
        return false;
    }

    static std::string describe( const Token& t )
    {
        switch ( t.kind )
        {
        case Tok::end: return "end of input";
        case Tok::string: return "string literal";
        default: return "'" + t.text + "'";
        }
    }

    void item()
    {
        const auto& first = peek();
        if ( first.kind == Tok::ident && is_kind_keyword( first.text ) && peek( 1 ).kind == Tok::ident )
            node_decl();
        else
            edge_decl();
    }

    void node_decl()
    {
        const auto& kw = next();
        NodeDecl decl{ {}, kw.line, kw.column };
        decl.node.kind = *node_kind_from_string( kw.text );
        decl.node.name = expect( Tok::ident, "node name" ).text;

        std::set< std::string > seen;
        auto once = [ & ]( const Token& t ) {
            if ( !seen.insert( t.text ).second )
                throw SyntaxError{ "option '" + t.text + "' given twice", t.line, t.column };
        };
        while ( peek().kind == Tok::ident )
        {
            const auto& opt = peek();
            if ( opt.text == "role" )
            {
                once( next() );
                decl.node.role = expect( Tok::ident, "role name" ).text;
            }
            else if ( opt.text == "in" )
            {
                once( next() );
                decl.node.in_pins = pins( false );
            }
            else if ( opt.text == "out" )
            {
                once( next() );
                decl.node.out_pins = pins( true );
            }
            else if ( opt.text == "effect" )
            {
                once( next() );
                decl.node.effect = expect( Tok::string, "effect string" ).text;
            }
            else
                throw SyntaxError{ "unknown node option '" + opt.text + "'", opt.line, opt.column };
        }
        expect( Tok::semi, "';'" );
        _nodes.push_back( std::move( decl ) );
    }

    std::vector< Pin > pins( bool output )
    {
        std::vector< Pin > result;
        do
        {
            Pin pin;
            pin.name = expect( Tok::ident, "pin name" ).text;
            if ( peek().kind == Tok::colon )
            {
                next();
                const auto& ty = next();
                if ( ty.kind == Tok::bottom || ( ty.kind == Tok::ident && ty.text == "control" ) )
                    pin.type = PinType::control();
                else if ( ty.kind == Tok::top || ( ty.kind == Tok::ident && ty.text == "any" ) )
                    pin.type = PinType::top();
                else if ( ty.kind == Tok::ident )
                    pin.type = PinType::data( ty.text );
                else
                    throw SyntaxError{ "expected pin type, found " + describe( ty ), ty.line, ty.column };
            }
            if ( peek().kind == Tok::ident && peek().text == "guard" )
            {
                const auto& g = next();
                if ( !output )
                    throw SyntaxError{ "guards are only allowed on output pins", g.line, g.column };
                pin.guard = expect( Tok::string, "guard string" ).text;
            }
            result.push_back( std::move( pin ) );
        } while ( peek().kind == Tok::comma && ( next(), true ) );
        return result;
    }

    void edge_decl()
    {
        const auto& first = expect( Tok::ident, "node declaration or edge" );
        EdgeDecl e{ first.text, {}, {}, {}, first.line, first.column };
        if ( peek().kind == Tok::dot )
        {
            next();
            e.out_pin = expect( Tok::ident, "output pin name" ).text;
        }
        expect( Tok::arrow, "'->'" );
        e.dst = expect( Tok::ident, "destination node" ).text;
        if ( peek().kind == Tok::dot )
        {
            next();
            e.in_pin = expect( Tok::ident, "input pin name" ).text;
        }
        expect( Tok::semi, "';'" );
        _edges.push_back( std::move( e ) );
    }

    static std::string fresh_pin( const Node& n, const char* prefix )
    {
        for ( int k = 1;; ++k )
        {
            auto name = prefix + std::to_string( k );
            if ( !n.in_pin( name ) && !n.out_pin( name ) )
                return name;
        }
    }

    ParseResult build( std::string name )
    {
        ParseResult result;
        auto error = [ & ]( std::string code, std::string loc, std::string msg, int line, int col ) {
            result.diagnostics.push_back(
                { Severity::error, std::move( code ), std::move( loc ), std::move( msg ), line, col } );
        };

        std::vector< Node > nodes;
        std::map< std::string, std::size_t > index;
        for ( auto& decl : _nodes )
        {
            auto& n = decl.node;
            if ( index.count( n.name ) )
            {
                error( "duplicate-node", n.name, "node '" + n.name + "' is declared more than once", decl.line,
                       decl.column );
                continue;
            }
            std::set< std::string > pin_names;
            for ( const auto* list : { &n.in_pins, &n.out_pins } )
                for ( const auto& p : *list )
                    if ( !pin_names.insert( p.name ).second )
                        error( "duplicate-pin", n.name + "." + p.name,
                               "pin '" + p.name + "' is declared more than once on node '" + n.name + "'", decl.line,
                               decl.column );
            index.emplace( n.name, nodes.size() );
            nodes.push_back( std::move( n ) );
        }

        std::vector< Transition > transitions;
        for ( const auto& e : _edges )
        {
            auto loc = e.src + ( e.out_pin.empty() ? "" : "." + e.out_pin ) + "->" + e.dst +
                       ( e.in_pin.empty() ? "" : "." + e.in_pin );
            auto src = index.find( e.src );
            auto dst = index.find( e.dst );
            bool bad = false;
            for ( const auto& [ it, nm ] : { std::pair{ src, e.src }, std::pair{ dst, e.dst } } )
                if ( it == index.end() )
                {
                    error( "unknown-node", loc, "edge references unknown node '" + nm + "'", e.line, e.column );
                    bad = true;
                }
            if ( bad )
                continue;

            auto& s = nodes[ src->second ];
            auto& d = nodes[ dst->second ];
            if ( !e.out_pin.empty() && !s.out_pin( e.out_pin ) )
            {
                error( "unknown-pin", loc, "node '" + s.name + "' has no output pin '" + e.out_pin + "'", e.line,
                       e.column );
                bad = true;
            }
            if ( !e.in_pin.empty() && !d.in_pin( e.in_pin ) )
            {
                error( "unknown-pin", loc, "node '" + d.name + "' has no input pin '" + e.in_pin + "'", e.line,
                       e.column );
                bad = true;
            }
            if ( bad )
                continue;

            Transition t{ e.src, e.out_pin, e.dst, e.in_pin };
            if ( t.out_pin.empty() )
            {
                t.out_pin = fresh_pin( s, "_o" );
                s.out_pins.push_back( { t.out_pin, PinType::control(), default_guard } );
            }
            if ( t.in_pin.empty() )
            {
                t.in_pin = fresh_pin( d, "_i" );
                d.in_pins.push_back( { t.in_pin, PinType::control(), default_guard } );
            }
            transitions.push_back( std::move( t ) );
        }

        if ( has_errors( result.diagnostics ) )
            return result;
        result.diagram.emplace( std::move( name ), std::move( nodes ), std::move( transitions ) );
        return result;
    }

    std::vector< Token > _toks;
    std::size_t _pos = 0;
    std::vector< NodeDecl > _nodes;
    std::vector< EdgeDecl > _edges;
};

std::string quote( const std::string& s )
{
    std::string out = "\"";
    for ( char c : s )
    {
        switch ( c )
        {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default: out += c;
        }
    }
    return out + "\"";
}

void print_pins( std::ostream& os, const char* keyword, const std::vector< Pin >& pins, bool output )
{
    if ( pins.empty() )
        return;
    os << " " << keyword << " ";
    for ( std::size_t i = 0; i < pins.size(); ++i )
    {
        const auto& p = pins[ i ];
        if ( i )
            os << ", ";
        os << p.name;
        if ( !p.type.is_control() )
            os << ": " << p.type.describe();
        if ( output && p.guard != default_guard )
            os << " guard " << quote( p.guard );
    }
}

} // namespace

ParseResult parse( std::string_view text )
{
    try
    {
        return Parser( Lexer( text ).run() ).run();
    }
    catch ( const SyntaxError& e )
    {
        ParseResult result;
        result.diagnostics.push_back( { Severity::error, "syntax", "", e.message, e.line, e.column } );
        return result;
    }
    catch ( const DiagramError& e )
    {
        ParseResult result;
        result.diagnostics.push_back( { Severity::error, "invalid-diagram", "", e.what(), 0, 0 } );
        return result;
    }
}

std::string print( const ActivityDiagram& ad )
{
    std::ostringstream os;
    os << "activity " << ad.name() << " {\n";
    for ( const auto& n : ad.nodes() )
    {
        os << "  " << to_string( n.kind ) << " " << n.name;
        if ( n.role != default_role )
            os << " role " << n.role;
        print_pins( os, "in", n.in_pins, false );
        print_pins( os, "out", n.out_pins, true );
        if ( !n.effect.empty() )
            os << " effect " << quote( n.effect );
        os << ";\n";
    }
    if ( !ad.transitions().empty() )
        os << "\n";
    for ( const auto& t : ad.transitions() )
        os << "  " << t.src << "." << t.out_pin << " -> " << t.dst << "." << t.in_pin << ";\n";
    os << "}\n";
    return os.str();
}

ParseResult parse_file( const std::string& path )
{
    std::ifstream in( path, std::ios::binary );
    if ( !in )
    {
        ParseResult result;
        result.diagnostics.push_back( { Severity::error, "io", path, "cannot open file", 0, 0 } );
        return result;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse( buf.str() );
}

} // namespace adsem

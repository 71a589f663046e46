#include "adsem/action_language.hpp"

#include <cctype>
#include <vector>

namespace adsem
{

namespace
{

struct Tok
{
    enum Kind
    {
        end,
        integer,
        ident,
        sym
    } kind = end;
    std::string text;
    std::size_t pos = 0;
};

std::vector< Tok > lex( const std::string& src )
{
    // multi-byte operators first, mapped to their ASCII spelling
    static const std::pair< const char*, const char* > spelled[] = {
        { "\xE2\x89\xA4", "<=" }, { "\xE2\x89\xA5", ">=" }, { "\xE2\x89\xA0", "!=" }, { "\xE2\x88\x92", "-" },
        { ":=", ":=" },           { "<=", "<=" },           { ">=", ">=" },           { "!=", "!=" },
        { "==", "==" } };

    std::vector< Tok > out;
    std::size_t i = 0;
    while ( i < src.size() )
    {
        unsigned char c = src[ i ];
        if ( std::isspace( c ) )
        {
            ++i;
            continue;
        }
        if ( std::isdigit( c ) )
        {
            std::size_t j = i;
            while ( j < src.size() && std::isdigit( static_cast< unsigned char >( src[ j ] ) ) )
                ++j;
            out.push_back( { Tok::integer, src.substr( i, j - i ), i } );
            i = j;
            continue;
        }
        if ( std::isalpha( c ) || c == '_' )
        {
            std::size_t j = i;
            while ( j < src.size() &&
                    ( std::isalnum( static_cast< unsigned char >( src[ j ] ) ) || src[ j ] == '_' ) )
                ++j;
            out.push_back( { Tok::ident, src.substr( i, j - i ), i } );
            i = j;
            continue;
        }
        bool matched = false;
        for ( const auto& [ from, to ] : spelled )
        {
            std::string f( from );
            if ( src.compare( i, f.size(), f ) == 0 )
            {
                out.push_back( { Tok::sym, to, i } );
                i += f.size();
                matched = true;
                break;
            }
        }
        if ( matched )
            continue;
        if ( std::string( "+-*()<>=" ).find( static_cast< char >( c ) ) != std::string::npos )
        {
            out.push_back( { Tok::sym, std::string( 1, static_cast< char >( c ) ), i } );
            ++i;
            continue;
        }
        throw ActionError( "unexpected character at offset " + std::to_string( i ) + " in '" + src + "'" );
    }
    out.push_back( { Tok::end, "", src.size() } );
    return out;
}

class Parser
{
public:
    Parser( const std::string& src ) : src_( src ), toks_( lex( src ) ) {}

    const Tok& peek( std::size_t k = 0 ) const { return toks_[ std::min( pos_ + k, toks_.size() - 1 ) ]; }
    Tok next() { return toks_[ pos_ < toks_.size() - 1 ? pos_++ : pos_ ]; }
    bool at_sym( const char* s ) const { return peek().kind == Tok::sym && peek().text == s; }

    [[noreturn]] void fail( const std::string& what ) const
    {
        throw ActionError( what + " at offset " + std::to_string( peek().pos ) + " in '" + src_ + "'" );
    }

    void expect_end() const
    {
        if ( peek().kind != Tok::end )
            fail( "unexpected '" + peek().text + "'" );
    }

    std::shared_ptr< const Expr > expr()
    {
        auto lhs = term();
        while ( at_sym( "+" ) || at_sym( "-" ) )
        {
            auto op = next().text == "+" ? Expr::Op::add : Expr::Op::sub;
            lhs = binary( op, lhs, term() );
        }
        return lhs;
    }

    std::shared_ptr< const Expr > comparison()
    {
        auto lhs = expr();
        static const std::pair< const char*, Expr::Op > ops[] = { { "<=", Expr::Op::le }, { ">=", Expr::Op::ge },
                                                                  { "!=", Expr::Op::ne }, { "==", Expr::Op::eq },
                                                                  { "=", Expr::Op::eq },  { "<", Expr::Op::lt },
                                                                  { ">", Expr::Op::gt } };
        for ( const auto& [ text, op ] : ops )
            if ( at_sym( text ) )
            {
                next();
                return binary( op, lhs, expr() );
            }
        fail( "expected a comparison" );
    }

private:
    static std::shared_ptr< const Expr > binary( Expr::Op op, std::shared_ptr< const Expr > l,
                                                 std::shared_ptr< const Expr > r )
    {
        auto e = std::make_shared< Expr >();
        e->op = op;
        e->lhs = std::move( l );
        e->rhs = std::move( r );
        return e;
    }

    std::shared_ptr< const Expr > term()
    {
        auto lhs = atom();
        while ( at_sym( "*" ) )
        {
            next();
            lhs = binary( Expr::Op::mul, lhs, atom() );
        }
        return lhs;
    }

    std::shared_ptr< const Expr > atom()
    {
        auto t = peek();
        if ( t.kind == Tok::integer )
        {
            next();
            auto e = std::make_shared< Expr >();
            try
            {
                e->value = std::stoll( t.text );
            }
            catch ( const std::out_of_range& )
            {
                fail( "integer literal out of range" );
            }
            return e;
        }
        if ( t.kind == Tok::ident )
        {
            next();
            auto e = std::make_shared< Expr >();
            e->op = Expr::Op::variable;
            e->name = t.text;
            return e;
        }
        if ( at_sym( "(" ) )
        {
            next();
            auto e = expr();
            if ( !at_sym( ")" ) )
                fail( "expected ')'" );
            next();
            return e;
        }
        if ( at_sym( "-" ) )
        {
            next();
            auto zero = std::make_shared< Expr >();
            return binary( Expr::Op::sub, zero, atom() );
        }
        fail( t.kind == Tok::end ? "unexpected end of expression" : "unexpected '" + t.text + "'" );
    }

    std::string src_;
    std::vector< Tok > toks_;
    std::size_t pos_ = 0;
};

std::shared_ptr< const Expr > constant_comparison( bool truth )
{
    // true is 0 = 0, false is 0 != 0
    auto zero = std::make_shared< Expr >();
    auto e = std::make_shared< Expr >();
    e->op = truth ? Expr::Op::eq : Expr::Op::ne;
    e->lhs = zero;
    e->rhs = zero;
    return e;
}

const char* op_text( Expr::Op op )
{
    switch ( op )
    {
    case Expr::Op::add: return "+";
    case Expr::Op::sub: return "-";
    case Expr::Op::mul: return "*";
    case Expr::Op::lt: return "<";
    case Expr::Op::le: return "<=";
    case Expr::Op::eq: return "=";
    case Expr::Op::ne: return "!=";
    case Expr::Op::ge: return ">=";
    case Expr::Op::gt: return ">";
    default: return "?";
    }
}

std::int64_t read_var( const std::string& name, const Store& attrs, const Store& locals )
{
    const Value* v = nullptr;
    if ( auto it = locals.find( name ); it != locals.end() )
        v = &it->second;
    else if ( auto it2 = attrs.find( name ); it2 != attrs.end() )
        v = &it2->second;
    if ( !v )
        throw ActionError( "unknown variable '" + name + "'" );
    if ( const auto* i = std::get_if< std::int64_t >( v ) )
        return *i;
    throw ActionError( "variable '" + name + "' is not an integer" );
}

} // namespace

ActionStmt parse_stmt( const std::string& text )
{
    Parser p( text );
    ActionStmt s;
    if ( p.peek().kind == Tok::end )
        return s;
    if ( p.peek().kind == Tok::ident && p.peek().text == "skip" && p.peek( 1 ).kind == Tok::end )
        return s;

    s.kind = ActionStmt::Kind::set_attr;
    if ( p.peek().kind == Tok::ident && p.peek().text == "local" && p.peek( 1 ).kind == Tok::ident )
    {
        p.next();
        s.kind = ActionStmt::Kind::set_local;
    }
    if ( p.peek().kind != Tok::ident )
        p.fail( "expected a variable name" );
    s.target = p.next().text;
    if ( !p.at_sym( ":=" ) )
        p.fail( "expected ':='" );
    p.next();
    s.expr = p.expr();
    p.expect_end();
    return s;
}

std::shared_ptr< const Expr > parse_guard( const std::string& text )
{
    Parser p( text );
    if ( p.peek().kind == Tok::ident && p.peek( 1 ).kind == Tok::end &&
         ( p.peek().text == "true" || p.peek().text == "false" ) )
        return constant_comparison( p.peek().text == "true" );
    auto e = p.comparison();
    p.expect_end();
    return e;
}

std::string to_string( const Expr& e )
{
    switch ( e.op )
    {
    case Expr::Op::literal: return std::to_string( e.value );
    case Expr::Op::variable: return e.name;
    default: break;
    }
    auto side = [ & ]( const Expr& x ) {
        return x.op == Expr::Op::literal || x.op == Expr::Op::variable ? to_string( x ) : "(" + to_string( x ) + ")";
    };
    return side( *e.lhs ) + " " + op_text( e.op ) + " " + side( *e.rhs );
}

std::string to_string( const ActionStmt& s )
{
    switch ( s.kind )
    {
    case ActionStmt::Kind::skip: return "skip";
    case ActionStmt::Kind::set_attr: return s.target + " := " + to_string( *s.expr );
    case ActionStmt::Kind::set_local: return "local " + s.target + " := " + to_string( *s.expr );
    }
    return "?";
}

std::int64_t eval_expr( const Expr& e, const Store& attrs, const Store& locals )
{
    switch ( e.op )
    {
    case Expr::Op::literal: return e.value;
    case Expr::Op::variable: return read_var( e.name, attrs, locals );
    case Expr::Op::add: return eval_expr( *e.lhs, attrs, locals ) + eval_expr( *e.rhs, attrs, locals );
    case Expr::Op::sub: return eval_expr( *e.lhs, attrs, locals ) - eval_expr( *e.rhs, attrs, locals );
    case Expr::Op::mul: return eval_expr( *e.lhs, attrs, locals ) * eval_expr( *e.rhs, attrs, locals );
    default: throw ActionError( "comparison used as a value: " + to_string( e ) );
    }
}

bool eval_guard( const Expr& e, const Store& attrs, const Store& locals )
{
    if ( !e.is_comparison() )
        throw ActionError( "guard is not a comparison: " + to_string( e ) );
    auto l = eval_expr( *e.lhs, attrs, locals );
    auto r = eval_expr( *e.rhs, attrs, locals );
    switch ( e.op )
    {
    case Expr::Op::lt: return l < r;
    case Expr::Op::le: return l <= r;
    case Expr::Op::eq: return l == r;
    case Expr::Op::ne: return l != r;
    case Expr::Op::ge: return l >= r;
    case Expr::Op::gt: return l > r;
    default: return false;
    }
}

SystemState apply_stmt( const ActionStmt& stmt, const Oid& oid, const ThreadId& thread, const SystemState& s,
                        const PcAdvance& advance )
{
    const auto* top = top_frame( s, oid, thread );
    if ( !top )
        throw ModelError( "no frame for " + oid + "/" + thread );

    SystemState next = s;
    auto& stack = next.control[ oid ][ thread ];
    static const Store no_attrs;
    auto attrs_it = s.data.find( oid );
    const Store& attrs = attrs_it == s.data.end() ? no_attrs : attrs_it->second;

    switch ( stmt.kind )
    {
    case ActionStmt::Kind::skip: break;
    case ActionStmt::Kind::set_attr:
        next.data[ oid ][ stmt.target ] = eval_expr( *stmt.expr, attrs, top->vars );
        break;
    case ActionStmt::Kind::set_local:
        stack.back().vars[ stmt.target ] = eval_expr( *stmt.expr, attrs, top->vars );
        break;
    }
    stack = advance( stack );
    return next;
}

bool semStmt( const ActionStmt& stmt, const Oid& oid, const ThreadId& thread, const SystemState& s,
              const SystemState& s2, const PcAdvance& advance )
{
    return apply_stmt( stmt, oid, thread, s, advance ) == s2;
}

} // namespace adsem

#pragma once

// Abstract syntax, parser and printer for the While+break language.

#include <cctype>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hl {

// ============================================================================
// Expressions
// ============================================================================

enum class AKind { Const, Var, Neg, Add, Sub, Mul };

struct ANode;
using AExpr = std::shared_ptr<const ANode>;

struct ANode {
    AKind kind;
    std::int64_t value = 0;
    std::string name;
    AExpr lhs, rhs;
};

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };
enum class BKind { True, False, Cmp, Not, And, Or };

struct BNode;
using BExpr = std::shared_ptr<const BNode>;

struct BNode {
    BKind kind;
    CmpOp op = CmpOp::Eq;
    AExpr a, b;
    BExpr lhs, rhs;
};

inline AExpr cst(std::int64_t v) { return std::make_shared<const ANode>(ANode{AKind::Const, v, {}, {}, {}}); }
inline AExpr var(std::string n) { return std::make_shared<const ANode>(ANode{AKind::Var, 0, std::move(n), {}, {}}); }
inline AExpr neg(AExpr e) { return std::make_shared<const ANode>(ANode{AKind::Neg, 0, {}, std::move(e), {}}); }
inline AExpr abin(AKind k, AExpr l, AExpr r) {
    return std::make_shared<const ANode>(ANode{k, 0, {}, std::move(l), std::move(r)});
}

inline BExpr btrue() { return std::make_shared<const BNode>(BNode{BKind::True, CmpOp::Eq, {}, {}, {}, {}}); }
inline BExpr bfalse() { return std::make_shared<const BNode>(BNode{BKind::False, CmpOp::Eq, {}, {}, {}, {}}); }
inline BExpr cmp(CmpOp op, AExpr a, AExpr b) {
    return std::make_shared<const BNode>(BNode{BKind::Cmp, op, std::move(a), std::move(b), {}, {}});
}
inline BExpr bnot(BExpr e) { return std::make_shared<const BNode>(BNode{BKind::Not, CmpOp::Eq, {}, {}, std::move(e), {}}); }
inline BExpr band(BExpr l, BExpr r) {
    return std::make_shared<const BNode>(BNode{BKind::And, CmpOp::Eq, {}, {}, std::move(l), std::move(r)});
}
inline BExpr bor(BExpr l, BExpr r) {
    return std::make_shared<const BNode>(BNode{BKind::Or, CmpOp::Eq, {}, {}, std::move(l), std::move(r)});
}

inline bool equal(const AExpr& x, const AExpr& y) {
    if (x == y) return true;
    if (!x || !y || x->kind != y->kind) return false;
    switch (x->kind) {
    case AKind::Const: return x->value == y->value;
    case AKind::Var: return x->name == y->name;
    case AKind::Neg: return equal(x->lhs, y->lhs);
    default: return equal(x->lhs, y->lhs) && equal(x->rhs, y->rhs);
    }
}

inline bool equal(const BExpr& x, const BExpr& y) {
    if (x == y) return true;
    if (!x || !y || x->kind != y->kind) return false;
    switch (x->kind) {
    case BKind::True:
    case BKind::False: return true;
    case BKind::Cmp: return x->op == y->op && equal(x->a, y->a) && equal(x->b, y->b);
    case BKind::Not: return equal(x->lhs, y->lhs);
    default: return equal(x->lhs, y->lhs) && equal(x->rhs, y->rhs);
    }
}

// ============================================================================
// Statements
// ============================================================================

enum class SKind { Assign, RandAssign, Skip, Seq, If, While, Break, BoolTest };

struct SNode;
using Stmt = std::shared_ptr<const SNode>;

struct SNode {
    SKind kind;
    std::string target;
    AExpr rhs;
    std::optional<std::int64_t> lo, hi; // nullopt stands for -oo / +oo
    BExpr cond;
    Stmt first, second;
};

inline Stmt assign(std::string x, AExpr e) {
    return std::make_shared<const SNode>(SNode{SKind::Assign, std::move(x), std::move(e), {}, {}, {}, {}, {}});
}
inline Stmt rand_assign(std::string x, std::optional<std::int64_t> lo, std::optional<std::int64_t> hi) {
    return std::make_shared<const SNode>(SNode{SKind::RandAssign, std::move(x), {}, lo, hi, {}, {}, {}});
}
inline Stmt skip() { return std::make_shared<const SNode>(SNode{SKind::Skip, {}, {}, {}, {}, {}, {}, {}}); }
inline Stmt brk() { return std::make_shared<const SNode>(SNode{SKind::Break, {}, {}, {}, {}, {}, {}, {}}); }
inline Stmt seq(Stmt a, Stmt b) {
    return std::make_shared<const SNode>(SNode{SKind::Seq, {}, {}, {}, {}, {}, std::move(a), std::move(b)});
}
inline Stmt ite(BExpr c, Stmt t, Stmt e) {
    return std::make_shared<const SNode>(SNode{SKind::If, {}, {}, {}, {}, std::move(c), std::move(t), std::move(e)});
}
inline Stmt loop(BExpr c, Stmt body) {
    return std::make_shared<const SNode>(SNode{SKind::While, {}, {}, {}, {}, std::move(c), std::move(body), {}});
}
// Guard statement used by the calculus; it has no concrete syntax.
inline Stmt test(BExpr c) {
    return std::make_shared<const SNode>(SNode{SKind::BoolTest, {}, {}, {}, {}, std::move(c), {}, {}});
}

inline bool equal(const Stmt& x, const Stmt& y) {
    if (x == y) return true;
    if (!x || !y || x->kind != y->kind) return false;
    switch (x->kind) {
    case SKind::Assign: return x->target == y->target && equal(x->rhs, y->rhs);
    case SKind::RandAssign: return x->target == y->target && x->lo == y->lo && x->hi == y->hi;
    case SKind::Skip:
    case SKind::Break: return true;
    case SKind::Seq: return equal(x->first, y->first) && equal(x->second, y->second);
    case SKind::If: return equal(x->cond, y->cond) && equal(x->first, y->first) && equal(x->second, y->second);
    case SKind::While: return equal(x->cond, y->cond) && equal(x->first, y->first);
    case SKind::BoolTest: return equal(x->cond, y->cond);
    }
    return false;
}

/// Immediate strict syntactic components, in source order.
inline std::vector<Stmt> components(const Stmt& s) {
    switch (s->kind) {
    case SKind::Seq:
    case SKind::If: return {s->first, s->second};
    case SKind::While: return {s->first};
    default: return {};
    }
}

using AstPath = std::vector<int>;

/// Returns the path of the first break that has no enclosing loop, or nullopt.
inline std::optional<AstPath> validate_breaks(const Stmt& s) {
    struct Walk {
        AstPath path;
        std::optional<AstPath> go(const Stmt& t, bool in_loop) {
            if (t->kind == SKind::Break) {
                if (in_loop) return std::nullopt;
                return path;
            }
            bool inner = in_loop || t->kind == SKind::While;
            auto kids = components(t);
            for (std::size_t i = 0; i < kids.size(); ++i) {
                path.push_back(static_cast<int>(i));
                if (auto bad = go(kids[i], inner)) return bad;
                path.pop_back();
            }
            return std::nullopt;
        }
    };
    return Walk{}.go(s, false);
}

inline void collect_vars(const AExpr& e, std::set<std::string>& out) {
    if (!e) return;
    if (e->kind == AKind::Var) out.insert(e->name);
    collect_vars(e->lhs, out);
    collect_vars(e->rhs, out);
}

inline void collect_vars(const BExpr& e, std::set<std::string>& out) {
    if (!e) return;
    collect_vars(e->a, out);
    collect_vars(e->b, out);
    collect_vars(e->lhs, out);
    collect_vars(e->rhs, out);
}

inline void collect_vars(const Stmt& s, std::set<std::string>& out) {
    if (!s) return;
    if (!s->target.empty()) out.insert(s->target);
    collect_vars(s->rhs, out);
    collect_vars(s->cond, out);
    collect_vars(s->first, out);
    collect_vars(s->second, out);
}

inline std::set<std::string> variables(const Stmt& s) {
    std::set<std::string> out;
    collect_vars(s, out);
    return out;
}

inline bool has_loop(const Stmt& s) {
    if (s->kind == SKind::While) return true;
    for (const auto& c : components(s))
        if (has_loop(c)) return true;
    return false;
}

inline bool has_break(const Stmt& s) {
    if (s->kind == SKind::Break) return true;
    for (const auto& c : components(s))
        if (has_break(c)) return true;
    return false;
}

inline std::size_t depth(const Stmt& s) {
    std::size_t d = 0;
    for (const auto& c : components(s)) d = std::max(d, depth(c));
    return d + 1;
}

// ============================================================================
// Printer
// ============================================================================

namespace detail {

inline int aprec(AKind k) {
    switch (k) {
    case AKind::Add:
    case AKind::Sub: return 1;
    case AKind::Mul: return 2;
    default: return 3;
    }
}

inline int bprec(BKind k) {
    switch (k) {
    case BKind::Or: return 1;
    case BKind::And: return 2;
    default: return 3;
    }
}

} // namespace detail

inline std::string to_string(CmpOp op) {
    switch (op) {
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
    }
    return "?";
}

inline std::string to_string(const AExpr& e) {
    switch (e->kind) {
    case AKind::Const: return std::to_string(e->value);
    case AKind::Var: return e->name;
    case AKind::Neg: return "-(" + to_string(e->lhs) + ")";
    default: break;
    }
    int p = detail::aprec(e->kind);
    std::string l = to_string(e->lhs);
    std::string r = to_string(e->rhs);
    if (detail::aprec(e->lhs->kind) < p) l = "(" + l + ")";
    if (detail::aprec(e->rhs->kind) <= p) r = "(" + r + ")";
    const char* op = e->kind == AKind::Add ? " + " : e->kind == AKind::Sub ? " - " : " * ";
    return l + op + r;
}

inline std::string to_string(const BExpr& e) {
    switch (e->kind) {
    case BKind::True: return "true";
    case BKind::False: return "false";
    case BKind::Cmp: return to_string(e->a) + " " + to_string(e->op) + " " + to_string(e->b);
    case BKind::Not: {
        std::string inner = to_string(e->lhs);
        if (e->lhs->kind != BKind::True && e->lhs->kind != BKind::False) inner = "(" + inner + ")";
        return "!" + inner;
    }
    default: break;
    }
    int p = detail::bprec(e->kind);
    std::string l = to_string(e->lhs);
    std::string r = to_string(e->rhs);
    if (detail::bprec(e->lhs->kind) < p) l = "(" + l + ")";
    if (detail::bprec(e->rhs->kind) <= p) r = "(" + r + ")";
    return l + (e->kind == BKind::And ? " && " : " || ") + r;
}

inline std::string to_string(const Stmt& s) {
    auto bound = [](const std::optional<std::int64_t>& b, const char* inf) {
        return b ? std::to_string(*b) : std::string(inf);
    };
    auto block = [](const Stmt& t) {
        if (t->kind == SKind::Seq) return "{ " + to_string(t) + " }";
        return to_string(t);
    };
    switch (s->kind) {
    case SKind::Assign: return s->target + " = " + to_string(s->rhs);
    case SKind::RandAssign: return s->target + " = [" + bound(s->lo, "-oo") + ", " + bound(s->hi, "oo") + "]";
    case SKind::Skip: return "skip";
    case SKind::Break: return "break";
    case SKind::Seq: {
        std::string head = to_string(s->first);
        if (s->first->kind == SKind::Seq) head = "{ " + head + " }";
        else head += ";";
        return head + " " + to_string(s->second);
    }
    case SKind::If:
        return "if (" + to_string(s->cond) + ") " + block(s->first) + " else " + block(s->second);
    case SKind::While: return "while (" + to_string(s->cond) + ") " + block(s->first);
    case SKind::BoolTest: return "test(" + to_string(s->cond) + ")";
    }
    return "?";
}

// ============================================================================
// Parser
// ============================================================================

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line, int column)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg), line_(line),
          column_(column) {}
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_, column_;
};

namespace detail {

enum class Tok { Int, Ident, Sym, End };

struct Token {
    Tok kind;
    std::string text;
    std::int64_t value = 0;
    int line = 1, column = 1;
};

inline std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        Token t{Tok::Sym, {}, 0, line, col};
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            t.kind = Tok::Int;
            t.text = std::string(src.substr(i, j - i));
            if (t.text.size() > 15) throw ParseError("integer literal too large", line, col);
            t.value = std::stoll(t.text);
            advance(j - i);
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
            t.kind = Tok::Ident;
            t.text = std::string(src.substr(i, j - i));
            advance(j - i);
        } else {
            static const char* two[] = {"==", "!=", "<=", ">=", "&&", "||"};
            bool matched = false;
            for (const char* op : two) {
                if (src.substr(i, 2) == op) {
                    t.text = op;
                    advance(2);
                    matched = true;
                    break;
                }
            }
            if (!matched) {
                if (std::string_view("=<>!+-*;,()[]{}").find(c) == std::string_view::npos)
                    throw ParseError(std::string("unexpected character '") + c + "'", line, col);
                t.text = std::string(1, c);
                advance(1);
            }
        }
        out.push_back(std::move(t));
    }
    out.push_back(Token{Tok::End, "<end>", 0, line, col});
    return out;
}

inline bool is_keyword(const std::string& s) {
    return s == "skip" || s == "break" || s == "if" || s == "else" || s == "while" || s == "true" ||
           s == "false";
}

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Stmt program() {
        Stmt s = sequence();
        if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
        return s;
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;

    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    bool at(const char* sym) const { return peek().kind == Tok::Sym && peek().text == sym; }
    bool at_word(const char* w) const { return peek().kind == Tok::Ident && peek().text == w; }
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().line, peek().column); }
    void expect(const char* sym) {
        if (!at(sym)) fail(std::string("expected '") + sym + "' but found '" + peek().text + "'");
        ++pos_;
    }

    bool starts_statement() const {
        const Token& t = peek();
        if (t.kind == Tok::Ident) return t.text != "else";
        return t.kind == Tok::Sym && t.text == "{";
    }

    // Right-nested sequence of statements with optional ';' terminators.
    Stmt sequence() {
        std::vector<Stmt> items;
        while (true) {
            while (at(";")) ++pos_;
            if (!starts_statement()) break;
            items.push_back(statement());
        }
        if (items.empty()) return skip();
        Stmt s = items.back();
        for (std::size_t i = items.size() - 1; i-- > 0;) s = seq(items[i], s);
        return s;
    }

    Stmt statement() {
        if (at("{")) {
            ++pos_;
            Stmt s = sequence();
            expect("}");
            return s;
        }
        if (peek().kind != Tok::Ident) fail("expected a statement");
        std::string w = peek().text;
        if (w == "skip") {
            ++pos_;
            return skip();
        }
        if (w == "break") {
            ++pos_;
            return brk();
        }
        if (w == "if") {
            ++pos_;
            expect("(");
            BExpr c = bexpr();
            expect(")");
            Stmt t = statement();
            if (at(";") && peek(1).kind == Tok::Ident && peek(1).text == "else") ++pos_;
            Stmt e = skip();
            if (at_word("else")) {
                ++pos_;
                e = statement();
            }
            return ite(c, t, e);
        }
        if (w == "while") {
            ++pos_;
            expect("(");
            BExpr c = bexpr();
            expect(")");
            return loop(c, statement());
        }
        if (is_keyword(w)) fail("unexpected keyword '" + w + "'");
        ++pos_;
        expect("=");
        if (at("[")) {
            ++pos_;
            auto lo = bound(false);
            expect(",");
            auto hi = bound(true);
            expect("]");
            return rand_assign(w, lo, hi);
        }
        return assign(w, aexpr());
    }

    std::optional<std::int64_t> bound(bool upper) {
        bool minus = false;
        if (at("-")) {
            minus = true;
            ++pos_;
        } else if (at("+")) {
            ++pos_;
        }
        if (at_word("oo")) {
            if (minus == upper) fail(upper ? "upper bound cannot be -oo" : "lower bound cannot be oo");
            ++pos_;
            return std::nullopt;
        }
        if (peek().kind != Tok::Int) fail("expected an integer or oo in random assignment bounds");
        std::int64_t v = peek().value;
        ++pos_;
        return minus ? -v : v;
    }

    AExpr aexpr() {
        AExpr l = term();
        while (at("+") || at("-")) {
            AKind k = at("+") ? AKind::Add : AKind::Sub;
            ++pos_;
            l = abin(k, l, term());
        }
        return l;
    }

    AExpr term() {
        AExpr l = factor();
        while (at("*")) {
            ++pos_;
            l = abin(AKind::Mul, l, factor());
        }
        return l;
    }

    AExpr factor() {
        if (at("-")) {
            ++pos_;
            if (peek().kind == Tok::Int) {
                std::int64_t v = peek().value;
                ++pos_;
                return cst(-v);
            }
            return neg(factor());
        }
        if (peek().kind == Tok::Int) {
            std::int64_t v = peek().value;
            ++pos_;
            return cst(v);
        }
        if (peek().kind == Tok::Ident && !is_keyword(peek().text)) {
            std::string n = peek().text;
            ++pos_;
            return var(n);
        }
        if (at("(")) {
            ++pos_;
            AExpr e = aexpr();
            expect(")");
            return e;
        }
        fail("expected an arithmetic expression");
    }

    BExpr bexpr() {
        BExpr l = bconj();
        while (at("||")) {
            ++pos_;
            l = bor(l, bconj());
        }
        return l;
    }

    BExpr bconj() {
        BExpr l = bunary();
        while (at("&&")) {
            ++pos_;
            l = band(l, bunary());
        }
        return l;
    }

    BExpr bunary() {
        if (at("!")) {
            ++pos_;
            return bnot(bunary());
        }
        if (at_word("true")) {
            ++pos_;
            return btrue();
        }
        if (at_word("false")) {
            ++pos_;
            return bfalse();
        }
        if (at("(")) {
            // A parenthesis may open either a boolean or an arithmetic operand.
            std::size_t save = pos_;
            try {
                ++pos_;
                BExpr inner = bexpr();
                expect(")");
                bool continues_arith = at("+") || at("-") || at("*") || at("==") || at("!=") || at("<") ||
                                       at("<=") || at(">") || at(">=");
                if (!continues_arith) return inner;
            } catch (const ParseError&) {
            }
            pos_ = save;
        }
        AExpr a = aexpr();
        CmpOp op;
        if (at("==")) op = CmpOp::Eq;
        else if (at("!=")) op = CmpOp::Ne;
        else if (at("<=")) op = CmpOp::Le;
        else if (at(">=")) op = CmpOp::Ge;
        else if (at("<")) op = CmpOp::Lt;
        else if (at(">")) op = CmpOp::Gt;
        else fail("expected a comparison operator");
        ++pos_;
        return cmp(op, a, aexpr());
    }
};

} // namespace detail

/// Parses program text into an AST; throws ParseError with line and column.
inline Stmt parse(std::string_view text) { return detail::Parser(detail::lex(text)).program(); }

inline BExpr parse_bexpr(std::string_view text) {
    Stmt s = parse("while (" + std::string(text) + ") skip");
    return s->cond;
}

} // namespace hl

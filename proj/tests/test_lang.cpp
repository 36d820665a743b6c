#include <catch_amalgamated.hpp>

#include "hl/experiments.hpp"
#include "hl/lang.hpp"

using namespace hl;

// ============================================================================
// Parsing
// ============================================================================

TEST_CASE("skip parses to the atomic statement", "[lang][parse]") {
    Stmt s = parse("skip");
    CHECK(s->kind == SKind::Skip);
    CHECK(components(s).empty());
}

TEST_CASE("countdown loop parses to a while with an assignment body", "[lang][parse]") {
    Stmt s = parse("while (y!=0) y=y-1;");
    REQUIRE(s->kind == SKind::While);
    CHECK(equal(s->cond, cmp(CmpOp::Ne, var("y"), cst(0))));
    CHECK(equal(s->first, assign("y", abin(AKind::Sub, var("y"), cst(1)))));
}

TEST_CASE("unbounded random assignment before a loop", "[lang][parse]") {
    Stmt s = parse("x = [-oo,oo]; while (x!=0) { x=x-1; }");
    REQUIRE(s->kind == SKind::Seq);
    REQUIRE(s->first->kind == SKind::RandAssign);
    CHECK(s->first->target == "x");
    CHECK_FALSE(s->first->lo.has_value());
    CHECK_FALSE(s->first->hi.has_value());
    CHECK(s->second->kind == SKind::While);
}

TEST_CASE("bounded random assignment keeps both bounds", "[lang][parse]") {
    Stmt s = parse("x = [-2, 3]");
    REQUIRE(s->kind == SKind::RandAssign);
    CHECK(*s->lo == -2);
    CHECK(*s->hi == 3);
}

TEST_CASE("whitespace and terminators do not change the tree", "[lang][parse]") {
    Stmt a = parse("if (x > 0) { x = x - 1; } else { skip; }");
    Stmt b = parse("if(x>0){x=x-1}else{skip}");
    Stmt c = parse("if (x > 0)\n  x = x - 1\nelse\n  skip");
    CHECK(equal(a, b));
    CHECK(equal(a, c));
}

TEST_CASE("arithmetic precedence and associativity", "[lang][parse]") {
    Stmt s = parse("x = 1 - 2 - 3 * y + -x");
    AExpr want = abin(AKind::Add, abin(AKind::Sub, abin(AKind::Sub, cst(1), cst(2)), abin(AKind::Mul, cst(3), var("y"))),
                      neg(var("x")));
    CHECK(equal(s->rhs, want));
}

TEST_CASE("boolean precedence: not binds tighter than and, and than or", "[lang][parse]") {
    BExpr b = parse_bexpr("!x == 0 && y < 1 || true");
    BExpr want = bor(band(bnot(cmp(CmpOp::Eq, var("x"), cst(0))), cmp(CmpOp::Lt, var("y"), cst(1))), btrue());
    CHECK(equal(b, want));
}

TEST_CASE("syntax errors carry line and column", "[lang][parse][errors]") {
    try {
        parse("skip;\n  x = ;");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(e.column() == 7);
    }
    CHECK_THROWS_AS(parse("while x != 0 skip"), ParseError);
    CHECK_THROWS_AS(parse("x = 1 +"), ParseError);
    CHECK_THROWS_AS(parse("x = #"), ParseError);
    CHECK_THROWS_AS(parse("{ x = 1"), ParseError);
}

// ============================================================================
// Structure
// ============================================================================

TEST_CASE("components are the immediate strict subterms", "[lang][structure]") {
    Stmt a = parse("x = 1"), b = parse("skip");
    auto sc = components(seq(a, b));
    REQUIRE(sc.size() == 2);
    CHECK(equal(sc[0], a));
    CHECK(equal(sc[1], b));
    auto wc = components(loop(btrue(), a));
    REQUIRE(wc.size() == 1);
    CHECK(equal(wc[0], a));
    CHECK(components(ite(btrue(), a, b)).size() == 2);
}

TEST_CASE("breaks must sit inside a loop", "[lang][structure]") {
    auto top = validate_breaks(brk());
    REQUIRE(top.has_value());
    CHECK(top->empty());
    CHECK_FALSE(validate_breaks(loop(btrue(), brk())).has_value());
    auto late = validate_breaks(seq(loop(btrue(), skip()), brk()));
    REQUIRE(late.has_value());
    CHECK(*late == AstPath{1});
    auto nested = validate_breaks(ite(btrue(), skip(), seq(skip(), brk())));
    REQUIRE(nested.has_value());
    CHECK(*nested == AstPath{1, 1});
}

TEST_CASE("variables, loops and breaks are collected", "[lang][structure]") {
    Stmt s = parse("while (x < y) { if (z == 0) { break } else { x = x + 1 } }");
    CHECK(variables(s) == std::set<std::string>{"x", "y", "z"});
    CHECK(has_loop(s));
    CHECK(has_break(s));
    CHECK_FALSE(has_loop(parse("x = 1; y = 2")));
}

// ============================================================================
// Properties over generated programs
// ============================================================================

TEST_CASE("printing then parsing is the identity on generated programs", "[lang][property]") {
    for (auto& c : random_programs(400, 101)) {
        std::string text = to_string(c.program);
        INFO(text);
        Stmt back = parse(text);
        CHECK(equal(back, c.program));
        CHECK(to_string(back) == text);
    }
}

TEST_CASE("the component order is well founded on generated programs", "[lang][property]") {
    for (auto& c : random_programs(200, 202)) {
        std::vector<Stmt> work{c.program};
        std::size_t steps = 0;
        while (!work.empty()) {
            Stmt t = work.back();
            work.pop_back();
            for (auto& k : components(t)) {
                CHECK(depth(k) < depth(t));
                work.push_back(k);
            }
            ++steps;
        }
        CHECK(steps <= (std::size_t{1} << (depth(c.program) + 1)));
    }
}

TEST_CASE("generated programs respect the depth bound and break placement", "[lang][property]") {
    for (auto& c : random_programs(300, 303)) {
        CHECK(depth(c.program) <= 4);
        CHECK_FALSE(validate_breaks(c.program).has_value());
        CHECK(variables(c.program).size() <= 2);
    }
}

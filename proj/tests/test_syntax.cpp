#include <gtest/gtest.h>

#include <random>

#include "mvlab/syntax.hpp"

using namespace mvlab;

namespace {

LanguageSpec lang() {
    LanguageSpec L;
    L.variables = 6;
    L.reserve = 1;
    L.predicates = {{"p", 1}, {"q", 2}, {"r", 0}};
    return L;
}

}  // namespace

TEST(Syntax, FreeAndBound) {
    auto f = parse("A{v1} p(v1) (*) q(v0,v1)");
    // the quantifier binds tighter than (*)
    EXPECT_EQ(f.kind(), FKind::Odot);
    EXPECT_EQ(free_vars(f), (VarSet{0, 1}));
    EXPECT_EQ(bound_vars(f), (VarSet{1}));

    auto g = parse("E{v0,v1} q(v0,v1)");
    EXPECT_TRUE(free_vars(g).empty());
    EXPECT_EQ(bound_vars(g), (VarSet{0, 1}));
    EXPECT_EQ(g.vars(), (VarSet{0, 1}));
}

TEST(Syntax, RestrictExtend) {
    VarMap f{{0, 3}, {5, 1}};
    auto r = restrict_extend(f, {0, 1, 2});
    EXPECT_EQ(r, (VarMap{{0, 3}, {1, 1}, {2, 2}}));
}

TEST(Syntax, SubstitutionExamples) {
    auto f = parse("A{v1} q(v0,v1)");
    EXPECT_EQ(render(substitute({{1, 2}}, f)), "A{v2} q(v0,v2)");
    EXPECT_EQ(substitute_free({{1, 2}}, f), f);
    EXPECT_EQ(render(substitute_free({{0, 3}}, f)), "A{v1} q(v3,v1)");

    LanguageSpec L = lang();
    EXPECT_THROW(substitute({{1, 9}}, f, &L), ScopeError);
}

TEST(Syntax, SubstitutionComposes) {
    std::mt19937_64 rng(1);
    RandomFormulaSpec spec{{{"p", 1}, {"q", 2}}, 4, 4, 2, true};
    for (int t = 0; t < 300; ++t) {
        auto f = random_formula(rng, spec);
        VarMap s, u;
        for (int v = 0; v < 4; ++v) {
            s[v] = static_cast<int>(rng() % 5);
            u[v] = static_cast<int>(rng() % 5);
        }
        VarMap su;
        for (int v = 0; v < 5; ++v) su[v] = map_var(s, map_var(u, v));
        EXPECT_EQ(substitute(su, f), substitute(s, substitute(u, f)));
    }
}

TEST(Syntax, RenamingApartLeavesNoCapture) {
    auto f = parse("E{v0} q(v0,v1)");
    auto g = substitute_renaming_apart({{1, 0}}, f);
    EXPECT_EQ(g.free_vars(), VarSet{0});
    EXPECT_EQ(g.kind(), FKind::Exists);
    EXPECT_FALSE(g.block().count(0));
}

TEST(Syntax, Precedence) {
    EXPECT_EQ(parse("p(v0) (+) q(v0,v1) (*) r"), parse("p(v0) (+) (q(v0,v1) (*) r)"));
    EXPECT_EQ(parse("r -> r -> r").right().kind(), FKind::Implies);
    EXPECT_EQ(parse("~r (*) r").left().kind(), FKind::Neg);
    EXPECT_EQ(parse("r (+) r -> r").kind(), FKind::Implies);
    EXPECT_EQ(parse("r (+) r (+) r").left().kind(), FKind::Oplus);
    EXPECT_EQ(parse("r()"), parse("r"));
}

TEST(Syntax, RenderRoundTrip) {
    std::mt19937_64 rng(7);
    RandomFormulaSpec spec{{{"p", 1}, {"q", 2}, {"r", 0}}, 4, 5, 3, true};
    for (int t = 0; t < 1000; ++t) {
        auto f = random_formula(rng, spec);
        auto s = render(f);
        EXPECT_EQ(parse(s), f) << s;
        EXPECT_EQ(render(parse(s)), s);
    }
}

TEST(Syntax, Errors) {
    LanguageSpec L = lang();
    try {
        parse("p(v0) (+)", L);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.position, 9u);
    }
    EXPECT_THROW(parse("s(v0)", L), LanguageError);
    EXPECT_THROW(parse("q(v0)", L), LanguageError);
    EXPECT_THROW(parse("p(v0) (+) p(v0,v1)"), LanguageError);
    EXPECT_THROW(parse("p(v9)", L), ScopeError);
    EXPECT_THROW(parse("(p(v0)"), ParseError);
    EXPECT_THROW(parse("v0"), ParseError);
}

TEST(Syntax, LanguageAdmission) {
    LanguageSpec L = lang();
    L.validate();
    L.admit(parse("q(v0,v1) -> p(v2)", L));
    LanguageSpec tight = L;
    tight.variables = 3;
    tight.reserve = 1;
    EXPECT_THROW(tight.admit(parse("q(v0,v1) -> p(v2)")), ScopeError);
    LanguageSpec bad = L;
    bad.predicates.push_back({"T", 0});
    EXPECT_THROW(bad.validate(), LanguageError);
    bad = L;
    bad.reserve = 0;
    EXPECT_THROW(bad.validate(), LanguageError);
}

#include <gtest/gtest.h>

#include "mvlab/pavelka.hpp"

using namespace mvlab;

namespace {

using Element = FunctionalSetAlgebra::Element;

// Two indices, two individuals, values in the 5-chain; generated by the constant 1/4 and x(0).
FunctionalSetAlgebra graded_demo() {
    SetAlgebraSpec s;
    s.dim = 2;
    s.base = 2;
    s.chain = 5;
    s.cap = 1000;
    s.generators = {Element{1, 1, 1, 1}, Element{0, 4, 0, 4}};
    return FunctionalSetAlgebra::build_generated(s);
}

Filter top_filter(const MVAlgebra& M) { return principal_filter(M, M.one()); }

}  // namespace

TEST(Pavelka, ConstantLaws) {
    for (int n = 2; n <= 6; ++n) {
        auto P = full_constants(n);
        for (const auto& c : check_constant_laws(P)) EXPECT_TRUE(c.passed) << n << " " << c.clause;
    }
    auto P = full_constants(5);
    std::swap(P.constants[Rational(1, 4)], P.constants[Rational(3, 4)]);
    auto laws = check_constant_laws(P);
    EXPECT_FALSE(std::all_of(laws.begin(), laws.end(), [](const ClauseCheck& c) { return c.passed; }));
}

TEST(Pavelka, DegreeOnChains) {
    for (int n = 2; n <= 5; ++n) {
        GradedContext ctx(full_constants(n), top_filter(MVAlgebra::chain(n)));
        for (int a = 0; a < n; ++a) {
            EXPECT_EQ(degree(a, ctx), Rational(a, n - 1));
            EXPECT_EQ(degree_dual(a, ctx), Rational(a, n - 1));
        }
        for (const auto& F : all_filters(MVAlgebra::chain(n))) {
            if (!F.proper()) continue;
            GradedContext c(full_constants(n), F);
            for (const auto& chk : degree_audit(c)) EXPECT_TRUE(chk.passed) << chk.clause << " " << chk.witness;
        }
    }
    auto L3 = MVAlgebra::chain(3);
    EXPECT_THROW(GradedContext(full_constants(3), Filter(L3, {true, true, true})), ProperFilterRequired);
}

TEST(Pavelka, Lemma) {
    auto P = full_constants(5);
    auto F = top_filter(P.base);
    EXPECT_TRUE(pavelka_lemma_check(P, F).passed());
    auto bad = P;
    std::swap(bad.constants[Rational(1, 4)], bad.constants[Rational(3, 4)]);
    auto r = pavelka_lemma_check(bad, F);
    ASSERT_FALSE(r.passed());
    EXPECT_FALSE(r.checks[1].passed);
    EXPECT_FALSE(r.checks[1].witness.empty());
    EXPECT_THROW(pavelka_lemma_check(P, Filter(P.base, std::vector<bool>(5, true))), ProperFilterRequired);
}

TEST(Pavelka, DegreesInAFunctionalAlgebra) {
    auto A = graded_demo();
    auto P = functional_constants(A);
    EXPECT_EQ(P.constants.size(), 5u);
    for (const auto& c : check_constant_laws(P)) EXPECT_TRUE(c.passed) << c.clause;
    for (const auto& F : maximal_filters(A.mv())) {
        EXPECT_TRUE(pavelka_lemma_check(P, F).passed());
        GradedContext ctx(P, F);
        for (const auto& chk : degree_audit(ctx)) EXPECT_TRUE(chk.passed) << chk.clause << " " << chk.witness;
        EXPECT_EQ(degree(A.mv().one(), ctx), Rational(1));
        EXPECT_EQ(degree(A.mv().zero(), ctx), Rational(0));
    }
}

TEST(Pavelka, QuantifiersFixConstants) {
    SetAlgebraSpec s;
    s.dim = 3;
    s.base = 2;
    s.chain = 3;
    s.generators = {Element(8, 1)};
    s.T = all_scopes(3);
    auto A = FunctionalSetAlgebra::build_generated(s);
    auto P = functional_constants(A);
    EXPECT_EQ(P.constants.size(), 3u);
    auto r = pavelka_quantifier_check(to_abstract(A), P);
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.checks[0].checked, 8u * 3u);
}

TEST(Pavelka, Representation) {
    auto A = graded_demo();
    auto Abs = to_abstract(A);
    auto P = functional_constants(A);
    int a = A.index_of(Element{0, 4, 0, 4});
    auto h = henkin_filter_build(Abs, a, WitnessPolicy::AnyIndex);
    ASSERT_TRUE(h);
    auto R = pavelka_representation(Abs, P, *h, Abs.G);
    for (const auto& c : R.audit) EXPECT_TRUE(c.passed) << c.clause << ": " << c.witness;
    for (const auto& [r, e] : P.constants)
        for (const auto& v : R.psi[e]) EXPECT_EQ(v, r);
    // constants that do not match the carrier are caught
    auto bad = P;
    std::swap(bad.constants[Rational(1, 4)], bad.constants[Rational(1, 2)]);
    EXPECT_FALSE(pavelka_representation(Abs, bad, *h, Abs.G).passed());
}

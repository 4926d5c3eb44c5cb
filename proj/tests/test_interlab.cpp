#include <gtest/gtest.h>

#include <random>

#include "mvlab/interlab.hpp"

using namespace mvlab;

namespace {

using Element = FunctionalSetAlgebra::Element;

// The Boolean function with truth table bits over (x, y), as a formula in disjunctive form.
Formula boolean_formula(int bits, const std::string& x, const std::string& y) {
    Formula out = Formula::bottom();
    bool first = true;
    for (int row = 0; row < 4; ++row) {
        if (!((bits >> row) & 1)) continue;
        Formula lx = Formula::atom(x, {}), ly = Formula::atom(y, {});
        if (!(row & 2)) lx = Formula::neg(lx);
        if (!(row & 1)) ly = Formula::neg(ly);
        Formula conj = Formula::odot(lx, ly);
        out = first ? conj : Formula::oplus(out, conj);
        first = false;
    }
    return out;
}

FunctionalSetAlgebra henkin_demo(int dim) {
    SetAlgebraSpec s;
    s.dim = dim;
    s.base = 2;
    s.chain = 2;
    s.cap = 256;
    Element g(static_cast<std::size_t>(1 << dim));
    for (int c = 0; c < (1 << dim); ++c) g[c] = c & 1;  // x(0)
    s.generators = {g};
    return FunctionalSetAlgebra::build_generated(s);
}

}  // namespace

TEST(Interlab, Order) {
    auto L3 = MVAlgebra::chain(3);
    for (int b = 0; b < 3; ++b) EXPECT_TRUE(leq(L3, 0, b));
    for (int a = 0; a < 3; ++a) EXPECT_TRUE(leq(L3, a, a));
    EXPECT_FALSE(leq(L3, 2, 1));
    EXPECT_FALSE(leq(MVAlgebra::standard(), Rational(1), Rational(1, 2)));
    EXPECT_TRUE(leq(MVAlgebra::standard(), Rational(1, 3), Rational(1, 2)));
}

TEST(Interlab, InterpolantExamples) {
    InterpolantOptions o;
    o.chain = 2;
    auto r = interpolant_search(parse("p (*) q"), parse("p (+) r"), {{"p", "q"}, {"p", "r"}}, o);
    ASSERT_TRUE(r.found);
    EXPECT_EQ(render(r.interpolant), "p");
    auto self = interpolant_search(parse("p"), parse("p"), {{"p"}, {"p"}}, o);
    ASSERT_TRUE(self.found);
    EXPECT_EQ(render(self.interpolant), "p");
    EXPECT_THROW(interpolant_search(parse("p"), parse("q"), {{"p"}, {"q"}}, o), PremiseNotEntailed);
    EXPECT_THROW(interpolant_search(parse("p"), parse("q"), {{"q"}, {"q"}}, o), LanguageError);
    // a constant interpolant suffices when the vocabularies are disjoint
    auto c = interpolant_search(parse("p (*) ~p"), parse("q"), {{"p"}, {"q"}}, o);
    ASSERT_TRUE(c.found);
    EXPECT_EQ(render(c.interpolant), "F");
}

TEST(Interlab, BooleanCraigOnSmallVocabularies) {
    InterpolantOptions o;
    o.chain = 2;
    int entailed = 0;
    for (int x = 0; x < 16; ++x)
        for (int y = 0; y < 16; ++y) {
            auto a = boolean_formula(x, "p", "q");
            auto b = boolean_formula(y, "q", "r");
            try {
                auto r = interpolant_search(a, b, {{"p", "q"}, {"q", "r"}}, o);
                ++entailed;
                ASSERT_TRUE(r.found);
                for (const auto& [p, _] : collect_predicates({r.interpolant})) EXPECT_EQ(p, "q");
            } catch (const PremiseNotEntailed&) {
            }
        }
    EXPECT_GT(entailed, 0);
}

TEST(Interlab, LukasiewiczSearchIsBounded) {
    InterpolantOptions o;
    o.chain = 3;
    o.max_size = 4;
    // p (*) p |= p (+) p in the 3-chain; the search is exploratory there
    auto r = interpolant_search(parse("p (*) p"), parse("p (+) p"), {{"p"}, {"p"}}, o);
    ASSERT_TRUE(r.found);
    auto none = interpolant_search(parse("p (*) q (*) q"), parse("p (+) r"), {{"p", "q"}, {"p", "r"}}, o);
    EXPECT_TRUE(none.found);
}

TEST(Interlab, BoundedModelScope) {
    InterpolantOptions o;
    o.chain = 2;
    o.scope = SearchScope::BoundedModel;
    o.max_domain = 2;
    o.max_size = 4;
    auto r = interpolant_search(parse("A{v0} (p(v0) (*) q(v0))"), parse("E{v0} (p(v0) (+) r(v0))"),
                                {{"p", "q"}, {"p", "r"}}, o);
    ASSERT_TRUE(r.found);
    for (const auto& [p, _] : collect_predicates({r.interpolant})) EXPECT_EQ(p, "p");
    EXPECT_THROW(interpolant_search(parse("p(v0)"), parse("q(v0)"), {{"p"}, {"q"}}, o), PremiseNotEntailed);
}

TEST(Interlab, HenkinOnConstants) {
    SetAlgebraSpec s;
    s.dim = 2;
    s.base = 2;
    s.chain = 2;
    auto P = to_abstract(FunctionalSetAlgebra::build_generated(s));
    auto h = henkin_filter_build(P, P.mv.one());
    ASSERT_TRUE(h);
    EXPECT_EQ(h->filter.elements(), std::vector<int>{P.mv.one()});
    // only x = 1 has ~c_k x outside {1}
    for (const auto& w : h->witnesses) EXPECT_EQ(w.x, P.mv.one());
    EXPECT_THROW(henkin_filter_build(P, P.mv.zero()), ZeroElement);
    auto R = representation_map(P, *h, P.G);
    EXPECT_TRUE(R.passed());
}

TEST(Interlab, HenkinDemo) {
    auto A = henkin_demo(3);
    auto P = to_abstract(A);
    int a = A.index_of(A.subst_any(FinTransformation::identity(3), A.element(2)));
    ASSERT_EQ(A.dimension_set(A.element(a)), bit(0));
    // every ultrafilter is a point; the strict witness condition fails on two-coordinate elements
    EXPECT_FALSE(henkin_filter_build(P, a, WitnessPolicy::FreshIndex));
    auto h = henkin_filter_build(P, a, WitnessPolicy::AnyIndex);
    ASSERT_TRUE(h);
    EXPECT_TRUE(h->filter.contains(a));
    EXPECT_FALSE(h->witnesses.empty());
    for (const auto& w : h->witnesses) {
        int nc = P.mv.neg(P.c(bit(w.k), w.x));
        EXPECT_TRUE(h->filter.contains(P.mv.oplus(nc, P.s(FinTransformation::replacement(3, w.k, w.l), w.x))));
    }
    auto R = representation_map(P, *h, P.G);
    for (const auto& c : R.audit) EXPECT_TRUE(c.passed) << c.clause << ": " << c.witness;
    EXPECT_EQ(R.chain.size(), 2);
}

TEST(Interlab, RepresentationAuditDetectsBadFilter) {
    auto A = henkin_demo(3);
    auto P = to_abstract(A);
    int a = A.index_of(A.element(2));
    // an ultrafilter that is not Henkin breaks the cylindrification clause
    auto good = henkin_filter_build(P, a, WitnessPolicy::AnyIndex);
    ASSERT_TRUE(good);
    int failures = 0;
    for (const auto& F : maximal_filters(P.mv)) {
        if (!F.contains(a)) continue;
        HenkinFilter h{F, a, WitnessPolicy::AnyIndex, {}, 0};
        if (!representation_map(P, h, P.G).passed()) ++failures;
    }
    EXPECT_GT(failures, 0);
}

TEST(Interlab, HenkinExhaustedInOneDimension) {
    auto A = henkin_demo(1);
    auto P = to_abstract(A);
    int a = A.index_of(Element{0, 1});
    EXPECT_FALSE(henkin_filter_build(P, a, WitnessPolicy::FreshIndex));
    EXPECT_FALSE(henkin_filter_build(P, a, WitnessPolicy::AnyIndex));
}

TEST(Interlab, EtaClauses) {
    EXPECT_EQ(render(eta_translate(Term::var(0), 2)), "p0(v0,v1)");
    EXPECT_EQ(render(eta_translate(Term::zero(), 2)), "F");
    EXPECT_EQ(render(eta_translate(Term::cyl(1, Term::var(0)), 2)), "E{v1} p0(v0,v1)");
    EXPECT_EQ(render(eta_translate(Term::subst(FinTransformation({1, 1}), Term::var(0)), 2)), "p0(v1,v1)");
}

TEST(Interlab, EtaAgreement) {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 300; ++t) {
        Model m(2, 3);
        for (int i = 0; i < 2; ++i) {
            std::vector<int> v(4);
            for (auto& x : v) x = static_cast<int>(rng() % 3);
            m.set_table(eta_predicate(i), 2, v);
        }
        auto term = random_term(rng, {2, 2, 4});
        auto r = eta_agreement_check(term, m, 2);
        EXPECT_TRUE(r.agree) << to_string(term);
    }
    Model bad(2, 3);
    bad.set_table("p0", 1, {0, 1});
    EXPECT_THROW(eta_agreement_check(Term::var(0), bad, 2), SignatureError);
}

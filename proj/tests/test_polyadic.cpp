#include <gtest/gtest.h>

#include <random>

#include "mvlab/polyadic.hpp"

using namespace mvlab;

namespace {

using Element = FunctionalSetAlgebra::Element;

// Values invariant under flipping every coordinate of a Boolean assignment keep closures small.
Element complement_invariant(std::mt19937_64& rng, int points, int chain) {
    Element e(static_cast<std::size_t>(points));
    for (int c = 0; c < points / 2; ++c) e[c] = e[points - 1 - c] = static_cast<std::uint8_t>(rng() % chain);
    return e;
}

FunctionalSetAlgebra demo(std::uint64_t seed, int gens = 2) {
    std::mt19937_64 rng(seed);
    SetAlgebraSpec s;
    s.dim = 3;
    s.base = 2;
    s.chain = 3;
    for (int g = 0; g < gens; ++g) s.generators.push_back(complement_invariant(rng, 8, 3));
    return FunctionalSetAlgebra::build_generated(s);
}

// c_J by brute force over pairs of assignments.
Element naive_cyl(const FunctionalSetAlgebra& A, IndexMask J, const Element& p) {
    Element r(p.size(), 0);
    for (int x = 0; x < A.points(); ++x)
        for (int y = 0; y < A.points(); ++y) {
            auto px = A.point(x), py = A.point(y);
            bool rel = true;
            for (int i = 0; i < A.dim(); ++i)
                if (!(J & bit(i)) && px[i] != py[i]) rel = false;
            if (rel) r[x] = std::max(r[x], p[y]);
        }
    return r;
}

}  // namespace

TEST(Polyadic, ClosureOfConstants) {
    SetAlgebraSpec s;
    s.dim = 2;
    s.base = 2;
    s.chain = 5;
    auto A = FunctionalSetAlgebra::build_generated(s);
    // 0 and 1 are closed under every operation
    EXPECT_EQ(A.size(), 2);
    s.generators = {Element(4, 1)};
    // the subalgebra of the 5-chain generated by 1/4 is the whole chain
    EXPECT_EQ(FunctionalSetAlgebra::build_generated(s).size(), 5);
    s.dim = 1;
    s.base = 1;
    s.generators = {Element(1, 2)};
    EXPECT_EQ(FunctionalSetAlgebra::build_generated(s).size(), 3);
}

TEST(Polyadic, TruncationIsAnError) {
    SetAlgebraSpec s;
    s.dim = 3;
    s.base = 2;
    s.chain = 2;
    s.generators = {{0, 1, 0, 1, 0, 1, 0, 1}};
    s.cap = 100;
    EXPECT_THROW(FunctionalSetAlgebra::build_generated(s), TruncationError);
    s.cap = 256;
    EXPECT_EQ(FunctionalSetAlgebra::build_generated(s).size(), 256);
}

TEST(Polyadic, PointwiseOperations) {
    auto A = demo(4);
    const IndexMask I = full_mask(3);
    for (const auto& p : A.elements()) {
        EXPECT_EQ(A.cyl(0, p), p);
        auto top = *std::max_element(p.begin(), p.end());
        EXPECT_EQ(A.cyl(I, p), A.constant(top));
        EXPECT_EQ(A.subst(FinTransformation::identity(3), p), p);
        for (IndexMask J = 0; J <= I; ++J) {
            EXPECT_EQ(A.cyl(J, p), naive_cyl(A, J, p));
            EXPECT_EQ(A.q_forall(J, p), A.neg(A.cyl(J, A.neg(p))));
            for (IndexMask K = 0; K <= I; ++K) EXPECT_EQ(A.cyl(J | K, p), A.cyl(J, A.cyl(K, p)));
        }
        for (const auto& s : A.transformations())
            for (const auto& t : A.transformations()) EXPECT_EQ(A.subst(compose(s, t), p), A.subst(s, A.subst(t, p)));
    }
}

TEST(Polyadic, SignatureErrors) {
    SetAlgebraSpec s;
    s.dim = 2;
    s.base = 2;
    s.G = std::vector<FinTransformation>{FinTransformation::identity(2)};
    s.T = std::vector<IndexMask>{0, 1};
    auto A = FunctionalSetAlgebra::build_generated(s);
    auto one = A.constant(1);
    EXPECT_THROW(A.cyl(2, one), SignatureError);
    EXPECT_THROW(A.subst(FinTransformation::replacement(2, 0, 1), one), SignatureError);
    EXPECT_NO_THROW(A.cyl(1, one));
    EXPECT_THROW(A.cyl(1, Element{0, 1, 0, 1}), CarrierError);
}

TEST(Polyadic, DimensionSetsAndSupports) {
    SetAlgebraSpec s;
    s.dim = 3;
    s.base = 2;
    s.chain = 2;
    s.generators = {{0, 1, 0, 1, 0, 1, 0, 1}};
    s.cap = 256;
    auto A = FunctionalSetAlgebra::build_generated(s);
    EXPECT_EQ(A.dimension_set(A.constant(1)), 0u);
    EXPECT_EQ(A.dimension_set(s.generators[0]), bit(0));
    // x(0) = x(1)
    Element eq(8);
    for (int c = 0; c < 8; ++c) eq[c] = A.point(c)[0] == A.point(c)[1];
    EXPECT_EQ(A.dimension_set(eq), bit(0) | bit(1));
    for (const auto& p : A.elements()) {
        auto d = A.dimension_set(p);
        EXPECT_EQ(A.minimal_support(p), d);
        EXPECT_TRUE(A.supports(d, p));
        for (int i = 0; i < 3; ++i) {
            auto ci = A.cyl_any(bit(i), p);
            EXPECT_EQ(A.cyl_any(bit(i), ci), ci);
            for (int j = 0; j < 3; ++j) {
                auto sp = A.subst_any(FinTransformation::replacement(3, i, j), p);
                IndexMask bound = (d & ~bit(i)) | (i == j ? bit(i) & d : bit(j));
                EXPECT_EQ(A.dimension_set(sp) & ~bound, 0u);
            }
        }
    }
}

TEST(Polyadic, AuditPassesOnFunctionalAlgebras) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        auto A = demo(seed);
        auto r = audit_axioms(A);
        ASSERT_TRUE(r.passed()) << r.first_failure()->id << " " << r.first_failure()->witness;
        for (const char* id : {"G1", "G4", "G5", "E3", "Q2", "D4", "D5", "D9"}) {
            ASSERT_NE(r.find(id), nullptr) << id;
            EXPECT_GT(r.find(id)->checked, 0u) << id;
        }
    }
}

TEST(Polyadic, AuditCatchesCorruptedCylindrifier) {
    auto P = to_abstract(demo(1));
    auto k = *P.find_scope(bit(0));
    // send some element with c_0 x != x to x, breaking idempotence at c_0 of that value
    int victim = -1;
    for (int x = 0; x < P.size() && victim < 0; ++x)
        if (P.cyl[k][x] != x && P.cyl[k][P.cyl[k][x]] == P.cyl[k][x]) victim = x;
    ASSERT_GE(victim, 0);
    int image = P.cyl[k][victim];
    P.cyl[k][image] = victim;
    auto r = audit_axioms(P);
    EXPECT_FALSE(r.passed());
    ASSERT_NE(r.find("D1.b"), nullptr);
    EXPECT_FALSE(r.find("D1.b")->passed);
    EXPECT_FALSE(r.find("D1.b")->witness.empty());
}

TEST(Polyadic, TrivialAlgebraPasses) {
    AbstractPolyadicAlgebra P;
    P.mv = MVAlgebra::table(TableSpec{{"0"}, {{0}}, {0}, 0, 0});
    P.dim = 2;
    P.G = all_transformations(2);
    P.subst.assign(P.G.size(), {0});
    P.T = all_scopes(2);
    P.cyl.assign(P.T.size(), {0});
    EXPECT_TRUE(audit_axioms(P).passed());
}

TEST(Polyadic, NeatReducts) {
    SetAlgebraSpec s;
    s.dim = 3;
    s.base = 2;
    s.chain = 2;
    s.generators = {{0, 1, 0, 1, 0, 1, 0, 1}};
    s.cap = 256;
    auto A = FunctionalSetAlgebra::build_generated(s);
    auto P = to_abstract(A);
    auto whole = neat_reduct(P, full_mask(3), ReductFlavor::FiniteT);
    EXPECT_EQ(whole.members.size(), 256u);
    auto r0 = neat_reduct(P, bit(0), ReductFlavor::FiniteT);
    EXPECT_EQ(r0.members.size(), 4u);
    Element eq(8);
    for (int c = 0; c < 8; ++c) eq[c] = A.point(c)[0] == A.point(c)[1];
    int e = A.index_of(eq);
    EXPECT_TRUE(std::find(r0.members.begin(), r0.members.end(), e) == r0.members.end());
    for (IndexMask a = 0; a <= full_mask(3); ++a)
        EXPECT_EQ(neat_reduct(P, a, ReductFlavor::FiniteT).members, neat_reduct(P, a, ReductFlavor::FullT).members);
    auto none = neat_reduct(P, 0, ReductFlavor::FullT);
    EXPECT_EQ(none.members.size(), 2u);
}

TEST(Polyadic, NeatReductRejectsNonSubuniverse) {
    // an abstract algebra whose s_[1|2] pushes an alpha-element outside
    auto P = to_abstract(demo(2));
    auto t = *P.find_transformation(FinTransformation::transposition(3, 1, 2));
    IndexMask alpha = bit(1) | bit(2);
    auto r = neat_reduct(P, alpha, ReductFlavor::FiniteT);
    ASSERT_FALSE(r.members.empty());
    int outsider = -1;
    for (int x = 0; x < P.size(); ++x)
        if (std::find(r.members.begin(), r.members.end(), x) == r.members.end()) outsider = x;
    ASSERT_GE(outsider, 0);
    P.subst[t][r.members.back()] = outsider;
    try {
        neat_reduct(P, alpha, ReductFlavor::FiniteT);
        FAIL();
    } catch (const NotASubuniverse& e) {
        EXPECT_EQ(e.witness, static_cast<std::size_t>(r.members.back()));
    }
}

TEST(Polyadic, TermDefinedSubstitutions) {
    SetAlgebraSpec s;
    s.dim = 5;
    s.base = 2;
    s.chain = 3;
    s.T = std::vector<IndexMask>{};
    auto A = FunctionalSetAlgebra::build_generated(s);
    std::mt19937_64 rng(5);
    auto all = all_transformations(4);
    int compared = 0;
    for (int trial = 0; trial < 300; ++trial) {
        // x depends on the first two coordinates only
        Element x(32);
        std::vector<int> tab(4);
        for (auto& v : tab) v = static_cast<int>(rng() % 3);
        for (int c = 0; c < 32; ++c) x[c] = static_cast<std::uint8_t>(tab[c & 3]);
        std::vector<int> t{0, 1, 2, 3, 4};
        for (int i = 0; i < 2; ++i) t[rng() % 5] = static_cast<int>(rng() % 5);
        FinTransformation tau(t);
        try {
            TermSubstitution used;
            EXPECT_EQ(term_substitution(A, tau, x, &used), A.subst_any(tau, x)) << tau.to_string();
            for (const auto& r : used.chain) EXPECT_EQ(support(r).size(), 1u);
            ++compared;
        } catch (const InsufficientSpareIndices&) {
        }
    }
    EXPECT_GT(compared, 100);
    Element x(32, 1);
    EXPECT_EQ(term_substitution(A, FinTransformation::identity(5), x), x);

    SetAlgebraSpec s2;
    s2.dim = 2;
    s2.base = 2;
    s2.chain = 2;
    s2.generators = {{0, 1, 0, 1}};
    auto P = to_abstract(FunctionalSetAlgebra::build_generated(s2));
    int g = 2;
    TermSubstitution used;
    EXPECT_EQ(term_substitution(P, FinTransformation::replacement(2, 0, 1), g, &used),
              P.s(FinTransformation::replacement(2, 0, 1), g));
    EXPECT_EQ(used.chain.size(), 1u);
    EXPECT_THROW(term_substitution(P, FinTransformation::transposition(2, 0, 1), g), InsufficientSpareIndices);
}

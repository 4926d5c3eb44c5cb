#include <gtest/gtest.h>

#include <chrono>
#include <random>

#include "mvlab/transform.hpp"

using namespace mvlab;

namespace {

OmegaMap random_omega(std::mt19937_64& rng) {
    std::map<OmegaMap::Int, OmegaMap::Int> over;
    int k = static_cast<int>(rng() % 4);
    for (int i = 0; i < k; ++i) over[static_cast<OmegaMap::Int>(rng() % 6)] = static_cast<OmegaMap::Int>(rng() % 6);
    return OmegaMap(over, static_cast<OmegaMap::Int>(rng() % 5) - 2);
}

}  // namespace

TEST(Transform, NormalFormsOfSucAndPred) {
    auto sp = compose(OmegaMap::suc(), OmegaMap::pred());
    EXPECT_EQ(sp.shift(), 0);
    EXPECT_EQ(sp.overrides(), (std::map<OmegaMap::Int, OmegaMap::Int>{{0, 1}}));
    EXPECT_EQ(compose(OmegaMap::pred(), OmegaMap::suc()), OmegaMap::identity());
    EXPECT_EQ(OmegaMap::pred()(0), 0);

    auto s2p2 = compose(power(OmegaMap::suc(), 2), power(OmegaMap::pred(), 2));
    auto sup = support(s2p2);
    EXPECT_FALSE(sup.infinite);
    EXPECT_EQ(sup.points, (std::vector<OmegaMap::Int>{0, 1}));

    auto m = modify(OmegaMap::suc(), 0, 0);
    EXPECT_EQ(m.shift(), 1);
    EXPECT_EQ(m.overrides(), (std::map<OmegaMap::Int, OmegaMap::Int>{{0, 0}}));
    EXPECT_TRUE(support(OmegaMap::suc()).infinite);
    EXPECT_EQ(support(OmegaMap::pred()).points, (std::vector<OmegaMap::Int>{0}));
}

TEST(Transform, CompositionAgreesPointwise) {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 500; ++t) {
        auto f = random_omega(rng), g = random_omega(rng), h = random_omega(rng);
        auto fg = compose(f, g);
        for (OmegaMap::Int x = 0; x < 40; ++x) EXPECT_EQ(fg(x), f(g(x)));
        EXPECT_EQ(compose(fg, h), compose(f, compose(g, h)));
        // normal forms are canonical: pointwise-equal maps compare equal
        OmegaMap rebuilt(fg.overrides(), fg.shift());
        EXPECT_EQ(rebuilt, fg);
    }
}

TEST(Transform, RangeComplement) {
    EXPECT_EQ(range_complement(power(OmegaMap::suc(), 3)), (std::set<OmegaMap::Int>{0, 1, 2}));
    EXPECT_TRUE(range_complement(OmegaMap::pred()).empty());
    std::mt19937_64 rng(5);
    for (int t = 0; t < 200; ++t) {
        auto f = random_omega(rng);
        auto c = range_complement(f);
        std::set<OmegaMap::Int> hit;
        for (OmegaMap::Int x = 0; x < 200; ++x) hit.insert(f(x));
        for (OmegaMap::Int v = 0; v < 100; ++v) EXPECT_EQ(c.count(v) > 0, hit.count(v) == 0) << f.to_string() << " " << v;
    }
}

TEST(Transform, FiniteTransformations) {
    auto r = FinTransformation::replacement(3, 0, 1);
    auto t = FinTransformation::transposition(3, 0, 2);
    EXPECT_EQ(compose(r, t).table(), (std::vector<int>{2, 1, 1}));
    EXPECT_EQ(support(r), std::vector<int>{0});
    EXPECT_EQ(modify(r, 2, 0).table(), (std::vector<int>{1, 1, 0}));
    EXPECT_THROW(compose(r, FinTransformation::identity(2)), IndexSetMismatch);
    EXPECT_THROW(modify(r, 3, 0), IndexOutOfRange);
}

TEST(Transform, ReplacementsAndTranspositionsGenerateEverything) {
    SemigroupSpec<FinTransformation> spec{replacement_generators(3), 1000};
    auto cl = semigroup_closure(spec);
    EXPECT_FALSE(cl.truncated);
    ASSERT_EQ(cl.elements.size(), 27u);
    std::set<std::vector<int>> all;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c) all.insert({a, b, c});
    std::set<std::vector<int>> got;
    for (const auto& e : cl.elements) got.insert(e.table());
    EXPECT_EQ(got, all);
    EXPECT_TRUE(std::is_sorted(cl.elements.begin(), cl.elements.end()));

    spec.cap = 10;
    auto capped = semigroup_closure(spec);
    EXPECT_TRUE(capped.truncated);
    EXPECT_EQ(capped.elements.size(), 10u);
}

TEST(Transform, ClosureIsDeterministic) {
    SemigroupSpec<OmegaMap> spec{{OmegaMap::suc(), OmegaMap::pred(), OmegaMap::transposition(0, 1)}, 300};
    auto a = semigroup_closure(spec);
    auto b = semigroup_closure(spec);
    EXPECT_EQ(a.elements, b.elements);
    EXPECT_TRUE(a.truncated);
}

TEST(Transform, StronglyRichSucPred) {
    SemigroupSpec<OmegaMap> amb{{OmegaMap::suc(), OmegaMap::pred(), OmegaMap::transposition(0, 1), OmegaMap::replacement(0, 1)}, 200};
    auto t0 = std::chrono::steady_clock::now();
    auto r = check_strongly_rich(OmegaMap::suc(), OmegaMap::pred(), amb, 64);
    auto dt = std::chrono::steady_clock::now() - t0;
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.checks.size(), 2u + 2u * 64u + 2u);
    EXPECT_LT(std::chrono::duration<double>(dt).count(), 1.0);

    auto bad_id = check_strongly_rich(OmegaMap::identity(), OmegaMap::identity(), amb, 4);
    EXPECT_FALSE(bad_id.passed());
    EXPECT_FALSE(bad_id.checks[1].passed);
    EXPECT_EQ(bad_id.checks[1].condition, "Rg sigma != omega");

    auto bad_pi = check_strongly_rich(power(OmegaMap::suc(), 2), OmegaMap::pred(), amb, 4);
    EXPECT_FALSE(bad_pi.checks[0].passed);
}

TEST(Transform, Literals) {
    EXPECT_EQ(parse_transformation("suc.pred"), compose(OmegaMap::suc(), OmegaMap::pred()));
    EXPECT_EQ(parse_transformation("[0|1]"), OmegaMap::replacement(0, 1));
    EXPECT_EQ(parse_transformation("[0,1]"), OmegaMap::transposition(0, 1));
    EXPECT_EQ(parse_transformation("{0->2,1->2}"), OmegaMap({{0, 2}, {1, 2}}, 0));
    EXPECT_EQ(parse_transformation("id"), OmegaMap::identity());
    EXPECT_EQ(parse_fin_transformation("[0,1].[1|2]", 3).table(), (std::vector<int>{1, 2, 2}));
    EXPECT_THROW(parse_transformation("[0|"), ParseError);
    EXPECT_THROW(parse_fin_transformation("suc", 3), IndexOutOfRange);
}

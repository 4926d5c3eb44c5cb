#include <gtest/gtest.h>

#include <random>

#include "mvlab/semantics.hpp"
#include "oracles.hpp"

using namespace mvlab;

namespace {

Model two_point() {
    Model m(2, 11);
    m.set_table("p", 1, {3, 8});
    return m;
}

Model random_model(std::mt19937_64& rng, int k, int n) {
    Model m(k, n);
    m.set_table("p", 1, std::vector<int>(k));
    m.set_table("q", 2, std::vector<int>(k * k));
    for (auto& [_, t] : m.tables_mut())
        for (auto& v : t.values) v = static_cast<int>(rng() % n);
    return m;
}

}  // namespace

TEST(Semantics, WorkedExample) {
    auto m = two_point();
    EXPECT_EQ(eval(parse("E{v0} p(v0)"), m), Rational(4, 5));
    EXPECT_EQ(eval(parse("A{v0} p(v0)"), m), Rational(3, 10));
    EXPECT_EQ(eval(parse("p(v0)"), m, {{{0, 1}}, 0}), Rational(4, 5));
    EXPECT_EQ(truth_degree(parse("p(v0)"), m), Rational(3, 10));
    EXPECT_FALSE(is_valid(parse("p(v0)"), m));
    EXPECT_TRUE(is_valid(parse("p(v0) -> E{v1} p(v1)"), m));
}

TEST(Semantics, MissingTable) {
    auto m = two_point();
    EXPECT_THROW(eval(parse("q(v0)"), m), MissingTable);
    EXPECT_THROW(m.set_table("r", 1, {1}), MissingTable);
}

TEST(Semantics, AgreesWithReferenceEvaluator) {
    std::mt19937_64 rng(2);
    RandomFormulaSpec spec{{{"p", 1}, {"q", 2}}, 3, 4, 2, true};
    for (int t = 0; t < 400; ++t) {
        auto f = random_formula(rng, spec);
        auto m = random_model(rng, 1 + static_cast<int>(rng() % 3), 2 + static_cast<int>(rng() % 4));
        for (int a = 0; a < m.domain(); ++a)
            for (int b = 0; b < m.domain(); ++b) {
                Assignment s{{{0, a}, {1, b}, {2, (a + b) % m.domain()}}, 0};
                EXPECT_EQ(eval(f, m, s), oracle::value(f, m, s.values)) << render(f);
            }
    }
}

TEST(Semantics, EntailmentExamples) {
    auto r = entails({}, parse("p(v0)"), {2, 3});
    ASSERT_TRUE(r.refuted);
    EXPECT_EQ(r.counterexample->domain(), 1);
    EXPECT_EQ(r.counterexample->table("p").values, std::vector<int>{0});

    auto ok = entails({parse("A{v0} p(v0)")}, parse("p(v1)"), {3, 3});
    EXPECT_FALSE(ok.refuted);
    EXPECT_EQ(ok.models_checked, 3u + 9u + 27u);

    EXPECT_THROW(entails({}, parse("q(v0,v1)"), {3, 5, 1000}), SearchTooLarge);
}

TEST(Semantics, CanonicalModelOrder) {
    std::vector<std::vector<int>> seen;
    for_each_model({{"a", 0}, {"b", 0}}, 1, 2, [&](const Model& m) {
        seen.push_back({m.table("a").values[0], m.table("b").values[0]});
        return true;
    });
    EXPECT_EQ(seen, (std::vector<std::vector<int>>{{0, 0}, {0, 1}, {1, 0}, {1, 1}}));
}

TEST(Semantics, SubstitutionLemmaForInjectiveRenamings) {
    std::mt19937_64 rng(9);
    RandomFormulaSpec spec{{{"p", 1}, {"q", 2}}, 3, 4, 2, true};
    for (int t = 0; t < 200; ++t) {
        auto f = random_formula(rng, spec);
        std::vector<int> pool{0, 1, 2, 3, 4};
        std::shuffle(pool.begin(), pool.end(), rng);
        VarMap tau;
        int k = 0;
        for (int v : f.vars()) tau[v] = pool[k++];
        auto g = substitute(tau, f);
        auto m = random_model(rng, 2, 3);
        for (int code = 0; code < 32; ++code) {
            Assignment s;
            for (int v = 0; v < 5; ++v) s.values[v] = (code >> v) & 1;
            Assignment st;
            for (int v = 0; v < 5; ++v) st.values[v] = s(map_var(tau, v));
            EXPECT_EQ(eval(g, m, s), eval(f, m, st)) << render(f);
        }
    }
}

TEST(Semantics, FullSubstitutionCapturesWithoutInjectivity) {
    // E{v0} q(v0,v1) under v0 -> v1 becomes E{v1} q(v1,v1): the lemma needs injectivity
    auto f = parse("E{v0} q(v0,v1)");
    auto g = substitute({{0, 1}}, f);
    Model m(2, 2);
    m.set_table("q", 2, {0, 1, 1, 0});
    Assignment s{{{0, 0}, {1, 0}}, 0};
    Assignment st{{{0, 0}, {1, 0}}, 0};
    EXPECT_NE(eval(g, m, s), eval(f, m, st));
    auto h = substitute_renaming_apart({{0, 1}}, f);
    EXPECT_EQ(eval(h, m, s), eval(f, m, st));
}

#include <gtest/gtest.h>

#include <chrono>

#include "mvlab/calculus.hpp"

using namespace mvlab;

TEST(Calculus, PropositionalSchemas) {
    EXPECT_TRUE(check_axiom_instance(Schema::L1, parse("p(v0) -> (r -> p(v0))")).ok);
    EXPECT_FALSE(check_axiom_instance(Schema::L1, parse("p(v0) -> (r -> p(v1))")).ok);
    EXPECT_TRUE(check_axiom_instance(Schema::L4, parse("(~r -> ~p(v0)) -> (p(v0) -> r)")).ok);
    EXPECT_TRUE(check_axiom_instance(Schema::D2, parse("T")).ok);
    EXPECT_TRUE(check_axiom_instance(Schema::D3, parse("F -> E{v0} p(v0)")).ok);
    auto bad = check_axiom_instance(Schema::L3, parse("r -> r"));
    EXPECT_FALSE(bad.ok);
    EXPECT_NE(bad.diagnostic.find("ShapeMismatch"), std::string::npos);
}

TEST(Calculus, QuantifierSideConditions) {
    EXPECT_TRUE(check_axiom_instance(Schema::A3, parse("A{v1}(p(v0) -> q(v0,v1)) -> (p(v0) -> A{v1} q(v0,v1))")).ok);
    auto v = check_axiom_instance(Schema::A3, parse("A{v0}(p(v0) -> q(v0,v1)) -> (p(v0) -> A{v0} q(v0,v1))"));
    EXPECT_FALSE(v.ok);
    EXPECT_NE(v.diagnostic.find("SideConditionViolated"), std::string::npos);

    auto a4 = parse("A{v1}(p(v0) -> q(v0,v1)) -> (E{v1} p(v0) -> q(v0,v1))");
    EXPECT_TRUE(check_axiom_instance(Schema::A4, a4).ok);
    CalculusOptions strict;
    strict.strict_a4 = true;
    EXPECT_FALSE(check_axiom_instance(Schema::A4, a4, strict).ok);
}

TEST(Calculus, SubstitutionInstances) {
    auto a5 = parse("A{v0} q(v0,v1) -> q(v2,v1)");
    auto v = check_axiom_instance(Schema::A5, a5);
    ASSERT_TRUE(v.ok);
    EXPECT_EQ(v.tau.at(0), 2);
    EXPECT_TRUE(check_axiom_instance(Schema::A5, a5, {}, VarMap{{0, 2}}).ok);
    EXPECT_FALSE(check_axiom_instance(Schema::A5, a5, {}, VarMap{{0, 1}}).ok);

    // tau(v0) = v1 lands on a bound variable
    auto cap = parse("A{v0} E{v1} q(v0,v1) -> E{v1} q(v1,v1)");
    auto c = check_axiom_instance(Schema::A5, cap);
    EXPECT_FALSE(c.ok);
    CalculusOptions loose;
    loose.skip_side_conditions = true;
    EXPECT_TRUE(check_axiom_instance(Schema::A5, cap, loose).ok);

    EXPECT_TRUE(check_axiom_instance(Schema::A6, parse("p(v3) -> E{v0} p(v0)")).ok);
}

TEST(Calculus, ProofChecking) {
    std::vector<Formula> gamma{parse("p(v0)"), parse("p(v0) -> r")};
    Proof pf;
    pf.steps.push_back({Rule::Hyp, Formula(), {0}, {}, {}, {}});
    pf.steps.push_back({Rule::Hyp, Formula(), {1}, {}, {}, {}});
    pf.steps.push_back({Rule::MP, parse("r"), {0, 1}, {}, {}, {}});
    pf.steps.push_back({Rule::Gen, Formula(), {2}, {}, {}, VarSet{0}});
    pf.steps.push_back({Rule::Ax, parse("r -> (T -> r)"), {}, Schema::L1, {}, {}});
    EXPECT_TRUE(check_proof(gamma, pf).accepted);

    Proof wrong = pf;
    wrong.steps[2].formula = parse("p(v0)");
    auto v = check_proof(gamma, wrong);
    EXPECT_FALSE(v.accepted);
    EXPECT_EQ(v.step, 2);

    Proof fwd;
    fwd.steps.push_back({Rule::MP, Formula(), {1, 2}, {}, {}, {}});
    EXPECT_FALSE(check_proof(gamma, fwd).accepted);
}

TEST(Calculus, SubstitutionRules) {
    Proof ok;
    ok.steps.push_back({Rule::Hyp, Formula(), {0}, {}, {}, {}});
    ok.steps.push_back({Rule::SubInv, Formula(), {0}, {}, VarMap{{0, 2}, {1, 0}}, {}});
    auto v = check_proof({parse("A{v1} q(v0,v1)")}, ok);
    EXPECT_TRUE(v.accepted) << v.reason;

    Proof clash = ok;
    clash.steps[1].tau = VarMap{{0, 1}, {1, 1}};
    EXPECT_FALSE(check_proof({parse("A{v1} q(v0,v1)")}, clash).accepted);

    Proof fs;
    fs.steps.push_back({Rule::Hyp, Formula(), {0}, {}, {}, {}});
    fs.steps.push_back({Rule::FreeSubInv, parse("p(v0)"), {0}, {}, VarMap{{0, 3}}, {}});
    EXPECT_TRUE(check_proof({parse("p(v3)")}, fs).accepted);
    fs.steps[1].tau = VarMap{{0, 2}};
    EXPECT_FALSE(check_proof({parse("p(v3)")}, fs).accepted);
}

TEST(Calculus, SchemasAreSound) {
    SoundnessOptions opt;
    opt.trials = 40;
    for (auto s : all_schemas()) {
        auto r = soundness_audit(s, opt);
        EXPECT_TRUE(r.passed()) << r.subject << ": " << r.counterexample;
        EXPECT_EQ(r.instances, 40) << r.subject;
    }
    opt.calc.strict_a4 = opt.acceptor.strict_a4 = true;
    EXPECT_TRUE(soundness_audit(Schema::A4, opt).passed());
}

TEST(Calculus, RulesAreSound) {
    SoundnessOptions opt;
    opt.trials = 40;
    for (auto rule : {Rule::MP, Rule::Gen, Rule::FreeSubInv, Rule::SubInv}) {
        auto r = soundness_audit(rule, opt);
        EXPECT_TRUE(r.passed()) << r.subject << ": " << r.counterexample;
        EXPECT_GT(r.nonvacuous, 0) << r.subject;
    }
}

TEST(Calculus, DroppingSideConditionsIsCaught) {
    SoundnessOptions opt;
    opt.trials = 200;
    opt.acceptor.skip_side_conditions = true;
    for (auto s : {Schema::A3, Schema::A5}) {
        auto r = soundness_audit(s, opt);
        EXPECT_GT(r.violations, 0) << r.subject;
        EXPECT_FALSE(r.counterexample.empty());
    }
    EXPECT_GT(soundness_audit(Rule::SubInv, opt).violations, 0);
}

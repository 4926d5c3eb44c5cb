#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mvlab/errors.hpp"
#include "mvlab/semantics.hpp"
#include "mvlab/syntax.hpp"

namespace mvlab {

enum class Schema { L1, L2, L3, L4, D1, D2, D3, A2, A3, A4, A5, A6 };

inline const std::vector<Schema>& all_schemas() {
    static const std::vector<Schema> s{Schema::L1, Schema::L2, Schema::L3, Schema::L4, Schema::D1, Schema::D2,
                                       Schema::D3, Schema::A2, Schema::A3, Schema::A4, Schema::A5, Schema::A6};
    return s;
}

inline std::string schema_name(Schema s) {
    static const char* names[] = {"L1", "L2", "L3", "L4", "D1", "D2", "D3", "A2", "A3", "A4", "A5", "A6"};
    return names[static_cast<int>(s)];
}

inline std::optional<Schema> schema_from_name(std::string_view n) {
    for (auto s : all_schemas())
        if (schema_name(s) == n) return s;
    return std::nullopt;
}

enum class Rule { Hyp, Ax, MP, Gen, FreeSubInv, SubInv };

inline std::string rule_name(Rule r) {
    static const char* names[] = {"Hyp", "Ax", "MP", "Gen", "FreeSubInv", "SubInv"};
    return names[static_cast<int>(r)];
}

inline std::optional<Rule> rule_from_name(std::string_view n) {
    for (int i = 0; i <= static_cast<int>(Rule::SubInv); ++i)
        if (rule_name(static_cast<Rule>(i)) == n) return static_cast<Rule>(i);
    return std::nullopt;
}

struct CalculusOptions {
    // A4 additionally requires W to avoid the free variables of the consequent.
    bool strict_a4 = false;
    // Only for mutation testing.
    bool skip_side_conditions = false;
};

struct AxiomVerdict {
    bool ok = false;
    std::string diagnostic;
    VarMap tau;  // the witnessing substitution for A5/A6
};

namespace detail {

inline Formula pattern_of(Schema s) {
    auto metaize = [](auto&& self, const Formula& f) -> Formula {
        switch (f.kind()) {
            case FKind::Atom:
                if (f.pred().size() == 2 && f.pred()[0] == 'X') return Formula::meta(f.pred()[1] - '0');
                return f;
            case FKind::Top:
            case FKind::Bottom:
            case FKind::Meta: return f;
            case FKind::Neg: return Formula::neg(self(self, f.left()));
            case FKind::Oplus: return Formula::oplus(self(self, f.left()), self(self, f.right()));
            case FKind::Odot: return Formula::odot(self(self, f.left()), self(self, f.right()));
            case FKind::Implies: return Formula::implies(self(self, f.left()), self(self, f.right()));
            default: return f;
        }
    };
    const char* text = "";
    switch (s) {
        case Schema::L1: text = "X0 -> (X1 -> X0)"; break;
        case Schema::L2: text = "(X0 -> X1) -> ((X1 -> X2) -> (X0 -> X2))"; break;
        case Schema::L3: text = "((X0 -> X1) -> X1) -> ((X1 -> X0) -> X0)"; break;
        case Schema::L4: text = "(~X0 -> ~X1) -> (X1 -> X0)"; break;
        case Schema::D1: text = "(~(~X0 (+) ~X1) -> X0 (*) X1) (*) (X0 (*) X1 -> ~(~X0 (+) ~X1))"; break;
        case Schema::D2: text = "T"; break;
        case Schema::D3: text = "F -> X0"; break;
        case Schema::A2: text = "((X0 -> X1) -> ~X0 (+) X1) (*) (~X0 (+) X1 -> (X0 -> X1))"; break;
        default: throw Error("schema " + schema_name(s) + " has no propositional pattern");
    }
    auto p = parse(text);
    return metaize(metaize, p);
}

inline Formula instantiate(const Formula& pat, const std::vector<Formula>& args) {
    switch (pat.kind()) {
        case FKind::Meta: return args.at(static_cast<std::size_t>(pat.meta_index()));
        case FKind::Neg: return Formula::neg(instantiate(pat.left(), args));
        case FKind::Oplus: return Formula::oplus(instantiate(pat.left(), args), instantiate(pat.right(), args));
        case FKind::Odot: return Formula::odot(instantiate(pat.left(), args), instantiate(pat.right(), args));
        case FKind::Implies: return Formula::implies(instantiate(pat.left(), args), instantiate(pat.right(), args));
        default: return pat;
    }
}

inline bool match(const Formula& pat, const Formula& f, std::vector<std::optional<Formula>>& bind) {
    if (pat.kind() == FKind::Meta) {
        auto& b = bind.at(static_cast<std::size_t>(pat.meta_index()));
        if (!b) {
            b = f;
            return true;
        }
        return *b == f;
    }
    if (pat.kind() != f.kind()) return false;
    switch (pat.kind()) {
        case FKind::Top:
        case FKind::Bottom: return true;
        case FKind::Atom: return pat == f;
        case FKind::Neg: return match(pat.left(), f.left(), bind);
        default:
            if (pat.is_binary()) return match(pat.left(), f.left(), bind) && match(pat.right(), f.right(), bind);
            return false;
    }
}

// Infers tau on W with chi = S_f(tau) phi. Blocks must agree; bound occurrences stay put.
inline bool infer_free_subst(const Formula& phi, const Formula& chi, const VarSet& W, VarSet& inner, VarMap& tau) {
    if (phi.kind() != chi.kind()) return false;
    switch (phi.kind()) {
        case FKind::Atom: {
            if (phi.pred() != chi.pred() || phi.args().size() != chi.args().size()) return false;
            for (std::size_t i = 0; i < phi.args().size(); ++i) {
                int x = phi.args()[i], y = chi.args()[i];
                if (W.count(x) && !inner.count(x)) {
                    auto [it, fresh] = tau.emplace(x, y);
                    if (!fresh && it->second != y) return false;
                } else if (x != y) {
                    return false;
                }
            }
            return true;
        }
        case FKind::Top:
        case FKind::Bottom: return true;
        case FKind::Meta: return phi == chi;
        case FKind::Neg: return infer_free_subst(phi.left(), chi.left(), W, inner, tau);
        case FKind::Forall:
        case FKind::Exists: {
            if (phi.block() != chi.block()) return false;
            VarSet saved = inner;
            inner.insert(phi.block().begin(), phi.block().end());
            bool ok = infer_free_subst(phi.body(), chi.body(), W, inner, tau);
            inner = std::move(saved);
            return ok;
        }
        default:
            return infer_free_subst(phi.left(), chi.left(), W, inner, tau) &&
                   infer_free_subst(phi.right(), chi.right(), W, inner, tau);
    }
}

inline std::string varset_str(const VarSet& s) {
    std::string out = "{";
    bool first = true;
    for (int v : s) {
        if (!first) out += ",";
        first = false;
        out += "v" + std::to_string(v);
    }
    return out + "}";
}

inline VarSet intersect(const VarSet& a, const VarSet& b) {
    VarSet out;
    for (int x : a)
        if (b.count(x)) out.insert(x);
    return out;
}

}  // namespace detail

// Quantifier instance: forall W phi -> S_f(tau) phi (A5) or S_f(tau) phi -> exists W phi (A6).
inline AxiomVerdict check_substitution_instance(const Formula& quantified, const Formula& chi, const std::optional<VarMap>& given,
                                                const CalculusOptions& opt) {
    AxiomVerdict v;
    const auto& W = quantified.block();
    const auto& phi = quantified.body();
    VarMap tau;
    if (given) {
        tau = restrict_extend(*given, W);
        if (substitute_free(tau, phi) != chi) {
            v.diagnostic = "ShapeMismatch: the consequent is not S_f(tau) of the quantified formula";
            return v;
        }
    } else {
        VarSet inner;
        if (!detail::infer_free_subst(phi, chi, W, inner, tau)) {
            v.diagnostic = "ShapeMismatch: no substitution on " + detail::varset_str(W) + " relates the two sides";
            return v;
        }
        for (int w : W) {
            if (tau.count(w)) continue;
            int c = w;
            while (phi.bound_vars().count(c)) ++c;
            tau[w] = c;
        }
    }
    if (!opt.skip_side_conditions) {
        for (auto [w, t] : tau)
            if (phi.bound_vars().count(t)) {
                v.diagnostic = "SideConditionViolated: tau(v" + std::to_string(w) + ") = v" + std::to_string(t) +
                               " is bound in the formula";
                return v;
            }
    }
    v.ok = true;
    v.tau = tau;
    return v;
}

inline AxiomVerdict check_axiom_instance(Schema s, const Formula& f, const CalculusOptions& opt = {},
                                         const std::optional<VarMap>& tau = std::nullopt) {
    AxiomVerdict v;
    auto shape = [&](const std::string& what) {
        v.diagnostic = "ShapeMismatch: not of the form " + what;
        return v;
    };
    switch (s) {
        case Schema::A3:
        case Schema::A4: {
            // forall W (phi -> psi) -> (phi -> forall W psi)  |  forall W (phi -> psi) -> (exists W phi -> psi)
            const bool a3 = s == Schema::A3;
            const char* form = a3 ? "A{W}(p -> q) -> (p -> A{W} q)" : "A{W}(p -> q) -> (E{W} p -> q)";
            if (f.kind() != FKind::Implies || f.left().kind() != FKind::Forall || f.left().body().kind() != FKind::Implies ||
                f.right().kind() != FKind::Implies)
                return shape(form);
            const auto& W = f.left().block();
            const auto& phi = f.left().body().left();
            const auto& psi = f.left().body().right();
            if (a3) {
                const auto& q = f.right().right();
                if (f.right().left() != phi || q.kind() != FKind::Forall || q.block() != W || q.body() != psi) return shape(form);
            } else {
                const auto& e = f.right().left();
                if (e.kind() != FKind::Exists || e.block() != W || e.body() != phi || f.right().right() != psi) return shape(form);
            }
            if (!opt.skip_side_conditions) {
                auto clash = detail::intersect(W, phi.free_vars());
                if (!clash.empty()) {
                    v.diagnostic = "SideConditionViolated: " + detail::varset_str(clash) + " free in the antecedent";
                    return v;
                }
                if (!a3 && opt.strict_a4) {
                    clash = detail::intersect(W, psi.free_vars());
                    if (!clash.empty()) {
                        v.diagnostic = "SideConditionViolated: " + detail::varset_str(clash) + " free in the consequent";
                        return v;
                    }
                }
            }
            v.ok = true;
            return v;
        }
        case Schema::A5:
            if (f.kind() != FKind::Implies || f.left().kind() != FKind::Forall) return shape("A{W} p -> S_f(tau) p");
            return check_substitution_instance(f.left(), f.right(), tau, opt);
        case Schema::A6:
            if (f.kind() != FKind::Implies || f.right().kind() != FKind::Exists) return shape("S_f(tau) p -> E{W} p");
            return check_substitution_instance(f.right(), f.left(), tau, opt);
        default: {
            std::vector<std::optional<Formula>> bind(3);
            if (!detail::match(detail::pattern_of(s), f, bind)) return shape(render(detail::pattern_of(s)));
            v.ok = true;
            return v;
        }
    }
}

// ---------------------------------------------------------------- proofs

struct ProofStep {
    Rule rule = Rule::Hyp;
    Formula formula;
    std::vector<int> refs;
    std::optional<Schema> schema;
    std::optional<VarMap> tau;
    std::optional<VarSet> vars;
};

struct Proof {
    std::vector<ProofStep> steps;
};

struct ProofVerdict {
    bool accepted = false;
    int step = -1;
    std::string reason;
};

inline ProofVerdict check_proof(const std::vector<Formula>& gamma, const Proof& proof, const CalculusOptions& opt = {},
                                const LanguageSpec* lang = nullptr) {
    std::vector<Formula> done;
    auto reject = [&](std::size_t i, std::string why) { return ProofVerdict{false, static_cast<int>(i), std::move(why)}; };
    for (std::size_t i = 0; i < proof.steps.size(); ++i) {
        const auto& st = proof.steps[i];
        auto need_refs = [&](std::size_t n) -> std::optional<ProofVerdict> {
            if (st.refs.size() != n) return reject(i, rule_name(st.rule) + " needs " + std::to_string(n) + " reference(s)");
            if (st.rule == Rule::Hyp) return std::nullopt;
            for (int r : st.refs)
                if (r < 0 || static_cast<std::size_t>(r) >= i) return reject(i, "reference " + std::to_string(r) + " is not an earlier step");
            return std::nullopt;
        };
        Formula f = st.formula;
        if (f.valid() && lang) {
            try {
                lang->admit(f);
            } catch (const Error& e) {
                return reject(i, e.what());
            }
        }
        switch (st.rule) {
            case Rule::Hyp: {
                if (auto r = need_refs(1)) return *r;
                int h = st.refs[0];
                if (h < 0 || static_cast<std::size_t>(h) >= gamma.size()) return reject(i, "no hypothesis " + std::to_string(h));
                if (!f.valid()) f = gamma[h];
                if (f != gamma[h]) return reject(i, "formula differs from hypothesis " + std::to_string(h));
                break;
            }
            case Rule::Ax: {
                if (!st.schema) return reject(i, "axiom step without a schema");
                if (!f.valid()) return reject(i, "axiom step without a formula");
                auto v = check_axiom_instance(*st.schema, f, opt, st.tau);
                if (!v.ok) return reject(i, schema_name(*st.schema) + ": " + v.diagnostic);
                break;
            }
            case Rule::MP: {
                if (auto r = need_refs(2)) return *r;
                const auto& a = done[st.refs[0]];
                const auto& b = done[st.refs[1]];
                if (b.kind() != FKind::Implies || b.left() != a) return reject(i, "second premise is not an implication from the first");
                if (!f.valid()) f = b.right();
                if (f != b.right()) return reject(i, "conclusion is not the consequent");
                break;
            }
            case Rule::Gen: {
                if (auto r = need_refs(1)) return *r;
                const auto& a = done[st.refs[0]];
                if (!f.valid()) {
                    if (!st.vars) return reject(i, "Gen needs the block or the formula");
                    f = Formula::forall(*st.vars, a);
                }
                if (f.kind() != FKind::Forall || f.body() != a || (st.vars && *st.vars != f.block()))
                    return reject(i, "conclusion is not a generalisation of the premise");
                break;
            }
            case Rule::FreeSubInv: {
                if (auto r = need_refs(1)) return *r;
                if (!f.valid() || !st.tau) return reject(i, "FreeSubInv needs the formula and tau");
                auto tau = restrict_extend(*st.tau, f.free_vars());
                if (!opt.skip_side_conditions) {
                    if (!injective_on(tau, f.free_vars())) return reject(i, "SideConditionViolated: tau is not injective");
                    for (auto [x, y] : tau)
                        if (f.bound_vars().count(y))
                            return reject(i, "SideConditionViolated: tau(v" + std::to_string(x) + ") is bound in the formula");
                }
                if (substitute_free(tau, f) != done[st.refs[0]]) return reject(i, "premise is not S_f(tau) of the conclusion");
                break;
            }
            case Rule::SubInv: {
                if (auto r = need_refs(1)) return *r;
                if (!st.tau) return reject(i, "SubInv needs tau");
                const auto& a = done[st.refs[0]];
                auto tau = restrict_extend(*st.tau, a.vars());
                if (!opt.skip_side_conditions && !injective_on(tau, a.vars()))
                    return reject(i, "SideConditionViolated: tau is not injective on the variables of the premise");
                Formula s = substitute(tau, a, lang);
                if (!f.valid()) f = s;
                if (f != s) return reject(i, "conclusion is not S(tau) of the premise");
                break;
            }
        }
        done.push_back(f);
    }
    return {true, -1, ""};
}

// ---------------------------------------------------------------- soundness audit

struct SoundnessOptions {
    int trials = 200;
    int max_domain = 2;
    int chain = 3;
    std::uint64_t seed = 0;
    CalculusOptions calc;
    // the checker that decides which generated candidates count as instances
    CalculusOptions acceptor;
    RandomFormulaSpec gen{{{"p", 1}, {"q", 2}}, 3, 2, 2, true};
};

struct SoundnessReport {
    std::string subject;
    int instances = 0;
    int violations = 0;
    int nonvacuous = 0;  // rule checks whose premises held in the model
    std::string counterexample;
    bool passed() const { return violations == 0 && instances > 0; }
};

namespace detail {

inline std::vector<Model> audit_models(const RandomFormulaSpec& gen, int max_domain, int chain) {
    std::map<std::string, int> preds;
    for (const auto& p : gen.predicates) preds[p.name] = p.arity;
    std::vector<Model> out;
    for_each_model(preds, max_domain, chain, [&](const Model& m) {
        out.push_back(m);
        return true;
    });
    return out;
}

inline VarSet random_block(std::mt19937_64& rng, int vars, int max_block) {
    VarSet W;
    int k = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_block));
    for (int i = 0; i < k; ++i) W.insert(static_cast<int>(rng() % static_cast<std::uint64_t>(vars)));
    return W;
}

// Candidate for a schema; side conditions are not enforced here.
inline Formula schema_candidate(Schema s, std::mt19937_64& rng, const RandomFormulaSpec& gen, bool respect_side, VarMap& tau_out) {
    auto rf = [&] { return random_formula(rng, gen); };
    const int V = gen.variables + 1;
    switch (s) {
        case Schema::A3:
        case Schema::A4: {
            auto W = random_block(rng, gen.variables, gen.max_block);
            auto phi = rf();
            auto psi = rf();
            auto all = Formula::forall(W, Formula::implies(phi, psi));
            if (s == Schema::A3) return Formula::implies(all, Formula::implies(phi, Formula::forall(W, psi)));
            return Formula::implies(all, Formula::implies(Formula::exists(W, phi), psi));
        }
        case Schema::A5:
        case Schema::A6: {
            auto W = random_block(rng, gen.variables, gen.max_block);
            auto phi = rf();
            std::vector<int> allowed;
            for (int v = 0; v < V; ++v)
                if (!respect_side || !phi.bound_vars().count(v)) allowed.push_back(v);
            VarMap tau;
            for (int w : W) tau[w] = allowed[rng() % allowed.size()];
            tau_out = tau;
            auto chi = substitute_free(tau, phi);
            if (s == Schema::A5) return Formula::implies(Formula::forall(W, phi), chi);
            return Formula::implies(chi, Formula::exists(W, phi));
        }
        default: return instantiate(pattern_of(s), {rf(), rf(), rf()});
    }
}

inline bool valid_in_all(const Formula& f, const std::vector<Model>& models, const Model** bad) {
    for (const auto& m : models)
        if (!is_valid(f, m)) {
            *bad = &m;
            return false;
        }
    return true;
}

inline std::string describe_model(const Model& m) {
    std::string s = "domain " + std::to_string(m.domain());
    for (const auto& [name, t] : m.tables()) {
        s += "; " + name + "=[";
        for (std::size_t i = 0; i < t.values.size(); ++i) s += (i ? "," : "") + to_string(m.chain().value(t.values[i]));
        s += "]";
    }
    return s;
}

}  // namespace detail

// Every accepted instance must be valid in every model up to the bounds.
inline SoundnessReport soundness_audit(Schema s, const SoundnessOptions& opt) {
    SoundnessReport r;
    r.subject = schema_name(s);
    if (s == Schema::A4 && opt.calc.strict_a4) r.subject += " (strict)";
    std::mt19937_64 rng(opt.seed);
    auto models = detail::audit_models(opt.gen, opt.max_domain, opt.chain);
    int attempts = 0;
    while (r.instances < opt.trials && attempts < opt.trials * 200) {
        ++attempts;
        VarMap tau;
        bool respect = !opt.acceptor.skip_side_conditions;
        auto f = detail::schema_candidate(s, rng, opt.gen, respect, tau);
        if (!check_axiom_instance(s, f, opt.acceptor).ok) continue;
        ++r.instances;
        const Model* bad = nullptr;
        if (!detail::valid_in_all(f, models, &bad)) {
            if (r.violations++ == 0) r.counterexample = render(f) + " fails in " + detail::describe_model(*bad);
        }
    }
    return r;
}

// Per model: if the premises are valid in M, so is the conclusion.
inline SoundnessReport soundness_audit(Rule rule, const SoundnessOptions& opt) {
    SoundnessReport r;
    r.subject = rule_name(rule);
    std::mt19937_64 rng(opt.seed);
    auto models = detail::audit_models(opt.gen, opt.max_domain, opt.chain);
    const int V = opt.gen.variables + 1;
    auto rf = [&] { return random_formula(rng, opt.gen); };
    // Premises built as axiom instances or tautology-shaped formulas hold more often than random ones.
    auto premise = [&]() {
        switch (rng() % 3) {
            case 0: return rf();
            case 1: {
                auto a = rf();
                return Formula::oplus(a, Formula::neg(a));
            }
            default: {
                VarMap tau;
                auto s = all_schemas()[rng() % all_schemas().size()];
                return detail::schema_candidate(s, rng, opt.gen, true, tau);
            }
        }
    };
    int attempts = 0;
    while (r.instances < opt.trials && attempts < opt.trials * 200) {
        ++attempts;
        std::vector<Formula> premises;
        Formula concl;
        switch (rule) {
            case Rule::MP: {
                auto a = premise();
                auto b = rng() % 2 ? premise() : rf();
                premises = {a, Formula::implies(a, b)};
                concl = b;
                break;
            }
            case Rule::Gen: {
                auto a = premise();
                premises = {a};
                concl = Formula::forall(detail::random_block(rng, opt.gen.variables, opt.gen.max_block), a);
                break;
            }
            case Rule::FreeSubInv: {
                auto phi = premise();
                VarMap tau;
                std::vector<int> pool;
                for (int v = 0; v < V; ++v)
                    if (!phi.bound_vars().count(v)) pool.push_back(v);
                std::shuffle(pool.begin(), pool.end(), rng);
                if (pool.size() < phi.free_vars().size()) continue;
                std::size_t k = 0;
                for (int x : phi.free_vars()) tau[x] = pool[k++];
                Proof p;
                p.steps.push_back({Rule::Hyp, substitute_free(tau, phi), {0}, {}, {}, {}});
                p.steps.push_back({Rule::FreeSubInv, phi, {0}, {}, tau, {}});
                if (!check_proof({p.steps[0].formula}, p, opt.acceptor).accepted) continue;
                premises = {p.steps[0].formula};
                concl = phi;
                break;
            }
            case Rule::SubInv: {
                auto phi = premise();
                VarMap tau;
                std::vector<int> pool;
                for (int v = 0; v < V + 1; ++v) pool.push_back(v);
                std::shuffle(pool.begin(), pool.end(), rng);
                // with side conditions dropped, also try collapsing renamings
                const bool collapse = opt.acceptor.skip_side_conditions && rng() % 2;
                std::size_t k = 0;
                for (int x : phi.vars()) tau[x] = collapse ? pool[rng() % 2] : pool[k++ % pool.size()];
                Proof p;
                p.steps.push_back({Rule::Hyp, phi, {0}, {}, {}, {}});
                p.steps.push_back({Rule::SubInv, Formula(), {0}, {}, tau, {}});
                if (!check_proof({phi}, p, opt.acceptor).accepted) continue;
                premises = {phi};
                concl = substitute(restrict_extend(tau, phi.vars()), phi);
                break;
            }
            default: throw Error("rule " + rule_name(rule) + " has no soundness audit");
        }
        ++r.instances;
        for (const auto& m : models) {
            bool hold = std::all_of(premises.begin(), premises.end(), [&](const Formula& p) { return is_valid(p, m); });
            if (!hold) continue;
            ++r.nonvacuous;
            if (!is_valid(concl, m)) {
                if (r.violations++ == 0) r.counterexample = render(concl) + " fails in " + detail::describe_model(m);
                break;
            }
        }
    }
    return r;
}

}  // namespace mvlab

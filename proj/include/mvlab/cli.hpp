#pragma once

#include <chrono>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "mvlab/calculus.hpp"
#include "mvlab/interlab.hpp"
#include "mvlab/io.hpp"
#include "mvlab/mv_core.hpp"
#include "mvlab/pavelka.hpp"
#include "mvlab/polyadic.hpp"
#include "mvlab/semantics.hpp"
#include "mvlab/syntax.hpp"
#include "mvlab/transform.hpp"

namespace mvlab::cli {

using io::json;

enum Exit { Ok = 0, Negative = 1, Usage = 2 };

struct Context {
    std::filesystem::path base;  // relative input paths resolve against this
};

namespace detail {

struct Options {
    bool json_out = false;
    std::uint64_t seed = 0;
    std::size_t cap = 0;  // 0: use the default of each operation
    int chain = 0;
    std::string table, model, formula, gamma, proof, lang, algebra, filter, a, b, common, x1, x2, alpha, manifest;
    std::string schema, rule, policy = "any", gens, sigma = "suc", pi = "pred", assign, tau;
    bool standard = false, strict_a4 = false, full = false, dump = false, list = false, rename = false;
    std::uint64_t samples = 100000;
    int trials = 200, domain = 2, depth = 6, element = -1, n = 64, dim = 0;
};

// What a verb hands back: a verdict, a machine-readable result and human-readable lines.
struct Outcome {
    bool positive = true;
    json result = json::object();
    std::vector<std::string> lines;
    std::vector<std::string> diagnostics;
};

class Runner {
public:
    Runner(const Options& o, const Context& ctx) : o_(o), ctx_(ctx) {}

    std::string resolve(const std::string& path) const {
        if (path != "-" && std::filesystem::path(path).is_relative() && !ctx_.base.empty()) return (ctx_.base / path).string();
        return path;
    }
    std::string load(const std::string& path) {
        auto text = io::read_text(resolve(path));
        inputs_[path] = io::sha256_hex(text);
        return text;
    }
    json load_json(const std::string& path) { return io::parse_json(load(path), path); }
    const json& inputs() const { return inputs_; }

    std::optional<LanguageSpec> language() {
        if (o_.lang.empty()) return std::nullopt;
        return io::language_from_json(load_json(o_.lang));
    }
    std::optional<std::size_t> cap() const { return o_.cap ? std::optional<std::size_t>(o_.cap) : std::nullopt; }

    // formula text, or a file of formula text after '@', or standard input for "-"
    std::string formula_text(const std::string& arg) {
        if (arg == "-") return load("-");
        if (!arg.empty() && arg[0] == '@') return load(arg.substr(1));
        return arg;
    }

    const Options& o_;

private:
    const Context& ctx_;
    json inputs_ = json::object();
};

inline std::string pass_word(bool ok) { return ok ? "pass" : "FAIL"; }

inline json checks_json(const std::vector<ClauseCheck>& cs) {
    json a = json::array();
    for (const auto& c : cs) a.push_back({{"clause", c.clause}, {"passed", c.passed}, {"checked", c.checked}, {"witness", c.witness}});
    return a;
}

inline void add_lines(Outcome& out, const std::vector<ClauseCheck>& cs) {
    for (const auto& c : cs)
        out.lines.push_back(pass_word(c.passed) + "  " + c.clause + "  [" + std::to_string(c.checked) + "]" +
                            (c.passed ? "" : "  " + c.witness));
}

// ---------------------------------------------------------------- mv

inline MVAlgebra chain_or_table(Runner& r) {
    if (!r.o_.table.empty()) return MVAlgebra::table(io::table_from_json(r.load_json(r.o_.table)));
    if (r.o_.chain > 0) return MVAlgebra::chain(r.o_.chain);
    throw CLI::ValidationError("--chain or --table is required");
}

inline Outcome mv_audit(Runner& r) {
    Outcome out;
    AxiomReport rep;
    if (r.o_.standard) rep = check_mv_axioms(MVAlgebra::standard(), AuditMode::sampled(r.o_.samples, r.o_.seed));
    else if (!r.o_.table.empty()) rep = check_mv_axioms(io::table_from_json(r.load_json(r.o_.table)));
    else rep = check_mv_axioms(chain_or_table(r));
    out.positive = rep.passed();
    out.result = io::to_json(rep);
    for (const auto& c : rep.checks) {
        std::string w;
        for (const auto& s : c.witness) w += (w.empty() ? "" : ", ") + s;
        out.lines.push_back(pass_word(c.passed) + "  group " + std::to_string(c.group) + "  " + c.law + "  [" +
                            std::to_string(c.checked) + "]" + (c.passed ? "" : "  " + w));
    }
    return out;
}

inline Outcome mv_residuation(Runner& r) {
    Outcome out;
    if (r.o_.chain < 2) throw CLI::ValidationError("--chain n with n >= 2 is required");
    auto L = MVAlgebra::chain(r.o_.chain);
    const int n = L.size();
    std::uint64_t checked = 0, bad_adj = 0, bad_closed = 0;
    std::string witness;
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            if (L.implies(x, y) != residuum_by_maximization(L, x, y)) {
                ++bad_closed;
                if (witness.empty()) witness = "x=" + L.label(x) + ", y=" + L.label(y);
            }
            for (int z = 0; z < n; ++z, ++checked)
                if (L.leq(z, L.implies(x, y)) != L.leq(L.odot(x, z), y)) {
                    ++bad_adj;
                    if (witness.empty()) witness = "x=" + L.label(x) + ", y=" + L.label(y) + ", z=" + L.label(z);
                }
        }
    out.positive = bad_adj == 0 && bad_closed == 0;
    out.result = {{"chain", n}, {"triples", checked}, {"adjunction_violations", bad_adj}, {"closed_form_violations", bad_closed}, {"witness", witness}};
    out.lines.push_back(pass_word(bad_adj == 0) + "  z <= x -> y iff x (*) z <= y  [" + std::to_string(checked) + "]");
    out.lines.push_back(pass_word(bad_closed == 0) + "  x -> y = max{z : x (*) z <= y}  [" + std::to_string(n * n) + "]");
    if (!witness.empty()) out.lines.push_back("witness: " + witness);
    return out;
}

inline Outcome mv_filters(Runner& r) {
    Outcome out;
    auto M = chain_or_table(r);
    auto all = all_filters(M);
    auto maxi = maximal_filters(M);
    json fs = json::array();
    for (const auto& F : all) {
        bool m = std::find(maxi.begin(), maxi.end(), F) != maxi.end();
        std::vector<std::string> labels;
        for (int e : F.elements()) labels.push_back(M.label(e));
        fs.push_back({{"elements", F.elements()}, {"labels", labels}, {"proper", F.proper()}, {"maximal", m}});
        std::string s;
        for (const auto& l : labels) s += (s.empty() ? "" : ", ") + l;
        out.lines.push_back("{" + s + "}" + (m ? "  maximal" : "") + (F.proper() ? "" : "  improper"));
    }
    out.result = {{"size", M.size()}, {"filters", fs}};
    return out;
}

// ---------------------------------------------------------------- logic

inline Assignment parse_assignment(const std::string& s) {
    Assignment a;
    if (s.empty()) return a;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw io::FormatError("assignment entries look like v0=1");
        std::string v = item.substr(0, eq);
        if (!v.empty() && v[0] == 'v') v = v.substr(1);
        try {
            a.values[std::stoi(v)] = std::stoi(item.substr(eq + 1));
        } catch (const std::logic_error&) {
            throw io::FormatError("bad assignment entry '" + item + "'");
        }
    }
    return a;
}

inline Outcome logic_parse(Runner& r) {
    Outcome out;
    auto lang = r.language();
    auto f = parse(r.formula_text(r.o_.formula), lang ? &*lang : nullptr);
    if (lang) lang->admit(f);
    out.result = {{"formula", render(f)}, {"free", std::vector<int>(f.free_vars().begin(), f.free_vars().end())},
                  {"bound", std::vector<int>(f.bound_vars().begin(), f.bound_vars().end())}, {"size", f.size()}, {"depth", f.depth()}};
    out.lines.push_back(render(f));
    return out;
}

inline Outcome logic_eval(Runner& r) {
    Outcome out;
    auto m = io::model_from_json(r.load_json(r.o_.model));
    auto f = parse(r.formula_text(r.o_.formula));
    Rational v;
    std::string mode;
    if (!r.o_.assign.empty()) {
        auto s = parse_assignment(r.o_.assign);
        for (const auto& [var, e] : s.values)
            if (e < 0 || e >= m.domain()) throw CarrierError("v" + std::to_string(var) + " is assigned outside the domain");
        v = eval(f, m, s);
        mode = "assignment";
    } else {
        v = truth_degree(f, m);
        mode = f.free_vars().empty() ? "sentence" : "infimum over assignments";
    }
    out.result = {{"formula", render(f)}, {"value", to_string(v)}, {"mode", mode}};
    out.lines.push_back(to_string(v));
    return out;
}

inline Outcome logic_entails(Runner& r) {
    Outcome out;
    auto gamma = io::gamma_from_json(r.load_json(r.o_.gamma));
    auto f = parse(r.formula_text(r.o_.formula));
    EntailmentOptions opt{r.o_.domain, r.o_.chain > 0 ? r.o_.chain : 3, r.o_.cap ? r.o_.cap : 2'000'000};
    auto res = entails(gamma, f, opt);
    out.positive = !res.refuted;
    out.result = {{"entailed", !res.refuted}, {"models_checked", res.models_checked}, {"max_domain", res.max_domain}, {"chain", res.chain}};
    if (res.counterexample) out.result["counterexample"] = io::to_json(*res.counterexample);
    out.lines.push_back(res.refuted ? "refuted" : "entailed within the bound");
    out.lines.push_back(std::to_string(res.models_checked) + " models checked");
    if (res.counterexample) out.lines.push_back("counterexample: " + io::to_json(*res.counterexample).dump());
    return out;
}

inline Outcome logic_subst(Runner& r) {
    Outcome out;
    auto f = parse(r.formula_text(r.o_.formula));
    auto tau = io::varmap_from_json(io::parse_json(r.o_.tau, "--tau"));
    auto g = r.o_.rename ? substitute_renaming_apart(tau, f) : substitute(tau, f);
    out.result = {{"formula", render(f)}, {"result", render(g)}};
    out.lines.push_back(render(g));
    return out;
}

// ---------------------------------------------------------------- proofs

inline Outcome proof_check(Runner& r) {
    Outcome out;
    auto lang = r.language();
    const LanguageSpec* lp = lang ? &*lang : nullptr;
    auto gamma = io::gamma_from_json(r.load_json(r.o_.gamma), lp);
    auto proof = io::proof_from_json(r.load_json(r.o_.proof), lp);
    CalculusOptions opt;
    opt.strict_a4 = r.o_.strict_a4;
    auto v = check_proof(gamma, proof, opt, lp);
    out.positive = v.accepted;
    out.result = {{"accepted", v.accepted}, {"step", v.step}, {"reason", v.reason}, {"steps", proof.steps.size()}};
    out.lines.push_back(v.accepted ? "accepted" : "rejected at step " + std::to_string(v.step) + ": " + v.reason);
    return out;
}

inline Outcome proof_sound(Runner& r) {
    Outcome out;
    SoundnessOptions opt;
    opt.trials = r.o_.trials;
    opt.max_domain = r.o_.domain;
    opt.chain = r.o_.chain > 0 ? r.o_.chain : 3;
    opt.seed = r.o_.seed;
    opt.calc.strict_a4 = r.o_.strict_a4;
    opt.acceptor = opt.calc;
    std::vector<SoundnessReport> reps;
    if (!r.o_.schema.empty()) {
        auto s = schema_from_name(r.o_.schema);
        if (!s) throw CLI::ValidationError("unknown schema " + r.o_.schema);
        reps.push_back(soundness_audit(*s, opt));
    } else if (!r.o_.rule.empty()) {
        auto ru = rule_from_name(r.o_.rule);
        if (!ru) throw CLI::ValidationError("unknown rule " + r.o_.rule);
        reps.push_back(soundness_audit(*ru, opt));
    } else {
        for (auto s : all_schemas()) reps.push_back(soundness_audit(s, opt));
        for (auto ru : {Rule::MP, Rule::Gen, Rule::FreeSubInv, Rule::SubInv}) reps.push_back(soundness_audit(ru, opt));
    }
    json a = json::array();
    for (const auto& s : reps) {
        out.positive = out.positive && s.passed();
        a.push_back({{"subject", s.subject}, {"instances", s.instances}, {"violations", s.violations}, {"nonvacuous", s.nonvacuous},
                     {"passed", s.passed()}, {"counterexample", s.counterexample}});
        out.lines.push_back(pass_word(s.passed()) + "  " + s.subject + "  instances " + std::to_string(s.instances) +
                            ", violations " + std::to_string(s.violations));
    }
    out.result = {{"strict_a4", opt.calc.strict_a4}, {"audits", a}};
    return out;
}

// ---------------------------------------------------------------- polyadic algebras

inline FunctionalSetAlgebra set_algebra(Runner& r) {
    auto L = io::load_algebra(r.load_json(r.o_.algebra), r.cap());
    if (!L.functional) throw io::FormatError("the algebra file does not describe a set algebra");
    return *L.functional;
}

inline Outcome poly_build(Runner& r) {
    Outcome out;
    auto A = set_algebra(r);
    out.result = {{"dim", A.dim()}, {"base", A.base()}, {"chain", A.chain_length()}, {"size", A.size()},
                  {"transformations", A.transformations().size()}, {"scopes", A.scopes().size()}};
    if (r.o_.dump) out.result["algebra"] = io::dump(A);
    out.lines.push_back("carrier " + std::to_string(A.size()) + " over " + std::to_string(A.points()) + " assignments, |G| = " +
                        std::to_string(A.transformations().size()) + ", |T| = " + std::to_string(A.scopes().size()));
    if (r.o_.dump) out.lines.push_back(io::dump(A).dump(2));
    return out;
}

inline Outcome poly_audit(Runner& r) {
    Outcome out;
    auto A = set_algebra(r);
    auto rep = audit_axioms(A);
    out.positive = rep.passed();
    json a = json::array();
    for (const auto& c : rep.checks) {
        a.push_back({{"id", c.id}, {"law", c.law}, {"passed", c.passed}, {"checked", c.checked}, {"witness", c.witness}});
        out.lines.push_back(pass_word(c.passed) + "  " + c.id + "  " + c.law + "  [" + std::to_string(c.checked) + "]" +
                            (c.passed ? "" : "  " + c.witness));
    }
    out.result = {{"size", A.size()}, {"passed", rep.passed()}, {"checks", a}};
    return out;
}

inline Outcome poly_neat(Runner& r) {
    Outcome out;
    auto A = set_algebra(r);
    IndexMask alpha = mask_of(io::parse_index_list(r.o_.alpha));
    auto flavor = r.o_.full ? ReductFlavor::FullT : ReductFlavor::FiniteT;
    out.result = {{"alpha", mask_members(alpha)}, {"flavor", r.o_.full ? "full" : "finite"}};
    try {
        auto nr = neat_reduct(A, alpha, flavor);
        out.result["members"] = nr.members;
        out.result["transformations"] = nr.transformations.size();
        out.result["scopes"] = nr.scopes.size();
        out.lines.push_back("neat reduct on " + mask_str(alpha) + ": " + std::to_string(nr.members.size()) + " of " +
                            std::to_string(A.size()) + " elements");
    } catch (const NotASubuniverse& e) {
        out.positive = false;
        out.result["not_a_subuniverse"] = {{"operation", e.operation}, {"witness", e.witness}};
        out.lines.push_back(e.what());
    }
    return out;
}

// ---------------------------------------------------------------- interpolants, Henkin filters

inline std::set<std::string> name_list(const std::string& s) {
    std::set<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.insert(item);
    return out;
}

inline Outcome interp_search(Runner& r) {
    Outcome out;
    auto a = parse(r.load(r.o_.a));
    auto b = parse(r.load(r.o_.b));
    std::set<std::string> C;
    std::set<std::string> pa, pb;
    for (const auto& [p, _] : collect_predicates({a})) pa.insert(p);
    for (const auto& [p, _] : collect_predicates({b})) pb.insert(p);
    if (!r.o_.common.empty()) {
        C = name_list(r.o_.common);
        for (const auto& p : pa)
            if (pb.count(p) && !C.count(p)) throw LanguageError("predicate '" + p + "' occurs in a and b but is not declared common");
    } else {
        for (const auto& p : pa)
            if (pb.count(p)) C.insert(p);
    }
    VocabSplit split;
    split.X1 = r.o_.x1.empty() ? pa : name_list(r.o_.x1);
    split.X2 = r.o_.x2.empty() ? pb : name_list(r.o_.x2);
    split.X1.insert(C.begin(), C.end());
    split.X2.insert(C.begin(), C.end());
    InterpolantOptions opt;
    opt.chain = r.o_.chain > 0 ? r.o_.chain : 2;
    opt.max_size = r.o_.depth;
    if (r.o_.cap) opt.cap = r.o_.cap;
    bool first_order = false;
    for (const auto& [p, ar] : collect_predicates({a, b})) first_order = first_order || ar > 0;
    if (first_order) opt.scope = SearchScope::BoundedModel, opt.max_domain = r.o_.domain;
    out.result = {{"a", render(a)}, {"b", render(b)}, {"common", std::vector<std::string>(C.begin(), C.end())}, {"chain", opt.chain},
                  {"max_size", opt.max_size}};
    try {
        auto res = interpolant_search(a, b, split, opt);
        out.positive = res.found;
        out.result["verdict"] = res.found ? "found" : "not-found";
        if (res.found) out.result["interpolant"] = render(res.interpolant);
        out.result["candidates"] = res.candidates;
        out.result["distinct"] = res.distinct;
        out.lines.push_back(res.found ? "found: " + render(res.interpolant) : "not found up to size " + std::to_string(opt.max_size));
    } catch (const PremiseNotEntailed& e) {
        out.positive = false;
        out.result["verdict"] = "premise-not-entailed";
        out.lines.push_back(std::string("premise not entailed: ") + e.what());
    }
    return out;
}

inline WitnessPolicy policy_of(const std::string& s) {
    if (s == "any") return WitnessPolicy::AnyIndex;
    if (s == "fresh") return WitnessPolicy::FreshIndex;
    throw CLI::ValidationError("--policy must be any or fresh");
}

inline Outcome henkin_demo(Runner& r) {
    Outcome out;
    auto A = set_algebra(r);
    auto P = to_abstract(A);
    const int a = r.o_.element;
    P.mv.check_index(a);
    auto h = henkin_filter_build(P, a, policy_of(r.o_.policy));
    out.result = {{"size", A.size()}, {"element", a}, {"policy", r.o_.policy}};
    if (!h) {
        out.positive = false;
        out.result["verdict"] = "exhausted";
        out.lines.push_back("exhausted: no maximal filter containing element " + std::to_string(a) + " meets the witness condition");
        return out;
    }
    auto R = representation_map(P, *h, P.G);
    out.positive = R.passed();
    json w = json::array();
    for (const auto& x : h->witnesses) w.push_back({{"k", x.k}, {"x", x.x}, {"l", x.l}});
    out.result["verdict"] = "found";
    out.result["filter"] = h->filter.elements();
    out.result["witnesses"] = w;
    out.result["quotient_chain"] = R.chain.size();
    out.result["audit"] = checks_json(R.audit);
    out.lines.push_back("filter with " + std::to_string(h->filter.size()) + " elements, " + std::to_string(h->witnesses.size()) +
                        " witnesses, quotient chain of " + std::to_string(R.chain.size()));
    add_lines(out, R.audit);
    return out;
}

// ---------------------------------------------------------------- Pavelka

inline Outcome pavelka_degree(Runner& r) {
    Outcome out;
    auto L = io::load_algebra(r.load_json(r.o_.algebra), r.cap());
    if (!L.pavelka) throw io::FormatError("the algebra file declares no constants");
    auto F = io::filter_from_json(r.load_json(r.o_.filter), L.mv);
    GradedContext ctx(*L.pavelka, F);
    const int a = r.o_.element;
    L.mv.check_index(a);
    auto d = degree(a, ctx), dd = degree_dual(a, ctx);
    out.positive = d == dd;
    out.result = {{"element", a}, {"degree", to_string(d)}, {"dual", to_string(dd)}, {"agree", d == dd}};
    out.lines.push_back(to_string(d));
    if (d != dd) out.lines.push_back("inf form gives " + to_string(dd));
    return out;
}

inline Outcome pavelka_audit(Runner& r) {
    Outcome out;
    auto L = io::load_algebra(r.load_json(r.o_.algebra), r.cap());
    if (!L.pavelka) throw io::FormatError("the algebra file declares no constants");
    const auto& P = *L.pavelka;
    std::vector<ClauseCheck> all;
    auto take = [&](const std::string& prefix, const std::vector<ClauseCheck>& cs) {
        for (auto c : cs) {
            c.clause = prefix + c.clause;
            all.push_back(std::move(c));
        }
    };
    take("", check_constant_laws(P));
    int maximal = 0;
    // sup and inf forms can differ at non-maximal filters once the algebra is not a chain
    for (const auto& F : maximal_filters(L.mv)) {
        if (!F.proper()) continue;
        ++maximal;
        take("lemma: ", pavelka_lemma_check(P, F).checks);
        take("degree: ", degree_audit(GradedContext(P, F)));
    }
    if (L.functional) {
        auto Abs = to_abstract(*L.functional);
        take("", pavelka_quantifier_check(Abs, P).checks);
        if (r.o_.element >= 0) {
            auto h = henkin_filter_build(Abs, r.o_.element, policy_of(r.o_.policy));
            if (!h) {
                all.push_back({"Henkin filter for the representation", false, 1, "exhausted"});
            } else {
                auto R = pavelka_representation(Abs, P, *h, Abs.G);
                take("representation: ", R.audit);
            }
        }
    }
    // merge clauses of the same name so the report does not grow with the number of filters
    std::vector<ClauseCheck> merged;
    for (const auto& c : all) {
        auto it = std::find_if(merged.begin(), merged.end(), [&](const ClauseCheck& m) { return m.clause == c.clause; });
        if (it == merged.end()) {
            merged.push_back(c);
            continue;
        }
        it->checked += c.checked;
        if (it->passed && !c.passed) it->passed = false, it->witness = c.witness;
    }
    out.positive = mvlab::detail::all_passed(merged);
    out.result = {{"size", L.mv.size()}, {"constants", P.constants.size()}, {"maximal_filters", maximal},
                  {"checks", checks_json(merged)}};
    add_lines(out, merged);
    return out;
}

// ---------------------------------------------------------------- semigroups

inline std::vector<std::string> literal_list(const std::string& s) {
    // commas inside brackets belong to the literal
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char c : s) {
        if (c == '[' || c == '{') ++depth;
        if (c == ']' || c == '}') --depth;
        if (c == ';' || (c == ',' && depth == 0)) {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

inline Outcome semigroup_closure_verb(Runner& r) {
    Outcome out;
    auto lits = literal_list(r.o_.gens);
    if (lits.empty()) throw CLI::ValidationError("--gen needs at least one transformation");
    const std::size_t cap = r.o_.cap ? r.o_.cap : 10000;
    json elems = json::array();
    std::size_t size = 0;
    bool truncated = false;
    if (r.o_.dim > 0) {
        SemigroupSpec<FinTransformation> spec{{}, cap};
        for (const auto& l : lits) spec.generators.push_back(parse_fin_transformation(l, r.o_.dim));
        auto c = semigroup_closure(spec);
        size = c.elements.size(), truncated = c.truncated;
        if (r.o_.list)
            for (const auto& e : c.elements) elems.push_back(e.to_string());
    } else {
        SemigroupSpec<OmegaMap> spec{{}, cap};
        for (const auto& l : lits) spec.generators.push_back(parse_transformation(l));
        auto c = semigroup_closure(spec);
        size = c.elements.size(), truncated = c.truncated;
        if (r.o_.list)
            for (const auto& e : c.elements) elems.push_back(e.to_string());
    }
    out.result = {{"size", size}, {"truncated", truncated}};
    if (r.o_.list) out.result["elements"] = elems;
    out.lines.push_back(std::to_string(size) + " elements" + (truncated ? " (truncated at the cap)" : ""));
    if (r.o_.list)
        for (const auto& e : elems) out.lines.push_back(e.get<std::string>());
    return out;
}

inline Outcome semigroup_rich(Runner& r) {
    Outcome out;
    auto sigma = parse_transformation(r.o_.sigma);
    auto pi = parse_transformation(r.o_.pi);
    SemigroupSpec<OmegaMap> amb{{}, r.o_.cap ? r.o_.cap : 200};
    for (const auto& l : literal_list(r.o_.gens.empty() ? "suc,pred,[0,1],[0|1]" : r.o_.gens)) amb.generators.push_back(parse_transformation(l));
    auto rep = check_strongly_rich(sigma, pi, amb, r.o_.n);
    out.positive = rep.passed();
    json a = json::array();
    int failed = 0;
    for (const auto& c : rep.checks) {
        a.push_back({{"condition", c.condition}, {"n", c.n}, {"passed", c.passed}, {"detail", c.detail}});
        if (!c.passed) {
            ++failed;
            out.lines.push_back("FAIL  " + c.condition + (c.n ? " (n=" + std::to_string(c.n) + ")" : "") + "  " + c.detail);
        }
    }
    out.lines.insert(out.lines.begin(), std::to_string(rep.checks.size() - static_cast<std::size_t>(failed)) + " of " +
                                            std::to_string(rep.checks.size()) + " conditions hold for n = 1.." + std::to_string(r.o_.n));
    out.result = {{"n", r.o_.n}, {"closure_size", rep.closure_size}, {"closure_truncated", rep.closure_truncated},
                  {"sampled", rep.sampled}, {"passed", rep.passed()}, {"checks", a}};
    return out;
}

}  // namespace detail

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Context& ctx = {});

namespace detail {

// Manifest: {"commands": [ [args...] | {"args": [...], "expect": code}, ... ]}.
inline Outcome batch(Runner& r) {
    Outcome out;
    auto m = r.load_json(r.o_.manifest);
    const json& list = m.is_object() ? (m.contains("commands") ? m["commands"] : json::array()) : m;
    if (!list.is_array()) throw io::FormatError("the manifest lists commands in an array");
    std::filesystem::path base = std::filesystem::path(r.resolve(r.o_.manifest)).parent_path();
    Context sub;
    sub.base = base;
    json runs = json::array();
    int failed = 0;
    for (const auto& entry : list) {
        std::vector<std::string> args;
        int expect = 0;
        const json& a = entry.is_object() ? entry.at("args") : entry;
        for (const auto& s : a) args.push_back(s.get<std::string>());
        if (entry.is_object() && entry.contains("expect")) expect = entry["expect"].get<int>();
        if (!args.empty() && args[0] == "batch") throw io::FormatError("manifests cannot nest batch runs");
        if (std::find(args.begin(), args.end(), "--json") == args.end()) args.push_back("--json");
        std::ostringstream so, se;
        int code = dispatch(args, so, se, sub);
        json rep;
        try {
            rep = json::parse(so.str());
        } catch (const json::parse_error&) {
            rep = {{"raw", so.str()}, {"stderr", se.str()}};
        }
        bool ok = code == expect;
        if (!ok) ++failed;
        runs.push_back({{"args", args}, {"expect", expect}, {"exit", code}, {"passed", ok}, {"report", rep}});
        std::string cmd;
        for (const auto& s : args)
            if (s != "--json") cmd += (cmd.empty() ? "" : " ") + s;
        out.lines.push_back(pass_word(ok) + "  " + cmd + "  (exit " + std::to_string(code) + ")");
    }
    out.positive = failed == 0;
    out.result = {{"total", runs.size()}, {"failed", failed}, {"runs", runs}};
    return out;
}

}  // namespace detail

inline int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Context& ctx) {
    using namespace detail;
    Options o;
    CLI::App app{"Many-valued predicate logic and polyadic MV algebras"};
    app.name("mvlab");
    app.require_subcommand(1);
    app.fallthrough();
    app.add_flag("--json", o.json_out, "machine-readable report on standard output");
    app.add_option("--seed", o.seed, "seed for sampled audits")->capture_default_str();
    app.add_option("--cap", o.cap, "cap for closures and searches");

    auto verb = [&](const char* name, const char* help) {
        auto* v = app.add_subcommand(name, help);
        v->require_subcommand(1);
        v->fallthrough();
        return v;
    };
    auto act = [](CLI::App* v, const char* name, const char* help) {
        auto* s = v->add_subcommand(name, help);
        s->fallthrough();
        return s;
    };

    auto* mv = verb("mv", "MV algebras");
    auto* mv_audit_c = act(mv, "audit", "check the MV axioms");
    mv_audit_c->add_option("--chain", o.chain, "the n-element chain");
    mv_audit_c->add_option("--table", o.table, "table algebra file");
    mv_audit_c->add_flag("--standard", o.standard, "sample the rationals in [0,1]");
    mv_audit_c->add_option("--samples", o.samples, "triples sampled with --standard");
    auto* mv_res_c = act(mv, "residuation", "check the residuation law and the closed form of ->");
    mv_res_c->add_option("--chain", o.chain)->required();
    auto* mv_fil_c = act(mv, "filters", "list the filters");
    mv_fil_c->add_option("--chain", o.chain);
    mv_fil_c->add_option("--table", o.table);

    auto* logic = verb("logic", "formulas and models");
    auto* lp = act(logic, "parse", "parse and normalise a formula");
    lp->add_option("--formula", o.formula, "formula text, @file or -")->required();
    lp->add_option("--lang", o.lang, "language spec file");
    auto* le = act(logic, "eval", "truth value in a model");
    le->add_option("--model", o.model)->required();
    le->add_option("--formula", o.formula)->required();
    le->add_option("--assign", o.assign, "e.g. v0=1,v1=0");
    auto* len = act(logic, "entails", "bounded entailment check");
    len->add_option("--gamma", o.gamma)->required();
    len->add_option("--formula", o.formula)->required();
    len->add_option("--domain", o.domain);
    len->add_option("--chain", o.chain);
    auto* ls = act(logic, "subst", "apply a variable substitution");
    ls->add_option("--formula", o.formula)->required();
    ls->add_option("--tau", o.tau, "JSON object, e.g. {\"0\": 1}")->required();
    ls->add_flag("--rename", o.rename, "rename bound variables apart first");

    auto* proof = verb("proof", "Hilbert calculus");
    auto* pc = act(proof, "check", "check a proof");
    pc->add_option("--gamma", o.gamma)->required();
    pc->add_option("--proof", o.proof)->required();
    pc->add_option("--lang", o.lang);
    pc->add_flag("--strict-a4", o.strict_a4);
    auto* ps = act(proof, "sound", "soundness audit of schemas and rules");
    ps->add_option("--schema", o.schema);
    ps->add_option("--rule", o.rule);
    ps->add_option("--trials", o.trials);
    ps->add_option("--domain", o.domain);
    ps->add_option("--chain", o.chain);
    ps->add_flag("--strict-a4", o.strict_a4);

    auto* poly = verb("poly", "polyadic set algebras");
    auto* pb = act(poly, "build", "generate a set algebra");
    pb->add_option("--algebra", o.algebra)->required();
    pb->add_flag("--dump", o.dump, "include every element");
    auto* pa = act(poly, "audit", "check the polyadic identities");
    pa->add_option("--algebra", o.algebra)->required();
    auto* pn = act(poly, "neat", "neat reduct");
    pn->add_option("--algebra", o.algebra)->required();
    pn->add_option("--alpha", o.alpha, "e.g. 0,1")->required();
    pn->add_flag("--full", o.full, "cylinder-invariance form");

    auto* interp = verb("interp", "interpolants");
    auto* is = act(interp, "search", "bounded interpolant search");
    is->add_option("--a", o.a, "file with the premise")->required();
    is->add_option("--b", o.b, "file with the conclusion")->required();
    is->add_option("--common", o.common, "e.g. p,q");
    is->add_option("--x1", o.x1);
    is->add_option("--x2", o.x2);
    is->add_option("--chain", o.chain);
    is->add_option("--depth", o.depth, "maximal interpolant size");
    is->add_option("--domain", o.domain, "model bound for first-order formulas");

    auto* henkin = verb("henkin", "Henkin filters");
    auto* hd = act(henkin, "demo", "build a Henkin filter and audit the representation");
    hd->add_option("--algebra", o.algebra)->required();
    hd->add_option("--element", o.element)->required();
    hd->add_option("--policy", o.policy, "any or fresh");

    auto* pav = verb("pavelka", "graded extension");
    auto* pd = act(pav, "degree", "graded degree of an element");
    pd->add_option("--algebra", o.algebra)->required();
    pd->add_option("--filter", o.filter)->required();
    pd->add_option("--element", o.element)->required();
    auto* pau = act(pav, "audit", "constants, lemma, degrees and representation");
    pau->add_option("--algebra", o.algebra)->required();
    pau->add_option("--element", o.element, "element for the representation audit");
    pau->add_option("--policy", o.policy);

    auto* sg = verb("semigroup", "transformation semigroups");
    auto* sc = act(sg, "closure", "generate a semigroup");
    sc->add_option("--gen", o.gens, "e.g. suc,pred,[0|1]")->required();
    sc->add_option("--dim", o.dim, "finite index set size (omit for omega)");
    sc->add_flag("--list", o.list);
    auto* sr = act(sg, "rich", "strong richness of (sigma, pi)");
    sr->add_option("--sigma", o.sigma);
    sr->add_option("--pi", o.pi);
    sr->add_option("--n", o.n);
    sr->add_option("--gen", o.gens, "ambient generators");

    auto* bt = app.add_subcommand("batch", "run a manifest of commands");
    bt->add_option("--manifest", o.manifest)->required();
    bt->fallthrough();

    std::vector<std::string> argv_s{"mvlab"};
    argv_s.insert(argv_s.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& s : argv_s) argv.push_back(s.c_str());

    std::string command;
    auto report = [&](const std::string& verdict, int code, const Outcome* oc, const Runner* rn, const std::string& diag) {
        if (o.json_out) {
            json j;
            j["command"] = command;
            j["args"] = args;
            j["seed"] = o.seed;
            j["inputs"] = rn ? rn->inputs() : json::object();
            j["verdict"] = verdict;
            j["exit"] = code;
            json d = json::array();
            if (!diag.empty()) d.push_back(diag);
            if (oc)
                for (const auto& s : oc->diagnostics) d.push_back(s);
            j["diagnostics"] = d;
            j["result"] = oc ? oc->result : json::object();
            out << j.dump(2) << "\n";
        } else if (oc) {
            for (const auto& l : oc->lines) out << l << "\n";
        }
        if (!diag.empty()) err << "mvlab: " << diag << "\n";
        return code;
    };

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        return report("error", Usage, nullptr, nullptr, e.what());
    }

    for (auto* v : app.get_subcommands()) {
        command = v->get_name();
        for (auto* s : v->get_subcommands()) command += " " + s->get_name();
    }
    Runner run(o, ctx);
    const auto t0 = std::chrono::steady_clock::now();
    try {
        Outcome oc;
        if (mv_audit_c->parsed()) oc = mv_audit(run);
        else if (mv_res_c->parsed()) oc = mv_residuation(run);
        else if (mv_fil_c->parsed()) oc = mv_filters(run);
        else if (lp->parsed()) oc = logic_parse(run);
        else if (le->parsed()) oc = logic_eval(run);
        else if (len->parsed()) oc = logic_entails(run);
        else if (ls->parsed()) oc = logic_subst(run);
        else if (pc->parsed()) oc = proof_check(run);
        else if (ps->parsed()) oc = proof_sound(run);
        else if (pb->parsed()) oc = poly_build(run);
        else if (pa->parsed()) oc = poly_audit(run);
        else if (pn->parsed()) oc = poly_neat(run);
        else if (is->parsed()) oc = interp_search(run);
        else if (hd->parsed()) oc = henkin_demo(run);
        else if (pd->parsed()) oc = pavelka_degree(run);
        else if (pau->parsed()) oc = pavelka_audit(run);
        else if (sc->parsed()) oc = semigroup_closure_verb(run);
        else if (sr->parsed()) oc = semigroup_rich(run);
        else if (bt->parsed()) oc = batch(run);
        else return report("error", Usage, nullptr, nullptr, "no command given");
        const int code = oc.positive ? Ok : Negative;
        if (!o.json_out) {
            const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            std::ostringstream t;
            t << std::fixed << std::setprecision(3) << s;
            oc.lines.push_back("(" + command + ": " + (oc.positive ? "ok" : "negative") + ", " + t.str() + " s)");
        }
        return report(oc.positive ? "pass" : "fail", code, &oc, &run, "");
    } catch (const CLI::ValidationError& e) {
        return report("error", Usage, nullptr, &run, e.what());
    } catch (const std::ios_base::failure& e) {
        return report("error", Usage, nullptr, &run, e.what());
    } catch (const nlohmann::json::exception& e) {
        return report("error", Usage, nullptr, &run, std::string("malformed input: ") + e.what());
    } catch (const Error& e) {
        return report("error", Usage, nullptr, &run, e.what());
    }
}

}  // namespace mvlab::cli

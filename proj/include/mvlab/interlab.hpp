#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mvlab/errors.hpp"
#include "mvlab/mv_core.hpp"
#include "mvlab/polyadic.hpp"
#include "mvlab/semantics.hpp"
#include "mvlab/syntax.hpp"

namespace mvlab {

// a <= b iff a (*) ~b = 0; the lattice order a ^ b = a must agree.
inline bool leq(const MVAlgebra& A, int a, int b) {
    bool r = A.odot(a, A.neg(b)) == A.zero();
    if (r != (A.meet(a, b) == a)) throw AxiomError("order by residuation and lattice order disagree");
    return r;
}

inline bool leq(const MVAlgebra& A, const Rational& a, const Rational& b) {
    if (!A.finite()) {
        auto na = A.eval_basic(Connective::Neg, std::vector<Rational>{b});
        bool r = A.eval_basic(Connective::Odot, std::vector<Rational>{a, na}) == Rational(0);
        if (r != (std::min(a, b) == a)) throw AxiomError("order by residuation and lattice order disagree");
        return r;
    }
    return leq(A, A.index_of(a), A.index_of(b));
}

// ---------------------------------------------------------------- interpolant search

struct VocabSplit {
    std::set<std::string> X1, X2;
    std::set<std::string> common() const {
        std::set<std::string> c;
        for (const auto& p : X1)
            if (X2.count(p)) c.insert(p);
        return c;
    }
};

enum class SearchScope { Propositional, BoundedModel };

struct InterpolantOptions {
    int max_size = 6;  // bound on formula size (node count)
    int chain = 2;
    SearchScope scope = SearchScope::Propositional;
    int max_domain = 1;  // used by the bounded-model scope
    std::uint64_t cap = 2'000'000;
};

struct InterpolantResult {
    bool found = false;
    Formula interpolant;
    int max_size = 0;
    std::uint64_t candidates = 0;  // formulas generated
    std::uint64_t distinct = 0;    // distinct truth tables among them
};

namespace detail {

// Every (model, assignment) pair of a finite scope, with a pointwise evaluator of its own.
class PointSpace {
public:
    PointSpace(const std::map<std::string, int>& preds, int max_domain, int chain, std::vector<int> vars)
        : vars_(std::move(vars)), n_(chain) {
        for_each_model(preds, max_domain, chain, [&](const Model& m) {
            offsets_.push_back(total_);
            std::size_t c = 1;
            for (std::size_t i = 0; i < vars_.size(); ++i) c *= static_cast<std::size_t>(m.domain());
            total_ += c;
            models_.push_back(m);
            return true;
        });
    }

    std::size_t size() const { return total_; }
    const std::vector<Model>& models() const { return models_; }
    std::size_t offset(std::size_t model) const { return offsets_[model]; }
    const std::vector<int>& vars() const { return vars_; }

    using Table = std::vector<std::uint8_t>;

    Table table(const Formula& f) const {
        Table out(total_);
        switch (f.kind()) {
            case FKind::Top: std::fill(out.begin(), out.end(), static_cast<std::uint8_t>(n_ - 1)); return out;
            case FKind::Bottom: return out;
            case FKind::Atom: {
                std::vector<int> pos;
                for (int v : f.args()) pos.push_back(position(v));
                for (std::size_t m = 0; m < models_.size(); ++m) {
                    const auto& t = models_[m].table(f.pred());
                    const int d = models_[m].domain();
                    for_points(m, [&](std::size_t p, const std::vector<int>& s) {
                        std::size_t idx = 0;
                        for (int q : pos) idx = idx * static_cast<std::size_t>(d) + static_cast<std::size_t>(s[q]);
                        out[p] = static_cast<std::uint8_t>(t.values[idx]);
                    });
                }
                return out;
            }
            case FKind::Neg: {
                auto a = table(f.left());
                for (std::size_t i = 0; i < total_; ++i) out[i] = static_cast<std::uint8_t>(n_ - 1 - a[i]);
                return out;
            }
            case FKind::Oplus:
            case FKind::Odot:
            case FKind::Implies: return combine(f.kind(), table(f.left()), table(f.right()));
            case FKind::Forall:
            case FKind::Exists: return quantify(f.kind() == FKind::Exists, f.block(), table(f.body()));
            default: throw Error("meta variables cannot be evaluated");
        }
    }

    Table combine(FKind k, const Table& a, const Table& b) const {
        Table out(total_);
        const int top = n_ - 1;
        for (std::size_t i = 0; i < total_; ++i) {
            int x = a[i], y = b[i];
            int v = k == FKind::Oplus ? std::min(x + y, top) : k == FKind::Odot ? std::max(x + y - top, 0) : std::min(top, top - x + y);
            out[i] = static_cast<std::uint8_t>(v);
        }
        return out;
    }

    Table quantify(bool exists, const VarSet& W, const Table& body) const {
        Table out(total_);
        std::vector<int> ws;
        for (int w : W)
            if (std::find(vars_.begin(), vars_.end(), w) != vars_.end()) ws.push_back(position(w));
        for (std::size_t m = 0; m < models_.size(); ++m) {
            const int d = models_[m].domain();
            std::vector<std::size_t> weight(vars_.size());
            std::size_t w = 1;
            for (std::size_t i = vars_.size(); i-- > 0;) weight[i] = w, w *= static_cast<std::size_t>(d);
            for_points(m, [&](std::size_t p, const std::vector<int>& s) {
                std::size_t base = p;
                for (int q : ws) base -= static_cast<std::size_t>(s[q]) * weight[q];
                std::size_t combos = 1;
                for (std::size_t i = 0; i < ws.size(); ++i) combos *= static_cast<std::size_t>(d);
                int best = exists ? 0 : n_ - 1;
                for (std::size_t c = 0; c < combos; ++c) {
                    std::size_t idx = base, r = c;
                    for (int q : ws) idx += (r % static_cast<std::size_t>(d)) * weight[q], r /= static_cast<std::size_t>(d);
                    best = exists ? std::max<int>(best, body[idx]) : std::min<int>(best, body[idx]);
                }
                out[p] = static_cast<std::uint8_t>(best);
            });
        }
        return out;
    }

private:
    std::vector<int> vars_;
    int n_;
    std::vector<Model> models_;
    std::vector<std::size_t> offsets_;
    std::size_t total_ = 0;

    int position(int v) const {
        auto it = std::find(vars_.begin(), vars_.end(), v);
        if (it == vars_.end()) throw ScopeError("variable v" + std::to_string(v) + " outside the search scope");
        return static_cast<int>(it - vars_.begin());
    }

    // Assignments in row-major order over vars_ (first variable most significant).
    template <class F>
    void for_points(std::size_t m, F&& fn) const {
        const int d = models_[m].domain();
        std::vector<int> s(vars_.size(), 0);
        std::size_t p = offsets_[m];
        while (true) {
            fn(p++, s);
            std::size_t i = s.size();
            for (; i > 0; --i) {
                if (++s[i - 1] < d) break;
                s[i - 1] = 0;
            }
            if (i == 0) break;
        }
    }
};

inline std::string model_key(const Model& m, const std::set<std::string>& keep) {
    std::string k = std::to_string(m.domain());
    for (const auto& [name, t] : m.tables()) {
        if (!keep.count(name)) continue;
        k += "|" + name + ":";
        for (int v : t.values) k += static_cast<char>('0' + v);
    }
    return k;
}

}  // namespace detail

inline InterpolantResult interpolant_search(const Formula& a, const Formula& b, const VocabSplit& split,
                                            const InterpolantOptions& opt = {}) {
    auto pa = collect_predicates({a});
    auto pb = collect_predicates({b});
    for (const auto& [p, _] : pa)
        if (!split.X1.count(p)) throw LanguageError("predicate '" + p + "' of a is outside X1");
    for (const auto& [p, _] : pb)
        if (!split.X2.count(p)) throw LanguageError("predicate '" + p + "' of b is outside X2");
    auto all = collect_predicates({a, b});
    const auto common = split.common();
    int max_domain = opt.max_domain;
    if (opt.scope == SearchScope::Propositional) {
        for (const auto& [p, ar] : all)
            if (ar != 0) throw LanguageError("propositional scope needs nullary atoms, '" + p + "' has arity " + std::to_string(ar));
        max_domain = 1;
    }
    // common predicates absent from both formulas still count as arity 0 in the propositional scope
    std::map<std::string, int> cpreds;
    for (const auto& p : common) cpreds[p] = all.count(p) ? all[p] : 0;
    for (const auto& [p, ar] : cpreds) all[p] = ar;
    if (model_count(all, max_domain, opt.chain, opt.cap) > opt.cap) throw SearchTooLarge("too many models in scope");

    std::vector<int> vars;
    if (opt.scope == SearchScope::BoundedModel) {
        VarSet vs = a.vars();
        vs.insert(b.vars().begin(), b.vars().end());
        vars.assign(vs.begin(), vs.end());
    }
    detail::PointSpace full(all, max_domain, opt.chain, vars);
    detail::PointSpace small(cpreds, max_domain, opt.chain, vars);
    if (full.size() > opt.cap) throw SearchTooLarge("too many evaluation points in scope");

    // project full points to common points
    std::map<std::string, std::size_t> reduct;
    for (std::size_t m = 0; m < small.models().size(); ++m) reduct[detail::model_key(small.models()[m], common)] = m;
    auto ta = full.table(a);
    auto tb = full.table(b);
    std::vector<int> lo(small.size(), 0), hi(small.size(), opt.chain - 1);
    for (std::size_t m = 0; m < full.models().size(); ++m) {
        std::size_t cm = reduct.at(detail::model_key(full.models()[m], common));
        std::size_t count = (m + 1 < full.models().size() ? full.offset(m + 1) : full.size()) - full.offset(m);
        for (std::size_t i = 0; i < count; ++i) {
            std::size_t p = full.offset(m) + i, q = small.offset(cm) + i;
            if (ta[p] > tb[p]) throw PremiseNotEntailed("a -> b is not valid in the search scope");
            lo[q] = std::max<int>(lo[q], ta[p]);
            hi[q] = std::min<int>(hi[q], tb[p]);
        }
    }
    auto qualifies = [&](const detail::PointSpace::Table& t) {
        for (std::size_t i = 0; i < t.size(); ++i)
            if (t[i] < lo[i] || t[i] > hi[i]) return false;
        return true;
    };

    InterpolantResult res;
    res.max_size = opt.max_size;
    struct Cand {
        std::string text;
        Formula f;
        detail::PointSpace::Table t;
    };
    std::vector<std::vector<Cand>> level(static_cast<std::size_t>(opt.max_size) + 1);
    std::set<detail::PointSpace::Table> seen;
    for (int s = 1; s <= opt.max_size; ++s) {
        std::vector<Cand> fresh;
        auto push = [&](Formula f, detail::PointSpace::Table t) {
            if (++res.candidates > opt.cap) throw SearchTooLarge("candidate cap reached");
            auto text = render(f);
            fresh.push_back({std::move(text), std::move(f), std::move(t)});
        };
        if (s == 1) {
            push(Formula::top(), small.table(Formula::top()));
            push(Formula::bottom(), small.table(Formula::bottom()));
            for (const auto& [p, ar] : cpreds) {
                std::vector<int> args(static_cast<std::size_t>(ar), 0);
                if (ar > 0 && vars.empty()) continue;
                std::vector<std::size_t> digit(static_cast<std::size_t>(ar), 0);
                while (true) {
                    for (int i = 0; i < ar; ++i) args[i] = vars[digit[i]];
                    auto f = Formula::atom(p, args);
                    push(f, small.table(f));
                    int i = ar;
                    for (; i > 0; --i) {
                        if (++digit[i - 1] < vars.size()) break;
                        digit[i - 1] = 0;
                    }
                    if (i == 0) break;
                }
            }
        } else {
            for (const auto& c : level[s - 1]) {
                auto t = c.t;
                for (auto& v : t) v = static_cast<std::uint8_t>(opt.chain - 1 - v);
                push(Formula::neg(c.f), std::move(t));
                if (opt.scope == SearchScope::BoundedModel)
                    for (int v : vars) {
                        push(Formula::exists({v}, c.f), small.quantify(true, {v}, c.t));
                        push(Formula::forall({v}, c.f), small.quantify(false, {v}, c.t));
                    }
            }
            for (int l = 1; l <= s - 2; ++l)
                for (const auto& x : level[l])
                    for (const auto& y : level[s - 1 - l]) {
                        push(Formula::oplus(x.f, y.f), small.combine(FKind::Oplus, x.t, y.t));
                        push(Formula::odot(x.f, y.f), small.combine(FKind::Odot, x.t, y.t));
                        push(Formula::implies(x.f, y.f), small.combine(FKind::Implies, x.t, y.t));
                    }
        }
        std::stable_sort(fresh.begin(), fresh.end(), [](const Cand& x, const Cand& y) { return x.text < y.text; });
        for (auto& c : fresh) {
            if (!seen.insert(c.t).second) continue;
            ++res.distinct;
            if (qualifies(c.t)) {
                res.found = true;
                res.interpolant = c.f;
                break;
            }
            level[s].push_back(std::move(c));
        }
        if (res.found) break;
    }
    if (!res.found) return res;

    // re-verify with the semantics evaluator over every model in scope
    bool ok = true;
    auto ac = Formula::implies(a, res.interpolant), cb = Formula::implies(res.interpolant, b);
    for_each_model(all, max_domain, opt.chain, [&](const Model& m) {
        if (!is_valid(ac, m) || !is_valid(cb, m)) ok = false;
        return ok;
    });
    if (!ok) throw Error("interpolant " + render(res.interpolant) + " failed independent verification");
    return res;
}

// ---------------------------------------------------------------- Henkin filters

// FreshIndex asks for l outside the dimension set of x; AnyIndex accepts any l with [k|l] in G.
enum class WitnessPolicy { FreshIndex, AnyIndex };

struct WitnessEntry {
    int k = 0;
    int x = 0;
    int l = 0;
};

struct HenkinFilter {
    Filter filter;
    int element = 0;
    WitnessPolicy policy = WitnessPolicy::FreshIndex;
    std::vector<WitnessEntry> witnesses;  // pairs (k, x) with ~c_k x outside F
    std::size_t candidates_examined = 0;
};

// For every k with c_k available and every x: ~c_k x in F, or ~c_k x (+) s_[k|l] x in F for an admissible l.
inline std::optional<HenkinFilter> henkin_filter_build(const AbstractPolyadicAlgebra& A, int a,
                                                       WitnessPolicy policy = WitnessPolicy::FreshIndex) {
    const auto& M = A.mv;
    M.check_index(a);
    if (a == M.zero()) throw ZeroElement("the Henkin construction needs a nonzero element");
    std::vector<IndexMask> delta(static_cast<std::size_t>(A.size()));
    std::vector<int> ck(static_cast<std::size_t>(A.dim), -1);
    for (int k = 0; k < A.dim; ++k)
        if (auto s = A.find_scope(bit(k))) ck[k] = *s;
    for (int x = 0; x < A.size(); ++x)
        for (int k = 0; k < A.dim; ++k)
            if (ck[k] >= 0 && A.cyl[ck[k]][x] != x) delta[x] |= bit(k);
    std::vector<std::vector<int>> rep(static_cast<std::size_t>(A.dim), std::vector<int>(static_cast<std::size_t>(A.dim), -1));
    for (int k = 0; k < A.dim; ++k)
        for (int l = 0; l < A.dim; ++l)
            if (auto t = A.find_transformation(FinTransformation::replacement(A.dim, k, l))) rep[k][l] = *t;

    std::size_t examined = 0;
    for (const auto& F : maximal_filters(M)) {
        if (!F.contains(a)) continue;
        ++examined;
        HenkinFilter h{F, a, policy, {}, examined};
        bool good = true;
        for (int k = 0; k < A.dim && good; ++k) {
            if (ck[k] < 0) continue;
            for (int x = 0; x < A.size() && good; ++x) {
                int nc = M.neg(A.cyl[ck[k]][x]);
                if (F.contains(nc)) continue;
                good = false;
                for (int l = 0; l < A.dim && !good; ++l) {
                    if (rep[k][l] < 0) continue;
                    if (policy == WitnessPolicy::FreshIndex && (delta[x] & bit(l))) continue;
                    if (F.contains(M.oplus(nc, A.subst[rep[k][l]][x]))) {
                        good = true;
                        h.witnesses.push_back({k, x, l});
                    }
                }
            }
        }
        if (good) return h;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------- representation maps

struct ClauseCheck {
    std::string clause;
    bool passed = true;
    std::size_t checked = 0;
    std::string witness;
};

struct Representation {
    MVAlgebra chain = MVAlgebra::chain(2);  // the quotient by the filter
    std::vector<int> projection;
    std::vector<FinTransformation> V;
    std::vector<std::vector<int>> psi;  // psi[p][v]: class of s_v p
    std::vector<ClauseCheck> audit;
    bool passed() const {
        return std::all_of(audit.begin(), audit.end(), [](const ClauseCheck& c) { return c.passed; });
    }
};

// psi(p)(x) = s_x p / F for x in V; the audit recomputes every clause from the tables.
inline Representation representation_map(const AbstractPolyadicAlgebra& A, const HenkinFilter& hf,
                                         const std::vector<FinTransformation>& V) {
    const auto& M = A.mv;
    if (hf.filter.mask().size() != static_cast<std::size_t>(A.size())) throw CarrierError("filter from another algebra");
    Representation R;
    auto q = quotient(M, hf.filter);
    R.chain = q.chain;
    R.projection = q.projection;
    R.V = V;
    std::vector<int> vt;
    for (const auto& v : V) {
        auto t = A.find_transformation(v);
        if (!t) throw SignatureError("transformation " + v.to_string() + " is not in G");
        vt.push_back(*t);
    }
    const int n = A.size();
    const int nv = static_cast<int>(V.size());
    R.psi.assign(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(nv)));
    for (int p = 0; p < n; ++p)
        for (int v = 0; v < nv; ++v) R.psi[p][v] = q.projection[A.subst[vt[v]][p]];

    const auto& C = R.chain;
    R.audit.reserve(16);  // open() hands out references into the vector
    auto open = [&](std::string name) -> ClauseCheck& {
        R.audit.push_back({std::move(name), true, 0, ""});
        return R.audit.back();
    };
    auto rec = [](ClauseCheck& c, bool ok, auto&& w) {
        ++c.checked;
        if (!ok && c.passed) c.passed = false, c.witness = w();
    };
    auto at = [&](int p, int v) { return "p=" + M.label(p) + ", x=" + V[v].to_string(); };
    auto& units = open("psi(0) = 0, psi(1) = 1");
    for (int v = 0; v < nv; ++v)
        rec(units, R.psi[M.zero()][v] == C.zero() && R.psi[M.one()][v] == C.one(), [&] { return "x=" + V[v].to_string(); });
    auto& ng = open("psi(~p) = ~psi(p)");
    auto& op = open("psi(p (+) q) = psi(p) (+) psi(q)");
    auto& od = open("psi(p (*) q) = psi(p) (*) psi(q)");
    for (int p = 0; p < n; ++p)
        for (int v = 0; v < nv; ++v) {
            rec(ng, R.psi[M.neg(p)][v] == C.neg(R.psi[p][v]), [&] { return at(p, v); });
            for (int r = 0; r < n; ++r) {
                auto w = [&] { return at(p, v) + ", q=" + M.label(r); };
                rec(op, R.psi[M.oplus(p, r)][v] == C.oplus(R.psi[p][v], R.psi[r][v]), w);
                rec(od, R.psi[M.odot(p, r)][v] == C.odot(R.psi[p][v], R.psi[r][v]), w);
            }
        }
    std::map<FinTransformation, int> vindex;
    for (int v = 0; v < nv; ++v) vindex[V[v]] = v;
    auto& st = open("psi(s_t p)(x) = psi(p)(x o t)");
    for (std::size_t t = 0; t < A.G.size(); ++t)
        for (int v = 0; v < nv; ++v) {
            auto it = vindex.find(compose(V[v], A.G[t]));
            if (it == vindex.end()) continue;
            for (int p = 0; p < n; ++p)
                rec(st, R.psi[A.subst[t][p]][v] == R.psi[p][it->second], [&] { return at(p, v) + ", t=" + A.G[t].to_string(); });
        }
    auto& cy = open("psi(c_k p)(x) = max{psi(p)(y) : y = x off k}");
    for (int k = 0; k < A.dim; ++k) {
        auto ck = A.find_scope(bit(k));
        if (!ck) continue;
        for (int v = 0; v < nv; ++v) {
            std::vector<int> nbrs;
            for (int u = 0; u < nv; ++u) {
                bool same = true;
                for (int i = 0; i < A.dim && same; ++i)
                    if (i != k && V[u](i) != V[v](i)) same = false;
                if (same) nbrs.push_back(u);
            }
            for (int p = 0; p < n; ++p) {
                int best = C.zero();
                for (int u : nbrs) best = std::max(best, R.psi[p][u]);
                rec(cy, R.psi[A.cyl[*ck][p]][v] == best, [&] { return at(p, v) + ", k=" + std::to_string(k); });
            }
        }
    }
    auto& nz = open("psi(a)(Id) != 0");
    auto id = vindex.find(FinTransformation::identity(A.dim));
    rec(nz, id != vindex.end() && R.psi[hf.element][id->second] != C.zero(), [&] { return "a=" + M.label(hf.element); });
    return R;
}

// ---------------------------------------------------------------- terms and the eta translation

enum class TermKind { Var, Zero, One, Neg, Oplus, Odot, Cyl, Subst };

struct Term {
    TermKind kind = TermKind::Zero;
    int index = 0;  // variable number for Var, k for Cyl
    std::optional<FinTransformation> tau;
    std::vector<Term> kids;

    static Term var(int i) { return {TermKind::Var, i, {}, {}}; }
    static Term zero() { return {TermKind::Zero, 0, {}, {}}; }
    static Term one() { return {TermKind::One, 0, {}, {}}; }
    static Term neg(Term a) { return {TermKind::Neg, 0, {}, {std::move(a)}}; }
    static Term oplus(Term a, Term b) { return {TermKind::Oplus, 0, {}, {std::move(a), std::move(b)}}; }
    static Term odot(Term a, Term b) { return {TermKind::Odot, 0, {}, {std::move(a), std::move(b)}}; }
    static Term cyl(int k, Term a) { return {TermKind::Cyl, k, {}, {std::move(a)}}; }
    static Term subst(FinTransformation t, Term a) { return {TermKind::Subst, 0, std::move(t), {std::move(a)}}; }
};

inline std::string to_string(const Term& t) {
    switch (t.kind) {
        case TermKind::Var: return "x" + std::to_string(t.index);
        case TermKind::Zero: return "0";
        case TermKind::One: return "1";
        case TermKind::Neg: return "~" + to_string(t.kids[0]);
        case TermKind::Oplus: return "(" + to_string(t.kids[0]) + " (+) " + to_string(t.kids[1]) + ")";
        case TermKind::Odot: return "(" + to_string(t.kids[0]) + " (*) " + to_string(t.kids[1]) + ")";
        case TermKind::Cyl: return "c" + std::to_string(t.index) + " " + to_string(t.kids[0]);
        case TermKind::Subst: return "s" + t.tau->to_string() + " " + to_string(t.kids[0]);
    }
    return "";
}

inline std::string eta_predicate(int i) { return "p" + std::to_string(i); }

// eta x_i = p_i(v0,...,v_{d-1}); c_k goes to E{v_k}; s_t goes to the substitution v_i -> v_t(i),
// renaming bound variables apart first.
inline Formula eta_translate(const Term& t, int dim) {
    switch (t.kind) {
        case TermKind::Var: {
            std::vector<int> args(static_cast<std::size_t>(dim));
            for (int i = 0; i < dim; ++i) args[i] = i;
            return Formula::atom(eta_predicate(t.index), args);
        }
        case TermKind::Zero: return Formula::bottom();
        case TermKind::One: return Formula::top();
        case TermKind::Neg: return Formula::neg(eta_translate(t.kids[0], dim));
        case TermKind::Oplus: return Formula::oplus(eta_translate(t.kids[0], dim), eta_translate(t.kids[1], dim));
        case TermKind::Odot: return Formula::odot(eta_translate(t.kids[0], dim), eta_translate(t.kids[1], dim));
        case TermKind::Cyl:
            if (t.index < 0 || t.index >= dim) throw IndexOutOfRange("c_" + std::to_string(t.index) + " outside the index set");
            return Formula::exists({t.index}, eta_translate(t.kids[0], dim));
        case TermKind::Subst: {
            if (t.tau->size() != dim) throw IndexSetMismatch("substitution on the wrong index set");
            VarMap m;
            for (int i = 0; i < dim; ++i) m[i] = (*t.tau)(i);
            return substitute_renaming_apart(m, eta_translate(t.kids[0], dim));
        }
    }
    throw Error("unknown term");
}

// Value of a term in the full function space ^I X -> chain; variable i is vars[i].
inline FunctionalSetAlgebra::Element eval_term(const Term& t, const FunctionalSetAlgebra& S,
                                               const std::vector<FunctionalSetAlgebra::Element>& vars) {
    switch (t.kind) {
        case TermKind::Var: return vars.at(static_cast<std::size_t>(t.index));
        case TermKind::Zero: return S.constant(0);
        case TermKind::One: return S.constant(S.chain_length() - 1);
        case TermKind::Neg: return S.neg(eval_term(t.kids[0], S, vars));
        case TermKind::Oplus: return S.oplus(eval_term(t.kids[0], S, vars), eval_term(t.kids[1], S, vars));
        case TermKind::Odot: return S.odot(eval_term(t.kids[0], S, vars), eval_term(t.kids[1], S, vars));
        case TermKind::Cyl: return S.cyl_any(bit(t.index), eval_term(t.kids[0], S, vars));
        case TermKind::Subst: return S.subst_any(*t.tau, eval_term(t.kids[0], S, vars));
    }
    throw Error("unknown term");
}

struct RandomTermSpec {
    int variables = 2;
    int dim = 2;
    int max_depth = 4;
};

inline Term random_term(std::mt19937_64& rng, const RandomTermSpec& spec, int depth = -1) {
    if (depth < 0) depth = spec.max_depth;
    if (depth == 0 || rng() % 4 == 0) {
        switch (rng() % 6) {
            case 0: return Term::zero();
            case 1: return Term::one();
            default: return Term::var(static_cast<int>(rng() % static_cast<std::uint64_t>(spec.variables)));
        }
    }
    switch (rng() % 5) {
        case 0: return Term::neg(random_term(rng, spec, depth - 1));
        case 1: return Term::oplus(random_term(rng, spec, depth - 1), random_term(rng, spec, depth - 1));
        case 2: return Term::odot(random_term(rng, spec, depth - 1), random_term(rng, spec, depth - 1));
        case 3: return Term::cyl(static_cast<int>(rng() % static_cast<std::uint64_t>(spec.dim)), random_term(rng, spec, depth - 1));
        default: {
            std::vector<int> t(static_cast<std::size_t>(spec.dim));
            for (auto& v : t) v = static_cast<int>(rng() % static_cast<std::uint64_t>(spec.dim));
            return Term::subst(FinTransformation(t), random_term(rng, spec, depth - 1));
        }
    }
}

struct EtaCheck {
    bool agree = true;
    std::vector<int> witness;  // first disagreeing assignment
    Rational term_value = 0, formula_value = 0;
};

// Compares eta(t) evaluated by the semantics module with t evaluated in the set algebra of the
// model, at every assignment x in ^I M.
inline EtaCheck eta_agreement_check(const Term& t, const Model& m, int dim) {
    std::vector<FunctionalSetAlgebra::Element> vars;
    SetAlgebraSpec spec;
    spec.dim = dim;
    spec.base = m.domain();
    spec.chain = m.chain().size();
    spec.G = std::vector<FinTransformation>{FinTransformation::identity(dim)};
    spec.T = std::vector<IndexMask>{};
    auto S = FunctionalSetAlgebra::build_generated(spec);
    for (int i = 0;; ++i) {
        auto it = m.tables().find(eta_predicate(i));
        if (it == m.tables().end()) break;
        if (it->second.arity != dim) throw SignatureError("predicate " + it->first + " does not have arity " + std::to_string(dim));
        FunctionalSetAlgebra::Element e(static_cast<std::size_t>(S.points()));
        for (int c = 0; c < S.points(); ++c) e[c] = static_cast<std::uint8_t>(it->second.values[m.tuple_index(S.point(c))]);
        vars.push_back(std::move(e));
    }
    std::function<void(const Term&)> check_vars = [&](const Term& u) {
        if (u.kind == TermKind::Var && (u.index < 0 || u.index >= static_cast<int>(vars.size())))
            throw SignatureError("term variable x" + std::to_string(u.index) + " has no predicate in the model");
        for (const auto& k : u.kids) check_vars(k);
    };
    check_vars(t);
    auto value = eval_term(t, S, vars);
    auto f = eta_translate(t, dim);
    EtaCheck r;
    for (int c = 0; c < S.points(); ++c) {
        auto x = S.point(c);
        Assignment s;
        for (int i = 0; i < dim; ++i) s.values[i] = x[i];
        int fv = eval_index(f, m, s);
        if (fv != value[c]) {
            r.agree = false;
            r.witness = x;
            r.term_value = m.chain().value(value[c]);
            r.formula_value = m.chain().value(fv);
            return r;
        }
    }
    return r;
}

}  // namespace mvlab

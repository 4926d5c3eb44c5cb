#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "mvlab/errors.hpp"
#include "mvlab/interlab.hpp"
#include "mvlab/mv_core.hpp"
#include "mvlab/polyadic.hpp"
#include "mvlab/rational.hpp"

namespace mvlab {

// A finite MV algebra with truth constants: r in L goes to the element constants[r].
struct PavelkaAlgebra {
    MVAlgebra base = MVAlgebra::chain(2);
    std::map<Rational, int> constants;

    int bar(const Rational& r) const {
        auto it = constants.find(r);
        if (it == constants.end()) throw CarrierError("no truth constant for " + to_string(r));
        return it->second;
    }
    std::vector<Rational> chain() const {
        std::vector<Rational> L;
        for (const auto& [r, _] : constants) L.push_back(r);
        return L;
    }
};

// The n-chain with every element its own constant.
inline PavelkaAlgebra full_constants(int n) {
    PavelkaAlgebra P{MVAlgebra::chain(n), {}};
    for (int i = 0; i < n; ++i) P.constants[Rational(i, n - 1)] = i;
    return P;
}

// Constants of a functional set algebra: r goes to the constant function r, for each r of the
// chain whose constant function lies in the carrier.
inline PavelkaAlgebra functional_constants(const FunctionalSetAlgebra& A) {
    PavelkaAlgebra P{A.mv(), {}};
    const int n = A.chain_length();
    for (int v = 0; v < n; ++v)
        if (auto i = A.find(A.constant(v))) P.constants[Rational(v, n - 1)] = *i;
    return P;
}

namespace detail {

inline ClauseCheck& open_clause(std::vector<ClauseCheck>& out, std::string name) {
    out.push_back({std::move(name), true, 0, ""});
    return out.back();
}

template <class W>
void record_clause(ClauseCheck& c, bool ok, W&& witness) {
    ++c.checked;
    if (!ok && c.passed) c.passed = false, c.witness = witness();
}

inline bool all_passed(const std::vector<ClauseCheck>& v) {
    return std::all_of(v.begin(), v.end(), [](const ClauseCheck& c) { return c.passed; });
}

}  // namespace detail

// 0-bar = 0, r-bar (+) s-bar = (r (+) s)-bar, ~r-bar = (~r)-bar, with L closed under both.
inline std::vector<ClauseCheck> check_constant_laws(const PavelkaAlgebra& P) {
    std::vector<ClauseCheck> out;
    out.reserve(4);
    const auto& M = P.base;
    const auto L = P.chain();
    for (const auto& [r, e] : P.constants) M.check_index(e);
    auto& zero = detail::open_clause(out, "0-bar = 0");
    detail::record_clause(zero, P.constants.count(Rational(0)) && P.bar(Rational(0)) == M.zero(), [] { return std::string("0"); });
    auto& ng = detail::open_clause(out, "~r-bar = (~r)-bar");
    auto& op = detail::open_clause(out, "r-bar (+) s-bar = (r (+) s)-bar");
    for (const auto& r : L) {
        Rational nr = Rational(1) - r;
        detail::record_clause(ng, P.constants.count(nr) && M.neg(P.bar(r)) == P.bar(nr), [&] { return "r=" + to_string(r); });
        for (const auto& s : L) {
            Rational rs = std::min(Rational(1), r + s);
            detail::record_clause(op, P.constants.count(rs) && M.oplus(P.bar(r), P.bar(s)) == P.bar(rs),
                                  [&] { return "r=" + to_string(r) + ", s=" + to_string(s); });
        }
    }
    return out;
}

// A filter of a Pavelka algebra against which graded degrees are taken.
class GradedContext {
public:
    GradedContext(PavelkaAlgebra alg, Filter filter) : alg_(std::move(alg)), filter_(std::move(filter)) {
        if (filter_.mask().size() != static_cast<std::size_t>(alg_.base.size()))
            throw CarrierError("filter from another algebra");
        if (!filter_.proper()) throw ProperFilterRequired("graded degrees need a proper filter");
        if (alg_.constants.empty()) throw CarrierError("the algebra has no truth constants");
    }
    const PavelkaAlgebra& algebra() const { return alg_; }
    const Filter& filter() const { return filter_; }

private:
    PavelkaAlgebra alg_;
    Filter filter_;
};

// [a]_H = sup{r in L : r-bar -> a in H}
inline Rational degree(int a, const GradedContext& ctx) {
    const auto& P = ctx.algebra();
    P.base.check_index(a);
    Rational best(0);
    for (const auto& [r, e] : P.constants)
        if (ctx.filter().contains(P.base.implies(e, a))) best = std::max(best, r);
    return best;
}

// [a]_P = inf{r in L : a -> r-bar in P}
inline Rational degree_dual(int a, const GradedContext& ctx) {
    const auto& P = ctx.algebra();
    P.base.check_index(a);
    Rational best(1);
    for (const auto& [r, e] : P.constants)
        if (ctx.filter().contains(P.base.implies(a, e))) best = std::min(best, r);
    return best;
}

inline bool is_maximal_filter(const Filter& F) {
    const auto ms = maximal_filters(F.algebra());
    return std::find(ms.begin(), ms.end(), F) != ms.end();
}

// Sup and inf forms agree on every element; for a maximal filter the degree also preserves
// (+), (*) and ~.
inline std::vector<ClauseCheck> degree_audit(const GradedContext& ctx) {
    std::vector<ClauseCheck> out;
    out.reserve(4);
    const auto& M = ctx.algebra().base;
    const int n = M.size();
    std::vector<Rational> d(static_cast<std::size_t>(n));
    auto& agree = detail::open_clause(out, "sup form = inf form");
    for (int a = 0; a < n; ++a) {
        d[a] = degree(a, ctx);
        detail::record_clause(agree, d[a] == degree_dual(a, ctx), [&] { return "a=" + M.label(a); });
    }
    if (!is_maximal_filter(ctx.filter())) return out;
    auto& ng = detail::open_clause(out, "[~a] = ~[a]");
    auto& op = detail::open_clause(out, "[a (+) b] = [a] (+) [b]");
    auto& od = detail::open_clause(out, "[a (*) b] = [a] (*) [b]");
    for (int a = 0; a < n; ++a) {
        detail::record_clause(ng, d[M.neg(a)] == Rational(1) - d[a], [&] { return "a=" + M.label(a); });
        for (int b = 0; b < n; ++b) {
            auto w = [&] { return "a=" + M.label(a) + ", b=" + M.label(b); };
            detail::record_clause(op, d[M.oplus(a, b)] == std::min(Rational(1), d[a] + d[b]), w);
            detail::record_clause(od, d[M.odot(a, b)] == std::max(Rational(0), d[a] + d[b] - Rational(1)), w);
        }
    }
    return out;
}

struct PavelkaReport {
    std::vector<ClauseCheck> checks;
    bool passed() const { return detail::all_passed(checks); }
};

// r-bar in P iff r = 1, and r-bar/P <= s-bar/P iff r <= s, over every pair of constants.
inline PavelkaReport pavelka_lemma_check(const PavelkaAlgebra& P, const Filter& F) {
    if (!F.proper()) throw ProperFilterRequired("the lemma needs a proper filter");
    if (F.mask().size() != static_cast<std::size_t>(P.base.size())) throw CarrierError("filter from another algebra");
    PavelkaReport rep;
    rep.checks.reserve(2);
    const auto L = P.chain();
    auto& mem = detail::open_clause(rep.checks, "r-bar in P iff r = 1");
    for (const auto& r : L)
        detail::record_clause(mem, F.contains(P.bar(r)) == (r == Rational(1)), [&] { return "r=" + to_string(r); });
    auto& ord = detail::open_clause(rep.checks, "r-bar/P <= s-bar/P iff r <= s");
    for (const auto& r : L)
        for (const auto& s : L)
            detail::record_clause(ord, F.contains(P.base.implies(P.bar(r), P.bar(s))) == (r <= s),
                                  [&] { return "r=" + to_string(r) + ", s=" + to_string(s); });
    return rep;
}

// c_J r-bar = r-bar for every constant and every J in T.
inline PavelkaReport pavelka_quantifier_check(const AbstractPolyadicAlgebra& A, const PavelkaAlgebra& P) {
    if (P.base.size() != A.size()) throw CarrierError("constants from another algebra");
    PavelkaReport rep;
    auto& c = detail::open_clause(rep.checks, "c_J r-bar = r-bar");
    for (std::size_t j = 0; j < A.T.size(); ++j)
        for (const auto& [r, e] : P.constants)
            detail::record_clause(c, A.cyl[j][static_cast<std::size_t>(e)] == e,
                                  [&] { return "r=" + to_string(r) + ", J=" + mask_str(A.T[j]); });
    return rep;
}

struct PavelkaRepresentation {
    std::vector<FinTransformation> V;
    std::vector<std::vector<Rational>> psi;  // psi[p][v] = [s_v p]_P
    std::vector<ClauseCheck> audit;
    bool passed() const { return detail::all_passed(audit); }
};

// psi(p)(x) = [s_x p]_P, audited clause by clause on the whole carrier.
inline PavelkaRepresentation pavelka_representation(const AbstractPolyadicAlgebra& A, const PavelkaAlgebra& P,
                                                    const HenkinFilter& hf, const std::vector<FinTransformation>& V) {
    if (P.base.size() != A.size()) throw CarrierError("constants from another algebra");
    GradedContext ctx(P, hf.filter);
    PavelkaRepresentation R;
    R.V = V;
    std::vector<int> vt;
    for (const auto& v : V) {
        auto t = A.find_transformation(v);
        if (!t) throw SignatureError("transformation " + v.to_string() + " is not in G");
        vt.push_back(*t);
    }
    const auto& M = A.mv;
    const int n = A.size();
    const int nv = static_cast<int>(V.size());
    std::vector<Rational> d(static_cast<std::size_t>(n));
    for (int p = 0; p < n; ++p) d[p] = degree(p, ctx);
    R.psi.assign(static_cast<std::size_t>(n), std::vector<Rational>(static_cast<std::size_t>(nv)));
    for (int p = 0; p < n; ++p)
        for (int v = 0; v < nv; ++v) R.psi[p][v] = d[A.subst[vt[v]][p]];

    auto& out = R.audit;
    out.reserve(8);
    auto at = [&](int p, int v) { return "p=" + M.label(p) + ", x=" + V[v].to_string(); };
    auto& cs = detail::open_clause(out, "psi(r-bar)(x) = r");
    for (const auto& [r, e] : P.constants)
        for (int v = 0; v < nv; ++v) detail::record_clause(cs, R.psi[e][v] == r, [&] { return "r=" + to_string(r) + ", x=" + V[v].to_string(); });
    auto& one = detail::open_clause(out, "psi(1)(x) = 1");
    for (int v = 0; v < nv; ++v) detail::record_clause(one, R.psi[M.one()][v] == Rational(1), [&] { return "x=" + V[v].to_string(); });
    auto& ng = detail::open_clause(out, "psi(~p) = ~psi(p)");
    auto& op = detail::open_clause(out, "psi(p (+) q) = psi(p) (+) psi(q)");
    auto& od = detail::open_clause(out, "psi(p (*) q) = psi(p) (*) psi(q)");
    for (int p = 0; p < n; ++p)
        for (int v = 0; v < nv; ++v) {
            const auto& x = R.psi[p][v];
            detail::record_clause(ng, R.psi[M.neg(p)][v] == Rational(1) - x, [&] { return at(p, v); });
            for (int q = 0; q < n; ++q) {
                const auto& y = R.psi[q][v];
                auto w = [&] { return at(p, v) + ", q=" + M.label(q); };
                detail::record_clause(op, R.psi[M.oplus(p, q)][v] == std::min(Rational(1), x + y), w);
                detail::record_clause(od, R.psi[M.odot(p, q)][v] == std::max(Rational(0), x + y - Rational(1)), w);
            }
        }
    auto& cy = detail::open_clause(out, "psi(c_k p)(x) = sup{psi(p)(y) : y = x off k}");
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
                Rational best(0);
                for (int u : nbrs) best = std::max(best, R.psi[p][u]);
                detail::record_clause(cy, R.psi[A.cyl[*ck][p]][v] == best, [&] { return at(p, v) + ", k=" + std::to_string(k); });
            }
        }
    }
    return R;
}

}  // namespace mvlab

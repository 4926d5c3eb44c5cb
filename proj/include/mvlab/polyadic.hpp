#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/functional/hash.hpp>

#include "mvlab/errors.hpp"
#include "mvlab/mv_core.hpp"
#include "mvlab/transform.hpp"

namespace mvlab {

// Subsets of a finite index set I = {0..dim-1} as bit masks.
using IndexMask = std::uint32_t;

inline IndexMask full_mask(int dim) { return (IndexMask{1} << dim) - 1; }
inline IndexMask bit(int i) { return IndexMask{1} << i; }

inline std::vector<int> mask_members(IndexMask m) {
    std::vector<int> out;
    for (int i = 0; m >> i; ++i)
        if (m & bit(i)) out.push_back(i);
    return out;
}

inline IndexMask mask_of(const std::vector<int>& xs) {
    IndexMask m = 0;
    for (int x : xs) m |= bit(x);
    return m;
}

inline std::string mask_str(IndexMask m) {
    std::string s = "{";
    bool first = true;
    for (int i : mask_members(m)) {
        if (!first) s += ",";
        first = false;
        s += std::to_string(i);
    }
    return s + "}";
}

inline std::vector<IndexMask> all_scopes(int dim) {
    std::vector<IndexMask> t;
    for (IndexMask m = 0; m <= full_mask(dim); ++m) t.push_back(m);
    return t;
}

// The full transformation monoid on {0..dim-1}.
inline std::vector<FinTransformation> all_transformations(int dim) {
    auto c = semigroup_closure(SemigroupSpec<FinTransformation>{replacement_generators(dim), 1u << 20});
    auto id = FinTransformation::identity(dim);
    if (!std::binary_search(c.elements.begin(), c.elements.end(), id)) {
        c.elements.push_back(id);
        std::sort(c.elements.begin(), c.elements.end());
    }
    return c.elements;
}

inline IndexMask preimage(const FinTransformation& s, IndexMask J) {
    IndexMask m = 0;
    for (int i = 0; i < s.size(); ++i)
        if (J & bit(s(i))) m |= bit(i);
    return m;
}

// ---------------------------------------------------------------- functional set algebras

struct SetAlgebraSpec {
    int dim = 1;
    int base = 1;
    int chain = 2;
    // Each generator lists its value (a chain index) at every point of ^I X.
    std::vector<std::vector<std::uint8_t>> generators;
    std::optional<std::vector<FinTransformation>> G;  // default: every map I -> I
    std::optional<std::vector<IndexMask>> T;          // default: every subset of I
    std::size_t cap = 200;
};

// Points of ^I X are coded in mixed radix: digit i is x(i), weight base^i.
class FunctionalSetAlgebra {
public:
    using Element = std::vector<std::uint8_t>;

    static FunctionalSetAlgebra build_generated(const SetAlgebraSpec& spec);

    int dim() const { return dim_; }
    int base() const { return base_; }
    int chain_length() const { return n_; }
    int points() const { return points_; }
    int size() const { return static_cast<int>(elems_.size()); }
    const std::vector<Element>& elements() const { return elems_; }
    const Element& element(int i) const { return elems_.at(static_cast<std::size_t>(i)); }
    const std::vector<FinTransformation>& transformations() const { return G_; }
    const std::vector<IndexMask>& scopes() const { return T_; }
    const MVAlgebra& mv() const { return mv_; }

    std::vector<int> point(int code) const {
        std::vector<int> x(static_cast<std::size_t>(dim_));
        for (int i = 0; i < dim_; ++i, code /= base_) x[i] = code % base_;
        return x;
    }
    int code(const std::vector<int>& x) const {
        int c = 0;
        for (int i = dim_ - 1; i >= 0; --i) c = c * base_ + x.at(static_cast<std::size_t>(i));
        return c;
    }

    std::optional<int> find(const Element& e) const {
        auto it = index_.find(e);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }
    int index_of(const Element& e) const {
        auto i = find(e);
        if (!i) throw CarrierError("function is not in the carrier");
        return *i;
    }
    bool has_transformation(const FinTransformation& t) const { return std::binary_search(G_.begin(), G_.end(), t); }
    bool has_scope(IndexMask J) const { return std::find(T_.begin(), T_.end(), J) != T_.end(); }

    // Pointwise operations on arbitrary functions ^I X -> chain.
    Element constant(int v) const { return Element(static_cast<std::size_t>(points_), static_cast<std::uint8_t>(v)); }
    Element oplus(const Element& a, const Element& b) const {
        Element r(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) r[i] = static_cast<std::uint8_t>(std::min(a[i] + b[i], n_ - 1));
        return r;
    }
    Element odot(const Element& a, const Element& b) const {
        Element r(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) r[i] = static_cast<std::uint8_t>(std::max(a[i] + b[i] - (n_ - 1), 0));
        return r;
    }
    Element neg(const Element& a) const {
        Element r(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) r[i] = static_cast<std::uint8_t>(n_ - 1 - a[i]);
        return r;
    }
    // s_t p(x) = p(x o t)
    Element subst_any(const FinTransformation& t, const Element& p) const {
        if (t.size() != dim_) throw IndexSetMismatch("transformation on the wrong index set");
        Element r(p.size());
        std::vector<int> y(static_cast<std::size_t>(dim_));
        for (int c = 0; c < points_; ++c) {
            auto x = point(c);
            for (int i = 0; i < dim_; ++i) y[i] = x[t(i)];
            r[c] = p[code(y)];
        }
        return r;
    }
    // c_J p(x) = max { p(y) : y agrees with x off J }
    Element cyl_any(IndexMask J, const Element& p) const {
        if (J & ~full_mask(dim_)) throw IndexOutOfRange("scope " + mask_str(J) + " outside the index set");
        std::vector<int> offsets{0};
        int w = 1;
        for (int i = 0; i < dim_; ++i, w *= base_) {
            if (!(J & bit(i))) continue;
            std::vector<int> next;
            for (int o : offsets)
                for (int v = 0; v < base_; ++v) next.push_back(o + v * w);
            offsets = std::move(next);
        }
        Element r(p.size());
        for (int c = 0; c < points_; ++c) {
            int rest = c, b = 0;
            w = 1;
            for (int i = 0; i < dim_; ++i, w *= base_, rest /= base_)
                if (!(J & bit(i))) b += (rest % base_) * w;
            std::uint8_t m = 0;
            for (int o : offsets) m = std::max(m, p[b + o]);
            r[c] = m;
        }
        return r;
    }
    Element q_any(IndexMask J, const Element& p) const { return neg(cyl_any(J, neg(p))); }

    // Signature-checked versions; p must belong to the carrier.
    Element cyl(IndexMask J, const Element& p) const {
        if (!has_scope(J)) throw SignatureError("scope " + mask_str(J) + " is not in T");
        index_of(p);
        return cyl_any(J, p);
    }
    Element subst(const FinTransformation& t, const Element& p) const {
        if (!has_transformation(t)) throw SignatureError("transformation " + t.to_string() + " is not in G");
        index_of(p);
        return subst_any(t, p);
    }
    Element q_forall(IndexMask J, const Element& p) const {
        if (!has_scope(J)) throw SignatureError("scope " + mask_str(J) + " is not in T");
        index_of(p);
        return q_any(J, p);
    }

    // {i : c_i p != p}, computed in the ambient function space.
    IndexMask dimension_set(const Element& p) const {
        IndexMask d = 0;
        for (int i = 0; i < dim_; ++i)
            if (cyl_any(bit(i), p) != p) d |= bit(i);
        return d;
    }
    bool supports(IndexMask J, const Element& p) const { return cyl_any(full_mask(dim_) & ~J, p) == p; }
    IndexMask minimal_support(const Element& p) const;

private:
    int dim_ = 0, base_ = 1, n_ = 2, points_ = 1;
    std::vector<Element> elems_;
    std::unordered_map<Element, int, boost::hash<Element>> index_;
    std::vector<FinTransformation> G_;
    std::vector<IndexMask> T_;
    MVAlgebra mv_ = MVAlgebra::chain(2);
};

inline FunctionalSetAlgebra FunctionalSetAlgebra::build_generated(const SetAlgebraSpec& spec) {
    if (spec.dim < 1 || spec.dim > 16) throw IndexOutOfRange("dimension must lie in 1..16");
    if (spec.base < 1) throw CarrierError("base set must be nonempty");
    if (spec.chain < 2) throw CarrierError("chain length must be at least 2");
    FunctionalSetAlgebra A;
    A.dim_ = spec.dim;
    A.base_ = spec.base;
    A.n_ = spec.chain;
    for (int i = 0; i < spec.dim; ++i) {
        if (A.points_ > (1 << 16) / spec.base) throw SearchTooLarge("too many assignments");
        A.points_ *= spec.base;
    }
    A.G_ = spec.G ? *spec.G : all_transformations(spec.dim);
    for (const auto& t : A.G_)
        if (t.size() != spec.dim) throw IndexSetMismatch("transformation " + t.to_string() + " on the wrong index set");
    std::sort(A.G_.begin(), A.G_.end());
    A.G_.erase(std::unique(A.G_.begin(), A.G_.end()), A.G_.end());
    A.T_ = spec.T ? *spec.T : all_scopes(spec.dim);
    for (auto J : A.T_)
        if (J & ~full_mask(spec.dim)) throw IndexOutOfRange("scope " + mask_str(J) + " outside the index set");
    std::sort(A.T_.begin(), A.T_.end());
    A.T_.erase(std::unique(A.T_.begin(), A.T_.end()), A.T_.end());

    auto add = [&](Element e) {
        if (A.index_.count(e)) return;
        if (A.elems_.size() >= spec.cap)
            throw TruncationError("closure exceeds the cap of " + std::to_string(spec.cap) + " elements");
        A.index_.emplace(e, static_cast<int>(A.elems_.size()));
        A.elems_.push_back(std::move(e));
    };
    add(A.constant(0));
    add(A.constant(spec.chain - 1));
    for (const auto& g : spec.generators) {
        if (static_cast<int>(g.size()) != A.points_) throw CarrierError("generator is not total on the assignments");
        for (auto v : g)
            if (v >= spec.chain) throw CarrierError("generator value outside the chain");
        add(g);
    }
    // Canonical order: element by element, unary operations first, then sums with earlier elements.
    for (std::size_t k = 0; k < A.elems_.size(); ++k) {
        Element x = A.elems_[k];
        add(A.neg(x));
        for (const auto& t : A.G_) add(A.subst_any(t, x));
        for (auto J : A.T_) add(A.cyl_any(J, x));
        for (std::size_t j = 0; j <= k; ++j) add(A.oplus(x, A.elems_[j]));
    }
    A.mv_ = MVAlgebra::table_of_subpower(spec.chain, A.elems_);
    return A;
}

inline IndexMask FunctionalSetAlgebra::minimal_support(const Element& p) const {
    IndexMask J = full_mask(dim_);
    for (int i = 0; i < dim_; ++i)
        if (supports(J & ~bit(i), p)) J &= ~bit(i);
    if (dim_ <= 4) {
        // every support contains the greedy one and the greedy one is a support
        for (IndexMask K = 0; K <= full_mask(dim_); ++K)
            if (supports(K, p) && (K & J) != J) throw Error("support search disagrees with the exhaustive check");
        if (!supports(J, p)) throw Error("greedy support is not a support");
    }
    return J;
}

// ---------------------------------------------------------------- abstract algebras

// An MV table algebra with tables for every s_t (t in G) and c_(J) (J in T).
struct AbstractPolyadicAlgebra {
    MVAlgebra mv = MVAlgebra::chain(2);
    int dim = 1;
    std::vector<FinTransformation> G;
    std::vector<std::vector<int>> subst;
    std::vector<IndexMask> T;
    std::vector<std::vector<int>> cyl;

    int size() const { return mv.size(); }

    std::optional<int> find_transformation(const FinTransformation& t) const {
        auto it = std::find(G.begin(), G.end(), t);
        if (it == G.end()) return std::nullopt;
        return static_cast<int>(it - G.begin());
    }
    std::optional<int> find_scope(IndexMask J) const {
        auto it = std::find(T.begin(), T.end(), J);
        if (it == T.end()) return std::nullopt;
        return static_cast<int>(it - T.begin());
    }
    int s(const FinTransformation& t, int p) const {
        auto i = find_transformation(t);
        if (!i) throw SignatureError("transformation " + t.to_string() + " is not in G");
        return subst[*i][p];
    }
    int c(IndexMask J, int p) const {
        auto i = find_scope(J);
        if (!i) throw SignatureError("scope " + mask_str(J) + " is not in T");
        return cyl[*i][p];
    }
    int q(IndexMask J, int p) const { return mv.neg(c(J, mv.neg(p))); }

    IndexMask dimension_set(int p) const {
        IndexMask d = 0;
        for (int i = 0; i < dim; ++i)
            if (c(bit(i), p) != p) d |= bit(i);
        return d;
    }

    void validate() const {
        const auto n = static_cast<std::size_t>(size());
        if (subst.size() != G.size() || cyl.size() != T.size()) throw CarrierError("operation table count mismatch");
        for (const auto& t : G)
            if (t.size() != dim) throw IndexSetMismatch("transformation " + t.to_string() + " on the wrong index set");
        for (auto J : T)
            if (J & ~full_mask(dim)) throw IndexOutOfRange("scope " + mask_str(J) + " outside the index set");
        auto check = [&](const std::vector<int>& tab) {
            if (tab.size() != n) throw CarrierError("operation table has the wrong length");
            for (int v : tab)
                if (v < 0 || static_cast<std::size_t>(v) >= n) throw CarrierError("operation table leaves the carrier");
        };
        for (const auto& t : subst) check(t);
        for (const auto& t : cyl) check(t);
    }
};

inline AbstractPolyadicAlgebra to_abstract(const FunctionalSetAlgebra& A) {
    AbstractPolyadicAlgebra P;
    P.mv = A.mv();
    P.dim = A.dim();
    P.G = A.transformations();
    P.T = A.scopes();
    for (const auto& t : P.G) {
        std::vector<int> row;
        for (const auto& e : A.elements()) row.push_back(A.index_of(A.subst_any(t, e)));
        P.subst.push_back(std::move(row));
    }
    for (auto J : P.T) {
        std::vector<int> row;
        for (const auto& e : A.elements()) row.push_back(A.index_of(A.cyl_any(J, e)));
        P.cyl.push_back(std::move(row));
    }
    return P;
}

// ---------------------------------------------------------------- axiom audit

struct IdentityCheck {
    std::string id;
    std::string law;
    bool passed = true;
    std::size_t checked = 0;
    std::string witness;
};

struct PolyadicAuditReport {
    std::vector<IdentityCheck> checks;
    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.passed; });
    }
    const IdentityCheck* first_failure() const {
        for (const auto& c : checks)
            if (!c.passed) return &c;
        return nullptr;
    }
    const IdentityCheck* find(const std::string& id) const {
        for (const auto& c : checks)
            if (c.id == id) return &c;
        return nullptr;
    }
};

namespace detail {

class PolyadicAuditor {
public:
    explicit PolyadicAuditor(const AbstractPolyadicAlgebra& A) : A_(A), M_(A.mv), n_(A.size()) {
        report_.checks.reserve(256);  // open() hands out references into the vector
        for (int i = 0; i < A.dim; ++i) {
            auto k = A.find_scope(bit(i));
            single_.push_back(k ? *k : -1);
        }
    }

    PolyadicAuditReport run() {
        mv_part();
        transformation_part();
        quantifier_part();
        scope_part();
        single_index_part();
        return std::move(report_);
    }

private:
    const AbstractPolyadicAlgebra& A_;
    const MVAlgebra& M_;
    int n_;
    std::vector<int> single_;
    PolyadicAuditReport report_;

    IdentityCheck& open(const std::string& id, const std::string& law) {
        report_.checks.push_back({id, law, true, 0, ""});
        return report_.checks.back();
    }
    template <class W>
    static void record(IdentityCheck& c, bool ok, W&& witness) {
        ++c.checked;
        if (!ok && c.passed) {
            c.passed = false;
            c.witness = witness();
        }
    }
    std::string el(int p) const { return M_.label(p); }
    std::string tr(int t) const { return A_.G[static_cast<std::size_t>(t)].to_string(); }
    std::string sc(int j) const { return mask_str(A_.T[static_cast<std::size_t>(j)]); }

    int s(int t, int p) const { return A_.subst[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)]; }
    int c(int j, int p) const { return A_.cyl[static_cast<std::size_t>(j)][static_cast<std::size_t>(p)]; }
    int q(int j, int p) const { return M_.neg(c(j, M_.neg(p))); }

    void mv_part() {
        auto r = check_mv_axioms(M_);
        for (const auto& a : r.checks) {
            auto& c = open("mv" + std::to_string(a.group), a.law);
            c.passed = a.passed;
            c.checked = a.checked;
            for (const auto& w : a.witness) c.witness += (c.witness.empty() ? "" : ", ") + w;
        }
    }

    void transformation_part() {
        const int g = static_cast<int>(A_.G.size());
        auto& e1 = open("end-oplus", "s_t(p (+) q) = s_t p (+) s_t q");
        auto& e2 = open("end-neg", "s_t(~p) = ~s_t p");
        auto& e3 = open("end-units", "s_t 0 = 0, s_t 1 = 1");
        for (int t = 0; t < g; ++t) {
            record(e3, s(t, M_.zero()) == M_.zero() && s(t, M_.one()) == M_.one(), [&] { return "t=" + tr(t); });
            for (int p = 0; p < n_; ++p) {
                record(e2, s(t, M_.neg(p)) == M_.neg(s(t, p)), [&] { return "t=" + tr(t) + ", p=" + el(p); });
                for (int r = 0; r < n_; ++r)
                    record(e1, s(t, M_.oplus(p, r)) == M_.oplus(s(t, p), s(t, r)),
                           [&] { return "t=" + tr(t) + ", p=" + el(p) + ", q=" + el(r); });
            }
        }
        auto& d1 = open("G1", "s_Id p = p");
        if (auto id = A_.find_transformation(FinTransformation::identity(A_.dim)))
            for (int p = 0; p < n_; ++p) record(d1, s(*id, p) == p, [&] { return "p=" + el(p); });
        auto& d2 = open("G2", "s_(sigma o tau) p = s_sigma s_tau p");
        for (int a = 0; a < g; ++a)
            for (int b = 0; b < g; ++b) {
                auto ab = A_.find_transformation(compose(A_.G[a], A_.G[b]));
                if (!ab) continue;
                for (int p = 0; p < n_; ++p)
                    record(d2, s(*ab, p) == s(a, s(b, p)), [&] { return "sigma=" + tr(a) + ", tau=" + tr(b) + ", p=" + el(p); });
            }
    }

    void scope_part() {
        const int g = static_cast<int>(A_.G.size());
        const int m = static_cast<int>(A_.T.size());
        auto& d3 = open("G3", "c_(J u J') p = c_(J) c_(J') p");
        auto& q2 = open("Q2", "q_(J u J') p = q_(J) q_(J') p");
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) {
                auto u = A_.find_scope(A_.T[j] | A_.T[k]);
                if (!u) continue;
                for (int p = 0; p < n_; ++p) {
                    auto w = [&] { return "J=" + sc(j) + ", J'=" + sc(k) + ", p=" + el(p); };
                    record(d3, c(*u, p) == c(j, c(k, p)), w);
                    record(q2, q(*u, p) == q(j, q(k, p)), w);
                }
            }
        auto& d4 = open("G4", "sigma = tau off J implies s_sigma c_(J) p = s_tau c_(J) p");
        auto& q4 = open("Q4", "sigma = tau off J implies s_sigma q_(J) p = s_tau q_(J) p");
        auto& d5 = open("G5", "sigma injective on sigma^-1(J) implies c_(J) s_sigma p = s_sigma c_(sigma^-1 J) p");
        auto& q5 = open("Q5", "sigma injective on sigma^-1(J) implies q_(J) s_sigma p = s_sigma q_(sigma^-1 J) p");
        for (int j = 0; j < m; ++j) {
            const IndexMask J = A_.T[j];
            for (int a = 0; a < g; ++a) {
                for (int b = 0; b < g; ++b) {
                    bool agree = true;
                    for (int i = 0; i < A_.dim && agree; ++i)
                        if (!(J & bit(i)) && A_.G[a](i) != A_.G[b](i)) agree = false;
                    if (!agree) continue;
                    for (int p = 0; p < n_; ++p) {
                        auto w = [&] { return "sigma=" + tr(a) + ", tau=" + tr(b) + ", J=" + sc(j) + ", p=" + el(p); };
                        record(d4, s(a, c(j, p)) == s(b, c(j, p)), w);
                        record(q4, s(a, q(j, p)) == s(b, q(j, p)), w);
                    }
                }
                const auto& sg = A_.G[a];
                IndexMask pre = preimage(sg, J);
                IndexMask seen = 0;
                bool inj = true;
                for (int i : mask_members(pre)) {
                    if (seen & bit(sg(i))) inj = false;
                    seen |= bit(sg(i));
                }
                auto pj = A_.find_scope(pre);
                if (!inj || !pj) continue;
                for (int p = 0; p < n_; ++p) {
                    auto w = [&] { return "sigma=" + tr(a) + ", J=" + sc(j) + ", p=" + el(p); };
                    record(d5, c(j, s(a, p)) == s(a, c(*pj, p)), w);
                    record(q5, q(j, s(a, p)) == s(a, q(*pj, p)), w);
                }
            }
        }
    }

    void quantifier_part() {
        const int m = static_cast<int>(A_.T.size());
        const char* ex[] = {"c_(J) 0 = 0",
                            "p <= c_(J) p",
                            "c_(J)(p (*) c_(J) q) = c_(J) p (*) c_(J) q",
                            "c_(J)(p (+) c_(J) q) = c_(J) p (+) c_(J) q",
                            "c_(J)(p (*) p) = c_(J) p (*) c_(J) p",
                            "c_(J)(p (+) p) = c_(J) p (+) c_(J) p"};
        const char* un[] = {"q_(J) 0 = 0",
                            "q_(J) p <= p",
                            "q_(J)(p (*) q_(J) q) = q_(J) p (*) q_(J) q",
                            "q_(J)(p (+) q_(J) q) = q_(J) p (+) q_(J) q",
                            "q_(J)(p (*) p) = q_(J) p (*) q_(J) p",
                            "q_(J)(p (+) p) = q_(J) p (+) q_(J) p"};
        for (int universal = 0; universal < 2; ++universal) {
            std::vector<IdentityCheck*> cs;
            for (int l = 0; l < 6; ++l)
                cs.push_back(&open((universal ? "Q1." : "E") + std::to_string(l + 1), universal ? un[l] : ex[l]));
            for (int j = 0; j < m; ++j) {
                auto Q = [&](int p) { return universal ? q(j, p) : c(j, p); };
                record(*cs[0], Q(M_.zero()) == M_.zero(), [&] { return "J=" + sc(j); });
                for (int p = 0; p < n_; ++p) {
                    auto w1 = [&] { return "J=" + sc(j) + ", p=" + el(p); };
                    record(*cs[1], universal ? M_.leq(Q(p), p) : M_.leq(p, Q(p)), w1);
                    record(*cs[4], Q(M_.odot(p, p)) == M_.odot(Q(p), Q(p)), w1);
                    record(*cs[5], Q(M_.oplus(p, p)) == M_.oplus(Q(p), Q(p)), w1);
                    for (int r = 0; r < n_; ++r) {
                        auto w2 = [&] { return "J=" + sc(j) + ", p=" + el(p) + ", q=" + el(r); };
                        record(*cs[2], Q(M_.odot(p, Q(r))) == M_.odot(Q(p), Q(r)), w2);
                        record(*cs[3], Q(M_.oplus(p, Q(r))) == M_.oplus(Q(p), Q(r)), w2);
                    }
                }
            }
        }
        auto& q3 = open("Q3", "c_(J) q_(J) p = q_(J) p, q_(J) c_(J) p = c_(J) p");
        for (int j = 0; j < m; ++j)
            for (int p = 0; p < n_; ++p)
                record(q3, c(j, q(j, p)) == q(j, p) && q(j, c(j, p)) == c(j, p), [&] { return "J=" + sc(j) + ", p=" + el(p); });
    }

    // Laws stated for single indices; instances whose operations are missing are skipped.
    void single_index_part() {
        const int d = A_.dim;
        const int g = static_cast<int>(A_.G.size());
        auto rep = [&](int i, int j) { return A_.find_transformation(FinTransformation::replacement(d, i, j)); };
        auto& l1a = open("D1.a", "x <= c_i x");
        auto& l1b = open("D1.b", "c_i c_i x = c_i x");
        auto& l1c = open("D1.c", "c_i(x (+) c_i y) = c_i x (+) c_i y");
        auto& l1d = open("D1.d", "c_i(~c_i x) = ~c_i x");
        auto& l1e = open("D1.e", "c_i c_j x = c_j c_i x");
        for (int i = 0; i < d; ++i) {
            int ci = single_[i];
            if (ci < 0) continue;
            for (int x = 0; x < n_; ++x) {
                auto w = [&] { return "i=" + std::to_string(i) + ", x=" + el(x); };
                record(l1a, M_.leq(x, c(ci, x)), w);
                record(l1b, c(ci, c(ci, x)) == c(ci, x), w);
                record(l1d, c(ci, M_.neg(c(ci, x))) == M_.neg(c(ci, x)), w);
                for (int y = 0; y < n_; ++y)
                    record(l1c, c(ci, M_.oplus(x, c(ci, y))) == M_.oplus(c(ci, x), c(ci, y)),
                           [&] { return "i=" + std::to_string(i) + ", x=" + el(x) + ", y=" + el(y); });
                for (int j = 0; j < d; ++j) {
                    int cj = single_[j];
                    if (cj < 0) continue;
                    record(l1e, c(ci, c(cj, x)) == c(cj, c(ci, x)),
                           [&] { return "i=" + std::to_string(i) + ", j=" + std::to_string(j) + ", x=" + el(x); });
                }
            }
        }
        auto& l4 = open("D4", "s_t c_i x = s_t[i|j] c_i x");
        auto& l5 = open("D5", "t^-1(j) = {i} implies s_t c_i x = c_j s_t x and s_t q_i x = q_j s_t x");
        for (int t = 0; t < g; ++t) {
            const auto& tt = A_.G[t];
            for (int i = 0; i < d; ++i) {
                int ci = single_[i];
                if (ci < 0) continue;
                for (int j = 0; j < d; ++j) {
                    if (auto tm = A_.find_transformation(modify(tt, i, j)))
                        for (int x = 0; x < n_; ++x)
                            record(l4, s(t, c(ci, x)) == s(*tm, c(ci, x)), [&] {
                                return "t=" + tr(t) + ", i=" + std::to_string(i) + ", j=" + std::to_string(j) + ", x=" + el(x);
                            });
                    int cj = single_[j];
                    if (cj < 0 || preimage(tt, bit(j)) != bit(i)) continue;
                    for (int x = 0; x < n_; ++x)
                        record(l5, s(t, c(ci, x)) == c(cj, s(t, x)) && s(t, q(ci, x)) == q(cj, s(t, x)), [&] {
                            return "t=" + tr(t) + ", i=" + std::to_string(i) + ", j=" + std::to_string(j) + ", x=" + el(x);
                        });
                }
            }
        }
        auto& l6 = open("D6", "i != j implies c_i s_[i|j] x = s_[i|j] x and q_i s_[i|j] x = s_[i|j] x");
        auto& l7 = open("D7", "s_[i|j] c_i x = c_i x and s_[i|j] q_i x = q_i x");
        auto& l8 = open("D8", "k not in {i,j} implies s_[i|j] c_k x = c_k s_[i|j] x and likewise for q_k");
        auto& l9 = open("D9", "c_i s_[j|i] x = c_j s_[i|j] x and q_i s_[j|i] x = q_j s_[i|j] x");
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                auto r = rep(i, j);
                if (!r) continue;
                auto w = [&](int x) {
                    return [&, x] { return "i=" + std::to_string(i) + ", j=" + std::to_string(j) + ", x=" + el(x); };
                };
                int ci = single_[i];
                for (int x = 0; x < n_; ++x) {
                    if (ci >= 0 && i != j)
                        record(l6, c(ci, s(*r, x)) == s(*r, x) && q(ci, s(*r, x)) == s(*r, x), w(x));
                    if (ci >= 0) record(l7, s(*r, c(ci, x)) == c(ci, x) && s(*r, q(ci, x)) == q(ci, x), w(x));
                    for (int k = 0; k < d; ++k) {
                        int ck = single_[k];
                        if (ck < 0 || k == i || k == j) continue;
                        record(l8, s(*r, c(ck, x)) == c(ck, s(*r, x)) && s(*r, q(ck, x)) == q(ck, s(*r, x)), [&] {
                            return "i=" + std::to_string(i) + ", j=" + std::to_string(j) + ", k=" + std::to_string(k) + ", x=" + el(x);
                        });
                    }
                    auto back = rep(j, i);
                    int cj = single_[j];
                    if (ci >= 0 && cj >= 0 && back)
                        record(l9, c(ci, s(*back, x)) == c(cj, s(*r, x)) && q(ci, s(*back, x)) == q(cj, s(*r, x)), w(x));
                }
            }
    }
};

}  // namespace detail

inline PolyadicAuditReport audit_axioms(const AbstractPolyadicAlgebra& A) {
    A.validate();
    return detail::PolyadicAuditor(A).run();
}

inline PolyadicAuditReport audit_axioms(const FunctionalSetAlgebra& A) { return audit_axioms(to_abstract(A)); }

// ---------------------------------------------------------------- neat reducts

enum class ReductFlavor { FiniteT, FullT };

struct NeatReduct {
    IndexMask alpha = 0;
    ReductFlavor flavor = ReductFlavor::FiniteT;
    std::vector<int> members;          // carrier indices of the parent
    std::vector<int> transformations;  // indices into G of the kept t (t maps alpha into alpha, fixes the rest)
    std::vector<int> scopes;           // indices into T of the kept J (J within alpha)
};

inline NeatReduct neat_reduct(const AbstractPolyadicAlgebra& A, IndexMask alpha, ReductFlavor flavor) {
    if (alpha & ~full_mask(A.dim)) throw IndexOutOfRange("alpha " + mask_str(alpha) + " outside the index set");
    NeatReduct r{alpha, flavor, {}, {}, {}};
    const IndexMask rest = full_mask(A.dim) & ~alpha;
    std::vector<bool> in(static_cast<std::size_t>(A.size()), false);
    for (int p = 0; p < A.size(); ++p) {
        bool keep = flavor == ReductFlavor::FiniteT ? (A.dimension_set(p) & rest) == 0 : A.c(rest, p) == p;
        if (keep) {
            in[p] = true;
            r.members.push_back(p);
        }
    }
    for (std::size_t t = 0; t < A.G.size(); ++t) {
        bool ok = true;
        for (int i = 0; i < A.dim && ok; ++i)
            ok = (alpha & bit(i)) ? (alpha & bit(A.G[t](i))) != 0 : A.G[t](i) == i;
        if (ok) r.transformations.push_back(static_cast<int>(t));
    }
    for (std::size_t j = 0; j < A.T.size(); ++j)
        if ((A.T[j] & rest) == 0) r.scopes.push_back(static_cast<int>(j));
    const auto& M = A.mv;
    auto need = [&](bool ok, const std::string& op, int p) {
        if (!ok) throw NotASubuniverse(op, static_cast<std::size_t>(p));
    };
    for (int p : r.members) {
        need(in[M.neg(p)], "neg", p);
        for (int q : r.members) need(in[M.oplus(p, q)], "oplus", p);
        for (int t : r.transformations) need(in[A.subst[t][p]], "s_" + A.G[t].to_string(), p);
        for (int j : r.scopes) need(in[A.cyl[j][p]], "c_" + mask_str(A.T[j]), p);
    }
    return r;
}

inline NeatReduct neat_reduct(const FunctionalSetAlgebra& A, IndexMask alpha, ReductFlavor flavor) {
    return neat_reduct(to_abstract(A), alpha, flavor);
}

// ---------------------------------------------------------------- term-defined substitutions

struct TermSubstitution {
    std::vector<FinTransformation> chain;  // replacements, innermost last
};

namespace detail {

// The replacement chain s_[p0|v0]..s_[p(k-1)|v(k-1)] s_[u0|p0]..s_[u(k-1)|p(k-1)] for t, given
// the dimension set of the argument.
inline TermSubstitution replacement_chain(const FinTransformation& t, IndexMask delta) {
    const int d = t.size();
    TermSubstitution out;
    std::vector<int> u, v;
    for (int i = 0; i < d; ++i)
        if (t(i) != i) u.push_back(i), v.push_back(t(i));
    const std::size_t k = u.size();
    if (k == 0) return out;
    if (k == 1) {
        out.chain.push_back(FinTransformation::replacement(d, u[0], v[0]));
        return out;
    }
    IndexMask used = delta | mask_of(u) | mask_of(v);
    std::vector<int> pi;
    for (int i = 0; i < d && pi.size() < k; ++i)
        if (!(used & bit(i))) pi.push_back(i);
    if (pi.size() < k)
        throw InsufficientSpareIndices("need " + std::to_string(k) + " indices outside " + mask_str(used) + ", have " +
                                       std::to_string(pi.size()));
    for (std::size_t i = 0; i < k; ++i) out.chain.push_back(FinTransformation::replacement(d, pi[i], v[i]));
    for (std::size_t i = 0; i < k; ++i) out.chain.push_back(FinTransformation::replacement(d, u[i], pi[i]));
    return out;
}

}  // namespace detail

// s_t x computed with replacements only.
inline int term_substitution(const AbstractPolyadicAlgebra& A, const FinTransformation& t, int x, TermSubstitution* used = nullptr) {
    if (t.size() != A.dim) throw IndexSetMismatch("transformation on the wrong index set");
    auto ch = detail::replacement_chain(t, A.dimension_set(x));
    int y = x;
    for (auto it = ch.chain.rbegin(); it != ch.chain.rend(); ++it) y = A.s(*it, y);
    if (used) *used = ch;
    return y;
}

// Same, for any function in the ambient space of A; the replacements must lie in G.
inline FunctionalSetAlgebra::Element term_substitution(const FunctionalSetAlgebra& A, const FinTransformation& t,
                                                        const FunctionalSetAlgebra::Element& x, TermSubstitution* used = nullptr) {
    if (t.size() != A.dim()) throw IndexSetMismatch("transformation on the wrong index set");
    auto ch = detail::replacement_chain(t, A.dimension_set(x));
    auto y = x;
    for (auto it = ch.chain.rbegin(); it != ch.chain.rend(); ++it) {
        if (!A.has_transformation(*it)) throw SignatureError("replacement " + it->to_string() + " is not in G");
        y = A.subst_any(*it, y);
    }
    if (used) *used = ch;
    return y;
}

}  // namespace mvlab

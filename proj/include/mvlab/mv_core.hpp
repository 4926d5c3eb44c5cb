#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <boost/container_hash/hash.hpp>

#include "mvlab/errors.hpp"
#include "mvlab/rational.hpp"

namespace mvlab {

enum class Connective { Oplus, Odot, Neg, Implies, WeakMeet, WeakJoin };

inline int arity(Connective c) { return c == Connective::Neg ? 1 : 2; }

inline std::optional<Connective> connective_from_name(std::string_view s) {
    if (s == "oplus" || s == "(+)") return Connective::Oplus;
    if (s == "odot" || s == "(*)") return Connective::Odot;
    if (s == "neg" || s == "~") return Connective::Neg;
    if (s == "implies" || s == "->") return Connective::Implies;
    if (s == "meet") return Connective::WeakMeet;
    if (s == "join") return Connective::WeakJoin;
    return std::nullopt;
}

enum class TNormKind { Lukasiewicz, Goedel, Product };

// Raw finite presentation: only oplus and neg are given, everything else is derived.
struct TableSpec {
    std::vector<std::string> carrier;
    std::vector<std::vector<int>> oplus;
    std::vector<int> neg;
    int zero = 0;
    int one = 0;
};

namespace detail {

inline Rational clamp01(const Rational& r) {
    if (r < 0) return Rational(0);
    if (r > 1) return Rational(1);
    return r;
}

inline Rational std_op(Connective op, const Rational& x, const Rational& y) {
    switch (op) {
        case Connective::Oplus: return std::min(x + y, Rational(1));
        case Connective::Odot: return std::max(x + y - 1, Rational(0));
        case Connective::Neg: return Rational(1) - x;
        case Connective::Implies: return std::min(Rational(1), Rational(1) - x + y);
        case Connective::WeakMeet: return std::min(x, y);
        case Connective::WeakJoin: return std::max(x, y);
    }
    return x;
}

inline void validate_table(const TableSpec& t) {
    const int n = static_cast<int>(t.carrier.size());
    if (n < 1) throw CarrierError("table carrier is empty");
    auto in = [n](int v) { return v >= 0 && v < n; };
    if (static_cast<int>(t.oplus.size()) != n || static_cast<int>(t.neg.size()) != n)
        throw CarrierError("table dimensions do not match the carrier");
    for (const auto& row : t.oplus) {
        if (static_cast<int>(row.size()) != n) throw CarrierError("oplus row has wrong length");
        for (int v : row)
            if (!in(v)) throw CarrierError("oplus entry outside the carrier");
    }
    for (int v : t.neg)
        if (!in(v)) throw CarrierError("neg entry outside the carrier");
    if (!in(t.zero) || !in(t.one)) throw CarrierError("zero/one outside the carrier");
}

}  // namespace detail

class MVAlgebra {
public:
    enum class Kind { StandardRationals, Chain, Table };

    static MVAlgebra standard() { return MVAlgebra(Kind::StandardRationals, 0, nullptr); }

    static MVAlgebra chain(int n) {
        if (n < 2) throw CarrierError("chain length must be at least 2");
        return MVAlgebra(Kind::Chain, n, nullptr);
    }

    // Audited construction; throws AxiomError naming the first failing axiom group.
    static MVAlgebra table(TableSpec spec);

    // Carrier given as tuples in a finite power of the n-chain. The tables are the
    // pointwise operations, so closure of the carrier is all that needs checking.
    static MVAlgebra table_of_subpower(int chain_n, const std::vector<std::vector<std::uint8_t>>& coords,
                                       std::vector<std::string> labels = {});

    Kind kind() const { return kind_; }
    bool finite() const { return kind_ != Kind::StandardRationals; }
    int size() const {
        if (kind_ == Kind::Chain) return n_;
        if (kind_ == Kind::Table) return static_cast<int>(table_->carrier.size());
        throw CarrierError("the standard algebra is infinite");
    }
    int chain_length() const { return kind_ == Kind::Chain ? n_ : 0; }

    int zero() const { return kind_ == Kind::Table ? table_->zero : 0; }
    int one() const { return kind_ == Kind::Table ? table_->one : n_ - 1; }

    int oplus(int a, int b) const {
        if (kind_ == Kind::Chain) return std::min(a + b, n_ - 1);
        return table_->oplus[a][b];
    }
    int neg(int a) const {
        if (kind_ == Kind::Chain) return n_ - 1 - a;
        return table_->neg[a];
    }
    int odot(int a, int b) const {
        if (kind_ == Kind::Chain) return std::max(a + b - (n_ - 1), 0);
        return neg(oplus(neg(a), neg(b)));
    }
    int implies(int a, int b) const { return oplus(neg(a), b); }
    int meet(int a, int b) const { return odot(a, oplus(neg(a), b)); }
    int join(int a, int b) const { return oplus(odot(a, neg(b)), b); }
    bool leq(int a, int b) const {
        if (kind_ == Kind::Chain) return a <= b;
        return implies(a, b) == one();
    }

    int apply(Connective op, int a, int b = 0) const {
        check_index(a);
        if (op != Connective::Neg) check_index(b);
        switch (op) {
            case Connective::Oplus: return oplus(a, b);
            case Connective::Odot: return odot(a, b);
            case Connective::Neg: return neg(a);
            case Connective::Implies: return implies(a, b);
            case Connective::WeakMeet: return meet(a, b);
            case Connective::WeakJoin: return join(a, b);
        }
        return a;
    }

    MVValue eval_basic(Connective op, std::span<const MVValue> args) const {
        if (static_cast<int>(args.size()) != arity(op)) throw CarrierError("wrong number of arguments");
        if (kind_ == Kind::Table) throw CarrierError("table algebras are evaluated on element indices");
        for (const auto& x : args) {
            if (x < 0 || x > 1) throw CarrierError("value " + to_string(x) + " outside [0,1]");
            if (kind_ == Kind::Chain && (n_ - 1) % x.denominator() != 0)
                throw CarrierError("value " + to_string(x) + " not in the " + std::to_string(n_) + "-chain");
        }
        return detail::std_op(op, args[0], args.size() > 1 ? args[1] : Rational(0));
    }

    Rational value(int i) const {
        if (kind_ != Kind::Chain) throw CarrierError("only chain elements have a numeric value");
        check_index(i);
        return Rational(i, n_ - 1);
    }

    int index_of(const Rational& r) const {
        if (kind_ != Kind::Chain) throw CarrierError("only chains are indexed by value");
        Rational scaled = r * (n_ - 1);
        if (r < 0 || r > 1 || scaled.denominator() != 1)
            throw CarrierError("value " + to_string(r) + " not in the " + std::to_string(n_) + "-chain");
        return static_cast<int>(scaled.numerator());
    }

    std::string label(int i) const {
        check_index(i);
        if (kind_ == Kind::Chain) return to_string(value(i));
        return table_->carrier[i];
    }

    std::optional<int> index_of_label(std::string_view s) const {
        for (int i = 0; i < size(); ++i)
            if (label(i) == s) return i;
        if (kind_ == Kind::Chain) {
            try {
                return index_of(parse_rational(s));
            } catch (const Error&) {
                return std::nullopt;
            }
        }
        return std::nullopt;
    }

    const TableSpec& table_spec() const {
        if (!table_) throw CarrierError("not a table algebra");
        return *table_;
    }

    void check_index(int i) const {
        if (i < 0 || i >= size()) throw CarrierError("element index " + std::to_string(i) + " outside the carrier");
    }

    std::string describe() const {
        switch (kind_) {
            case Kind::StandardRationals: return "standard";
            case Kind::Chain: return "chain(" + std::to_string(n_) + ")";
            case Kind::Table: return "table(" + std::to_string(size()) + ")";
        }
        return "";
    }

private:
    MVAlgebra(Kind k, int n, std::shared_ptr<const TableSpec> t) : kind_(k), n_(n), table_(std::move(t)) {}

    Kind kind_;
    int n_;
    std::shared_ptr<const TableSpec> table_;
};

// ---------------------------------------------------------------- axiom audit

struct AxiomCheck {
    int group = 0;
    std::string law;
    bool passed = true;
    std::uint64_t checked = 0;
    std::vector<std::string> witness;
};

struct AxiomReport {
    std::vector<AxiomCheck> checks;
    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const AxiomCheck& c) { return c.passed; });
    }
    const AxiomCheck* first_failure() const {
        for (const auto& c : checks)
            if (!c.passed) return &c;
        return nullptr;
    }
};

struct AuditMode {
    bool exhaustive = true;
    std::uint64_t count = 0;
    std::uint64_t seed = 0;
    static AuditMode full() { return {}; }
    static AuditMode sampled(std::uint64_t count, std::uint64_t seed) { return {false, count, seed}; }
};

namespace detail {

template <class E, class Ops>
struct AxiomRunner {
    struct Law {
        int group;
        const char* name;
        int vars;
        std::function<bool(const E&, const E&, const E&)> holds;
    };

    explicit AxiomRunner(const Ops& o) : ops(o) {
        auto P = [this](const E& a, const E& b) { return ops.oplus(a, b); };
        auto D = [this](const E& a, const E& b) { return ops.odot(a, b); };
        auto N = [this](const E& a) { return ops.neg(a); };
        const E z = ops.zero(), u = ops.one();
        laws = {
            {1, "a (+) b = b (+) a", 2, [=](auto& a, auto& b, auto&) { return P(a, b) == P(b, a); }},
            {1, "a (*) b = b (*) a", 2, [=](auto& a, auto& b, auto&) { return D(a, b) == D(b, a); }},
            {2, "a (+) (b (+) c) = (a (+) b) (+) c", 3,
             [=](auto& a, auto& b, auto& c) { return P(a, P(b, c)) == P(P(a, b), c); }},
            {2, "a (*) (b (*) c) = (a (*) b) (*) c", 3,
             [=](auto& a, auto& b, auto& c) { return D(a, D(b, c)) == D(D(a, b), c); }},
            {3, "a (+) 0 = a", 1, [=](auto& a, auto&, auto&) { return P(a, z) == a; }},
            {3, "a (*) 1 = a", 1, [=](auto& a, auto&, auto&) { return D(a, u) == a; }},
            {4, "a (+) 1 = 1", 1, [=](auto& a, auto&, auto&) { return P(a, u) == u; }},
            {4, "a (*) 0 = 0", 1, [=](auto& a, auto&, auto&) { return D(a, z) == z; }},
            {5, "a (+) ~a = 1", 1, [=](auto& a, auto&, auto&) { return P(a, N(a)) == u; }},
            {5, "a (*) ~a = 0", 1, [=](auto& a, auto&, auto&) { return D(a, N(a)) == z; }},
            {6, "~(a (+) b) = ~a (*) ~b", 2, [=](auto& a, auto& b, auto&) { return N(P(a, b)) == D(N(a), N(b)); }},
            {6, "~(a (*) b) = ~a (+) ~b", 2, [=](auto& a, auto& b, auto&) { return N(D(a, b)) == P(N(a), N(b)); }},
            {7, "a = ~~a", 1, [=](auto& a, auto&, auto&) { return N(N(a)) == a; }},
            {7, "~0 = 1", 0, [=](auto&, auto&, auto&) { return N(z) == u; }},
            {8, "~(~a (+) b) (+) b = ~(~b (+) a) (+) a", 2,
             [=](auto& a, auto& b, auto&) { return P(N(P(N(a), b)), b) == P(N(P(N(b), a)), a); }},
        };
        for (const auto& l : laws) report.checks.push_back({l.group, l.name, true, 0, {}});
    }

    void feed(const E& a, const E& b, const E& c, bool exhaustive) {
        for (std::size_t i = 0; i < laws.size(); ++i) {
            auto& chk = report.checks[i];
            if (exhaustive) {
                if (!chk.passed) continue;
                // in exhaustive mode each law is visited once per distinct tuple of its own variables
                if (laws[i].vars < 3 && !(c == first)) continue;
                if (laws[i].vars < 2 && !(b == first)) continue;
                if (laws[i].vars < 1 && !(a == first)) continue;
            }
            ++chk.checked;
            if (chk.passed && !laws[i].holds(a, b, c)) {
                chk.passed = false;
                chk.witness = {ops.format(a), ops.format(b), ops.format(c)};
                chk.witness.resize(static_cast<std::size_t>(std::max(laws[i].vars, 1)));
            }
        }
    }

    const Ops& ops;
    std::vector<Law> laws;
    AxiomReport report;
    E first{};
};

struct RawTableOps {
    const TableSpec& t;
    int oplus(int a, int b) const { return t.oplus[a][b]; }
    int neg(int a) const { return t.neg[a]; }
    int odot(int a, int b) const { return neg(oplus(neg(a), neg(b))); }
    int zero() const { return t.zero; }
    int one() const { return t.one; }
    std::string format(int a) const { return t.carrier[a]; }
};

struct AlgebraIndexOps {
    const MVAlgebra& m;
    int oplus(int a, int b) const { return m.oplus(a, b); }
    int neg(int a) const { return m.neg(a); }
    int odot(int a, int b) const { return m.odot(a, b); }
    int zero() const { return m.zero(); }
    int one() const { return m.one(); }
    std::string format(int a) const { return m.label(a); }
};

struct RationalOps {
    Rational oplus(const Rational& a, const Rational& b) const { return std_op(Connective::Oplus, a, b); }
    Rational odot(const Rational& a, const Rational& b) const { return std_op(Connective::Odot, a, b); }
    Rational neg(const Rational& a) const { return Rational(1) - a; }
    Rational zero() const { return Rational(0); }
    Rational one() const { return Rational(1); }
    std::string format(const Rational& a) const { return to_string(a); }
};

template <class Ops>
AxiomReport exhaustive_index_audit(const Ops& ops, int n) {
    AxiomRunner<int, Ops> run(ops);
    run.first = 0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) run.feed(a, b, c, true);
    return run.report;
}

// Uniform draw of a reduced fraction in [0,1] with denominator at most 97.
inline Rational random_unit_rational(std::mt19937_64& rng) {
    std::int64_t den = 1 + static_cast<std::int64_t>(rng() % 97);
    std::int64_t num = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(den + 1));
    return Rational(num, den);
}

}  // namespace detail

inline AxiomReport check_mv_axioms(const TableSpec& spec) {
    detail::validate_table(spec);
    return detail::exhaustive_index_audit(detail::RawTableOps{spec}, static_cast<int>(spec.carrier.size()));
}

inline AxiomReport check_mv_axioms(const MVAlgebra& alg, AuditMode mode = AuditMode::full()) {
    if (alg.finite()) {
        if (mode.exhaustive) return detail::exhaustive_index_audit(detail::AlgebraIndexOps{alg}, alg.size());
        detail::AlgebraIndexOps ops{alg};
        detail::AxiomRunner<int, detail::AlgebraIndexOps> run(ops);
        std::mt19937_64 rng(mode.seed);
        const auto n = static_cast<std::uint64_t>(alg.size());
        for (std::uint64_t i = 0; i < mode.count; ++i) {
            int a = static_cast<int>(rng() % n), b = static_cast<int>(rng() % n), c = static_cast<int>(rng() % n);
            run.feed(a, b, c, false);
        }
        return run.report;
    }
    if (mode.exhaustive) throw CarrierError("the standard algebra can only be audited by sampling");
    detail::RationalOps ops;
    detail::AxiomRunner<Rational, detail::RationalOps> run(ops);
    std::mt19937_64 rng(mode.seed);
    for (std::uint64_t i = 0; i < mode.count; ++i) {
        Rational a = detail::random_unit_rational(rng);
        Rational b = detail::random_unit_rational(rng);
        Rational c = detail::random_unit_rational(rng);
        run.feed(a, b, c, false);
    }
    return run.report;
}

inline MVAlgebra MVAlgebra::table(TableSpec spec) {
    auto report = check_mv_axioms(spec);
    if (auto f = report.first_failure())
        throw AxiomError("table fails axiom group " + std::to_string(f->group) + " (" + f->law + ")");
    return MVAlgebra(Kind::Table, 0, std::make_shared<const TableSpec>(std::move(spec)));
}

inline MVAlgebra MVAlgebra::table_of_subpower(int chain_n, const std::vector<std::vector<std::uint8_t>>& coords,
                                              std::vector<std::string> labels) {
    using Tuple = std::vector<std::uint8_t>;
    const int n = static_cast<int>(coords.size());
    if (n == 0) throw CarrierError("empty carrier");
    const std::size_t width = coords[0].size();
    std::unordered_map<Tuple, int, boost::hash<Tuple>> index;
    for (int i = 0; i < n; ++i) {
        if (coords[i].size() != width) throw CarrierError("tuples of different width");
        for (auto v : coords[i])
            if (v >= chain_n) throw CarrierError("tuple entry outside the chain");
        index.emplace(coords[i], i);
    }
    if (static_cast<int>(index.size()) != n) throw CarrierError("duplicate tuples in carrier");
    auto find = [&](const Tuple& t, const char* op) {
        auto it = index.find(t);
        if (it == index.end()) throw AxiomError(std::string("carrier not closed under ") + op);
        return it->second;
    };
    const auto top = static_cast<std::uint8_t>(chain_n - 1);
    TableSpec t;
    t.zero = find(Tuple(width, 0), "0");
    t.one = find(Tuple(width, top), "1");
    t.neg.resize(n);
    t.oplus.assign(n, std::vector<int>(n));
    Tuple tmp(width);
    for (int a = 0; a < n; ++a) {
        for (std::size_t p = 0; p < width; ++p) tmp[p] = static_cast<std::uint8_t>(top - coords[a][p]);
        t.neg[a] = find(tmp, "neg");
        for (int b = 0; b <= a; ++b) {
            for (std::size_t p = 0; p < width; ++p)
                tmp[p] = static_cast<std::uint8_t>(std::min<int>(coords[a][p] + coords[b][p], top));
            t.oplus[a][b] = t.oplus[b][a] = find(tmp, "oplus");
        }
    }
    if (labels.empty())
        for (int i = 0; i < n; ++i) labels.push_back("e" + std::to_string(i));
    if (static_cast<int>(labels.size()) != n) throw CarrierError("label count does not match carrier");
    t.carrier = std::move(labels);
    return MVAlgebra(Kind::Table, 0, std::make_shared<const TableSpec>(std::move(t)));
}

// ---------------------------------------------------------------- t-norms

inline Rational tnorm_eval(TNormKind k, const Rational& x, const Rational& y) {
    switch (k) {
        case TNormKind::Lukasiewicz: return std::max(Rational(0), x + y - 1);
        case TNormKind::Goedel: return std::min(x, y);
        case TNormKind::Product: return x * y;
    }
    return x;
}

inline Rational tnorm_residuum(TNormKind k, const Rational& x, const Rational& y) {
    switch (k) {
        case TNormKind::Lukasiewicz: return std::min(Rational(1), Rational(1) - x + y);
        case TNormKind::Goedel: return x <= y ? Rational(1) : y;
        case TNormKind::Product: return x <= y ? Rational(1) : y / x;
    }
    return x;
}

// Greatest z in the carrier with x (*) z <= y, found by scanning.
inline int residuum_by_maximization(const MVAlgebra& alg, int x, int y) {
    std::optional<int> best;
    for (int z = 0; z < alg.size(); ++z) {
        if (!alg.leq(alg.odot(x, z), y)) continue;
        if (!best || alg.leq(*best, z)) best = z;
    }
    if (!best) throw CarrierError("no residuum candidate");
    for (int z = 0; z < alg.size(); ++z)
        if (alg.leq(alg.odot(x, z), y) && !alg.leq(z, *best)) throw CarrierError("candidate set has no maximum");
    return *best;
}

inline Rational residuum_by_maximization(const MVAlgebra& chain, const Rational& x, const Rational& y) {
    return chain.value(residuum_by_maximization(chain, chain.index_of(x), chain.index_of(y)));
}

// Scan over the chain for an arbitrary t-norm restricted to it.
inline Rational tnorm_residuum_by_scan(TNormKind k, int chain_n, const Rational& x, const Rational& y) {
    Rational best(0);
    for (int i = 0; i < chain_n; ++i) {
        Rational z(i, chain_n - 1);
        if (tnorm_eval(k, x, z) <= y) best = std::max(best, z);
    }
    return best;
}

// ---------------------------------------------------------------- filters

class Filter {
public:
    Filter(MVAlgebra alg, std::vector<bool> members) : alg_(std::move(alg)), members_(std::move(members)) {
        if (static_cast<int>(members_.size()) != alg_.size()) throw CarrierError("filter mask has wrong size");
    }

    const MVAlgebra& algebra() const { return alg_; }
    bool contains(int a) const { return members_.at(static_cast<std::size_t>(a)); }
    bool proper() const { return !members_[static_cast<std::size_t>(alg_.zero())]; }
    const std::vector<bool>& mask() const { return members_; }
    std::vector<int> elements() const {
        std::vector<int> out;
        for (int i = 0; i < alg_.size(); ++i)
            if (members_[i]) out.push_back(i);
        return out;
    }
    std::size_t size() const { return static_cast<std::size_t>(std::count(members_.begin(), members_.end(), true)); }
    bool includes(const Filter& o) const {
        for (std::size_t i = 0; i < members_.size(); ++i)
            if (o.members_[i] && !members_[i]) return false;
        return true;
    }
    bool operator==(const Filter& o) const { return members_ == o.members_; }

private:
    MVAlgebra alg_;
    std::vector<bool> members_;
};

inline bool is_filter(const MVAlgebra& alg, const std::vector<bool>& m) {
    const int n = alg.size();
    if (static_cast<int>(m.size()) != n || !m[alg.one()]) return false;
    for (int a = 0; a < n; ++a) {
        if (!m[a]) continue;
        for (int b = 0; b < n; ++b) {
            if (m[b] && !m[alg.odot(a, b)]) return false;
            if (!m[b] && alg.leq(a, b)) return false;
        }
    }
    return true;
}

inline Filter principal_filter(const MVAlgebra& alg, int e) {
    std::vector<bool> m(alg.size());
    for (int x = 0; x < alg.size(); ++x) m[x] = alg.leq(e, x);
    return Filter(alg, std::move(m));
}

// The smallest filter containing X. Finite products stabilise at an idempotent,
// so the filter is the principal one above it.
inline Filter filter_generate(const MVAlgebra& alg, std::span<const int> X) {
    int m = alg.one();
    for (int x : X) {
        alg.check_index(x);
        m = alg.odot(m, x);
    }
    for (int sq = alg.odot(m, m); sq != m; sq = alg.odot(m, m)) m = sq;
    return principal_filter(alg, m);
}

// Every filter of a finite MV-algebra is principal over an idempotent; listed by that generator.
inline std::vector<Filter> all_filters(const MVAlgebra& alg) {
    std::vector<Filter> out;
    for (int e = 0; e < alg.size(); ++e)
        if (alg.odot(e, e) == e) out.push_back(principal_filter(alg, e));
    return out;
}

inline std::vector<Filter> maximal_filters(const MVAlgebra& alg) {
    std::vector<int> idem;
    for (int e = 0; e < alg.size(); ++e)
        if (e != alg.zero() && alg.odot(e, e) == e) idem.push_back(e);
    std::vector<Filter> out;
    for (int e : idem) {
        bool minimal = std::none_of(idem.begin(), idem.end(), [&](int f) { return f != e && alg.leq(f, e); });
        if (minimal) out.push_back(principal_filter(alg, e));
    }
    return out;
}

inline std::optional<Filter> extend_to_maximal(const MVAlgebra& alg, const Filter& f,
                                               const std::function<bool(const Filter&)>& constraint = {}) {
    if (!f.proper()) throw ProperFilterRequired("cannot extend an improper filter");
    for (auto& m : maximal_filters(alg))
        if (m.includes(f) && (!constraint || constraint(m))) return m;
    return std::nullopt;
}

struct Quotient {
    MVAlgebra chain;
    std::vector<int> projection;
};

// Quotient by a maximal filter, returned as the isomorphic standard chain.
inline Quotient quotient(const MVAlgebra& alg, const Filter& f) {
    if (!is_filter(alg, f.mask())) throw NotAFilter("the given set is not a filter");
    if (!f.proper()) throw ProperFilterRequired("quotient by an improper filter");
    const int n = alg.size();
    std::vector<int> cls(n, -1), reps;
    for (int a = 0; a < n; ++a) {
        for (std::size_t r = 0; r < reps.size(); ++r) {
            int b = reps[r];
            if (f.contains(alg.odot(alg.implies(a, b), alg.implies(b, a)))) {
                cls[a] = static_cast<int>(r);
                break;
            }
        }
        if (cls[a] < 0) {
            cls[a] = static_cast<int>(reps.size());
            reps.push_back(a);
        }
    }
    const int k = static_cast<int>(reps.size());
    std::vector<int> rank(k, 0);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            if (i == j) continue;
            bool le = f.contains(alg.implies(reps[j], reps[i]));
            bool ge = f.contains(alg.implies(reps[i], reps[j]));
            if (!le && !ge) throw NonMaximalFilter("quotient is not linearly ordered");
            if (le) ++rank[i];
        }
    Quotient q{MVAlgebra::chain(k), std::vector<int>(n)};
    for (int a = 0; a < n; ++a) q.projection[a] = rank[cls[a]];
    return q;
}

}  // namespace mvlab

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mvlab/errors.hpp"
#include "mvlab/mv_core.hpp"
#include "mvlab/syntax.hpp"

namespace mvlab {

// Values are chain indices; row-major over argument tuples, first argument most significant.
struct PredicateTable {
    int arity = 0;
    std::vector<int> values;
};

class Model {
public:
    Model(int domain, int chain_n) : domain_(domain), chain_(MVAlgebra::chain(chain_n)) {
        if (domain < 1) throw CarrierError("model domain must be nonempty");
    }

    int domain() const { return domain_; }
    const MVAlgebra& chain() const { return chain_; }
    int top() const { return chain_.one(); }

    std::size_t tuple_count(int arity) const {
        std::size_t c = 1;
        for (int i = 0; i < arity; ++i) c *= static_cast<std::size_t>(domain_);
        return c;
    }

    void set_table(const std::string& name, int arity, std::vector<int> values) {
        if (values.size() != tuple_count(arity)) throw MissingTable("table for '" + name + "' is not total");
        for (int v : values) chain_.check_index(v);
        tables_[name] = PredicateTable{arity, std::move(values)};
    }

    void set_value(const std::string& name, const std::vector<int>& tuple, const Rational& r) {
        auto& t = tables_.at(name);
        t.values.at(tuple_index(tuple)) = chain_.index_of(r);
    }

    const PredicateTable& table(const std::string& name) const {
        auto it = tables_.find(name);
        if (it == tables_.end()) throw MissingTable("no table for predicate '" + name + "'");
        return it->second;
    }
    const std::map<std::string, PredicateTable>& tables() const { return tables_; }
    std::map<std::string, PredicateTable>& tables_mut() { return tables_; }

    std::size_t tuple_index(const std::vector<int>& tuple) const {
        std::size_t idx = 0;
        for (int a : tuple) {
            if (a < 0 || a >= domain_) throw CarrierError("tuple entry outside the domain");
            idx = idx * static_cast<std::size_t>(domain_) + static_cast<std::size_t>(a);
        }
        return idx;
    }

private:
    int domain_;
    MVAlgebra chain_;
    std::map<std::string, PredicateTable> tables_;
};

struct Assignment {
    std::map<int, int> values;
    int default_element = 0;
    int operator()(int v) const {
        auto it = values.find(v);
        return it == values.end() ? default_element : it->second;
    }
};

namespace detail {

class Evaluator {
public:
    Evaluator(const Model& m, const Formula& f, const Assignment& s) : m_(m), k_(m.domain()), top_(m.top()) {
        int hi = f.vars().empty() ? 0 : *f.vars().rbegin();
        for (auto [v, _] : s.values) hi = std::max(hi, v);
        env_.assign(static_cast<std::size_t>(hi) + 1, s.default_element);
        for (auto [v, a] : s.values) {
            if (a < 0 || a >= k_) throw CarrierError("assignment value outside the domain");
            env_[v] = a;
        }
        if (s.default_element < 0 || s.default_element >= k_) throw CarrierError("default element outside the domain");
    }

    std::vector<int>& env() { return env_; }

    int eval(const Formula& f) {
        switch (f.kind()) {
            case FKind::Atom: {
                const auto& t = m_.table(f.pred());
                if (t.arity != static_cast<int>(f.args().size())) throw LanguageError("arity mismatch for '" + f.pred() + "'");
                std::size_t idx = 0;
                for (int v : f.args()) idx = idx * static_cast<std::size_t>(k_) + static_cast<std::size_t>(env_[v]);
                return t.values[idx];
            }
            case FKind::Top: return top_;
            case FKind::Bottom: return 0;
            case FKind::Meta: throw Error("cannot evaluate a schema placeholder");
            case FKind::Neg: return top_ - eval(f.left());
            case FKind::Oplus: return std::min(eval(f.left()) + eval(f.right()), top_);
            case FKind::Odot: return std::max(eval(f.left()) + eval(f.right()) - top_, 0);
            case FKind::Implies: {
                int a = eval(f.left());
                int b = eval(f.right());
                return std::min(top_, top_ - a + b);
            }
            case FKind::Forall:
            case FKind::Exists: return quantifier(f);
        }
        return 0;
    }

private:
    int quantifier(const Formula& f) {
        const bool ex = f.kind() == FKind::Exists;
        std::vector<int> ws;
        for (int w : f.block())
            if (f.body().free_vars().count(w)) ws.push_back(w);
        std::vector<int> saved;
        for (int w : ws) saved.push_back(env_[w]);
        for (int w : ws) env_[w] = 0;
        int best = ex ? 0 : top_;
        while (true) {
            int v = eval(f.body());
            best = ex ? std::max(best, v) : std::min(best, v);
            if (best == (ex ? top_ : 0)) break;
            std::size_t i = 0;
            for (; i < ws.size(); ++i) {
                if (++env_[ws[i]] < k_) break;
                env_[ws[i]] = 0;
            }
            if (i == ws.size()) break;
        }
        for (std::size_t i = 0; i < ws.size(); ++i) env_[ws[i]] = saved[i];
        return best;
    }

    const Model& m_;
    int k_;
    int top_;
    std::vector<int> env_;
};

// Calls fn for every assignment to the listed variables; stops when fn returns false.
template <class Fn>
bool for_each_assignment(int domain, const std::vector<int>& vars, std::vector<int>& env, Fn&& fn) {
    for (int v : vars) env[v] = 0;
    while (true) {
        if (!fn()) return false;
        std::size_t i = 0;
        for (; i < vars.size(); ++i) {
            if (++env[vars[i]] < domain) break;
            env[vars[i]] = 0;
        }
        if (i == vars.size()) return true;
    }
}

}  // namespace detail

inline int eval_index(const Formula& f, const Model& m, const Assignment& s = {}) {
    detail::Evaluator e(m, f, s);
    return e.eval(f);
}

inline Rational eval(const Formula& f, const Model& m, const Assignment& s = {}) { return m.chain().value(eval_index(f, m, s)); }

// Infimum over assignments to the free variables, as a chain index.
inline int truth_degree_index(const Formula& f, const Model& m) {
    detail::Evaluator e(m, f, {});
    std::vector<int> vars(f.free_vars().begin(), f.free_vars().end());
    int best = m.top();
    detail::for_each_assignment(m.domain(), vars, e.env(), [&] {
        best = std::min(best, e.eval(f));
        return best > 0;
    });
    return best;
}

inline Rational truth_degree(const Formula& f, const Model& m) { return m.chain().value(truth_degree_index(f, m)); }

inline bool is_valid(const Formula& f, const Model& m) { return truth_degree_index(f, m) == m.top(); }

struct EntailmentOptions {
    int max_domain = 2;
    int chain = 3;
    std::uint64_t cap = 2'000'000;
};

struct EntailmentResult {
    bool refuted = false;
    std::optional<Model> counterexample;
    std::uint64_t models_checked = 0;
    int max_domain = 0;
    int chain = 0;
};

inline std::uint64_t model_count(const std::map<std::string, int>& preds, int max_domain, int chain, std::uint64_t cap) {
    std::uint64_t total = 0;
    for (int d = 1; d <= max_domain; ++d) {
        std::uint64_t entries = 0;
        for (auto [_, a] : preds) {
            std::uint64_t t = 1;
            for (int i = 0; i < a; ++i) t *= static_cast<std::uint64_t>(d);
            entries += t;
        }
        std::uint64_t c = 1;
        for (std::uint64_t i = 0; i < entries; ++i) {
            c *= static_cast<std::uint64_t>(chain);
            if (c > cap) return cap + 1;
        }
        total += c;
        if (total > cap) return cap + 1;
    }
    return total;
}

// Canonical order: by domain size, then lexicographically over the concatenated tables
// (predicates by name, tuples in row-major order). fn returns false to stop.
inline bool for_each_model(const std::map<std::string, int>& preds, int max_domain, int chain,
                           const std::function<bool(const Model&)>& fn) {
    for (int d = 1; d <= max_domain; ++d) {
        Model m(d, chain);
        for (auto [name, a] : preds) m.set_table(name, a, std::vector<int>(m.tuple_count(a), 0));
        std::vector<std::pair<std::vector<int>*, std::size_t>> cells;
        for (auto& [name, t] : m.tables_mut())
            for (std::size_t i = 0; i < t.values.size(); ++i) cells.push_back({&t.values, i});
        while (true) {
            if (!fn(m)) return false;
            std::size_t i = cells.size();
            for (; i > 0; --i) {
                auto& [vec, idx] = cells[i - 1];
                if (++(*vec)[idx] < chain) break;
                (*vec)[idx] = 0;
            }
            if (i == 0) break;
        }
    }
    return true;
}

inline EntailmentResult entails(const std::vector<Formula>& gamma, const Formula& phi, const EntailmentOptions& opt = {}) {
    auto all = gamma;
    all.push_back(phi);
    auto preds = collect_predicates(all);
    if (model_count(preds, opt.max_domain, opt.chain, opt.cap) > opt.cap)
        throw SearchTooLarge("more than " + std::to_string(opt.cap) + " models to enumerate");
    EntailmentResult r;
    r.max_domain = opt.max_domain;
    r.chain = opt.chain;
    for_each_model(preds, opt.max_domain, opt.chain, [&](const Model& m) {
        ++r.models_checked;
        for (const auto& g : gamma)
            if (!is_valid(g, m)) return true;
        if (is_valid(phi, m)) return true;
        r.refuted = true;
        r.counterexample = m;
        return false;
    });
    return r;
}

}  // namespace mvlab

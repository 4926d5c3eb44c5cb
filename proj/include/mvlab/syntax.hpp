#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mvlab/errors.hpp"

namespace mvlab {

using VarSet = std::set<int>;
// Partial map on variables; identity off its domain, so it also stands for f|V.
using VarMap = std::map<int, int>;

inline int map_var(const VarMap& f, int v) {
    auto it = f.find(v);
    return it == f.end() ? v : it->second;
}

inline VarSet image(const VarMap& f, const VarSet& W) {
    VarSet out;
    for (int w : W) out.insert(map_var(f, w));
    return out;
}

// f|Z: f on dom(f) n Z, identity on the rest of Z. The result has domain exactly Z.
inline VarMap restrict_extend(const VarMap& f, const VarSet& Z) {
    VarMap out;
    for (int z : Z) out[z] = map_var(f, z);
    return out;
}

inline bool injective_on(const VarMap& f, const VarSet& Z) { return image(f, Z).size() == Z.size(); }

enum class FKind { Atom, Top, Bottom, Oplus, Odot, Implies, Neg, Forall, Exists, Meta };

struct FormulaNode;

class Formula {
public:
    Formula() = default;

    static Formula atom(std::string pred, std::vector<int> args);
    static Formula top();
    static Formula bottom();
    static Formula oplus(Formula a, Formula b);
    static Formula odot(Formula a, Formula b);
    static Formula implies(Formula a, Formula b);
    static Formula neg(Formula a);
    static Formula forall(VarSet W, Formula a);
    static Formula exists(VarSet W, Formula a);
    static Formula meta(int k);  // schema placeholder

    bool valid() const { return static_cast<bool>(n_); }
    FKind kind() const;
    const std::string& pred() const;
    const std::vector<int>& args() const;
    const VarSet& block() const;
    int meta_index() const;
    const Formula& left() const;
    const Formula& right() const;
    const Formula& body() const { return left(); }
    const VarSet& free_vars() const;
    const VarSet& bound_vars() const;
    const VarSet& vars() const;
    int size() const;
    int depth() const;

    bool is_binary() const {
        auto k = kind();
        return k == FKind::Oplus || k == FKind::Odot || k == FKind::Implies;
    }
    bool is_quantifier() const { return kind() == FKind::Forall || kind() == FKind::Exists; }

    bool operator==(const Formula& o) const;
    bool operator!=(const Formula& o) const { return !(*this == o); }

private:
    explicit Formula(std::shared_ptr<const FormulaNode> n) : n_(std::move(n)) {}
    static Formula make(FormulaNode node);
    static Formula binary(FKind k, Formula a, Formula b);
    std::shared_ptr<const FormulaNode> n_;
};

struct FormulaNode {
    FKind kind = FKind::Top;
    std::string pred;
    std::vector<int> args;
    VarSet block;
    int meta = 0;
    Formula l, r;
    VarSet free, bound, all;
    int size = 1;
    int depth = 0;
};

inline Formula Formula::make(FormulaNode node) {
    switch (node.kind) {
        case FKind::Atom:
            node.free = VarSet(node.args.begin(), node.args.end());
            node.all = node.free;
            break;
        case FKind::Top:
        case FKind::Bottom:
        case FKind::Meta: break;
        case FKind::Neg:
            node.free = node.l.free_vars();
            node.bound = node.l.bound_vars();
            node.all = node.l.vars();
            node.size = 1 + node.l.size();
            node.depth = 1 + node.l.depth();
            break;
        case FKind::Forall:
        case FKind::Exists:
            node.free = node.l.free_vars();
            for (int w : node.block) node.free.erase(w);
            node.bound = node.l.bound_vars();
            node.bound.insert(node.block.begin(), node.block.end());
            node.all = node.l.vars();
            node.all.insert(node.block.begin(), node.block.end());
            node.size = 1 + node.l.size();
            node.depth = 1 + node.l.depth();
            break;
        default:
            node.free = node.l.free_vars();
            node.free.insert(node.r.free_vars().begin(), node.r.free_vars().end());
            node.bound = node.l.bound_vars();
            node.bound.insert(node.r.bound_vars().begin(), node.r.bound_vars().end());
            node.all = node.l.vars();
            node.all.insert(node.r.vars().begin(), node.r.vars().end());
            node.size = 1 + node.l.size() + node.r.size();
            node.depth = 1 + std::max(node.l.depth(), node.r.depth());
    }
    return Formula(std::make_shared<const FormulaNode>(std::move(node)));
}

inline Formula Formula::atom(std::string pred, std::vector<int> args) {
    FormulaNode n;
    n.kind = FKind::Atom;
    n.pred = std::move(pred);
    n.args = std::move(args);
    return make(std::move(n));
}
inline Formula Formula::top() {
    FormulaNode n;
    n.kind = FKind::Top;
    return make(std::move(n));
}
inline Formula Formula::bottom() {
    FormulaNode n;
    n.kind = FKind::Bottom;
    return make(std::move(n));
}
inline Formula Formula::meta(int k) {
    FormulaNode n;
    n.kind = FKind::Meta;
    n.meta = k;
    return make(std::move(n));
}

inline Formula Formula::binary(FKind k, Formula a, Formula b) {
    FormulaNode n;
    n.kind = k;
    n.l = std::move(a);
    n.r = std::move(b);
    return make(std::move(n));
}

inline Formula Formula::oplus(Formula a, Formula b) { return binary(FKind::Oplus, std::move(a), std::move(b)); }
inline Formula Formula::odot(Formula a, Formula b) { return binary(FKind::Odot, std::move(a), std::move(b)); }
inline Formula Formula::implies(Formula a, Formula b) { return binary(FKind::Implies, std::move(a), std::move(b)); }
inline Formula Formula::neg(Formula a) {
    FormulaNode n;
    n.kind = FKind::Neg;
    n.l = std::move(a);
    return make(std::move(n));
}
inline Formula Formula::forall(VarSet W, Formula a) {
    FormulaNode n;
    n.kind = FKind::Forall;
    n.block = std::move(W);
    n.l = std::move(a);
    return make(std::move(n));
}
inline Formula Formula::exists(VarSet W, Formula a) {
    FormulaNode n;
    n.kind = FKind::Exists;
    n.block = std::move(W);
    n.l = std::move(a);
    return make(std::move(n));
}

inline FKind Formula::kind() const { return n_->kind; }
inline const std::string& Formula::pred() const { return n_->pred; }
inline const std::vector<int>& Formula::args() const { return n_->args; }
inline const VarSet& Formula::block() const { return n_->block; }
inline int Formula::meta_index() const { return n_->meta; }
inline const Formula& Formula::left() const { return n_->l; }
inline const Formula& Formula::right() const { return n_->r; }
inline const VarSet& Formula::free_vars() const { return n_->free; }
inline const VarSet& Formula::bound_vars() const { return n_->bound; }
inline const VarSet& Formula::vars() const { return n_->all; }
inline int Formula::size() const { return n_->size; }
inline int Formula::depth() const { return n_->depth; }

inline bool Formula::operator==(const Formula& o) const {
    if (n_ == o.n_) return true;
    if (!n_ || !o.n_) return false;
    const auto& a = *n_;
    const auto& b = *o.n_;
    if (a.kind != b.kind || a.size != b.size) return false;
    switch (a.kind) {
        case FKind::Atom: return a.pred == b.pred && a.args == b.args;
        case FKind::Top:
        case FKind::Bottom: return true;
        case FKind::Meta: return a.meta == b.meta;
        case FKind::Neg: return a.l == b.l;
        case FKind::Forall:
        case FKind::Exists: return a.block == b.block && a.l == b.l;
        default: return a.l == b.l && a.r == b.r;
    }
}

inline VarSet free_vars(const Formula& f) { return f.free_vars(); }
inline VarSet bound_vars(const Formula& f) { return f.bound_vars(); }

// ---------------------------------------------------------------- language

enum class ScopeFamily { FiniteSubsets, AllSubsets };

struct PredicateDecl {
    std::string name;
    int arity = 0;
};

namespace detail {
inline bool is_variable_name(std::string_view s) {
    if (s.size() < 2 || s[0] != 'v') return false;
    return std::all_of(s.begin() + 1, s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}
inline bool is_reserved_name(std::string_view s) { return s == "T" || s == "F" || is_variable_name(s); }
}  // namespace detail

struct LanguageSpec {
    int variables = 0;
    int reserve = 1;
    std::vector<PredicateDecl> predicates;
    ScopeFamily scope = ScopeFamily::FiniteSubsets;

    std::optional<int> arity_of(std::string_view name) const {
        for (const auto& p : predicates)
            if (p.name == name) return p.arity;
        return std::nullopt;
    }

    int max_arity() const {
        int m = 0;
        for (const auto& p : predicates) m = std::max(m, p.arity);
        return m;
    }

    void validate() const {
        if (reserve < 1) throw LanguageError("reserve must be at least 1");
        if (variables < max_arity() + reserve) throw LanguageError("too few variables for the arities plus the reserve");
        std::set<std::string> seen;
        for (const auto& p : predicates) {
            if (p.arity < 0) throw LanguageError("negative arity for " + p.name);
            if (detail::is_reserved_name(p.name)) throw LanguageError("predicate name '" + p.name + "' is reserved");
            if (!seen.insert(p.name).second) throw LanguageError("duplicate predicate " + p.name);
        }
    }

    void check_var(int v) const {
        if (v < 0 || v >= variables) throw ScopeError("variable v" + std::to_string(v) + " is not in the language");
    }

    // Arity/variable checks plus the spare-variable reserve.
    void admit(const Formula& f) const {
        check_atoms(f);
        for (int v : f.vars()) check_var(v);
        if (variables - static_cast<int>(f.vars().size()) < reserve)
            throw ScopeError("formula leaves fewer than " + std::to_string(reserve) + " spare variables");
    }

private:
    void check_atoms(const Formula& f) const {
        switch (f.kind()) {
            case FKind::Atom: {
                auto a = arity_of(f.pred());
                if (!a) throw LanguageError("unknown predicate '" + f.pred() + "'");
                if (*a != static_cast<int>(f.args().size()))
                    throw LanguageError("arity mismatch for '" + f.pred() + "': expected " + std::to_string(*a) + ", got " +
                                        std::to_string(f.args().size()));
                break;
            }
            case FKind::Top:
            case FKind::Bottom:
            case FKind::Meta: break;
            default:
                check_atoms(f.left());
                if (f.is_binary()) check_atoms(f.right());
        }
    }
};

// ---------------------------------------------------------------- substitution

// S(tau): atoms x -> tau o x, quantifier blocks W -> tau(W).
inline Formula substitute(const VarMap& tau, const Formula& f, const LanguageSpec* lang = nullptr) {
    switch (f.kind()) {
        case FKind::Atom: {
            std::vector<int> a;
            a.reserve(f.args().size());
            for (int v : f.args()) a.push_back(map_var(tau, v));
            if (lang)
                for (int v : a) lang->check_var(v);
            return Formula::atom(f.pred(), std::move(a));
        }
        case FKind::Top:
        case FKind::Bottom:
        case FKind::Meta: return f;
        case FKind::Neg: return Formula::neg(substitute(tau, f.left(), lang));
        case FKind::Forall:
        case FKind::Exists: {
            auto W = image(tau, f.block());
            if (lang)
                for (int v : W) lang->check_var(v);
            auto body = substitute(tau, f.body(), lang);
            return f.kind() == FKind::Forall ? Formula::forall(std::move(W), std::move(body))
                                             : Formula::exists(std::move(W), std::move(body));
        }
        case FKind::Oplus: return Formula::oplus(substitute(tau, f.left(), lang), substitute(tau, f.right(), lang));
        case FKind::Odot: return Formula::odot(substitute(tau, f.left(), lang), substitute(tau, f.right(), lang));
        case FKind::Implies: return Formula::implies(substitute(tau, f.left(), lang), substitute(tau, f.right(), lang));
    }
    return f;
}

// S_f(tau): below a block W continue with tau restricted to V - W, extended by the identity.
inline Formula substitute_free(const VarMap& tau, const Formula& f) {
    switch (f.kind()) {
        case FKind::Atom: {
            std::vector<int> a;
            for (int v : f.args()) a.push_back(map_var(tau, v));
            return Formula::atom(f.pred(), std::move(a));
        }
        case FKind::Top:
        case FKind::Bottom:
        case FKind::Meta: return f;
        case FKind::Neg: return Formula::neg(substitute_free(tau, f.left()));
        case FKind::Forall:
        case FKind::Exists: {
            VarMap sigma = tau;
            for (int w : f.block()) sigma.erase(w);
            auto body = substitute_free(sigma, f.body());
            return f.kind() == FKind::Forall ? Formula::forall(f.block(), std::move(body))
                                             : Formula::exists(f.block(), std::move(body));
        }
        case FKind::Oplus: return Formula::oplus(substitute_free(tau, f.left()), substitute_free(tau, f.right()));
        case FKind::Odot: return Formula::odot(substitute_free(tau, f.left()), substitute_free(tau, f.right()));
        case FKind::Implies: return Formula::implies(substitute_free(tau, f.left()), substitute_free(tau, f.right()));
    }
    return f;
}

// S_f(tau) S_f(tau0^-1) S(tau0) f, where tau0 shifts every variable past everything in
// sight. Bound variables end up fresh, so the final free substitution cannot capture.
inline Formula substitute_renaming_apart(const VarMap& tau, const Formula& f) {
    int top = f.vars().empty() ? 0 : *f.vars().rbegin();
    for (auto [k, v] : tau) top = std::max({top, k, v});
    const int off = top + 1;
    VarMap t0, t0inv;
    for (int v = 0; v <= top; ++v) {
        t0[v] = v + off;
        t0inv[v + off] = v;
    }
    return substitute_free(tau, substitute_free(t0inv, substitute(t0, f)));
}

// ---------------------------------------------------------------- rendering

namespace detail {

inline int precedence(FKind k) {
    switch (k) {
        case FKind::Implies: return 1;
        case FKind::Oplus: return 2;
        case FKind::Odot: return 3;
        case FKind::Neg:
        case FKind::Forall:
        case FKind::Exists: return 4;
        default: return 5;
    }
}

inline void render_into(const Formula& f, std::string& out, int min_prec) {
    const int p = precedence(f.kind());
    const bool paren = p < min_prec;
    if (paren) out += '(';
    switch (f.kind()) {
        case FKind::Atom:
            out += f.pred();
            if (!f.args().empty()) {
                out += '(';
                for (std::size_t i = 0; i < f.args().size(); ++i) {
                    if (i) out += ',';
                    out += 'v' + std::to_string(f.args()[i]);
                }
                out += ')';
            }
            break;
        case FKind::Top: out += 'T'; break;
        case FKind::Bottom: out += 'F'; break;
        case FKind::Meta: out += "$" + std::to_string(f.meta_index()); break;
        case FKind::Neg:
            out += '~';
            render_into(f.left(), out, 4);
            break;
        case FKind::Forall:
        case FKind::Exists: {
            out += f.kind() == FKind::Forall ? "A{" : "E{";
            bool first = true;
            for (int w : f.block()) {
                if (!first) out += ',';
                first = false;
                out += 'v' + std::to_string(w);
            }
            out += "} ";
            render_into(f.body(), out, 4);
            break;
        }
        case FKind::Implies:
            render_into(f.left(), out, 2);
            out += " -> ";
            render_into(f.right(), out, 1);
            break;
        case FKind::Oplus:
            render_into(f.left(), out, 2);
            out += " (+) ";
            render_into(f.right(), out, 3);
            break;
        case FKind::Odot:
            render_into(f.left(), out, 3);
            out += " (*) ";
            render_into(f.right(), out, 4);
            break;
    }
    if (paren) out += ')';
}

}  // namespace detail

inline std::string render(const Formula& f) {
    std::string s;
    detail::render_into(f, s, 0);
    return s;
}

// ---------------------------------------------------------------- parsing

namespace detail {

class Parser {
public:
    Parser(std::string_view s, const LanguageSpec* lang) : s_(s), lang_(lang) {}

    Formula run() {
        auto f = implication();
        ws();
        if (pos_ != s_.size()) throw ParseError("syntax error: unexpected '" + std::string(1, s_[pos_]) + "'", pos_);
        return f;
    }

private:
    void ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool peek(std::string_view t) {
        ws();
        return s_.substr(pos_, t.size()) == t;
    }
    bool eat(std::string_view t) {
        if (!peek(t)) return false;
        pos_ += t.size();
        return true;
    }
    void expect(std::string_view t) {
        if (!eat(t)) throw ParseError("syntax error: expected '" + std::string(t) + "'", pos_);
    }
    std::string ident() {
        ws();
        std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        if (start == pos_) throw ParseError("syntax error: expected an identifier", pos_);
        if (!std::isalpha(static_cast<unsigned char>(s_[start])) && s_[start] != '_')
            throw ParseError("syntax error: identifier must start with a letter", start);
        return std::string(s_.substr(start, pos_ - start));
    }
    int variable() {
        ws();
        std::size_t at = pos_;
        auto id = ident();
        if (!is_variable_name(id)) throw ParseError("syntax error: expected a variable, got '" + id + "'", at);
        int v = std::stoi(id.substr(1));
        if (lang_ && v >= lang_->variables) throw ScopeError("variable " + id + " is not in the language");
        return v;
    }

    Formula implication() {
        auto l = sum();
        if (eat("->")) return Formula::implies(std::move(l), implication());
        return l;
    }
    Formula sum() {
        auto l = product();
        while (eat("(+)")) l = Formula::oplus(std::move(l), product());
        return l;
    }
    Formula product() {
        auto l = unary();
        while (eat("(*)")) l = Formula::odot(std::move(l), unary());
        return l;
    }
    Formula unary() {
        if (eat("~")) return Formula::neg(unary());
        ws();
        if (pos_ + 1 < s_.size() && (s_[pos_] == 'A' || s_[pos_] == 'E')) {
            std::size_t save = pos_;
            char q = s_[pos_++];
            if (eat("{")) {
                VarSet W;
                if (!eat("}")) {
                    do W.insert(variable());
                    while (eat(","));
                    expect("}");
                }
                auto body = unary();
                return q == 'A' ? Formula::forall(std::move(W), std::move(body)) : Formula::exists(std::move(W), std::move(body));
            }
            pos_ = save;
        }
        return primary();
    }
    Formula primary() {
        ws();
        if (pos_ >= s_.size()) throw ParseError("syntax error: unexpected end of input", pos_);
        if (peek("(+)") || peek("(*)")) throw ParseError("syntax error: missing operand", pos_);
        if (eat("(")) {
            auto f = implication();
            expect(")");
            return f;
        }
        std::size_t at = pos_;
        auto name = ident();
        if (name == "T") return Formula::top();
        if (name == "F") return Formula::bottom();
        if (is_variable_name(name)) throw ParseError("syntax error: variable '" + name + "' used as a formula", at);
        std::vector<int> args;
        if (peek("(") && !peek("(+)") && !peek("(*)")) {
            expect("(");
            if (!eat(")")) {
                do args.push_back(variable());
                while (eat(","));
                expect(")");
            }
        }
        check_arity(name, static_cast<int>(args.size()), at);
        return Formula::atom(std::move(name), std::move(args));
    }
    void check_arity(const std::string& name, int n, std::size_t at) {
        if (lang_) {
            auto a = lang_->arity_of(name);
            if (!a) throw LanguageError("unknown predicate '" + name + "' at position " + std::to_string(at));
            if (*a != n)
                throw LanguageError("arity mismatch for '" + name + "' at position " + std::to_string(at) + ": expected " +
                                    std::to_string(*a) + ", got " + std::to_string(n));
            return;
        }
        auto [it, fresh] = seen_.emplace(name, n);
        if (!fresh && it->second != n)
            throw LanguageError("arity mismatch for '" + name + "' at position " + std::to_string(at) + ": expected " +
                                std::to_string(it->second) + ", got " + std::to_string(n));
    }

    std::string_view s_;
    const LanguageSpec* lang_;
    std::size_t pos_ = 0;
    std::map<std::string, int> seen_;
};

}  // namespace detail

inline Formula parse(std::string_view text, const LanguageSpec* lang = nullptr) { return detail::Parser(text, lang).run(); }
inline Formula parse(std::string_view text, const LanguageSpec& lang) { return parse(text, &lang); }

// Predicate name -> arity over a set of formulas; throws on inconsistent use.
inline std::map<std::string, int> collect_predicates(const std::vector<Formula>& fs) {
    std::map<std::string, int> out;
    auto walk = [&](auto&& self, const Formula& f) -> void {
        switch (f.kind()) {
            case FKind::Atom: {
                auto [it, fresh] = out.emplace(f.pred(), static_cast<int>(f.args().size()));
                if (!fresh && it->second != static_cast<int>(f.args().size()))
                    throw LanguageError("predicate '" + f.pred() + "' used with two arities");
                break;
            }
            case FKind::Top:
            case FKind::Bottom:
            case FKind::Meta: break;
            default:
                self(self, f.left());
                if (f.is_binary()) self(self, f.right());
        }
    };
    for (const auto& f : fs) walk(walk, f);
    return out;
}

// ---------------------------------------------------------------- random formulas

struct RandomFormulaSpec {
    std::vector<PredicateDecl> predicates;
    int variables = 3;
    int max_depth = 3;
    int max_block = 2;
    bool quantifiers = true;
};

inline Formula random_formula(std::mt19937_64& rng, const RandomFormulaSpec& spec, int depth = -1) {
    if (depth < 0) depth = spec.max_depth;
    auto pick = [&](std::uint64_t n) { return static_cast<int>(rng() % n); };
    auto leaf = [&]() {
        int r = pick(10);
        if (r == 0) return Formula::top();
        if (r == 1) return Formula::bottom();
        const auto& p = spec.predicates[pick(spec.predicates.size())];
        std::vector<int> args;
        for (int i = 0; i < p.arity; ++i) args.push_back(pick(static_cast<std::uint64_t>(spec.variables)));
        return Formula::atom(p.name, std::move(args));
    };
    if (depth == 0 || pick(4) == 0) return leaf();
    int choice = pick(spec.quantifiers ? 6 : 4);
    switch (choice) {
        case 0: return Formula::neg(random_formula(rng, spec, depth - 1));
        case 1: return Formula::oplus(random_formula(rng, spec, depth - 1), random_formula(rng, spec, depth - 1));
        case 2: return Formula::odot(random_formula(rng, spec, depth - 1), random_formula(rng, spec, depth - 1));
        case 3: return Formula::implies(random_formula(rng, spec, depth - 1), random_formula(rng, spec, depth - 1));
        default: {
            VarSet W;
            int k = 1 + pick(static_cast<std::uint64_t>(spec.max_block));
            for (int i = 0; i < k; ++i) W.insert(pick(static_cast<std::uint64_t>(spec.variables)));
            auto body = random_formula(rng, spec, depth - 1);
            return choice == 4 ? Formula::forall(std::move(W), std::move(body)) : Formula::exists(std::move(W), std::move(body));
        }
    }
}

}  // namespace mvlab

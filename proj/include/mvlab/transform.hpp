#pragma once

#include <algorithm>
#include <cctype>
#include <compare>
#include <concepts>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mvlab/errors.hpp"

namespace mvlab {

// Total map on {0,..,n-1}.
class FinTransformation {
public:
    FinTransformation() = default;
    explicit FinTransformation(std::vector<int> table) : t_(std::move(table)) {
        const int n = size();
        for (int v : t_)
            if (v < 0 || v >= n) throw IndexOutOfRange("transformation value " + std::to_string(v) + " outside index set");
    }

    static FinTransformation identity(int n) {
        std::vector<int> t(n);
        for (int i = 0; i < n; ++i) t[i] = i;
        return FinTransformation(std::move(t));
    }
    static FinTransformation replacement(int n, int i, int j) {
        check(n, i), check(n, j);
        auto t = identity(n);
        t.t_[i] = j;
        return t;
    }
    static FinTransformation transposition(int n, int i, int j) {
        check(n, i), check(n, j);
        auto t = identity(n);
        std::swap(t.t_[i], t.t_[j]);
        return t;
    }

    int size() const { return static_cast<int>(t_.size()); }
    int operator()(int i) const {
        check(size(), i);
        return t_[i];
    }
    const std::vector<int>& table() const { return t_; }
    bool is_identity() const {
        for (int i = 0; i < size(); ++i)
            if (t_[i] != i) return false;
        return true;
    }

    std::string to_string() const {
        std::string s = "{";
        for (int i = 0; i < size(); ++i) {
            if (i) s += ",";
            s += std::to_string(i) + "->" + std::to_string(t_[i]);
        }
        return s + "}";
    }

    auto operator<=>(const FinTransformation&) const = default;

    static void check(int n, int i) {
        if (i < 0 || i >= n) throw IndexOutOfRange("index " + std::to_string(i) + " outside {0.." + std::to_string(n - 1) + "}");
    }

private:
    std::vector<int> t_;
};

// (f o g)(x) = f(g(x))
inline FinTransformation compose(const FinTransformation& f, const FinTransformation& g) {
    if (f.size() != g.size()) throw IndexSetMismatch("composing transformations on different index sets");
    std::vector<int> t(g.size());
    for (int i = 0; i < g.size(); ++i) t[i] = f.table()[g.table()[i]];
    return FinTransformation(std::move(t));
}

inline std::vector<int> support(const FinTransformation& f) {
    std::vector<int> s;
    for (int i = 0; i < f.size(); ++i)
        if (f.table()[i] != i) s.push_back(i);
    return s;
}

// f[i|j]: agrees with f except that i goes to j.
inline FinTransformation modify(const FinTransformation& f, int i, int j) {
    FinTransformation::check(f.size(), i);
    FinTransformation::check(f.size(), j);
    auto t = f.table();
    t[i] = j;
    return FinTransformation(std::move(t));
}

// Map on omega: finitely many overrides, otherwise x -> max(x + shift, 0).
class OmegaMap {
public:
    using Int = std::int64_t;

    OmegaMap() = default;
    OmegaMap(std::map<Int, Int> overrides, Int shift) : over_(std::move(overrides)), shift_(shift) {
        for (auto [k, v] : over_)
            if (k < 0 || v < 0) throw IndexOutOfRange("omega maps act on natural numbers");
        normalize();
    }

    static OmegaMap identity() { return {}; }
    static OmegaMap suc() { return OmegaMap({}, 1); }
    static OmegaMap pred() { return OmegaMap({}, -1); }
    static OmegaMap replacement(Int i, Int j) { return OmegaMap({{i, j}}, 0); }
    static OmegaMap transposition(Int i, Int j) { return OmegaMap({{i, j}, {j, i}}, 0); }

    Int tail(Int x) const { return std::max<Int>(x + shift_, 0); }
    Int operator()(Int x) const {
        if (x < 0) throw IndexOutOfRange("negative argument");
        auto it = over_.find(x);
        return it == over_.end() ? tail(x) : it->second;
    }
    Int shift() const { return shift_; }
    const std::map<Int, Int>& overrides() const { return over_; }

    // From here on the map is x -> x + shift with no clamping and no overrides.
    Int threshold() const {
        Int n = over_.empty() ? 0 : over_.rbegin()->first + 1;
        return std::max({n, -shift_, Int(0)});
    }

    std::string to_string() const {
        std::string s;
        if (shift_ == 0)
            s = "id";
        else
            s = "tail" + std::string(shift_ > 0 ? "+" : "") + std::to_string(shift_);
        if (!over_.empty()) {
            s += " {";
            bool first = true;
            for (auto [k, v] : over_) {
                if (!first) s += ",";
                first = false;
                s += std::to_string(k) + "->" + std::to_string(v);
            }
            s += "}";
        }
        return s;
    }

    auto operator<=>(const OmegaMap&) const = default;

private:
    void normalize() {
        for (auto it = over_.begin(); it != over_.end();) {
            if (it->second == tail(it->first))
                it = over_.erase(it);
            else
                ++it;
        }
    }

    std::map<Int, Int> over_;
    Int shift_ = 0;
};

inline OmegaMap compose(const OmegaMap& f, const OmegaMap& g) {
    using Int = OmegaMap::Int;
    const Int n = std::max(g.threshold(), f.threshold() - g.shift());
    std::map<Int, Int> over;
    for (Int x = 0; x < n; ++x) over[x] = f(g(x));
    return OmegaMap(std::move(over), f.shift() + g.shift());
}

inline OmegaMap power(const OmegaMap& f, int n) {
    OmegaMap r;
    for (int i = 0; i < n; ++i) r = compose(f, r);
    return r;
}

inline OmegaMap modify(const OmegaMap& f, OmegaMap::Int i, OmegaMap::Int j) {
    auto over = f.overrides();
    over[i] = j;
    return OmegaMap(std::move(over), f.shift());
}

struct SupportInfo {
    bool infinite = false;
    // the support when finite; otherwise the finitely many fixed points
    std::vector<OmegaMap::Int> points;
};

inline SupportInfo support(const OmegaMap& f) {
    SupportInfo s;
    s.infinite = f.shift() != 0;
    for (OmegaMap::Int x = 0; x < f.threshold(); ++x)
        if ((f(x) != x) != s.infinite) s.points.push_back(x);
    return s;
}

// omega minus the range of f; always finite because the tail is a translation.
inline std::set<OmegaMap::Int> range_complement(const OmegaMap& f) {
    const auto n = f.threshold();
    std::set<OmegaMap::Int> out;
    for (OmegaMap::Int v = 0; v < n + f.shift(); ++v) out.insert(v);
    for (OmegaMap::Int x = 0; x < n; ++x) out.erase(f(x));
    return out;
}

// ---------------------------------------------------------------- closure

template <class T>
concept Transformation = std::totally_ordered<T> && requires(const T& a, const T& b) {
    { compose(a, b) } -> std::same_as<T>;
};

template <Transformation T>
struct SemigroupSpec {
    std::vector<T> generators;
    std::size_t cap = 100000;
};

template <Transformation T>
struct Closure {
    std::vector<T> elements;  // sorted
    bool truncated = false;
};

template <Transformation T>
Closure<T> semigroup_closure(const SemigroupSpec<T>& spec) {
    std::set<T> seen;
    std::deque<T> queue;
    Closure<T> out;
    auto add = [&](const T& t) {
        if (seen.count(t)) return true;
        if (seen.size() >= spec.cap) {
            out.truncated = true;
            return false;
        }
        seen.insert(t);
        queue.push_back(t);
        return true;
    };
    for (const auto& g : spec.generators)
        if (!add(g)) break;
    while (!queue.empty() && !out.truncated) {
        T a = queue.front();
        queue.pop_front();
        for (const auto& g : spec.generators)
            if (!add(compose(a, g))) break;
    }
    out.elements.assign(seen.begin(), seen.end());
    return out;
}

// All replacements and transpositions on {0..n-1}.
inline std::vector<FinTransformation> replacement_generators(int n) {
    std::vector<FinTransformation> g;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            g.push_back(FinTransformation::replacement(n, i, j));
            if (i < j) g.push_back(FinTransformation::transposition(n, i, j));
        }
    if (n == 1) g.push_back(FinTransformation::identity(1));
    return g;
}

// ---------------------------------------------------------------- literals

// id | suc | pred | [i|j] | [i,j] | {a->b,...} | f.g  (f after g)
inline OmegaMap parse_transformation(std::string_view s) {
    std::size_t pos = 0;
    auto fail = [&](const std::string& m) { return ParseError("transformation literal: " + m, pos); };
    auto ws = [&] {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    };
    auto number = [&]() -> OmegaMap::Int {
        ws();
        std::size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (start == pos) throw fail("expected a number");
        return std::stoll(std::string(s.substr(start, pos - start)));
    };
    auto expect = [&](char c) {
        ws();
        if (pos >= s.size() || s[pos] != c) throw fail(std::string("expected '") + c + "'");
        ++pos;
    };
    auto atom = [&]() -> OmegaMap {
        ws();
        if (s.substr(pos, 3) == "suc") {
            pos += 3;
            return OmegaMap::suc();
        }
        if (s.substr(pos, 4) == "pred") {
            pos += 4;
            return OmegaMap::pred();
        }
        if (s.substr(pos, 2) == "id") {
            pos += 2;
            return OmegaMap::identity();
        }
        if (pos < s.size() && s[pos] == '[') {
            ++pos;
            auto i = number();
            ws();
            if (pos < s.size() && (s[pos] == '|' || s[pos] == ',')) {
                char sep = s[pos++];
                auto j = number();
                expect(']');
                return sep == '|' ? OmegaMap::replacement(i, j) : OmegaMap::transposition(i, j);
            }
            throw fail("expected '|' or ','");
        }
        if (pos < s.size() && s[pos] == '{') {
            ++pos;
            std::map<OmegaMap::Int, OmegaMap::Int> over;
            ws();
            if (pos < s.size() && s[pos] == '}') {
                ++pos;
                return OmegaMap::identity();
            }
            while (true) {
                auto a = number();
                expect('-');
                expect('>');
                auto b = number();
                if (over.count(a)) throw fail("duplicate key");
                over[a] = b;
                ws();
                if (pos < s.size() && s[pos] == ',') {
                    ++pos;
                    continue;
                }
                expect('}');
                break;
            }
            return OmegaMap(std::move(over), 0);
        }
        throw fail("unexpected input");
    };
    OmegaMap r = atom();
    ws();
    while (pos < s.size() && s[pos] == '.') {
        ++pos;
        r = compose(r, atom());
        ws();
    }
    if (pos != s.size()) throw fail("trailing input");
    return r;
}

inline FinTransformation to_finite(const OmegaMap& f, int n) {
    std::vector<int> t(n);
    for (int i = 0; i < n; ++i) {
        auto v = f(i);
        if (v >= n) throw IndexOutOfRange("transformation leaves the index set {0.." + std::to_string(n - 1) + "}");
        t[i] = static_cast<int>(v);
    }
    return FinTransformation(std::move(t));
}

inline FinTransformation parse_fin_transformation(std::string_view s, int n) { return to_finite(parse_transformation(s), n); }

// ---------------------------------------------------------------- richness

struct RichCheck {
    std::string condition;
    int n = 0;  // 0 for conditions that do not depend on n
    bool passed = true;
    std::string detail;
};

struct RichnessReport {
    std::vector<RichCheck> checks;
    std::size_t closure_size = 0;
    bool closure_truncated = false;
    std::size_t sampled = 0;
    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const RichCheck& c) { return c.passed; });
    }
};

namespace detail {

// Membership in the semigroup generated by all finite transformations together with
// sigma and pi, certified by a factorisation through a power of suc or pred.
inline bool certify_member(const OmegaMap& t, const OmegaMap& sigma, const OmegaMap& pi,
                           const std::set<OmegaMap>& closure) {
    using Int = OmegaMap::Int;
    if (t.shift() == 0) return true;
    if (t.shift() > 0 && sigma == OmegaMap::suc()) {
        const Int d = t.shift();
        std::map<Int, Int> g;
        for (Int y = d; y < t.threshold() + d; ++y) g[y] = t(y - d);
        OmegaMap gm(std::move(g), 0);
        return compose(gm, power(sigma, static_cast<int>(d))) == t;
    }
    if (t.shift() < 0 && pi == OmegaMap::pred()) {
        const Int k = -t.shift();
        std::map<Int, Int> g;
        for (Int x = 0; x < t.threshold(); ++x) g[x] = t(x) + k;
        OmegaMap gm(std::move(g), 0);
        return compose(power(pi, static_cast<int>(k)), gm) == t;
    }
    return closure.count(t) > 0;
}

}  // namespace detail

inline RichnessReport check_strongly_rich(const OmegaMap& sigma, const OmegaMap& pi, const SemigroupSpec<OmegaMap>& ambient,
                                          int N, std::size_t samples = 32, OmegaMap::Int probe = 4) {
    RichnessReport r;
    const auto id = OmegaMap::identity();
    auto pis = compose(pi, sigma);
    r.checks.push_back({"pi o sigma = Id", 0, pis == id, "pi o sigma = " + pis.to_string()});
    const auto comp = range_complement(sigma);
    r.checks.push_back({"Rg sigma != omega", 0, !comp.empty(), std::to_string(comp.size()) + " values missed"});

    OmegaMap sn = id, pn = id;
    for (int n = 1; n <= N; ++n) {
        sn = compose(sigma, sn);
        pn = compose(pi, pn);
        auto sp = compose(sn, pn);
        auto sup = support(sp);
        r.checks.push_back({"supp(sigma^n o pi^n) finite", n, !sup.infinite, sp.to_string()});
        bool inside = false;
        std::string detail;
        if (!sup.infinite) {
            auto missing = range_complement(sn);
            inside = std::all_of(sup.points.begin(), sup.points.end(), [&](auto x) { return missing.count(x) > 0; });
            detail = std::to_string(sup.points.size()) + " support points, " + std::to_string(missing.size()) +
                     " outside Rg sigma^n";
        }
        r.checks.push_back({"supp(sigma^n o pi^n) in omega - Rg sigma^n", n, inside, detail});
    }

    auto closure = semigroup_closure(ambient);
    r.closure_size = closure.elements.size();
    r.closure_truncated = closure.truncated;
    std::set<OmegaMap> cl(closure.elements.begin(), closure.elements.end());
    const std::size_t step = std::max<std::size_t>(1, closure.elements.size() / std::max<std::size_t>(samples, 1));
    RichCheck c1{"(1) tau[i|j] in T", 0, true, ""};
    RichCheck c3{"(3) (sigma o tau o pi)[(omega - Rg sigma)|Id] in T", 0, true, ""};
    for (std::size_t k = 0; k < closure.elements.size() && r.sampled < samples; k += step, ++r.sampled) {
        const auto& tau = closure.elements[k];
        for (OmegaMap::Int i = 0; i < probe && c1.passed; ++i)
            for (OmegaMap::Int j = 0; j < probe && c1.passed; ++j)
                if (!detail::certify_member(modify(tau, i, j), sigma, pi, cl)) {
                    c1.passed = false;
                    c1.detail = "fails at tau = " + tau.to_string();
                }
        auto h = compose(sigma, compose(tau, pi));
        auto over = h.overrides();
        for (auto x : comp) over[x] = x;
        OmegaMap hh(std::move(over), h.shift());
        if (c3.passed && !detail::certify_member(hh, sigma, pi, cl)) {
            c3.passed = false;
            c3.detail = "fails at tau = " + tau.to_string();
        }
    }
    if (c1.passed) c1.detail = std::to_string(r.sampled) + " sampled maps";
    if (c3.passed) c3.detail = std::to_string(r.sampled) + " sampled maps";
    r.checks.push_back(c1);
    r.checks.push_back(c3);
    return r;
}

}  // namespace mvlab

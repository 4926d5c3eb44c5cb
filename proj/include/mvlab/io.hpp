#pragma once

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "mvlab/calculus.hpp"
#include "mvlab/errors.hpp"
#include "mvlab/mv_core.hpp"
#include "mvlab/pavelka.hpp"
#include "mvlab/polyadic.hpp"
#include "mvlab/rational.hpp"
#include "mvlab/semantics.hpp"
#include "mvlab/syntax.hpp"
#include "mvlab/transform.hpp"

namespace mvlab::io {

using json = nlohmann::ordered_json;

// Malformed input files.
struct FormatError : Error {
    using Error::Error;
};

inline std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) throw Error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) out += hex[md[i] >> 4], out += hex[md[i] & 15];
    return out;
}

// "-" reads standard input.
inline std::string read_text(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline json parse_json(const std::string& text, const std::string& where) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(where + ": " + e.what(), e.byte);
    }
}

// ---------------------------------------------------------------- small values

inline Rational rational_of(const json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    throw FormatError("expected a rational as a \"p/q\" string, got " + j.dump());
}

inline json to_json(const Rational& r) { return to_string(r); }

template <class T>
T field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field \"") + key + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw FormatError(std::string("field \"") + key + "\" has the wrong type");
    }
}

// "(0,1)" -> {0, 1}
inline std::vector<int> parse_tuple(const std::string& s) {
    if (s.size() < 2 || s.front() != '(' || s.back() != ')') throw FormatError("tuple key '" + s + "' is not of the form (a,b,...)");
    std::vector<int> out;
    std::string body = s.substr(1, s.size() - 2);
    if (body.empty()) return out;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            int v = std::stoi(item, &used);
            if (used != item.size()) throw FormatError("bad tuple entry in '" + s + "'");
            out.push_back(v);
        } catch (const std::logic_error&) {
            throw FormatError("bad tuple entry in '" + s + "'");
        }
    }
    return out;
}

inline std::string tuple_key(const std::vector<int>& t) {
    std::string s = "(";
    for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + std::to_string(t[i]);
    return s + ")";
}

inline std::vector<int> parse_index_list(const std::string& s) {
    std::vector<int> out;
    if (s.empty()) return out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stoi(item));
        } catch (const std::logic_error&) {
            throw FormatError("bad index '" + item + "'");
        }
    }
    return out;
}

// ---------------------------------------------------------------- algebras

inline TableSpec table_from_json(const json& j) {
    TableSpec t;
    if (!j.contains("carrier") || !j["carrier"].is_array()) throw FormatError("missing field \"carrier\"");
    for (const auto& c : j["carrier"]) t.carrier.push_back(c.is_string() ? c.get<std::string>() : c.dump());
    t.oplus = field<std::vector<std::vector<int>>>(j, "oplus");
    t.neg = field<std::vector<int>>(j, "neg");
    t.zero = field<int>(j, "zero");
    t.one = field<int>(j, "one");
    return t;
}

inline json to_json(const TableSpec& t) {
    return json{{"carrier", t.carrier}, {"oplus", t.oplus}, {"neg", t.neg}, {"zero", t.zero}, {"one", t.one}};
}

inline json to_json(const AxiomReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks) {
        json w = json::array();
        for (const auto& s : c.witness) w.push_back(s);
        checks.push_back({{"group", c.group}, {"law", c.law}, {"passed", c.passed}, {"checked", c.checked}, {"witness", w}});
    }
    return json{{"passed", r.passed()}, {"checks", checks}};
}

// ---------------------------------------------------------------- languages, models, proofs

inline LanguageSpec language_from_json(const json& j) {
    LanguageSpec L;
    L.variables = field<int>(j, "variables");
    if (j.contains("reserve")) L.reserve = field<int>(j, "reserve");
    if (j.contains("scope")) {
        auto s = field<std::string>(j, "scope");
        if (s == "finite") L.scope = ScopeFamily::FiniteSubsets;
        else if (s == "all") L.scope = ScopeFamily::AllSubsets;
        else throw FormatError("scope must be \"finite\" or \"all\"");
    }
    if (j.contains("predicates"))
        for (const auto& p : j["predicates"]) L.predicates.push_back({field<std::string>(p, "name"), field<int>(p, "arity")});
    L.validate();
    return L;
}

inline Model model_from_json(const json& j) {
    Model m(field<int>(j, "domain"), field<int>(j, "chain"));
    if (!j.contains("predicates")) return m;
    for (const auto& [name, p] : j["predicates"].items()) {
        const int arity = field<int>(p, "arity");
        const auto& tab = p.contains("table") ? p["table"] : json::object();
        std::vector<int> values(m.tuple_count(arity), -1);
        if (tab.is_array()) {
            if (tab.size() != values.size()) throw MissingTable("table for '" + name + "' is not total");
            for (std::size_t i = 0; i < values.size(); ++i) values[i] = m.chain().index_of(rational_of(tab[i]));
        } else {
            for (const auto& [key, v] : tab.items()) {
                auto t = parse_tuple(key);
                if (static_cast<int>(t.size()) != arity) throw FormatError("tuple " + key + " has the wrong arity for '" + name + "'");
                values[m.tuple_index(t)] = m.chain().index_of(rational_of(v));
            }
        }
        for (std::size_t i = 0; i < values.size(); ++i)
            if (values[i] < 0) throw MissingTable("table for '" + name + "' has no entry at position " + std::to_string(i));
        m.set_table(name, arity, std::move(values));
    }
    return m;
}

inline json to_json(const Model& m) {
    json preds = json::object();
    for (const auto& [name, t] : m.tables()) {
        json tab = json::object();
        std::vector<int> tuple(static_cast<std::size_t>(t.arity), 0);
        for (std::size_t i = 0; i < t.values.size(); ++i) {
            std::size_t r = i;
            for (int k = t.arity - 1; k >= 0; --k) tuple[k] = static_cast<int>(r % static_cast<std::size_t>(m.domain())), r /= static_cast<std::size_t>(m.domain());
            tab[tuple_key(tuple)] = to_string(m.chain().value(t.values[i]));
        }
        preds[name] = {{"arity", t.arity}, {"table", tab}};
    }
    return json{{"domain", m.domain()}, {"chain", m.chain().size()}, {"predicates", preds}};
}

inline std::vector<Formula> gamma_from_json(const json& j, const LanguageSpec* lang = nullptr) {
    const json& list = j.is_object() ? j.at("gamma") : j;
    if (!list.is_array()) throw FormatError("gamma must be a list of formulas");
    std::vector<Formula> out;
    for (const auto& f : list) out.push_back(parse(f.get<std::string>(), lang));
    return out;
}

inline VarMap varmap_from_json(const json& j) {
    VarMap m;
    for (const auto& [k, v] : j.items()) {
        try {
            m[std::stoi(k[0] == 'v' ? k.substr(1) : k)] = v.get<int>();
        } catch (const std::exception&) {
            throw FormatError("bad substitution entry '" + k + "'");
        }
    }
    return m;
}

inline Proof proof_from_json(const json& j, const LanguageSpec* lang = nullptr) {
    const json& list = j.is_object() ? j.at("steps") : j;
    if (!list.is_array()) throw FormatError("a proof is a list of steps");
    Proof p;
    for (const auto& s : list) {
        ProofStep st;
        auto rn = field<std::string>(s, "rule");
        auto r = rule_from_name(rn);
        if (!r) throw FormatError("unknown rule '" + rn + "'");
        st.rule = *r;
        st.formula = parse(field<std::string>(s, "formula"), lang);
        if (s.contains("refs")) st.refs = field<std::vector<int>>(s, "refs");
        if (s.contains("schema")) {
            auto sn = field<std::string>(s, "schema");
            st.schema = schema_from_name(sn);
            if (!st.schema) throw FormatError("unknown axiom schema '" + sn + "'");
        }
        if (s.contains("tau")) st.tau = varmap_from_json(s["tau"]);
        if (s.contains("vars")) {
            auto v = field<std::vector<int>>(s, "vars");
            st.vars = VarSet(v.begin(), v.end());
        }
        p.steps.push_back(std::move(st));
    }
    return p;
}

// ---------------------------------------------------------------- set algebras

// An element is an object from assignment tuples "(x0,...)" to values, or a list of values in
// point order (digit i is x(i)).
inline FunctionalSetAlgebra::Element element_from_json(const json& j, int dim, int base, int chain) {
    std::size_t points = 1;
    for (int i = 0; i < dim; ++i) points *= static_cast<std::size_t>(base);
    auto to_index = [&](const json& v) {
        Rational r = rational_of(v);
        Rational scaled = r * (chain - 1);
        if (r < 0 || r > 1 || scaled.denominator() != 1) throw CarrierError("value " + to_string(r) + " not in the chain");
        return static_cast<std::uint8_t>(scaled.numerator());
    };
    FunctionalSetAlgebra::Element e(points, 0);
    std::vector<bool> seen(points, false);
    if (j.is_array()) {
        if (j.size() != points) throw CarrierError("element is not total on the assignments");
        for (std::size_t c = 0; c < points; ++c) e[c] = to_index(j[c]), seen[c] = true;
    } else {
        for (const auto& [k, v] : j.items()) {
            auto x = parse_tuple(k);
            if (static_cast<int>(x.size()) != dim) throw FormatError("assignment " + k + " has the wrong length");
            std::size_t c = 0;
            for (int i = dim - 1; i >= 0; --i) {
                if (x[i] < 0 || x[i] >= base) throw CarrierError("assignment " + k + " leaves the base set");
                c = c * static_cast<std::size_t>(base) + static_cast<std::size_t>(x[i]);
            }
            e[c] = to_index(v);
            seen[c] = true;
        }
    }
    for (std::size_t c = 0; c < points; ++c)
        if (!seen[c]) throw CarrierError("element is not total on the assignments");
    return e;
}

inline json element_to_json(const FunctionalSetAlgebra& A, const FunctionalSetAlgebra::Element& e) {
    json out = json::object();
    for (int c = 0; c < A.points(); ++c) out[tuple_key(A.point(c))] = to_string(Rational(e[c], A.chain_length() - 1));
    return out;
}

inline SetAlgebraSpec set_algebra_spec_from_json(const json& j, std::optional<std::size_t> cap = std::nullopt) {
    SetAlgebraSpec s;
    s.dim = field<int>(j, "dim");
    s.base = field<int>(j, "base");
    s.chain = field<int>(j, "chain");
    if (s.dim < 1 || s.dim > 8) throw FormatError("dim must be between 1 and 8");
    if (s.base < 1) throw FormatError("base must be positive");
    if (s.chain < 2) throw FormatError("chain must be at least 2");
    if (j.contains("cap")) s.cap = field<std::size_t>(j, "cap");
    if (cap) s.cap = *cap;
    if (j.contains("generators"))
        for (const auto& g : j["generators"]) s.generators.push_back(element_from_json(g, s.dim, s.base, s.chain));
    if (j.contains("G")) {
        std::vector<FinTransformation> G;
        for (const auto& t : j["G"]) G.push_back(parse_fin_transformation(t.get<std::string>(), s.dim));
        s.G = G;
    }
    if (j.contains("T")) {
        std::vector<IndexMask> T;
        for (const auto& t : j["T"]) T.push_back(mask_of(t.get<std::vector<int>>()));
        s.T = T;
    }
    return s;
}

inline json dump(const FunctionalSetAlgebra& A) {
    json elems = json::array();
    for (int i = 0; i < A.size(); ++i) elems.push_back(element_to_json(A, A.element(i)));
    json G = json::array(), T = json::array();
    for (const auto& t : A.transformations()) G.push_back(t.to_string());
    for (auto J : A.scopes()) T.push_back(mask_members(J));
    return json{{"dim", A.dim()}, {"base", A.base()}, {"chain", A.chain_length()}, {"size", A.size()},
                {"G", G}, {"T", T}, {"elements", elems}};
}

// Constants declared as {"1/2": elementIndex, ...}; "full" takes every constant function in the carrier.
inline std::map<Rational, int> constants_from_json(const json& j, int carrier_size) {
    std::map<Rational, int> out;
    for (const auto& [k, v] : j.items()) {
        int e = v.get<int>();
        if (e < 0 || e >= carrier_size) throw CarrierError("constant " + k + " names element " + std::to_string(e) + " outside the carrier");
        out[parse_rational(k)] = e;
    }
    return out;
}

// An algebra file holds a table algebra ("carrier"), a chain ("chain" alone) or a generated
// functional set algebra ("dim"), optionally with truth constants.
struct LoadedAlgebra {
    MVAlgebra mv = MVAlgebra::chain(2);
    std::optional<FunctionalSetAlgebra> functional;
    std::optional<PavelkaAlgebra> pavelka;
};

inline LoadedAlgebra load_algebra(const json& j, std::optional<std::size_t> cap = std::nullopt) {
    LoadedAlgebra L;
    if (j.contains("dim")) {
        L.functional = FunctionalSetAlgebra::build_generated(set_algebra_spec_from_json(j, cap));
        L.mv = L.functional->mv();
    } else if (j.contains("carrier")) {
        L.mv = MVAlgebra::table(table_from_json(j));
    } else if (j.contains("chain")) {
        L.mv = MVAlgebra::chain(field<int>(j, "chain"));
    } else {
        throw FormatError("algebra file needs \"dim\", \"carrier\" or \"chain\"");
    }
    if (j.contains("constants")) {
        const auto& c = j["constants"];
        if (c.is_string() && c.get<std::string>() == "full") {
            if (L.functional) L.pavelka = functional_constants(*L.functional);
            else if (L.mv.kind() == MVAlgebra::Kind::Chain) L.pavelka = full_constants(L.mv.size());
            else throw FormatError("\"full\" constants need a chain or a set algebra");
        } else {
            L.pavelka = PavelkaAlgebra{L.mv, constants_from_json(c, L.mv.size())};
        }
    }
    return L;
}

// Filter file: {"generators": [...]} for the generated filter, or {"elements": [...]} for an
// explicit member list, which must already be a filter.
inline Filter filter_from_json(const json& j, const MVAlgebra& M) {
    if (j.contains("elements")) {
        std::vector<bool> mask(static_cast<std::size_t>(M.size()), false);
        for (int e : field<std::vector<int>>(j, "elements")) {
            M.check_index(e);
            mask[e] = true;
        }
        if (!is_filter(M, mask)) throw NotAFilter("listed elements do not form a filter");
        return Filter(M, mask);
    }
    auto g = field<std::vector<int>>(j, "generators");
    for (int e : g) M.check_index(e);
    return filter_generate(M, g);
}

}  // namespace mvlab::io

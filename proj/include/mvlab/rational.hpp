#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "mvlab/errors.hpp"

namespace mvlab {

using Rational = boost::rational<std::int64_t>;
using MVValue = Rational;

inline std::string to_string(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

// Accepts "p/q", "p" and plain decimals such as "0.3".
inline Rational parse_rational(std::string_view s) {
    auto fail = [&] { return ParseError("bad rational '" + std::string(s) + "'", 0); };
    if (s.empty()) throw fail();
    auto to_int = [&](std::string_view t) -> std::int64_t {
        if (t.empty()) throw fail();
        std::size_t pos = 0;
        std::int64_t v = 0;
        try {
            v = std::stoll(std::string(t), &pos);
        } catch (const std::exception&) {
            throw fail();
        }
        if (pos != t.size()) throw fail();
        return v;
    };
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        auto den = to_int(s.substr(slash + 1));
        if (den == 0) throw fail();
        return Rational(to_int(s.substr(0, slash)), den);
    }
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
        auto frac = s.substr(dot + 1);
        if (frac.size() > 15) throw fail();
        std::int64_t den = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
        auto whole = s.substr(0, dot);
        bool neg = !whole.empty() && whole[0] == '-';
        std::int64_t w = whole.empty() || whole == "-" ? 0 : to_int(whole);
        std::int64_t f = frac.empty() ? 0 : to_int(frac);
        std::int64_t num = std::abs(w) * den + f;
        return Rational(neg ? -num : num, den);
    }
    return Rational(to_int(s));
}

}  // namespace mvlab

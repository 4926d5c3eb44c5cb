#pragma once

// Reference evaluators written independently of the library's evaluation paths.

#include <algorithm>
#include <map>
#include <vector>

#include "mvlab/semantics.hpp"

namespace oracle {

using mvlab::FKind;
using mvlab::Formula;
using mvlab::Rational;

// Truth value over Rationals; quantifiers range over the whole block.
inline Rational value(const Formula& f, const mvlab::Model& m, std::map<int, int> s) {
    const int n = m.chain().size();
    switch (f.kind()) {
        case FKind::Atom: {
            const auto& t = m.tables().at(f.pred());
            std::size_t idx = 0;
            for (int v : f.args()) idx = idx * m.domain() + (s.count(v) ? s[v] : 0);
            return Rational(t.values[idx], n - 1);
        }
        case FKind::Top: return 1;
        case FKind::Bottom: return 0;
        case FKind::Neg: return 1 - value(f.left(), m, s);
        case FKind::Oplus: return std::min(Rational(1), value(f.left(), m, s) + value(f.right(), m, s));
        case FKind::Odot: return std::max(Rational(0), value(f.left(), m, s) + value(f.right(), m, s) - 1);
        case FKind::Implies: return std::min(Rational(1), 1 - value(f.left(), m, s) + value(f.right(), m, s));
        case FKind::Forall:
        case FKind::Exists: {
            std::vector<int> ws(f.block().begin(), f.block().end());
            std::size_t total = 1;
            for (std::size_t i = 0; i < ws.size(); ++i) total *= m.domain();
            bool ex = f.kind() == FKind::Exists;
            Rational best = ex ? 0 : 1;
            for (std::size_t code = 0; code < total; ++code) {
                auto t = s;
                std::size_t c = code;
                for (int w : ws) {
                    t[w] = static_cast<int>(c % m.domain());
                    c /= m.domain();
                }
                Rational v = value(f.body(), m, t);
                best = ex ? std::max(best, v) : std::min(best, v);
            }
            return best;
        }
        default: return 0;
    }
}

}  // namespace oracle

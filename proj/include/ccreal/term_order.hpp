#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "ccreal/polynomial.hpp"

namespace ccreal {

// Lexicographic order on exponent vectors driven by a variable priority list
// (highest priority first): compare the degree in priority[0] ascending, break
// ties with priority[1], and so on.  The default priority reads the second
// block from its last variable down, then the first block from its last
// variable down: Y_{n2}, ..., Y_1, X_{n1}, ..., X_1 (Z in place of Y for the
// XZ frame).  This is the unique monomial order under which the least term
// dominates the sign at points (e_1 eps_1, ..., e_k eps_k) with eps_{i+1}
// infinitesimal relative to eps_i when X_i |-> eps_i, Y_j |-> eps_{n1+j}.
struct TermOrder {
    std::vector<int> priority;

    static TermOrder default_order(const VarSpace& vs) {
        TermOrder o;
        o.priority.reserve(vs.dim());
        for (int j = vs.dim() - 1; j >= vs.n_x; --j) o.priority.push_back(j);
        for (int i = vs.n_x - 1; i >= 0; --i) o.priority.push_back(i);
        return o;
    }

    void check_permutation(int dim) const {
        if (static_cast<int>(priority.size()) != dim)
            throw std::invalid_argument("term order: priority length mismatch");
        std::vector<bool> seen(dim, false);
        for (int v : priority) {
            if (v < 0 || v >= dim || seen[v])
                throw std::invalid_argument("term order: not a permutation");
            seen[v] = true;
        }
    }

    bool less(const Expo& a, const Expo& b) const {
        for (int v : priority) {
            if (a[v] != b[v]) return a[v] < b[v];
        }
        return false;
    }
};

template <class K>
struct Term {
    K coefficient;
    Expo exponents;
};

template <class K>
Term<K> least_term(const Polynomial<K>& g, const TermOrder& order) {
    if (g.is_zero()) throw std::invalid_argument("least_term: zero polynomial");
    const Expo* best = nullptr;
    const K* coeff = nullptr;
    for (const auto& [e, c] : g.terms()) {
        if (!best || order.less(e, *best)) {
            best = &e;
            coeff = &c;
        }
    }
    return {*coeff, *best};
}

template <class K>
Expo exponent_vector(const Polynomial<K>& g, const TermOrder& order) {
    return least_term(g, order).exponents;
}

// A point (e_1 eps_1, ..., e_k eps_k) with e_i in {-1,0,+1}; the
// infinitesimal scales are implicit in the term order.
struct SignPoint {
    std::vector<int> signs;
    Frame frame = Frame::XY;

    SignPoint() = default;
    SignPoint(std::vector<int> s, Frame f = Frame::XY) : signs(std::move(s)), frame(f) {
        for (int e : signs)
            if (e < -1 || e > 1) throw std::invalid_argument("sign point: entry not in {-1,0,+1}");
    }
    int dim() const { return static_cast<int>(signs.size()); }
};

// Exact sign of g at a signed-infinitesimal point: substitute 0 for the
// zero-sign variables, then the least term of what remains decides.
template <class K>
int sign_at(const Polynomial<K>& g, const SignPoint& p, const TermOrder& order) {
    static_assert(std::is_same_v<K, Rational>, "sign_at is defined over real coefficients only");
    if (p.dim() != g.varspace().dim())
        throw std::invalid_argument("sign_at: dimension mismatch");
    if (p.frame != g.varspace().frame)
        throw std::invalid_argument("sign_at: frame mismatch");

    const Expo* best = nullptr;
    const Rational* coeff = nullptr;
    for (const auto& [e, c] : g.terms()) {
        bool killed = false;
        for (int i = 0; i < p.dim(); ++i) {
            if (p.signs[i] == 0 && e[i] > 0) { killed = true; break; }
        }
        if (killed) continue;
        if (!best || order.less(e, *best)) {
            best = &e;
            coeff = &c;
        }
    }
    if (!best) return 0;
    int s = sign_of(*coeff);
    for (int i = 0; i < p.dim(); ++i)
        if (p.signs[i] == -1 && (*best)[i] % 2 == 1) s = -s;
    return s;
}

// Coordinate change between the native (X,Y) frame and the sheared (X,Z)
// frame with Z_i = X_i + Y_i.  Slot n+i holds Y_i or Z_i respectively.
template <class K>
Polynomial<K> change_frame(const Polynomial<K>& g, Frame to) {
    const VarSpace& vs = g.varspace();
    if (vs.frame == to) return g;
    if (vs.n_x != vs.n_y)
        throw std::invalid_argument("change_frame: requires n_x == n_y");
    const int n = vs.n_x;
    VarSpace target(n, n, to);
    std::vector<Polynomial<K>> args;
    args.reserve(2 * n);
    for (int i = 0; i < n; ++i) args.push_back(Polynomial<K>::variable(target, i));
    for (int i = 0; i < n; ++i) {
        if (to == Frame::XZ) {
            // Y_i = Z_i - X_i
            args.push_back(Polynomial<K>::variable(target, n + i) -
                           Polynomial<K>::variable(target, i));
        } else {
            // Z_i = X_i + Y_i
            args.push_back(Polynomial<K>::variable(target, n + i) +
                           Polynomial<K>::variable(target, i));
        }
    }
    return compose(g, args);
}

template <class K>
struct DivisionResult {
    Polynomial<K> quotient;
    Polynomial<K> remainder;
};

inline Rational reciprocal(const Rational& q) { return Rational(1) / q; }
inline CRational reciprocal(const CRational& z) {
    Rational n = z.re * z.re + z.im * z.im;
    return {z.re / n, -z.im / n};
}

// Single-divisor multivariate division: g = q*d + r with no term of r
// divisible by the leading (greatest) term of d under the order.  For a
// single divisor, r == 0 is equivalent to divisibility.
template <class K>
DivisionResult<K> divide_exact(const Polynomial<K>& divisor, const Polynomial<K>& g,
                               const TermOrder& order) {
    if (divisor.is_zero()) throw std::invalid_argument("divide_exact: zero divisor");
    if (divisor.varspace() != g.varspace())
        throw std::invalid_argument("divide_exact: varspace mismatch");

    // leading term of the divisor = greatest under the order
    const Expo* lead_e = nullptr;
    const K* lead_c = nullptr;
    for (const auto& [e, c] : divisor.terms()) {
        if (!lead_e || order.less(*lead_e, e)) {
            lead_e = &e;
            lead_c = &c;
        }
    }

    Polynomial<K> p = g;
    Polynomial<K> q(g.varspace()), r(g.varspace());
    while (!p.is_zero()) {
        const Expo* top_e = nullptr;
        const K* top_c = nullptr;
        for (const auto& [e, c] : p.terms()) {
            if (!top_e || order.less(*top_e, e)) {
                top_e = &e;
                top_c = &c;
            }
        }
        bool divisible = true;
        Expo diff(top_e->size());
        for (std::size_t i = 0; i < diff.size(); ++i) {
            diff[i] = (*top_e)[i] - (*lead_e)[i];
            if (diff[i] < 0) { divisible = false; break; }
        }
        Polynomial<K> mono(g.varspace());
        if (divisible) {
            mono.add_term(std::move(diff), *top_c * reciprocal(*lead_c));
            q += mono;
            p -= mono * divisor;
        } else {
            mono.add_term(*top_e, *top_c);
            r += mono;
            p -= mono;
        }
    }
    return {std::move(q), std::move(r)};
}

template <class K>
bool divides(const Polynomial<K>& divisor, const Polynomial<K>& g, const TermOrder& order) {
    return divide_exact(divisor, g, order).remainder.is_zero();
}

}  // namespace ccreal

#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ccreal/rational.hpp"

namespace ccreal {

// Coordinate frame of a variable space.  XY is the native split between the
// two parties; XZ is the sheared frame Z_i = X_i + Y_i (legal only when the
// blocks have equal size).
enum class Frame { XY, XZ };

struct VarSpace {
    int n_x = 0;
    int n_y = 0;
    Frame frame = Frame::XY;

    VarSpace() = default;
    VarSpace(int nx, int ny, Frame f = Frame::XY) : n_x(nx), n_y(ny), frame(f) {
        if (nx < 0 || ny < 0) throw std::invalid_argument("varspace: negative block size");
        if (f == Frame::XZ && nx != ny)
            throw std::invalid_argument("varspace: XZ frame requires n_x == n_y");
    }
    int dim() const { return n_x + n_y; }
    friend bool operator==(const VarSpace& a, const VarSpace& b) {
        return a.n_x == b.n_x && a.n_y == b.n_y && a.frame == b.frame;
    }
    friend bool operator!=(const VarSpace& a, const VarSpace& b) { return !(a == b); }
};

using Expo = std::vector<int>;  // exponent vector, one natural per variable

// Sparse multivariate polynomial with exact coefficients.  Terms are keyed by
// exponent vector in a std::map, so iteration order is ascending
// lexicographic -- that order is the canonical serialization order.
template <class K>
class Polynomial {
public:
    using Coeff = K;
    using TermMap = std::map<Expo, K>;

    Polynomial() = default;
    explicit Polynomial(VarSpace vs) : vs_(vs) {}

    static Polynomial constant(VarSpace vs, K c) {
        Polynomial p(vs);
        p.add_term(Expo(vs.dim(), 0), std::move(c));
        return p;
    }
    static Polynomial variable(VarSpace vs, int index, int power = 1) {
        if (index < 0 || index >= vs.dim()) throw std::out_of_range("variable index");
        Polynomial p(vs);
        Expo e(vs.dim(), 0);
        e[index] = power;
        p.add_term(std::move(e), K(1));
        return p;
    }

    const VarSpace& varspace() const { return vs_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }

    void add_term(Expo e, K c) {
        if (scalar_is_zero(c)) return;
        if (static_cast<int>(e.size()) != vs_.dim())
            throw std::invalid_argument("term: exponent length mismatch");
        auto it = terms_.find(e);
        if (it == terms_.end()) {
            terms_.emplace(std::move(e), std::move(c));
        } else {
            it->second += c;
            if (scalar_is_zero(it->second)) terms_.erase(it);
        }
    }

    int total_degree() const {
        int d = 0;
        for (const auto& [e, c] : terms_)
            d = std::max(d, std::accumulate(e.begin(), e.end(), 0));
        return d;
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        a.require_same_space(b);
        Polynomial r = a;
        for (const auto& [e, c] : b.terms_) r.add_term(e, c);
        return r;
    }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
        a.require_same_space(b);
        Polynomial r = a;
        for (const auto& [e, c] : b.terms_) r.add_term(e, -c);
        return r;
    }
    friend Polynomial operator-(const Polynomial& a) {
        Polynomial r(a.vs_);
        for (const auto& [e, c] : a.terms_) r.terms_.emplace(e, -c);
        return r;
    }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        a.require_same_space(b);
        Polynomial r(a.vs_);
        for (const auto& [ea, ca] : a.terms_) {
            for (const auto& [eb, cb] : b.terms_) {
                Expo e(ea.size());
                for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
                r.add_term(std::move(e), ca * cb);
            }
        }
        return r;
    }
    friend Polynomial operator*(const Polynomial& a, const K& s) {
        Polynomial r(a.vs_);
        if (scalar_is_zero(s)) return r;
        for (const auto& [e, c] : a.terms_) r.add_term(e, c * s);
        return r;
    }
    friend Polynomial operator*(const K& s, const Polynomial& a) { return a * s; }

    Polynomial& operator+=(const Polynomial& o) { return *this = *this + o; }
    Polynomial& operator-=(const Polynomial& o) { return *this = *this - o; }
    Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

    friend bool operator==(const Polynomial& a, const Polynomial& b) {
        return a.vs_ == b.vs_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

    // Exact value at a point, one scalar per variable.
    K evaluate(const std::vector<K>& point) const {
        if (static_cast<int>(point.size()) != vs_.dim())
            throw std::invalid_argument("evaluate: point length mismatch");
        K acc(0);
        for (const auto& [e, c] : terms_) {
            K t = c;
            for (std::size_t i = 0; i < e.size(); ++i)
                for (int k = 0; k < e[i]; ++k) t *= point[i];
            acc += t;
        }
        return acc;
    }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [e, c] : terms_) {
            if (!first) os << " + ";
            first = false;
            os << "(" << to_string(c) << ")";
            for (std::size_t i = 0; i < e.size(); ++i)
                if (e[i] > 0) os << "*v" << i << "^" << e[i];
        }
        return os.str();
    }

private:
    void require_same_space(const Polynomial& o) const {
        if (vs_ != o.vs_) throw std::invalid_argument("polynomial: varspace mismatch");
    }

    VarSpace vs_;
    TermMap terms_;
};

using RPoly = Polynomial<Rational>;
using CPoly = Polynomial<CRational>;

template <class K>
Polynomial<K> derivative(const Polynomial<K>& g, int var_index) {
    if (var_index < 0 || var_index >= g.varspace().dim())
        throw std::out_of_range("derivative: variable index out of range");
    Polynomial<K> r(g.varspace());
    for (const auto& [e, c] : g.terms()) {
        if (e[var_index] == 0) continue;
        Expo d = e;
        K coeff = c * K(d[var_index]);
        d[var_index] -= 1;
        r.add_term(std::move(d), std::move(coeff));
    }
    return r;
}

// Substitution P(Q_1,...,Q_r) |-> P(args[0],...,args[r-1]), fully expanded.
template <class K>
Polynomial<K> compose(const Polynomial<K>& P, const std::vector<Polynomial<K>>& args) {
    if (static_cast<int>(args.size()) != P.varspace().dim())
        throw std::invalid_argument("compose: arity mismatch");
    if (args.empty()) {
        // P is a constant in zero variables
        Polynomial<K> r;  // dimension-0 space
        for (const auto& [e, c] : P.terms()) r.add_term({}, c);
        return r;
    }
    VarSpace target = args.front().varspace();
    for (const auto& a : args)
        if (a.varspace() != target)
            throw std::invalid_argument("compose: argument varspace mismatch");

    // cached powers of each argument
    std::vector<std::vector<Polynomial<K>>> pows(args.size());
    auto power = [&](std::size_t k, int e) -> const Polynomial<K>& {
        auto& cache = pows[k];
        if (cache.empty()) cache.push_back(Polynomial<K>::constant(target, K(1)));
        while (static_cast<int>(cache.size()) <= e) cache.push_back(cache.back() * args[k]);
        return cache[e];
    };

    Polynomial<K> r(target);
    for (const auto& [e, c] : P.terms()) {
        Polynomial<K> t = Polynomial<K>::constant(target, c);
        for (std::size_t k = 0; k < args.size(); ++k)
            if (e[k] > 0) t *= power(k, e[k]);
        r += t;
    }
    return r;
}

// Views a complex polynomial in k complex variables as a pair of real
// polynomials in 2k real variables via W_j = U_j + i V_j.  The real space
// doubles each party block, keeping party ownership: complex X_j maps to real
// X-block slots (2j, 2j+1), complex Y_j to Y-block slots likewise.
inline VarSpace doubled_space(const VarSpace& vs) {
    return VarSpace(2 * vs.n_x, 2 * vs.n_y, vs.frame);
}

inline std::pair<RPoly, RPoly> re_im_split(const CPoly& g) {
    VarSpace dvs = doubled_space(g.varspace());
    const int nx = g.varspace().n_x;
    std::vector<CPoly> args;
    args.reserve(g.varspace().dim());
    for (int j = 0; j < g.varspace().dim(); ++j) {
        int u = j < nx ? 2 * j : 2 * nx + 2 * (j - nx);
        CPoly a = CPoly::variable(dvs, u) + imaginary_unit() * CPoly::variable(dvs, u + 1);
        args.push_back(std::move(a));
    }
    CPoly expanded = compose(g, args);
    RPoly re(dvs), im(dvs);
    for (const auto& [e, c] : expanded.terms()) {
        re.add_term(e, c.re);
        im.add_term(e, c.im);
    }
    return {std::move(re), std::move(im)};
}

}  // namespace ccreal

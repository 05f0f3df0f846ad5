#pragma once

#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccreal/protocol.hpp"

namespace ccreal {

enum class SetKind {
    Orthant,
    OrthantClosure,
    PolyhedronS,
    Arrangement,
    InnerProductHypersurface,
    EmptinessSet,
    KnapsackSet,
};

// A built-in target set with an exact membership oracle.  Variants other than
// Orthant/OrthantClosure require n_x == n_y.
struct SetDescriptor {
    SetKind kind;
    int n_x = 0;
    int n_y = 0;
    std::vector<RPoly> forms;  // Arrangement only; defaults to all X_i + Y_j

    static SetDescriptor orthant(int nx, int ny) { return {SetKind::Orthant, nx, ny, {}}; }
    static SetDescriptor orthant_closure(int nx, int ny) {
        return {SetKind::OrthantClosure, nx, ny, {}};
    }
    static SetDescriptor polyhedron_s(int n) { return {SetKind::PolyhedronS, n, n, {}}; }
    static SetDescriptor arrangement(int n) {
        SetDescriptor d{SetKind::Arrangement, n, n, {}};
        VarSpace vs(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                d.forms.push_back(RPoly::variable(vs, i) + RPoly::variable(vs, n + j));
        return d;
    }
    static SetDescriptor inner_product(int n) {
        return {SetKind::InnerProductHypersurface, n, n, {}};
    }
    static SetDescriptor emptiness(int n) { return {SetKind::EmptinessSet, n, n, {}}; }
    static SetDescriptor knapsack(int n) { return {SetKind::KnapsackSet, n, n, {}}; }

    VarSpace varspace() const { return VarSpace(n_x, n_y); }
};

namespace detail {

// Defining polynomials of each variant, in the XY frame.  `combine` semantics
// differ per variant, handled by the callers below.
inline std::vector<RPoly> defining_forms(const SetDescriptor& set) {
    VarSpace vs = set.varspace();
    std::vector<RPoly> forms;
    switch (set.kind) {
        case SetKind::Orthant:
        case SetKind::OrthantClosure:
            for (int i = 0; i < vs.dim(); ++i) forms.push_back(RPoly::variable(vs, i));
            break;
        case SetKind::PolyhedronS:
            for (int i = 0; i < set.n_x; ++i)
                forms.push_back(RPoly::variable(vs, i) + RPoly::variable(vs, set.n_x + i));
            break;
        case SetKind::Arrangement:
            forms = set.forms;
            break;
        case SetKind::InnerProductHypersurface: {
            RPoly f(vs);
            for (int i = 0; i < set.n_x; ++i)
                f += RPoly::variable(vs, i) * RPoly::variable(vs, set.n_x + i);
            forms.push_back(std::move(f));
            break;
        }
        case SetKind::EmptinessSet:
            for (int i = 0; i < set.n_x; ++i)
                for (int j = 0; j < set.n_y; ++j)
                    forms.push_back(RPoly::variable(vs, i) - RPoly::variable(vs, set.n_x + j));
            break;
        case SetKind::KnapsackSet: {
            const int n = set.n_x;
            for (long mask = 1; mask < (1L << (2 * n)); ++mask) {
                RPoly s(vs);
                for (int i = 0; i < 2 * n; ++i)
                    if (mask >> i & 1) s += RPoly::variable(vs, i);
                forms.push_back(std::move(s));
            }
            break;
        }
    }
    return forms;
}

// true membership given the signs of the defining forms, in form order
inline bool combine_signs(const SetDescriptor& set, const std::vector<int>& signs) {
    switch (set.kind) {
        case SetKind::Orthant:
        case SetKind::PolyhedronS:
            for (int s : signs)
                if (s <= 0) return false;
            return true;
        case SetKind::OrthantClosure:
            for (int s : signs)
                if (s < 0) return false;
            return true;
        case SetKind::Arrangement:
        case SetKind::InnerProductHypersurface:
        case SetKind::KnapsackSet:
            for (int s : signs)
                if (s == 0) return true;
            return false;
        case SetKind::EmptinessSet:
            for (int s : signs)
                if (s == 0) return false;
            return true;
    }
    return false;
}

}  // namespace detail

inline bool membership(const SetDescriptor& set, const std::vector<Rational>& input,
                       int knapsack_cap = 12) {
    if (static_cast<int>(input.size()) != set.varspace().dim())
        throw std::invalid_argument("membership: input length mismatch");
    if (set.kind == SetKind::KnapsackSet && set.n_x > knapsack_cap)
        throw std::invalid_argument("membership: knapsack n exceeds cap");
    std::vector<int> signs;
    for (const auto& f : detail::defining_forms(set))
        signs.push_back(sign_of(f.evaluate(input)));
    return detail::combine_signs(set, signs);
}

inline bool membership_at_signpoint(const SetDescriptor& set, const SignPoint& p,
                                    const TermOrder& order) {
    if (p.dim() != set.varspace().dim())
        throw std::invalid_argument("membership_at_signpoint: dimension mismatch");
    std::vector<int> signs;
    for (const auto& f : detail::defining_forms(set)) {
        RPoly g = p.frame == Frame::XY ? f : change_frame(f, p.frame);
        signs.push_back(sign_at(g, p, order));
    }
    return detail::combine_signs(set, signs);
}

// ---- built-in protocols ------------------------------------------------------

namespace detail {

// test polynomial "Q_r" over r formal variables
template <class K>
Polynomial<K> last_q(int r) {
    return Polynomial<K>::variable(VarSpace(r, 0), r - 1);
}

}  // namespace detail

// Depth n_x + n_y protocol for the open orthant: reveal every coordinate, and
// continue only while the revealed value is positive.
inline ProtocolTree<Rational> build_orthant_det(int n_x, int n_y) {
    if (n_x + n_y < 1) throw std::invalid_argument("orthant: need at least one variable");
    ProtocolTree<Rational> t;
    t.varspace = VarSpace(n_x, n_y);
    t.root = 0;
    const int total = n_x + n_y;
    for (int i = 0; i < total; ++i) {
        ProtocolNode<Rational> n;
        n.id = i;
        n.party = i < n_x ? Party::X : Party::Y;
        n.message = RPoly::variable(t.varspace, i);
        n.tests.push_back(detail::last_q<Rational>(i + 1));
        BranchTarget next = i + 1 < total ? BranchTarget(i + 1) : BranchTarget(Verdict::Accept);
        n.branches.push_back({{Sign::GT}, next});
        n.branches.push_back({{Sign::EQ}, Verdict::Reject});
        n.branches.push_back({{Sign::LT}, Verdict::Reject});
        t.nodes.emplace(i, std::move(n));
    }
    return t;
}

namespace detail {

inline ProtocolTree<Rational> orthant_prob_member(int n_x, int n_y, unsigned long i1,
                                                  unsigned long i2, unsigned long j1,
                                                  unsigned long j2) {
    ProtocolTree<Rational> t;
    t.varspace = VarSpace(n_x, n_y);
    t.root = 0;
    auto product = [&](unsigned long mask, int offset, int count) {
        RPoly p = RPoly::constant(t.varspace, Rational(1));  // empty product = 1
        for (int i = 0; i < count; ++i)
            if (mask >> i & 1) p *= RPoly::variable(t.varspace, offset + i);
        return p;
    };
    RPoly msgs[4] = {product(i1, 0, n_x), product(i2, 0, n_x), product(j1, n_x, n_y),
                     product(j2, n_x, n_y)};
    for (int k = 0; k < 4; ++k) {
        ProtocolNode<Rational> n;
        n.id = k;
        n.party = k < 2 ? Party::X : Party::Y;
        n.message = msgs[k];
        n.tests.push_back(last_q<Rational>(k + 1));
        BranchTarget next = k < 3 ? BranchTarget(k + 1) : BranchTarget(Verdict::Accept);
        n.branches.push_back({{Sign::GT}, next});
        n.branches.push_back({{Sign::EQ}, Verdict::Reject});
        n.branches.push_back({{Sign::LT}, Verdict::Reject});
        t.nodes.emplace(k, std::move(n));
    }
    return t;
}

}  // namespace detail

enum class FamilyMode { Exact, Sampled };

// Depth-4 probabilistic protocol for the orthant: each party draws two random
// index subsets and reveals the corresponding coordinate products; accept iff
// all four products are positive.
inline ProbabilisticProtocol<Rational> build_orthant_prob(int n_x, int n_y,
                                                          FamilyMode mode = FamilyMode::Exact,
                                                          std::uint64_t seed = 0,
                                                          int samples = 256) {
    ProbabilisticProtocol<Rational> pp;
    if (mode == FamilyMode::Exact) {
        if (n_x + n_y > 8)
            throw std::invalid_argument("orthant-prob: exact mode capped at n_x+n_y <= 8");
        const unsigned long cx = 1UL << n_x, cy = 1UL << n_y;
        Rational w = make_rational(1L, static_cast<long>(cx * cx * cy * cy));
        for (unsigned long i1 = 0; i1 < cx; ++i1)
            for (unsigned long i2 = 0; i2 < cx; ++i2)
                for (unsigned long j1 = 0; j1 < cy; ++j1)
                    for (unsigned long j2 = 0; j2 < cy; ++j2)
                        pp.members.push_back(
                            {w, detail::orthant_prob_member(n_x, n_y, i1, i2, j1, j2)});
    } else {
        std::mt19937_64 rng(seed);
        Rational w = make_rational(1L, samples);
        for (int s = 0; s < samples; ++s) {
            auto draw = [&](int bits) {
                return static_cast<unsigned long>(rng()) & ((1UL << bits) - 1);
            };
            pp.members.push_back({w, detail::orthant_prob_member(n_x, n_y, draw(n_x), draw(n_x),
                                                                 draw(n_y), draw(n_y))});
        }
    }
    return pp;
}

namespace detail {

// reveal-everything prefix: X_1..X_n then Y_1..Y_n, no tests until the caller
// attaches them
template <class K>
ProtocolTree<K> reveal_all(int n) {
    ProtocolTree<K> t;
    t.varspace = VarSpace(n, n);
    t.root = 0;
    for (int i = 0; i < 2 * n; ++i) {
        ProtocolNode<K> nd;
        nd.id = i;
        nd.party = i < n ? Party::X : Party::Y;
        nd.message = Polynomial<K>::variable(t.varspace, i);
        if (i + 1 < 2 * n) nd.branches.push_back({{}, i + 1});
        t.nodes.emplace(i, std::move(nd));
    }
    return t;
}

}  // namespace detail

// Depth-2n protocol for the polyhedron S = {x_i + y_i > 0}: after each y_i is
// revealed, test x_i + y_i.
inline ProtocolTree<Rational> build_polyhedron_det(int n) {
    if (n < 1) throw std::invalid_argument("polyhedron: n >= 1");
    auto t = detail::reveal_all<Rational>(n);
    for (int i = 0; i < n; ++i) {
        auto& nd = t.nodes.at(n + i);
        VarSpace qs(n + i + 1, 0);
        nd.tests.push_back(RPoly::variable(qs, i) + RPoly::variable(qs, n + i));
        nd.branches.clear();
        BranchTarget next = i + 1 < n ? BranchTarget(n + i + 1) : BranchTarget(Verdict::Accept);
        nd.branches.push_back({{Sign::GT}, next});
        nd.branches.push_back({{Sign::EQ}, Verdict::Reject});
        nd.branches.push_back({{Sign::LT}, Verdict::Reject});
    }
    return t;
}

// Depth-2n protocol recognizing the arrangement of all hyperplanes
// {X_i + Y_j = 0}: a single product test at the last node.
template <class K = Rational>
ProtocolTree<K> build_arrangement_det(int n) {
    if (n < 1) throw std::invalid_argument("arrangement: n >= 1");
    auto t = detail::reveal_all<K>(n);
    auto& last = t.nodes.at(2 * n - 1);
    VarSpace qs(2 * n, 0);
    Polynomial<K> prod = Polynomial<K>::constant(qs, K(1));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            prod *= Polynomial<K>::variable(qs, i) + Polynomial<K>::variable(qs, n + j);
    last.tests.push_back(std::move(prod));
    if constexpr (std::is_same_v<K, CRational>) {
        last.branches.push_back({{Sign::EQ}, Verdict::Accept});
        last.branches.push_back({{Sign::NE}, Verdict::Reject});
    } else {
        last.branches.push_back({{Sign::EQ}, Verdict::Accept});
        last.branches.push_back({{Sign::LT}, Verdict::Reject});
        last.branches.push_back({{Sign::GT}, Verdict::Reject});
    }
    return t;
}

// Depth-2n protocol for EMPTINESS: the product of all pairwise differences
// vanishes exactly when the two sets intersect.
inline ProtocolTree<Rational> build_emptiness_det(int n) {
    if (n < 1) throw std::invalid_argument("emptiness: n >= 1");
    auto t = detail::reveal_all<Rational>(n);
    auto& last = t.nodes.at(2 * n - 1);
    VarSpace qs(2 * n, 0);
    RPoly prod = RPoly::constant(qs, Rational(1));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            prod *= RPoly::variable(qs, i) - RPoly::variable(qs, n + j);
    last.tests.push_back(std::move(prod));
    last.branches.push_back({{Sign::EQ}, Verdict::Reject});
    last.branches.push_back({{Sign::LT}, Verdict::Accept});
    last.branches.push_back({{Sign::GT}, Verdict::Accept});
    return t;
}

// Depth-2n protocol for KNAPSACK: one test multiplying every nonempty
// subset-pair sum; it has 4^n - 1 factors, so n is capped.
inline ProtocolTree<Rational> build_knapsack_det(int n, int cap = 8) {
    if (n < 1) throw std::invalid_argument("knapsack: n >= 1");
    if (n > cap) throw std::invalid_argument("knapsack: n exceeds cap " + std::to_string(cap));
    auto t = detail::reveal_all<Rational>(n);
    auto& last = t.nodes.at(2 * n - 1);
    VarSpace qs(2 * n, 0);
    RPoly prod = RPoly::constant(qs, Rational(1));
    for (long mask = 1; mask < (1L << (2 * n)); ++mask) {
        RPoly s(qs);
        for (int i = 0; i < 2 * n; ++i)
            if (mask >> i & 1) s += RPoly::variable(qs, i);
        prod *= s;
    }
    last.tests.push_back(std::move(prod));
    last.branches.push_back({{Sign::EQ}, Verdict::Accept});
    last.branches.push_back({{Sign::LT}, Verdict::Reject});
    last.branches.push_back({{Sign::GT}, Verdict::Reject});
    return t;
}

// The fooling configuration of the hyperplane bound, in the XZ frame:
// u = (+,...,+), u_i flips the Z_i slot to -1, u_i^(0) zeroes it.
struct FoolingPoints {
    SignPoint u;
    std::vector<SignPoint> u_flipped;  // u_i, not in S
    std::vector<SignPoint> u_zeroed;   // u_i^(0), in the arrangement
};

inline FoolingPoints fooling_points(int n) {
    if (n < 1) throw std::invalid_argument("fooling_points: n >= 1");
    FoolingPoints fp;
    fp.u = SignPoint(std::vector<int>(2 * n, 1), Frame::XZ);
    for (int i = 0; i < n; ++i) {
        std::vector<int> s(2 * n, 1);
        s[n + i] = -1;
        fp.u_flipped.emplace_back(s, Frame::XZ);
        s[n + i] = 0;
        fp.u_zeroed.emplace_back(std::move(s), Frame::XZ);
    }
    return fp;
}

}  // namespace ccreal

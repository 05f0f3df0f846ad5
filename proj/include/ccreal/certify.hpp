#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ccreal/zoo.hpp"

namespace ccreal {

template <class K>
struct PolyMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<Polynomial<K>> entries;  // row-major

    PolyMatrix() = default;
    PolyMatrix(int r, int c, VarSpace vs)
        : rows(r), cols(c), entries(static_cast<std::size_t>(r) * c, Polynomial<K>(vs)) {}

    Polynomial<K>& at(int i, int j) { return entries[static_cast<std::size_t>(i) * cols + j]; }
    const Polynomial<K>& at(int i, int j) const {
        return entries[static_cast<std::size_t>(i) * cols + j];
    }
    VarSpace varspace() const { return entries.empty() ? VarSpace() : entries.front().varspace(); }

    friend bool operator==(const PolyMatrix& a, const PolyMatrix& b) {
        return a.rows == b.rows && a.cols == b.cols && a.entries == b.entries;
    }

    friend PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b) {
        if (a.cols != b.rows) throw std::invalid_argument("polymatrix: shape mismatch");
        PolyMatrix r(a.rows, b.cols, a.varspace());
        for (int i = 0; i < a.rows; ++i)
            for (int j = 0; j < b.cols; ++j)
                for (int k = 0; k < a.cols; ++k) r.at(i, j) += a.at(i, k) * b.at(k, j);
        return r;
    }

    PolyMatrix transposed() const {
        PolyMatrix r(cols, rows, varspace());
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) r.at(j, i) = at(i, j);
        return r;
    }
};

// n_x x n_y matrix of mixed second partials d^2 g / dX_i dY_j.
template <class K>
PolyMatrix<K> hessian(const Polynomial<K>& g) {
    const VarSpace& vs = g.varspace();
    if (vs.frame != Frame::XY)
        throw std::invalid_argument("hessian: convert to the XY frame first");
    PolyMatrix<K> H(vs.n_x, vs.n_y, vs);
    for (int i = 0; i < vs.n_x; ++i) {
        Polynomial<K> gi = derivative(g, i);
        for (int j = 0; j < vs.n_y; ++j) H.at(i, j) = derivative(gi, vs.n_x + j);
    }
    return H;
}

// |vars| x |polys| matrix of first partials d poly_j / d var_i.
template <class K>
PolyMatrix<K> jacobian(const std::vector<Polynomial<K>>& polys, const std::vector<int>& vars) {
    if (polys.empty()) return {};
    PolyMatrix<K> J(static_cast<int>(vars.size()), static_cast<int>(polys.size()),
                    polys.front().varspace());
    for (std::size_t j = 0; j < polys.size(); ++j)
        for (std::size_t i = 0; i < vars.size(); ++i)
            J.at(static_cast<int>(i), static_cast<int>(j)) = derivative(polys[j], vars[i]);
    return J;
}

// ---- exact rational linear algebra ------------------------------------------

namespace linalg {

struct RankResult {
    int rank = 0;
    std::vector<int> row_set;  // original indices of a nonsingular minor
    std::vector<int> col_set;
};

// Gaussian elimination with full pivoting; the pivot rows/columns index a
// nonsingular rank x rank submatrix of the original matrix.
inline RankResult rank_with_pivots(std::vector<std::vector<Rational>> m) {
    RankResult res;
    if (m.empty() || m.front().empty()) return res;
    const int rows = static_cast<int>(m.size());
    const int cols = static_cast<int>(m.front().size());
    std::vector<int> row_idx(rows), col_idx(cols);
    for (int i = 0; i < rows; ++i) row_idx[i] = i;
    for (int j = 0; j < cols; ++j) col_idx[j] = j;
    int r = 0, c = 0;
    while (r < rows && c < cols) {
        int pi = -1, pj = -1;
        for (int i = r; i < rows && pi < 0; ++i)
            for (int j = c; j < cols; ++j)
                if (m[i][j] != 0) { pi = i; pj = j; break; }
        if (pi < 0) break;
        std::swap(m[r], m[pi]);
        std::swap(row_idx[r], row_idx[pi]);
        for (int i = 0; i < rows; ++i) std::swap(m[i][c], m[i][pj]);
        std::swap(col_idx[c], col_idx[pj]);
        for (int i = r + 1; i < rows; ++i) {
            if (m[i][c] == 0) continue;
            Rational factor = m[i][c] / m[r][c];
            for (int j = c; j < cols; ++j) m[i][j] -= factor * m[r][j];
        }
        res.row_set.push_back(row_idx[r]);
        res.col_set.push_back(col_idx[c]);
        ++r;
        ++c;
    }
    res.rank = r;
    std::sort(res.row_set.begin(), res.row_set.end());
    std::sort(res.col_set.begin(), res.col_set.end());
    return res;
}

inline Rational determinant(std::vector<std::vector<Rational>> m) {
    const int n = static_cast<int>(m.size());
    Rational det(1);
    for (int c = 0; c < n; ++c) {
        int p = -1;
        for (int i = c; i < n; ++i)
            if (m[i][c] != 0) { p = i; break; }
        if (p < 0) return Rational(0);
        if (p != c) {
            std::swap(m[p], m[c]);
            det = -det;
        }
        det *= m[c][c];
        for (int i = c + 1; i < n; ++i) {
            if (m[i][c] == 0) continue;
            Rational factor = m[i][c] / m[c][c];
            for (int j = c; j < n; ++j) m[i][j] -= factor * m[c][j];
        }
    }
    return det;
}

// rank over Q of a matrix of integer rows (exponent vectors)
inline int integer_rank(const std::vector<Expo>& rows) {
    if (rows.empty()) return 0;
    std::vector<std::vector<Rational>> m;
    for (const auto& r : rows) {
        std::vector<Rational> row;
        for (int v : r) row.emplace_back(v);
        m.push_back(std::move(row));
    }
    return rank_with_pivots(std::move(m)).rank;
}

}  // namespace linalg

// ---- GF(2) nullspace ---------------------------------------------------------

namespace gf2 {

// Lexicographically smallest nonzero vector m with m . row = 0 (mod 2) for
// every row; nullopt when the rows span everything.  dim <= 64.
inline std::optional<std::vector<int>> lex_min_nullvector(const std::vector<Expo>& rows,
                                                          int dim) {
    if (dim > 64) throw std::invalid_argument("gf2: dimension above 64 unsupported");
    std::vector<std::uint64_t> mat;
    for (const auto& r : rows) {
        std::uint64_t bits = 0;
        for (int i = 0; i < dim; ++i)
            if (r[i] % 2) bits |= std::uint64_t(1) << i;
        if (bits) mat.push_back(bits);
    }
    // row echelon, pivot on the lowest set bit first (column order 0,1,...)
    std::vector<int> pivot_cols;
    std::size_t rank = 0;
    for (int col = 0; col < dim && rank < mat.size(); ++col) {
        std::size_t p = rank;
        while (p < mat.size() && !(mat[p] >> col & 1)) ++p;
        if (p == mat.size()) continue;
        std::swap(mat[rank], mat[p]);
        for (std::size_t i = 0; i < mat.size(); ++i)
            if (i != rank && (mat[i] >> col & 1)) mat[i] ^= mat[rank];
        pivot_cols.push_back(col);
        ++rank;
    }
    if (static_cast<int>(rank) >= dim) return std::nullopt;

    // nullspace basis: one vector per free column
    std::vector<bool> is_pivot(dim, false);
    for (int c : pivot_cols) is_pivot[c] = true;
    std::vector<std::uint64_t> basis;
    for (int f = 0; f < dim; ++f) {
        if (is_pivot[f]) continue;
        std::uint64_t v = std::uint64_t(1) << f;
        for (std::size_t r = 0; r < rank; ++r)
            if (mat[r] >> f & 1) v |= std::uint64_t(1) << pivot_cols[r];
        basis.push_back(v);
    }
    // reduce the basis itself; the last echelon row has the latest leading
    // coordinate, which is the lex-min nonzero element of the span
    std::size_t brank = 0;
    for (int col = 0; col < dim && brank < basis.size(); ++col) {
        std::size_t p = brank;
        while (p < basis.size() && !(basis[p] >> col & 1)) ++p;
        if (p == basis.size()) continue;
        std::swap(basis[brank], basis[p]);
        for (std::size_t i = 0; i < basis.size(); ++i)
            if (i != brank && (basis[i] >> col & 1)) basis[i] ^= basis[brank];
        ++brank;
    }
    std::uint64_t best = basis[brank - 1];
    std::vector<int> out(dim, 0);
    for (int i = 0; i < dim; ++i) out[i] = static_cast<int>(best >> i & 1);
    return out;
}

}  // namespace gf2

// ---- rank certificates -------------------------------------------------------

// Checkable witness for a lower bound on the generic rank of a polynomial
// matrix: the minor on (row_set, col_set) evaluated at witness_point is
// minor_value != 0.
struct RankCertificate {
    int claimed_rank = 0;
    std::vector<Rational> witness_point;
    std::vector<int> row_set;
    std::vector<int> col_set;
    Rational minor_value = Rational(1);  // empty minor for rank 0
};

inline Rational minor_at(const PolyMatrix<Rational>& M, const std::vector<Rational>& point,
                         const std::vector<int>& row_set, const std::vector<int>& col_set) {
    const int k = static_cast<int>(row_set.size());
    std::vector<std::vector<Rational>> sub(k, std::vector<Rational>(k));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) sub[i][j] = M.at(row_set[i], col_set[j]).evaluate(point);
    return linalg::determinant(std::move(sub));
}

// Independent recheck by re-evaluation; certificates are only ever emitted
// after passing this.
inline bool recheck(const PolyMatrix<Rational>& M, const RankCertificate& cert) {
    if (cert.claimed_rank == 0) return true;
    if (static_cast<int>(cert.row_set.size()) != cert.claimed_rank ||
        static_cast<int>(cert.col_set.size()) != cert.claimed_rank)
        return false;
    Rational v = minor_at(M, cert.witness_point, cert.row_set, cert.col_set);
    return v != 0 && v == cert.minor_value;
}

struct RankOptions {
    int trials = 8;
    std::uint64_t seed = 1;
    bool exact = false;      // symbolic minors, capped at 6x6
    long coordinate_bound = 100;
};

namespace detail {

inline std::vector<std::vector<Rational>> evaluate_matrix(const PolyMatrix<Rational>& M,
                                                          const std::vector<Rational>& pt) {
    std::vector<std::vector<Rational>> m(M.rows, std::vector<Rational>(M.cols));
    for (int i = 0; i < M.rows; ++i)
        for (int j = 0; j < M.cols; ++j) m[i][j] = M.at(i, j).evaluate(pt);
    return m;
}

template <class K>
Polynomial<K> poly_determinant(const PolyMatrix<K>& M, const std::vector<int>& rows,
                               const std::vector<int>& cols) {
    // cofactor expansion; callers cap the size
    const int k = static_cast<int>(rows.size());
    if (k == 0) return Polynomial<K>::constant(M.varspace(), K(1));
    if (k == 1) return M.at(rows[0], cols[0]);
    Polynomial<K> det(M.varspace());
    std::vector<int> sub_rows(rows.begin() + 1, rows.end());
    for (int j = 0; j < k; ++j) {
        if (M.at(rows[0], cols[j]).is_zero()) continue;
        std::vector<int> sub_cols;
        for (int c = 0; c < k; ++c)
            if (c != j) sub_cols.push_back(cols[c]);
        Polynomial<K> cof = M.at(rows[0], cols[j]) * poly_determinant(M, sub_rows, sub_cols);
        if (j % 2 == 0)
            det += cof;
        else
            det -= cof;
    }
    return det;
}

inline void subsets_of_size(int n, int k, const std::function<bool(const std::vector<int>&)>& f) {
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    if (k == 0) { f(idx); return; }
    for (;;) {
        if (f(idx)) return;
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) return;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace detail

// Lower-bound certificate for the generic rank of a polynomial matrix via
// seeded random evaluation (the rank at any point is a sound lower bound).
// With exact=true and min dimension <= 6 the generic rank is also decided by
// symbolic minor expansion, and more points are drawn until a witness for it
// is found.
inline RankCertificate generic_rank(const PolyMatrix<Rational>& M, const RankOptions& opt = {}) {
    if (opt.trials < 1) throw std::invalid_argument("generic_rank: trials >= 1");
    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<long> dist(-opt.coordinate_bound, opt.coordinate_bound);
    const int dim = M.varspace().dim();
    auto draw_point = [&] {
        std::vector<Rational> pt;
        pt.reserve(dim);
        for (int i = 0; i < dim; ++i) pt.emplace_back(dist(rng));
        return pt;
    };

    int target = -1;  // exact generic rank when known
    if (opt.exact && std::min(M.rows, M.cols) <= 6) {
        for (int r = std::min(M.rows, M.cols); r >= 1 && target < 0; --r) {
            detail::subsets_of_size(M.rows, r, [&](const std::vector<int>& rs) {
                bool found = false;
                detail::subsets_of_size(M.cols, r, [&](const std::vector<int>& cs) {
                    if (!detail::poly_determinant(M, rs, cs).is_zero()) {
                        target = r;
                        found = true;
                    }
                    return found;
                });
                return found;
            });
        }
        if (target < 0) target = 0;
    }

    RankCertificate best;
    int tries = opt.trials;
    for (int t = 0; t < tries; ++t) {
        std::vector<Rational> pt = draw_point();
        auto rr = linalg::rank_with_pivots(detail::evaluate_matrix(M, pt));
        if (rr.rank > best.claimed_rank) {
            RankCertificate cand{rr.rank, pt, rr.row_set, rr.col_set,
                                 minor_at(M, pt, rr.row_set, rr.col_set)};
            if (cand.minor_value != 0) best = std::move(cand);
        }
        // keep drawing while an exact target is known but not yet witnessed
        if (target >= 0 && best.claimed_rank < target && t + 1 == tries && tries < 1024)
            ++tries;
    }
    if (!recheck(M, best)) throw std::logic_error("generic_rank: emitted certificate failed recheck");
    return best;
}

// rk H(g) is a lower bound on the communication complexity of computing g.
inline RankCertificate cc_lower_bound(const RPoly& g, const RankOptions& opt = {}) {
    return generic_rank(hessian(g), opt);
}

inline RPoly inner_product_poly(int n) {
    VarSpace vs(n, n);
    RPoly f(vs);
    for (int i = 0; i < n; ++i) f += RPoly::variable(vs, i) * RPoly::variable(vs, n + i);
    return f;
}

struct DivisorLemmaResult {
    bool holds = false;
    RankCertificate cert;
    RPoly g;
};

// For g = f^m h with f = sum X_i Y_i and f not dividing h, certifies
// rk H(g) >= n - 3.
inline DivisorLemmaResult check_divisor_lemma(int n, int m, const RPoly& h,
                                              const RankOptions& opt = {}) {
    RPoly f = inner_product_poly(n);
    if (h.varspace() != f.varspace())
        throw std::invalid_argument("divisor lemma: h must live in the 2n-variable XY space");
    TermOrder order = TermOrder::default_order(f.varspace());
    if (h.is_zero() || divides(f, h, order))
        throw std::invalid_argument("divisor lemma: h must not be a multiple of f");
    RPoly g = h;
    for (int i = 0; i < m; ++i) g *= f;
    DivisorLemmaResult res;
    res.g = g;
    res.cert = generic_rank(hessian(g), opt);
    res.holds = res.cert.claimed_rank >= n - 3;
    return res;
}

// Rank over Q of the exponent vectors of the least terms of the compositions
// P_j(g_1,...,g_s); at most s of them can be independent.
inline int exponent_rank(const std::vector<RPoly>& inner, const std::vector<RPoly>& outer,
                         const TermOrder& order) {
    std::vector<Expo> vectors;
    for (std::size_t j = 0; j < outer.size(); ++j) {
        RPoly composed = compose(outer[j], inner);
        if (composed.is_zero())
            throw std::invalid_argument("exponent_rank: composition " + std::to_string(j) +
                                        " is identically zero");
        vectors.push_back(exponent_vector(composed, order));
    }
    return linalg::integer_rank(vectors);
}

// ---- orthant adversary -------------------------------------------------------

struct FoolingReport {
    std::vector<int> flip;  // the GF(2) vector m
    SignPoint point_a;
    SignPoint point_b;
    std::vector<Expo> exponent_vectors;
    bool transcripts_identical = false;
    bool membership_a = false;
    bool membership_b = false;
};

struct AdversaryResult {
    enum class Kind { DirectMisclassification, FoolingPair, None };
    Kind kind = Kind::None;
    std::optional<FoolingReport> report;
    Verdict verdict_at_a = Verdict::Reject;  // for direct misclassification
};

inline bool recheck(const FoolingReport& r) {
    if (std::all_of(r.flip.begin(), r.flip.end(), [](int b) { return b == 0; })) return false;
    for (const auto& k : r.exponent_vectors) {
        int dot = 0;
        for (std::size_t i = 0; i < r.flip.size(); ++i) dot += r.flip[i] * k[i];
        if (dot % 2 != 0) return false;
    }
    return r.transcripts_identical && r.membership_a != r.membership_b;
}

// The fooling-pair adversary against a protocol claiming to recognize the
// open orthant.  Follows the all-positive infinitesimal input; if accepted,
// looks for a sign flip invisible to every test along that path.
inline AdversaryResult orthant_adversary(const ProtocolTree<Rational>& tree,
                                         const TermOrder& order) {
    const int dim = tree.varspace.dim();
    SignPoint a(std::vector<int>(dim, 1));
    Transcript<Rational> tr_a = run_infinitesimal(tree, a, order);

    AdversaryResult res;
    if (tr_a.verdict != Verdict::Accept) {
        // the all-positive point is in the orthant; rejecting it is already wrong
        res.kind = AdversaryResult::Kind::DirectMisclassification;
        res.verdict_at_a = tr_a.verdict;
        return res;
    }

    std::vector<Expo> ks;
    for (const auto& t : tr_a.composed_tests)
        if (!t.is_zero()) ks.push_back(exponent_vector(t, order));
    auto m = gf2::lex_min_nullvector(ks, dim);
    if (!m) {
        res.kind = AdversaryResult::Kind::None;
        return res;
    }

    std::vector<int> signs(dim, 1);
    for (int i = 0; i < dim; ++i)
        if ((*m)[i]) signs[i] = -1;
    SignPoint b(signs);
    Transcript<Rational> tr_b = run_infinitesimal(tree, b, order);

    FoolingReport report;
    report.flip = *m;
    report.point_a = a;
    report.point_b = b;
    report.exponent_vectors = std::move(ks);
    report.transcripts_identical =
        tr_a.path == tr_b.path && tr_a.sign_tuples == tr_b.sign_tuples;
    report.membership_a = true;
    report.membership_b =
        std::all_of(b.signs.begin(), b.signs.end(), [](int s) { return s > 0; });
    if (!recheck(report))
        throw std::logic_error("orthant_adversary: fooling report failed verification");
    res.kind = AdversaryResult::Kind::FoolingPair;
    res.report = std::move(report);
    return res;
}

// ---- the M-matrix determinant ------------------------------------------------

// det of the k x k matrix with diagonal l_i(l_i - 1) and off-diagonal l_i l_j:
// (-1)^(k+1) l_1...l_k (l_1+...+l_k - 1).
inline Rational m_matrix_det(const std::vector<long>& l) {
    if (l.empty()) throw std::invalid_argument("m_matrix_det: k >= 1");
    for (long v : l)
        if (v < 1) throw std::invalid_argument("m_matrix_det: entries must be positive");
    Rational prod(1);
    Rational sum(0);
    for (long v : l) {
        prod *= Rational(v);
        sum += Rational(v);
    }
    Rational det = prod * (sum - 1);
    if (l.size() % 2 == 0) det = -det;  // (-1)^(k+1)
    return det;
}

inline std::vector<std::vector<Rational>> m_matrix(const std::vector<long>& l) {
    const int k = static_cast<int>(l.size());
    std::vector<std::vector<Rational>> m(k, std::vector<Rational>(k));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            m[i][j] = i == j ? Rational(l[i]) * Rational(l[i] - 1)
                             : Rational(l[i]) * Rational(l[j]);
    return m;
}

// ---- minor lemma -------------------------------------------------------------

struct MinorLemmaResult {
    bool holds = false;
    Expo lt_exponents;
    RankCertificate cert;
};

// If Z_1...Z_k divides lt(P) (P in the XZ frame, k > 1) then the mixed
// Hessian of P has rank >= k.
inline MinorLemmaResult minor_lemma_check(const RPoly& P, int k, const TermOrder& order,
                                          const RankOptions& opt = {}) {
    if (k <= 1) throw std::invalid_argument("minor lemma: requires k > 1");
    if (P.varspace().frame != Frame::XZ)
        throw std::invalid_argument("minor lemma: P must be in the XZ frame");
    const int n = P.varspace().n_x;
    if (k > n) throw std::invalid_argument("minor lemma: k exceeds n");
    MinorLemmaResult res;
    res.lt_exponents = exponent_vector(P, order);
    for (int i = 0; i < k; ++i)
        if (res.lt_exponents[n + i] < 1)
            throw std::invalid_argument("minor lemma: Z_" + std::to_string(i + 1) +
                                        " does not divide lt(P)");
    RPoly p_xy = change_frame(P, Frame::XY);
    res.cert = generic_rank(hessian(p_xy), opt);
    res.holds = res.cert.claimed_rank >= k;
    return res;
}

// ---- hyperplane audit --------------------------------------------------------

struct AuditReport {
    int n = 0;
    SetKind target = SetKind::PolyhedronS;
    std::vector<SignPoint> points;               // points[0] = u
    std::vector<bool> expected;                  // oracle membership per point
    std::vector<std::vector<bool>> correct;      // member x point
    int selected = -1;
    bool premise_violated = false;
    std::vector<int> weak_points;                // points with weighted correctness <= threshold
    Rational threshold = make_rational(2L, 3L);
    RPoly path_prod;                             // product along u's path, XY frame
    Expo lt_exponents;                           // least term in the XZ frame
    std::vector<int> divisible_z;                // 0-based i with Z_{i+1} | lt
    RankCertificate rank_cert;
    std::string conclusion;
};

// Runs every member of the family on u and the flipped/zeroed test points,
// selects a member meeting the correctness premise, and extracts the rank
// certificate from its path product at u.
inline AuditReport hyperplane_audit(const ProbabilisticProtocol<Rational>& pp, SetKind target,
                                    const TermOrder& order, const RankOptions& opt = {},
                                    Rational threshold = make_rational(2L, 3L)) {
    if (pp.members.empty()) throw std::invalid_argument("audit: empty family");
    const VarSpace& vs = pp.members.front().tree.varspace;
    if (vs.n_x != vs.n_y) throw std::invalid_argument("audit: requires n_x == n_y");
    if (target != SetKind::PolyhedronS && target != SetKind::Arrangement)
        throw std::invalid_argument("audit: target must be the polyhedron S or the arrangement");
    const int n = vs.n_x;

    AuditReport rep;
    rep.n = n;
    rep.target = target;
    rep.threshold = threshold;
    FoolingPoints fp = fooling_points(n);
    rep.points.push_back(fp.u);
    const auto& tests = target == SetKind::PolyhedronS ? fp.u_flipped : fp.u_zeroed;
    for (const auto& p : tests) rep.points.push_back(p);

    SetDescriptor set = target == SetKind::PolyhedronS ? SetDescriptor::polyhedron_s(n)
                                                       : SetDescriptor::arrangement(n);
    for (const auto& p : rep.points)
        rep.expected.push_back(membership_at_signpoint(set, p, order));

    for (const auto& m : pp.members) {
        std::vector<bool> row;
        for (std::size_t pi = 0; pi < rep.points.size(); ++pi) {
            Verdict v = run_infinitesimal(m.tree, rep.points[pi], order).verdict;
            row.push_back((v == Verdict::Accept) == rep.expected[pi]);
        }
        rep.correct.push_back(std::move(row));
    }

    const int need = (n + 1) / 2;
    for (std::size_t mi = 0; mi < pp.members.size(); ++mi) {
        const auto& row = rep.correct[mi];
        if (!row[0]) continue;
        int good = 0;
        for (std::size_t pi = 1; pi < row.size(); ++pi) good += row[pi];
        if (good >= need) {
            rep.selected = static_cast<int>(mi);
            break;
        }
    }

    if (rep.selected < 0) {
        // no member meets the premise; check which points break the 2/3 bound
        for (std::size_t pi = 0; pi < rep.points.size(); ++pi) {
            Rational w(0);
            for (std::size_t mi = 0; mi < pp.members.size(); ++mi)
                if (rep.correct[mi][pi]) w += pp.members[mi].weight;
            if (w <= threshold) rep.weak_points.push_back(static_cast<int>(pi));
        }
        rep.premise_violated = true;
        rep.conclusion = "no member is correct on u and on at least " + std::to_string(need) +
                         " test points; the correctness premise fails at " +
                         std::to_string(rep.weak_points.size()) + " point(s)";
        return rep;
    }

    Transcript<Rational> tr = run_infinitesimal(pp.members[rep.selected].tree, fp.u, order);
    rep.path_prod = path_product(tr);
    std::ostringstream conc;
    conc << "member " << rep.selected << " is correct on u and enough test points; ";
    if (rep.path_prod.is_zero()) {
        conc << "path product vanishes identically, no rank certificate extracted";
    } else {
        RPoly prod_xz = change_frame(rep.path_prod, Frame::XZ);
        TermOrder xz_order = TermOrder::default_order(prod_xz.varspace());
        rep.lt_exponents = exponent_vector(prod_xz, xz_order);
        for (int i = 0; i < n; ++i)
            if (rep.lt_exponents[n + i] >= 1) rep.divisible_z.push_back(i);
        rep.rank_cert = generic_rank(hessian(rep.path_prod), opt);
        conc << "lt(P) in the XZ frame is divisible by " << rep.divisible_z.size()
             << " of the Z_i; certified mixed-Hessian rank " << rep.rank_cert.claimed_rank
             << ", so every protocol family for this target needs depth >= "
             << rep.rank_cert.claimed_rank;
    }
    rep.conclusion = conc.str();
    return rep;
}

}  // namespace ccreal

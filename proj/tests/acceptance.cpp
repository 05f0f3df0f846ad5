// Acceptance suite: ten end-to-end checks, one pass/fail line each.
// Exits 0 only if every check passes within its time budget.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ccreal/certify.hpp"
#include "ccreal/protocol_io.hpp"
#include "ccreal/sampler.hpp"
#include "test_util.hpp"

using namespace ccreal;
using testutil::numeric_sign_oracle;
using testutil::random_party_poly;
using testutil::random_rpoly;
using testutil::random_tree;

namespace {

struct Check {
    std::string name;
    double budget_s;
    std::function<bool(std::string&)> run;
};

// random nonzero polynomial of total degree <= 2 in the full XY space
RPoly random_quadratic(std::mt19937_64& rng, VarSpace vs) {
    std::uniform_int_distribution<int> nterms(1, 4);
    std::uniform_int_distribution<int> var(0, vs.dim() - 1);
    std::uniform_int_distribution<int> kind(0, 2);
    std::uniform_int_distribution<long> coeff(-9, 9);
    for (;;) {
        RPoly h(vs);
        int t = nterms(rng);
        for (int i = 0; i < t; ++i) {
            Expo e(vs.dim(), 0);
            int k = kind(rng);
            if (k >= 1) e[var(rng)] += 1;
            if (k >= 2) e[var(rng)] += 1;
            h.add_term(std::move(e), Rational(coeff(rng)));
        }
        if (!h.is_zero()) return h;
    }
}

bool inner_product_rank(std::string& detail) {
    for (int n = 1; n <= 12; ++n) {
        auto cert = cc_lower_bound(inner_product_poly(n));
        if (cert.claimed_rank != n || !recheck(hessian(inner_product_poly(n)), cert)) {
            detail = "n=" + std::to_string(n) + " gave rank " + std::to_string(cert.claimed_rank);
            return false;
        }
    }
    return true;
}

bool divisor_rank_bound(std::string& detail) {
    std::mt19937_64 rng(2026);
    int done = 0;
    while (done < 100) {
        int n = 3 + static_cast<int>(rng() % 3);
        int m = 1 + static_cast<int>(rng() % 2);
        VarSpace vs(n, n);
        RPoly f = inner_product_poly(n);
        RPoly h = random_quadratic(rng, vs);
        if (divides(f, h, TermOrder::default_order(vs))) continue;
        auto res = check_divisor_lemma(n, m, h);
        if (!res.holds || !recheck(hessian(res.g), res.cert)) {
            std::ostringstream os;
            os << "case " << done << " (n=" << n << ", m=" << m << ", h=" << h.str()
               << ") certified only rank " << res.cert.claimed_rank;
            detail = os.str();
            return false;
        }
        ++done;
    }
    return true;
}

bool product_matrix_det(std::string& detail) {
    int cases = 0;
    for (int k = 2; k <= 4; ++k) {
        std::vector<long> l(k, 1);
        for (;;) {
            if (m_matrix_det(l) != linalg::determinant(m_matrix(l))) {
                std::ostringstream os;
                os << "mismatch at l = (";
                for (long v : l) os << v << ",";
                os << ")";
                detail = os.str();
                return false;
            }
            ++cases;
            int i = 0;
            while (i < k && l[i] == 4) l[i++] = 1;
            if (i == k) break;
            ++l[i];
        }
    }
    if (cases != 336) {
        detail = "expected 336 cases, ran " + std::to_string(cases);
        return false;
    }
    return true;
}

bool shallow_protocols_fooled(std::string& detail) {
    std::mt19937_64 rng(2027);
    for (int iter = 0; iter < 100; ++iter) {
        int total = 2 + static_cast<int>(rng() % 5);
        int nx = 1 + static_cast<int>(rng() % (total - 1));
        int ny = total - nx;
        int d = 1 + static_cast<int>(rng() % (total - 1));
        auto t = random_tree(rng, nx, ny, d, 2, 2);
        if (!validate(t).empty()) {
            detail = "generated protocol failed validation";
            return false;
        }
        TermOrder o = TermOrder::default_order(t.varspace);
        auto res = orthant_adversary(t, o);
        if (res.kind == AdversaryResult::Kind::DirectMisclassification) continue;
        if (res.kind != AdversaryResult::Kind::FoolingPair) {
            detail = "no witness for protocol " + std::to_string(iter) + " of depth " +
                     std::to_string(d) + " on " + std::to_string(total) + " variables";
            return false;
        }
        // independent recheck: rerun both points, compare transcripts, check
        // the flip is orthogonal mod 2 and the points disagree on membership
        const auto& rep = *res.report;
        auto ta = run_infinitesimal(t, rep.point_a, o);
        auto tb = run_infinitesimal(t, rep.point_b, o);
        bool same = ta.path == tb.path && ta.sign_tuples == tb.sign_tuples;
        bool in_a = true, in_b = true;
        for (int s : rep.point_a.signs) in_a &= s > 0;
        for (int s : rep.point_b.signs) in_b &= s > 0;
        if (!same || in_a == in_b || !recheck(rep) || ta.verdict != tb.verdict) {
            detail = "fooling report failed independent recheck at protocol " +
                     std::to_string(iter);
            return false;
        }
    }
    for (int nx = 1; nx <= 3; ++nx)
        for (int ny = 1; ny <= 3; ++ny) {
            auto full = build_orthant_det(nx, ny);
            if (orthant_adversary(full, TermOrder::default_order(full.varspace)).kind !=
                AdversaryResult::Kind::None) {
                detail = "full-depth orthant protocol was attacked";
                return false;
            }
        }
    return true;
}

bool randomized_orthant_error(std::string& detail) {
    for (int n = 1; n <= 3; ++n) {
        auto pp = build_orthant_prob(n, n);
        auto set = SetDescriptor::orthant(n, n);
        const int dim = 2 * n;
        long total = 1;
        for (int i = 0; i < dim; ++i) total *= 3;
        for (long code = 0; code < total; ++code) {
            long c = code;
            std::vector<Rational> in;
            for (int i = 0; i < dim; ++i) {
                in.emplace_back(c % 3 - 1);
                c /= 3;
            }
            Rational p = acceptance_probability(pp, in);
            bool member = membership(set, in);
            if ((member && p != 1) || (!member && p > make_rational(1L, 4L))) {
                std::ostringstream os;
                os << "n=" << n << " grid point " << code << ": member=" << member
                   << " probability=" << p;
                detail = os.str();
                return false;
            }
        }
    }
    return true;
}

bool infinitesimal_sign_oracle(std::string& detail) {
    std::mt19937_64 rng(2028);
    for (int i = 0; i < 500; ++i) {
        int nx = 1 + static_cast<int>(rng() % 3);
        int ny = 1 + static_cast<int>(rng() % (4 - nx));
        VarSpace vs(nx, ny);
        TermOrder o = TermOrder::default_order(vs);
        RPoly g = random_rpoly(rng, vs, 5, 4, 9, true);
        int dim = vs.dim();
        for (long mask = 0; mask < (1L << dim); ++mask) {
            std::vector<int> signs(dim);
            for (int k = 0; k < dim; ++k) signs[k] = (mask >> k & 1) ? -1 : 1;
            if (sign_at(g, SignPoint(signs), o) != numeric_sign_oracle(g, signs)) {
                detail = "disagreement on poly " + std::to_string(i) + ": " + g.str();
                return false;
            }
        }
    }
    return true;
}

bool exponent_rank_bound(std::string& detail) {
    std::mt19937_64 rng(2029);
    VarSpace vs(2, 2);
    TermOrder o = TermOrder::default_order(vs);
    int done = 0;
    while (done < 200) {
        int s = 1 + static_cast<int>(rng() % 3);
        int N = 1 + static_cast<int>(rng() % 6);
        std::vector<RPoly> inner, outer;
        for (int i = 0; i < s; ++i) inner.push_back(random_rpoly(rng, vs, 3, 3, 5, true));
        VarSpace gs(s, 0);
        for (int j = 0; j < N; ++j) outer.push_back(random_rpoly(rng, gs, 3, 3, 5, true));
        int r;
        try {
            r = exponent_rank(inner, outer, o);
        } catch (const std::invalid_argument&) {
            continue;  // a composition vanished; redraw
        }
        if (r > s) {
            detail = "instance " + std::to_string(done) + ": rank " + std::to_string(r) +
                     " exceeds s=" + std::to_string(s);
            return false;
        }
        ++done;
    }
    return true;
}

bool minor_rank_bound(std::string& detail) {
    std::mt19937_64 rng(2030);
    for (int iter = 0; iter < 100; ++iter) {
        int k = 2 + static_cast<int>(rng() % 2);
        int n = k + static_cast<int>(rng() % (5 - k));
        VarSpace xz(n, n, Frame::XZ);
        RPoly p = RPoly::constant(xz, Rational(1));
        for (int i = 0; i < k; ++i) p *= RPoly::variable(xz, n + i);
        p *= random_rpoly(rng, xz, 3, 2, 5, true);
        auto res = minor_lemma_check(p, k, TermOrder::default_order(xz));
        if (!res.holds || !recheck(hessian(change_frame(p, Frame::XY)), res.cert)) {
            std::ostringstream os;
            os << "instance " << iter << " (k=" << k << ", n=" << n << ") certified only rank "
               << res.cert.claimed_rank;
            detail = os.str();
            return false;
        }
    }
    return true;
}

bool chain_rule_identity(std::string& detail) {
    std::mt19937_64 rng(2031);
    for (int iter = 0; iter < 100; ++iter) {
        int nx = 1 + static_cast<int>(rng() % 2);
        int ny = 1 + static_cast<int>(rng() % 2);
        int r1 = 1 + static_cast<int>(rng() % 3);
        int r2 = 1 + static_cast<int>(rng() % 3);
        VarSpace ambient(nx, ny);
        std::vector<RPoly> a, b, all;
        for (int i = 0; i < r1; ++i)
            a.push_back(random_party_poly(rng, ambient, Party::X, 3, 2, 4, false));
        for (int j = 0; j < r2; ++j)
            b.push_back(random_party_poly(rng, ambient, Party::Y, 3, 2, 4, false));
        all = a;
        all.insert(all.end(), b.begin(), b.end());
        RPoly P = random_rpoly(rng, VarSpace(r1, r2), 4, 2, 4);
        RPoly g = compose(P, all);

        auto HP = hessian(P);
        PolyMatrix<Rational> HPab(HP.rows, HP.cols, ambient);
        for (int i = 0; i < HP.rows; ++i)
            for (int j = 0; j < HP.cols; ++j) HPab.at(i, j) = compose(HP.at(i, j), all);
        std::vector<int> xvars, yvars;
        for (int i = 0; i < nx; ++i) xvars.push_back(i);
        for (int j = 0; j < ny; ++j) yvars.push_back(nx + j);
        if (!(hessian(g) == jacobian(a, xvars) * HPab * jacobian(b, yvars).transposed())) {
            detail = "identity failed at instance " + std::to_string(iter);
            return false;
        }
    }
    return true;
}

bool zoo_round_trip(std::string& detail) {
    struct Case {
        std::string name;
        ProtocolTree<Rational> tree;
        SetDescriptor set;
        std::vector<std::vector<Rational>> crafted;
    };
    auto rv = [](std::initializer_list<long> xs) {
        std::vector<Rational> v;
        for (long x : xs) v.emplace_back(x);
        return v;
    };
    std::vector<Case> cases;
    cases.push_back({"orthant(2,1)", build_orthant_det(2, 1), SetDescriptor::orthant(2, 1),
                     {rv({1, 0, 2}), rv({3, 5, 7}), rv({-1, 2, 2})}});
    cases.push_back({"orthant(2,2)", build_orthant_det(2, 2), SetDescriptor::orthant(2, 2),
                     {rv({1, 2, 3, 4}), rv({1, 2, 0, 4})}});
    cases.push_back({"halfspaces n=2", build_polyhedron_det(2), SetDescriptor::polyhedron_s(2),
                     {rv({1, 1, -1, 2}), rv({1, 1, 0, 2}), rv({5, -2, -4, 3})}});
    cases.push_back({"halfspaces n=3", build_polyhedron_det(3), SetDescriptor::polyhedron_s(3),
                     {rv({1, 1, 1, -1, -1, -1}), rv({1, 2, 3, 0, -1, -2})}});
    cases.push_back({"hyperplanes n=2", build_arrangement_det<Rational>(2),
                     SetDescriptor::arrangement(2),
                     {rv({1, 2, -1, 5}), rv({1, 2, -2, 4}), rv({1, 2, 3, 4})}});
    cases.push_back({"emptiness n=2", build_emptiness_det(2), SetDescriptor::emptiness(2),
                     {rv({1, 2, 2, 5}), rv({3, 3, 9, 3}), rv({1, 2, 3, 4})}});
    cases.push_back({"emptiness n=3", build_emptiness_det(3), SetDescriptor::emptiness(3),
                     {rv({1, 2, 3, 3, 4, 5}), rv({1, 2, 3, 4, 5, 6})}});
    cases.push_back({"knapsack n=1", build_knapsack_det(1), SetDescriptor::knapsack(1),
                     {rv({2, -2}), rv({0, 5}), rv({2, 3})}});
    cases.push_back({"knapsack n=2", build_knapsack_det(2), SetDescriptor::knapsack(2),
                     {rv({1, 3, -4, 7}), rv({2, -2, 5, 9}), rv({5, 7, -5, -7}), rv({1, 3, 5, 7})}});

    const int per_case = 1112;  // 9 * 1112 > 10^4 sampled inputs
    for (const auto& c : cases) {
        GaussianRationalSampler sampler(7);
        auto inputs = c.crafted;
        for (int i = 0; i < per_case; ++i)
            inputs.push_back(sampler.draw_vector(c.set.varspace().dim()));
        for (const auto& in : inputs) {
            bool accept = run_rational(c.tree, in).verdict == Verdict::Accept;
            if (accept != membership(c.set, in)) {
                detail = c.name + " disagrees with its membership oracle";
                return false;
            }
        }
        json j = tree_to_json(c.tree);
        auto back = tree_from_json<Rational>(j);
        if (tree_to_json(back).dump() != j.dump()) {
            detail = c.name + " does not round-trip through serialization";
            return false;
        }
    }

    // complex protocol vs its real double, 100 inputs, depth at most doubled
    auto ct = build_arrangement_det<CRational>(2);
    auto rt = realify(ct);
    if (depth(rt) > 2 * depth(ct)) {
        detail = "realified depth exceeds twice the complex depth";
        return false;
    }
    std::mt19937_64 rng(2032);
    std::uniform_int_distribution<long> cdist(-4, 4);
    for (int i = 0; i < 100; ++i) {
        std::vector<CRational> w;
        std::vector<Rational> uv;
        for (int k = 0; k < 4; ++k) {
            Rational re(cdist(rng)), im(cdist(rng));
            if (i % 4 == 0 && k == 2) {
                re = -w[0].re;  // land on the hyperplane y1 = -x1
                im = -w[0].im;
            }
            w.emplace_back(re, im);
            uv.push_back(re);
            uv.push_back(im);
        }
        if (run_rational(ct, w).verdict != run_rational(rt, uv).verdict) {
            detail = "realified protocol disagrees on input " + std::to_string(i);
            return false;
        }
    }
    json cj = tree_to_json(ct);
    if (tree_to_json(tree_from_json<CRational>(cj)).dump() != cj.dump()) {
        detail = "complex protocol does not round-trip through serialization";
        return false;
    }
    auto pp = build_orthant_prob(1, 1);
    json pj = prob_to_json(pp);
    if (prob_to_json(prob_from_json<Rational>(pj)).dump() != pj.dump()) {
        detail = "probabilistic family does not round-trip through serialization";
        return false;
    }
    return true;
}

}  // namespace

int main() {
    std::vector<Check> checks = {
        {"inner-product Hessian rank equals n for n = 1..12", 10, inner_product_rank},
        {"divisor factorizations certify rank >= n-3 in 100/100 cases", 60, divisor_rank_bound},
        {"product-matrix determinant closed form, 336/336 cases", 5, product_matrix_det},
        {"every shallow protocol is directly wrong or admits a fooling pair, 100/100", 60,
         shallow_protocols_fooled},
        {"randomized orthant family: exact error <= 1/4 on the full sign grid, n = 1..3", 30,
         randomized_orthant_error},
        {"infinitesimal signs match the numeric realization, 500 polynomials", 30,
         infinitesimal_sign_oracle},
        {"least-term exponent rank stays <= s, 200/200 instances", 10, exponent_rank_bound},
        {"Z-divisible least terms certify Hessian rank >= k, 100/100 instances", 60,
         minor_rank_bound},
        {"Hessian chain-rule factorization holds exactly, 100/100 instances", 30,
         chain_rule_identity},
        {"zoo protocols agree with oracles, realify and serialization round-trip", 120,
         zoo_round_trip},
    };

    int failures = 0;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        std::string detail;
        auto t0 = std::chrono::steady_clock::now();
        bool ok = false;
        try {
            ok = checks[i].run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > checks[i].budget_s) {
            ok = false;
            detail += (detail.empty() ? "" : "; ") + std::string("over time budget");
        }
        std::printf("[%2zu] %s  %6.2fs/%-3.0fs  %s%s%s\n", i + 1, ok ? "PASS" : "FAIL", secs,
                    checks[i].budget_s, checks[i].name.c_str(), detail.empty() ? "" : " -- ",
                    detail.c_str());
        failures += !ok;
    }
    if (failures) std::printf("%d of %zu checks failed\n", failures, checks.size());
    return failures ? 1 : 0;
}

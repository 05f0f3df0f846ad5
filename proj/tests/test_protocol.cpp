#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ccreal/protocol_io.hpp"
#include "ccreal/zoo.hpp"
#include "test_util.hpp"

using namespace ccreal;

namespace {

std::vector<Rational> rvec(std::initializer_list<long> xs) {
    std::vector<Rational> v;
    for (long x : xs) v.emplace_back(x);
    return v;
}

}  // namespace

TEST_CASE("validate accepts the orthant protocol and reports violations") {
    auto t = build_orthant_det(2, 2);
    CHECK(validate(t).empty());

    // X-party node whose message contains Y1
    auto bad = t;
    bad.nodes.at(0).message = RPoly::variable(bad.varspace, 2);
    auto v = validate(bad);
    REQUIRE(!v.empty());
    CHECK(v.front().find("other party") != std::string::npos);

    // test referencing Q3 at depth 2
    auto bad2 = t;
    bad2.nodes.at(1).tests[0] = RPoly::variable(VarSpace(3, 0), 2);
    v = validate(bad2);
    REQUIRE(!v.empty());
    CHECK(v.front().find("arity") != std::string::npos);
}

TEST_CASE("depth") {
    auto t1 = build_orthant_det(1, 0);
    CHECK(depth(t1) == 1);
    CHECK(depth(build_orthant_det(2, 2)) == 4);
    CHECK(depth(build_knapsack_det(3)) == 6);
}

TEST_CASE("run_rational on zoo protocols") {
    auto orth = build_orthant_det(1, 1);
    CHECK(run_rational(orth, rvec({1, 1})).verdict == Verdict::Accept);
    CHECK(run_rational(orth, rvec({1, -1})).verdict == Verdict::Reject);

    auto orth4 = build_orthant_det(2, 2);
    auto tr = run_rational(orth4, rvec({1, 0, 5, 2}));
    CHECK(tr.verdict == Verdict::Reject);
    CHECK(tr.path.size() == 2);  // rejected when x2 = 0 is revealed

    auto kn = build_knapsack_det(1);
    CHECK(run_rational(kn, rvec({1, -1})).verdict == Verdict::Accept);

    CHECK_THROWS(run_rational(orth, rvec({1})));
}

TEST_CASE("missing branch is a runtime error with node id") {
    auto t = build_orthant_det(1, 1);
    t.nodes.at(0).branches.pop_back();  // drop the LT branch
    try {
        run_rational(t, rvec({-1, 1}));
        FAIL("expected ProtocolRunError");
    } catch (const ProtocolRunError& e) {
        CHECK(e.node_id == 0);
        CHECK(std::string(e.what()).find("node 0") != std::string::npos);
    }
}

TEST_CASE("run_infinitesimal on the orthant protocol") {
    auto t = build_orthant_det(1, 1);
    TermOrder o = TermOrder::default_order(t.varspace);
    CHECK(run_infinitesimal(t, SignPoint({1, 1}), o).verdict == Verdict::Accept);
    CHECK(run_infinitesimal(t, SignPoint({1, -1}), o).verdict == Verdict::Reject);

    // recorded composed tests reproduce the recorded sign tuples
    auto t4 = build_orthant_det(2, 2);
    TermOrder o4 = TermOrder::default_order(t4.varspace);
    SignPoint p({1, -1, 1, 1});
    auto tr = run_infinitesimal(t4, p, o4);
    std::size_t k = 0;
    for (const auto& tuple : tr.sign_tuples)
        for (Sign s : tuple)
            CHECK(s == sign_from_int(sign_at(tr.composed_tests[k++], p, o4)));
}

TEST_CASE("run determinism") {
    std::mt19937_64 rng(51);
    auto t = testutil::random_tree(rng, 2, 1, 2);
    auto in = testutil::random_point(rng, 3, 9);
    auto a = run_rational(t, in);
    auto b = run_rational(t, in);
    CHECK(a.path == b.path);
    CHECK(a.sign_tuples == b.sign_tuples);
    CHECK(a.verdict == b.verdict);
}

TEST_CASE("path product") {
    auto orth = build_orthant_det(1, 1);
    auto tr = run_rational(orth, rvec({2, 3}));
    CHECK(tr.verdict == Verdict::Accept);
    RPoly xy = RPoly::variable(orth.varspace, 0) * RPoly::variable(orth.varspace, 1);
    CHECK(path_product(tr) == xy);

    Transcript<Rational> empty;
    empty.varspace = orth.varspace;
    CHECK(path_product(empty) == RPoly::constant(orth.varspace, Rational(1)));
}

TEST_CASE("path product does not vanish on an EQ-free rational path") {
    std::mt19937_64 rng(53);
    for (int i = 0; i < 50; ++i) {
        auto t = testutil::random_tree(rng, 1, 1, 2);
        auto in = testutil::random_point(rng, 2, 9);
        auto tr = run_rational(t, in);
        bool has_eq = false;
        for (const auto& tuple : tr.sign_tuples)
            for (Sign s : tuple) has_eq |= s == Sign::EQ;
        if (!has_eq) CHECK(path_product(tr).evaluate(in) != 0);
    }
}

TEST_CASE("acceptance probability of the probabilistic orthant family") {
    auto pp = build_orthant_prob(1, 1);
    CHECK(pp.members.size() == 16);
    CHECK(validate(pp).empty());
    for (const auto& m : pp.members) CHECK(depth(m.tree) == 4);
    CHECK(acceptance_probability(pp, rvec({1, 1})) == Rational(1));
    CHECK(acceptance_probability(pp, rvec({-1, 1})) == make_rational(1L, 4L));
    CHECK(acceptance_probability(pp, rvec({0, 1})) == make_rational(1L, 4L));
}

TEST_CASE("infinitesimal and rational runs agree on realized infinitesimals") {
    std::mt19937_64 rng(59);
    TermOrder dummy;
    for (int i = 0; i < 100; ++i) {
        int nx = 1 + static_cast<int>(rng() % 2);
        int ny = 1 + static_cast<int>(rng() % 2);
        auto t = testutil::random_tree(rng, nx, ny, 2, 2, 2);
        TermOrder o = TermOrder::default_order(t.varspace);
        int dim = nx + ny;
        std::vector<int> signs(dim);
        for (auto& s : signs) s = (rng() & 1) ? 1 : -1;
        SignPoint p(signs);
        Verdict vi = run_infinitesimal(t, p, o).verdict;

        // realize eps_i = delta^(D^i) and shrink delta until the run stabilizes
        long D = 1;
        for (const auto& [id, n] : t.nodes)
            D = std::max<long>(D, n.message.total_degree() * n.tests[0].total_degree() + 1);
        Verdict prev{};
        bool have_prev = false;
        for (long tt = 1; tt < 64; ++tt) {
            std::vector<Rational> pt;
            long scale = 1;
            for (int k = 0; k < dim; ++k) {
                scale *= D;
                pt.push_back(Rational(signs[k]) *
                             make_rational(Integer(1), Integer(1) << (tt * scale)));
            }
            Verdict vr = run_rational(t, pt).verdict;
            if (have_prev && vr == prev) break;
            prev = vr;
            have_prev = true;
        }
        CHECK(vi == prev);
    }
}

TEST_CASE("realify structure and depth") {
    // single complex node: message X1, test Q1, EQ -> accept
    ProtocolTree<CRational> t;
    t.varspace = VarSpace(1, 1);
    t.root = 0;
    ProtocolNode<CRational> n;
    n.id = 0;
    n.party = Party::X;
    n.message = CPoly::variable(t.varspace, 0);
    n.tests.push_back(CPoly::variable(VarSpace(1, 0), 0));
    n.branches.push_back({{Sign::EQ}, Verdict::Accept});
    n.branches.push_back({{Sign::NE}, Verdict::Reject});
    t.nodes.emplace(0, std::move(n));
    CHECK(validate(t).empty());

    auto r = realify(t);
    CHECK(validate(r).empty());
    CHECK(r.varspace == VarSpace(2, 2));
    CHECK(depth(r) == 2);
    // the accept branch is keyed (EQ, EQ) on the (Re, Im) test pair
    const auto& im_node = r.nodes.at(r.node(r.root).branches[0].signs.empty()
                                         ? std::get<int>(r.node(r.root).branches[0].target)
                                         : r.root);
    CHECK(im_node.tests.size() == 2);
    bool found = false;
    for (const auto& b : im_node.branches)
        if (b.signs == std::vector<Sign>{Sign::EQ, Sign::EQ})
            found = std::get<Verdict>(b.target) == Verdict::Accept;
    CHECK(found);
}

TEST_CASE("realify verdict agreement on random complex inputs") {
    auto ct = build_arrangement_det<CRational>(2);
    CHECK(validate(ct).empty());
    auto rt = realify(ct);
    CHECK(validate(rt).empty());
    CHECK(depth(rt) <= 2 * depth(ct));

    std::mt19937_64 rng(61);
    std::uniform_int_distribution<long> c(-4, 4);
    int forced = 0;
    for (int i = 0; i < 100; ++i) {
        std::vector<CRational> w;
        std::vector<Rational> uv;
        for (int k = 0; k < 4; ++k) {
            Rational re(c(rng)), im(c(rng));
            if (i % 5 == 0 && k == 2) {
                // force a hyperplane hit: y1 = -x1
                re = -w[0].re;
                im = -w[0].im;
            }
            w.emplace_back(re, im);
            uv.push_back(re);
            uv.push_back(im);
        }
        auto vc = run_rational(ct, w).verdict;
        auto vr = run_rational(rt, uv).verdict;
        CHECK(vc == vr);
        if (vc == Verdict::Accept) ++forced;
    }
    CHECK(forced > 0);
}

TEST_CASE("serialization round trip for zoo protocols") {
    std::vector<ProtocolTree<Rational>> trees{
        build_orthant_det(2, 2), build_polyhedron_det(2), build_arrangement_det<Rational>(2),
        build_emptiness_det(2), build_knapsack_det(2)};
    for (const auto& t : trees) {
        json j = tree_to_json(t);
        auto back = tree_from_json<Rational>(j);
        CHECK(back.varspace == t.varspace);
        CHECK(back.root == t.root);
        REQUIRE(back.nodes.size() == t.nodes.size());
        for (const auto& [id, n] : t.nodes) {
            const auto& m = back.node(id);
            CHECK(m.party == n.party);
            CHECK(m.message == n.message);
            CHECK(m.tests == n.tests);
            REQUIRE(m.branches.size() == n.branches.size());
            for (std::size_t b = 0; b < n.branches.size(); ++b) {
                CHECK(m.branches[b].signs == n.branches[b].signs);
                CHECK(m.branches[b].target == n.branches[b].target);
            }
        }
        // byte-identical reserialization
        CHECK(tree_to_json(back).dump() == j.dump());
    }

    auto pp = build_orthant_prob(1, 1);
    auto back = prob_from_json<Rational>(prob_to_json(pp));
    REQUIRE(back.members.size() == pp.members.size());
    for (std::size_t i = 0; i < pp.members.size(); ++i) {
        CHECK(back.members[i].weight == pp.members[i].weight);
        CHECK(back.members[i].tree.nodes.size() == pp.members[i].tree.nodes.size());
    }
}

TEST_CASE("parse errors carry diagnostics") {
    CHECK_THROWS_AS(parse_protocol("{not json"), ParseError);

    // malformed branch key length
    json j = tree_to_json(build_orthant_det(1, 1));
    j["nodes"][0]["branches"][0]["signs"] = json::array({">", ">"});
    CHECK_THROWS_AS(tree_from_json<Rational>(j), ParseError);

    // weights summing to 2/3 flagged by validation
    auto pp = build_orthant_prob(1, 0);
    pp.members.pop_back();
    auto v = validate(pp);
    REQUIRE(!v.empty());
    CHECK(v.front().find("sum") != std::string::npos);
}

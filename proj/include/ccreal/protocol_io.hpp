#pragma once

#include <string>
#include <variant>

#include <json.hpp>

#include "ccreal/certify.hpp"
#include "ccreal/protocol.hpp"

namespace ccreal {

using nlohmann::json;

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- scalars ----------------------------------------------------------------

inline json rational_to_json_pair(const Rational& q) {
    json j = json::array();
    Integer num = numerator(q), den = denominator(q);
    // emit small values as numbers, big ones as decimal strings
    auto emit = [](const Integer& v) -> json {
        if (v >= std::numeric_limits<std::int64_t>::min() &&
            v <= std::numeric_limits<std::int64_t>::max())
            return static_cast<std::int64_t>(v);
        return v.str();
    };
    j.push_back(emit(num));
    j.push_back(emit(den));
    return j;
}

inline Integer integer_from_json(const json& j, const std::string& where) {
    if (j.is_number_integer()) return Integer(j.get<std::int64_t>());
    if (j.is_string()) return Integer(j.get<std::string>());
    throw ParseError(where + ": expected integer or integer string");
}

inline Rational rational_from_json_pair(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) throw ParseError(where + ": expected [num, den]");
    Integer den = integer_from_json(j[1], where);
    if (den == 0) throw ParseError(where + ": zero denominator");
    return make_rational(integer_from_json(j[0], where), den);
}

// ---- polynomials ------------------------------------------------------------
// Real term list: [[num, den, [e1,...,ek]], ...]
// Complex term list: [[re_num, re_den, im_num, im_den, [e1,...,ek]], ...]
// Canonical order (ascending lexicographic exponent vectors) is the map order.

inline json poly_to_json(const RPoly& p) {
    json terms = json::array();
    for (const auto& [e, c] : p.terms()) {
        json t = json::array();
        t.push_back(rational_to_json_pair(c)[0]);
        t.push_back(rational_to_json_pair(c)[1]);
        t.push_back(e);
        terms.push_back(std::move(t));
    }
    return terms;
}

inline json poly_to_json(const CPoly& p) {
    json terms = json::array();
    for (const auto& [e, c] : p.terms()) {
        json re = rational_to_json_pair(c.re), im = rational_to_json_pair(c.im);
        json t = json::array();
        t.push_back(re[0]);
        t.push_back(re[1]);
        t.push_back(im[0]);
        t.push_back(im[1]);
        t.push_back(e);
        terms.push_back(std::move(t));
    }
    return terms;
}

inline Expo expo_from_json(const json& j, int dim, const std::string& where) {
    if (!j.is_array() || static_cast<int>(j.size()) != dim)
        throw ParseError(where + ": exponent vector must have length " + std::to_string(dim));
    Expo e;
    for (const auto& v : j) {
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
            throw ParseError(where + ": exponents must be naturals");
        e.push_back(v.get<int>());
    }
    return e;
}

template <class K>
Polynomial<K> poly_from_json(const json& j, VarSpace vs, const std::string& where) {
    constexpr bool complex = std::is_same_v<K, CRational>;
    constexpr std::size_t arity = complex ? 5 : 3;
    if (!j.is_array()) throw ParseError(where + ": expected a term list");
    Polynomial<K> p(vs);
    for (const auto& t : j) {
        if (!t.is_array() || t.size() != arity)
            throw ParseError(where + ": malformed term");
        if constexpr (complex) {
            json re = json::array({t[0], t[1]}), im = json::array({t[2], t[3]});
            p.add_term(expo_from_json(t[4], vs.dim(), where),
                       CRational(rational_from_json_pair(re, where),
                                 rational_from_json_pair(im, where)));
        } else {
            json c = json::array({t[0], t[1]});
            p.add_term(expo_from_json(t[2], vs.dim(), where), rational_from_json_pair(c, where));
        }
    }
    return p;
}

// ---- protocol trees ---------------------------------------------------------

inline std::string sign_str(Sign s) {
    switch (s) {
        case Sign::LT: return "<";
        case Sign::EQ: return "=";
        case Sign::GT: return ">";
        case Sign::NE: return "!=";
    }
    return "?";
}

inline Sign sign_from_str(const std::string& s, const std::string& where) {
    if (s == "<") return Sign::LT;
    if (s == "=") return Sign::EQ;
    if (s == ">") return Sign::GT;
    if (s == "!=") return Sign::NE;
    throw ParseError(where + ": unknown sign '" + s + "'");
}

template <class K>
json tree_to_json(const ProtocolTree<K>& t) {
    json j;
    j["field"] = ProtocolTree<K>::is_complex ? "complex" : "real";
    j["n_x"] = t.varspace.n_x;
    j["n_y"] = t.varspace.n_y;
    j["frame"] = t.varspace.frame == Frame::XY ? "XY" : "XZ";
    j["root"] = t.root;
    json nodes = json::array();
    for (const auto& [id, n] : t.nodes) {
        json nj;
        nj["id"] = id;
        nj["party"] = n.party == Party::X ? "X" : "Y";
        nj["message"] = poly_to_json(n.message);
        json tests = json::array();
        for (const auto& tp : n.tests) tests.push_back(poly_to_json(tp));
        nj["tests"] = std::move(tests);
        json branches = json::array();
        for (const auto& b : n.branches) {
            json bj;
            json signs = json::array();
            for (Sign s : b.signs) signs.push_back(sign_str(s));
            bj["signs"] = std::move(signs);
            if (std::holds_alternative<Verdict>(b.target))
                bj["child"] = std::get<Verdict>(b.target) == Verdict::Accept ? "accept" : "reject";
            else
                bj["child"] = std::get<int>(b.target);
            branches.push_back(std::move(bj));
        }
        nj["branches"] = std::move(branches);
        nodes.push_back(std::move(nj));
    }
    j["nodes"] = std::move(nodes);
    return j;
}

template <class K>
ProtocolTree<K> tree_from_json(const json& j) {
    ProtocolTree<K> t;
    if (!j.contains("n_x") || !j.contains("n_y") || !j.contains("root") || !j.contains("nodes"))
        throw ParseError("protocol: missing required field (n_x, n_y, root, nodes)");
    Frame frame = Frame::XY;
    if (j.contains("frame")) {
        std::string f = j.at("frame").get<std::string>();
        if (f == "XZ") frame = Frame::XZ;
        else if (f != "XY") throw ParseError("protocol: unknown frame '" + f + "'");
    }
    t.varspace = VarSpace(j.at("n_x").get<int>(), j.at("n_y").get<int>(), frame);
    t.root = j.at("root").get<int>();
    for (const auto& nj : j.at("nodes")) {
        ProtocolNode<K> n;
        n.id = nj.at("id").get<int>();
        std::string where = "node " + std::to_string(n.id);
        std::string party = nj.at("party").get<std::string>();
        if (party == "X") n.party = Party::X;
        else if (party == "Y") n.party = Party::Y;
        else throw ParseError(where + ": party must be X or Y");
        n.message = poly_from_json<K>(nj.at("message"), t.varspace, where + " message");
        if (nj.contains("tests")) {
            int arity = 0;
            for (const auto& tj : nj.at("tests")) {
                // arity recovered from the exponent length of any term; empty
                // term lists are zero polynomials, which validate rejects later
                if (!tj.empty()) arity = static_cast<int>(tj.front().back().size());
            }
            for (const auto& tj : nj.at("tests"))
                n.tests.push_back(poly_from_json<K>(tj, VarSpace(arity, 0), where + " test"));
        }
        for (const auto& bj : nj.at("branches")) {
            Branch b;
            for (const auto& sj : bj.at("signs"))
                b.signs.push_back(sign_from_str(sj.get<std::string>(), where));
            if (b.signs.size() != n.tests.size())
                throw ParseError(where + ": branch key length " + std::to_string(b.signs.size()) +
                                 " != number of tests " + std::to_string(n.tests.size()));
            const json& c = bj.at("child");
            if (c.is_string()) {
                std::string v = c.get<std::string>();
                if (v == "accept") b.target = Verdict::Accept;
                else if (v == "reject") b.target = Verdict::Reject;
                else throw ParseError(where + ": child must be an id, 'accept' or 'reject'");
            } else {
                b.target = c.get<int>();
            }
            n.branches.push_back(std::move(b));
        }
        int id = n.id;
        if (!t.nodes.emplace(id, std::move(n)).second)
            throw ParseError("duplicate node id " + std::to_string(id));
    }
    return t;
}

template <class K>
json prob_to_json(const ProbabilisticProtocol<K>& pp) {
    json j;
    j["field"] = ProtocolTree<K>::is_complex ? "complex" : "real";
    json members = json::array();
    for (const auto& m : pp.members) {
        json mj;
        mj["weight"] = rational_to_json_pair(m.weight);
        mj["tree"] = tree_to_json(m.tree);
        members.push_back(std::move(mj));
    }
    j["members"] = std::move(members);
    return j;
}

template <class K>
ProbabilisticProtocol<K> prob_from_json(const json& j) {
    ProbabilisticProtocol<K> pp;
    for (const auto& mj : j.at("members"))
        pp.members.push_back({rational_from_json_pair(mj.at("weight"), "member weight"),
                              tree_from_json<K>(mj.at("tree"))});
    return pp;
}

// Any protocol file: deterministic or probabilistic, real or complex.
using ProtocolFile = std::variant<ProtocolTree<Rational>, ProtocolTree<CRational>,
                                  ProbabilisticProtocol<Rational>,
                                  ProbabilisticProtocol<CRational>>;

inline ProtocolFile protocol_from_json(const json& j) {
    std::string field = j.value("field", "real");
    bool complex = field == "complex";
    if (!complex && field != "real") throw ParseError("field must be 'real' or 'complex'");
    if (j.contains("members")) {
        if (complex) return prob_from_json<CRational>(j);
        return prob_from_json<Rational>(j);
    }
    if (complex) return tree_from_json<CRational>(j);
    return tree_from_json<Rational>(j);
}

inline ProtocolFile parse_protocol(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    return protocol_from_json(j);
}

inline json protocol_to_json(const ProtocolFile& pf) {
    return std::visit([](const auto& x) -> json {
        if constexpr (requires { x.members; }) return prob_to_json(x);
        else return tree_to_json(x);
    }, pf);
}

// ---- orders and sign points -------------------------------------------------

inline json order_to_json(const TermOrder& o) { return o.priority; }

inline TermOrder order_from_json(const json& j, const VarSpace& vs) {
    if (j.is_string() && j.get<std::string>() == "default") return TermOrder::default_order(vs);
    TermOrder o;
    for (const auto& v : j) o.priority.push_back(v.get<int>());
    o.check_permutation(vs.dim());
    return o;
}

// ---- reports ----------------------------------------------------------------

inline json cert_to_json(const RankCertificate& c) {
    json j;
    j["claimed_rank"] = c.claimed_rank;
    json pt = json::array();
    for (const auto& q : c.witness_point) pt.push_back(rational_to_json_pair(q));
    j["witness_point"] = std::move(pt);
    j["row_set"] = c.row_set;
    j["col_set"] = c.col_set;
    j["minor_value"] = rational_to_json_pair(c.minor_value);
    return j;
}

inline json fooling_to_json(const FoolingReport& r) {
    json j;
    j["flip_vector"] = r.flip;
    j["point_a"] = r.point_a.signs;
    j["point_b"] = r.point_b.signs;
    j["exponent_vectors"] = r.exponent_vectors;
    j["transcripts_identical"] = r.transcripts_identical;
    j["membership_a"] = r.membership_a;
    j["membership_b"] = r.membership_b;
    return j;
}

inline json audit_to_json(const AuditReport& r) {
    json j;
    j["n"] = r.n;
    j["target"] = r.target == SetKind::PolyhedronS ? "S" : "R";
    json pts = json::array();
    for (const auto& p : r.points) pts.push_back(p.signs);
    j["points"] = std::move(pts);
    j["expected_membership"] = r.expected;
    j["correctness_table"] = r.correct;
    j["selected_member"] = r.selected;
    j["premise_violated"] = r.premise_violated;
    j["weak_points"] = r.weak_points;
    j["threshold"] = rational_to_json_pair(r.threshold);
    if (r.selected >= 0 && !r.path_prod.is_zero()) {
        j["path_product"] = poly_to_json(r.path_prod);
        j["lt_exponents_xz"] = r.lt_exponents;
        j["divisible_z"] = r.divisible_z;
        j["rank_certificate"] = cert_to_json(r.rank_cert);
    }
    j["conclusion"] = r.conclusion;
    return j;
}

}  // namespace ccreal

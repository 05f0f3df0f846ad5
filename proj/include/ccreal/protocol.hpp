#pragma once

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "ccreal/term_order.hpp"

namespace ccreal {

enum class Party { X, Y };
enum class Verdict { Accept, Reject };

// Branching alphabet: real trees use {LT, EQ, GT}, complex trees {EQ, NE}.
enum class Sign { LT, EQ, GT, NE };

inline Sign sign_from_int(int s) { return s < 0 ? Sign::LT : s > 0 ? Sign::GT : Sign::EQ; }

using BranchTarget = std::variant<int, Verdict>;  // child node id or leaf verdict

struct Branch {
    std::vector<Sign> signs;
    BranchTarget target;
};

template <class K>
struct ProtocolNode {
    int id = 0;
    Party party = Party::X;
    Polynomial<K> message;               // in the owner party's variables only
    std::vector<Polynomial<K>> tests;    // each over formal vars Q_1..Q_r, r = depth here
    std::vector<Branch> branches;
};

template <class K>
struct ProtocolTree {
    VarSpace varspace;
    int root = 0;
    std::map<int, ProtocolNode<K>> nodes;

    static constexpr bool is_complex = std::is_same_v<K, CRational>;

    const ProtocolNode<K>& node(int id) const {
        auto it = nodes.find(id);
        if (it == nodes.end()) throw std::invalid_argument("unknown node id " + std::to_string(id));
        return it->second;
    }
};

struct ProtocolRunError : std::runtime_error {
    int node_id;
    explicit ProtocolRunError(int id, const std::string& what)
        : std::runtime_error(what), node_id(id) {}
};

template <class K>
bool message_respects_party(const ProtocolNode<K>& n, const VarSpace& vs) {
    for (const auto& [e, c] : n.message.terms()) {
        for (int i = 0; i < vs.dim(); ++i) {
            if (e[i] == 0) continue;
            bool is_x_var = i < vs.n_x;
            if (is_x_var != (n.party == Party::X)) return false;
        }
    }
    return true;
}

// Structural validation; returns human-readable violations, empty when valid.
template <class K>
std::vector<std::string> validate(const ProtocolTree<K>& tree) {
    std::vector<std::string> out;
    auto complain = [&](int id, const std::string& msg) {
        out.push_back("node " + std::to_string(id) + ": " + msg);
    };
    if (!tree.nodes.count(tree.root)) {
        out.push_back("root id " + std::to_string(tree.root) + " does not exist");
        return out;
    }

    std::map<int, int> parent_count;
    for (const auto& [id, n] : tree.nodes) {
        if (n.id != id) complain(id, "stored id disagrees with key");
        if (!message_respects_party(n, tree.varspace))
            complain(id, "message uses variables of the other party");
        if (n.branches.empty()) complain(id, "no branches (every node needs at least a leaf)");
        std::set<std::vector<Sign>> keys;
        for (const auto& b : n.branches) {
            if (b.signs.size() != n.tests.size())
                complain(id, "branch key length != number of tests");
            for (Sign s : b.signs) {
                bool ok = ProtocolTree<K>::is_complex ? (s == Sign::EQ || s == Sign::NE)
                                                      : (s != Sign::NE);
                if (!ok) complain(id, "branch sign outside the field's alphabet");
            }
            if (!keys.insert(b.signs).second) complain(id, "duplicate branch key");
            if (std::holds_alternative<int>(b.target)) {
                int c = std::get<int>(b.target);
                if (!tree.nodes.count(c))
                    complain(id, "branch points to unknown node " + std::to_string(c));
                else
                    parent_count[c] += 1;
            }
        }
    }
    for (const auto& [id, cnt] : parent_count)
        if (cnt > 1) complain(id, "multiple parents (not a tree)");
    if (parent_count.count(tree.root))
        complain(tree.root, "root has a parent");

    // reachability + test arity by DFS from the root
    std::set<int> visited;
    std::vector<std::pair<int, int>> stack{{tree.root, 1}};  // (id, depth counting this node)
    while (!stack.empty()) {
        auto [id, d] = stack.back();
        stack.pop_back();
        if (!tree.nodes.count(id)) continue;
        if (!visited.insert(id).second) {
            complain(id, "reached twice (cycle)");
            continue;
        }
        const auto& n = tree.nodes.at(id);
        for (const auto& t : n.tests) {
            if (t.varspace().dim() != d)
                complain(id, "test arity " + std::to_string(t.varspace().dim()) +
                                 " != depth " + std::to_string(d));
        }
        for (const auto& b : n.branches)
            if (std::holds_alternative<int>(b.target))
                stack.push_back({std::get<int>(b.target), d + 1});
    }
    for (const auto& [id, n] : tree.nodes)
        if (!visited.count(id)) complain(id, "unreachable from root");
    return out;
}

template <class K>
int depth(const ProtocolTree<K>& tree) {
    int best = 0;
    std::vector<std::pair<int, int>> stack{{tree.root, 1}};
    while (!stack.empty()) {
        auto [id, d] = stack.back();
        stack.pop_back();
        best = std::max(best, d);
        for (const auto& b : tree.node(id).branches)
            if (std::holds_alternative<int>(b.target))
                stack.push_back({std::get<int>(b.target), d + 1});
    }
    return best;
}

template <class K>
struct Transcript {
    VarSpace varspace;
    std::vector<int> path;
    std::vector<std::optional<K>> message_values;  // empty optional on infinitesimal runs
    std::vector<std::vector<Sign>> sign_tuples;
    Verdict verdict = Verdict::Reject;
    std::vector<Polynomial<K>> composed_tests;  // all tests along the path, Q_k substituted
};

namespace detail {

template <class K, class SignFn>
Transcript<K> traverse(const ProtocolTree<K>& tree, SignFn&& sign_of_test) {
    Transcript<K> tr;
    tr.varspace = tree.varspace;
    std::vector<Polynomial<K>> msgs;  // accumulated q_1..q_r as ambient polynomials
    int id = tree.root;
    for (;;) {
        const auto& n = tree.node(id);
        tr.path.push_back(id);
        msgs.push_back(n.message);

        std::vector<Sign> signs;
        signs.reserve(n.tests.size());
        for (const auto& t : n.tests) {
            Polynomial<K> composed = compose(t, msgs);
            Sign s = sign_of_test(t, composed, msgs);
            tr.composed_tests.push_back(std::move(composed));
            signs.push_back(s);
        }
        const Branch* chosen = nullptr;
        for (const auto& b : n.branches)
            if (b.signs == signs) { chosen = &b; break; }
        if (!chosen) {
            std::ostringstream os;
            os << "no branch for sign tuple (";
            for (std::size_t i = 0; i < signs.size(); ++i)
                os << (i ? "," : "")
                   << (signs[i] == Sign::LT ? "<" : signs[i] == Sign::GT ? ">"
                       : signs[i] == Sign::EQ ? "=" : "!=");
            os << ") at node " << id;
            throw ProtocolRunError(id, os.str());
        }
        tr.sign_tuples.push_back(std::move(signs));
        if (std::holds_alternative<Verdict>(chosen->target)) {
            tr.verdict = std::get<Verdict>(chosen->target);
            return tr;
        }
        id = std::get<int>(chosen->target);
    }
}

inline Sign real_value_sign(const Rational& v) { return sign_from_int(sign_of(v)); }
inline Sign complex_value_sign(const CRational& v) { return v.is_zero() ? Sign::EQ : Sign::NE; }

}  // namespace detail

// Deterministic run on an exact rational (or Gaussian rational) input.
template <class K>
Transcript<K> run_rational(const ProtocolTree<K>& tree, const std::vector<K>& input) {
    if (static_cast<int>(input.size()) != tree.varspace.dim())
        throw std::invalid_argument("run: input length mismatch");
    std::vector<K> values;
    Transcript<K> tr = detail::traverse(tree, [&](const Polynomial<K>& test,
                                                  const Polynomial<K>& /*composed*/,
                                                  const std::vector<Polynomial<K>>& msgs) {
        while (values.size() < msgs.size()) values.push_back(msgs[values.size()].evaluate(input));
        K v = test.evaluate(values);
        if constexpr (std::is_same_v<K, Rational>)
            return detail::real_value_sign(v);
        else
            return detail::complex_value_sign(v);
    });
    // record the message values along the final path
    std::vector<K> vals;
    for (int id : tr.path) vals.push_back(tree.node(id).message.evaluate(input));
    for (auto& v : vals) tr.message_values.push_back(std::move(v));
    return tr;
}

// Run at a signed-infinitesimal point; every branching sign is decided by the
// least term of the composed test.  The point may live in the XZ frame, in
// which case composed tests are sheared before sign extraction (composed
// tests recorded in the transcript stay in the tree's XY frame).
inline Transcript<Rational> run_infinitesimal(const ProtocolTree<Rational>& tree,
                                              const SignPoint& p, const TermOrder& order) {
    if (p.dim() != tree.varspace.dim())
        throw std::invalid_argument("run_infinitesimal: dimension mismatch");
    return detail::traverse(tree, [&](const RPoly&, const RPoly& composed,
                                      const std::vector<RPoly>&) {
        const RPoly* g = &composed;
        RPoly sheared;
        if (p.frame != tree.varspace.frame) {
            sheared = change_frame(composed, p.frame);
            g = &sheared;
        }
        return sign_from_int(sign_at(*g, p, order));
    });
}

// Product of all composed testing polynomials along a path; 1 if there are none.
template <class K>
Polynomial<K> path_product(const Transcript<K>& tr) {
    Polynomial<K> prod = Polynomial<K>::constant(tr.varspace, K(1));
    for (const auto& t : tr.composed_tests) prod *= t;
    return prod;
}

template <class K>
struct ProbabilisticProtocol {
    struct Member {
        Rational weight;
        ProtocolTree<K> tree;
    };
    std::vector<Member> members;
};

template <class K>
std::vector<std::string> validate(const ProbabilisticProtocol<K>& pp) {
    std::vector<std::string> out;
    if (pp.members.empty()) {
        out.push_back("probabilistic protocol has no members");
        return out;
    }
    Rational total(0);
    const VarSpace& vs = pp.members.front().tree.varspace;
    for (std::size_t i = 0; i < pp.members.size(); ++i) {
        const auto& m = pp.members[i];
        if (m.weight <= 0)
            out.push_back("member " + std::to_string(i) + ": non-positive weight");
        total += m.weight;
        if (m.tree.varspace != vs)
            out.push_back("member " + std::to_string(i) + ": varspace differs");
        for (auto& v : validate(m.tree))
            out.push_back("member " + std::to_string(i) + ": " + v);
    }
    if (total != 1) out.push_back("weights sum to " + total.str() + ", expected 1");
    return out;
}

// Exact acceptance probability of a finite weighted family on one input.
template <class K>
Rational acceptance_probability(const ProbabilisticProtocol<K>& pp, const std::vector<K>& input) {
    Rational p(0);
    for (const auto& m : pp.members)
        if (run_rational(m.tree, input).verdict == Verdict::Accept) p += m.weight;
    return p;
}

inline Rational acceptance_probability(const ProbabilisticProtocol<Rational>& pp,
                                       const SignPoint& pt, const TermOrder& order) {
    Rational p(0);
    for (const auto& m : pp.members)
        if (run_infinitesimal(m.tree, pt, order).verdict == Verdict::Accept) p += m.weight;
    return p;
}

// Converts a protocol over C into one over R on doubled variable blocks: each
// complex message becomes the pair (Re, Im), each complex test the pair of
// its real and imaginary parts over the doubled Q-variables, and an EQ branch
// becomes (EQ, EQ) on the pair while NE fans out to the remaining tuples.
// Depth exactly doubles.
inline ProtocolTree<Rational> realify(const ProtocolTree<CRational>& tree) {
    ProtocolTree<Rational> out;
    out.varspace = doubled_space(tree.varspace);
    std::map<int, std::pair<int, int>> idmap;  // old id -> (re node, im node)
    int next = 0;
    for (const auto& [id, n] : tree.nodes) {
        idmap[id] = {next, next + 1};
        next += 2;
    }
    out.root = idmap.at(tree.root).first;

    for (const auto& [id, n] : tree.nodes) {
        auto [re_id, im_id] = idmap.at(id);
        auto [re_msg, im_msg] = re_im_split(n.message);

        ProtocolNode<Rational> re_node;
        re_node.id = re_id;
        re_node.party = n.party;
        re_node.message = std::move(re_msg);
        re_node.branches.push_back({{}, im_id});
        out.nodes.emplace(re_id, std::move(re_node));

        ProtocolNode<Rational> im_node;
        im_node.id = im_id;
        im_node.party = n.party;
        im_node.message = std::move(im_msg);
        for (const auto& t : n.tests) {
            auto [tre, tim] = re_im_split(t);
            im_node.tests.push_back(std::move(tre));
            im_node.tests.push_back(std::move(tim));
        }
        for (const auto& b : n.branches) {
            BranchTarget target = b.target;
            if (std::holds_alternative<int>(target))
                target = idmap.at(std::get<int>(target)).first;
            // expand each complex sign into the matching real sign pairs
            std::vector<std::vector<Sign>> keys{{}};
            static const Sign all3[3] = {Sign::LT, Sign::EQ, Sign::GT};
            for (Sign s : b.signs) {
                std::vector<std::vector<Sign>> grown;
                for (const auto& k : keys) {
                    for (Sign a : all3)
                        for (Sign c : all3) {
                            bool eq_pair = (a == Sign::EQ && c == Sign::EQ);
                            if ((s == Sign::EQ) != eq_pair) continue;
                            auto k2 = k;
                            k2.push_back(a);
                            k2.push_back(c);
                            grown.push_back(std::move(k2));
                        }
                }
                keys = std::move(grown);
            }
            for (auto& k : keys) im_node.branches.push_back({std::move(k), target});
        }
        out.nodes.emplace(im_id, std::move(im_node));
    }
    return out;
}

inline ProbabilisticProtocol<Rational> realify(const ProbabilisticProtocol<CRational>& pp) {
    ProbabilisticProtocol<Rational> out;
    for (const auto& m : pp.members) out.members.push_back({m.weight, realify(m.tree)});
    return out;
}

}  // namespace ccreal

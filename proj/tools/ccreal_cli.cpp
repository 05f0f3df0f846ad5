#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ccreal/protocol_io.hpp"
#include "ccreal/sampler.hpp"

using namespace ccreal;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

Rational parse_rational(const std::string& s) {
    auto bar = s.find('/');
    try {
        if (bar == std::string::npos) return Rational(Integer(s));
        return make_rational(Integer(s.substr(0, bar)), Integer(s.substr(bar + 1)));
    } catch (const std::exception&) {
        throw ParseError("not a rational: '" + s + "'");
    }
}

std::vector<Rational> parse_input(const std::string& s) {
    std::vector<Rational> v;
    for (const auto& p : split(s, ',')) v.push_back(parse_rational(p));
    return v;
}

std::vector<int> parse_signs(const std::string& s) {
    std::vector<int> v;
    for (const auto& p : split(s, ',')) {
        if (p == "+") v.push_back(1);
        else if (p == "-") v.push_back(-1);
        else if (p == "0") v.push_back(0);
        else throw ParseError("sign must be +, - or 0, got '" + p + "'");
    }
    return v;
}

// {"n_x":..,"n_y":..,"frame":"XY","terms":[[num,den,[e..]],..]}
RPoly poly_from_desc(const json& j) {
    Frame frame = j.value("frame", "XY") == "XZ" ? Frame::XZ : Frame::XY;
    VarSpace vs(j.at("n_x").get<int>(), j.at("n_y").get<int>(), frame);
    return poly_from_json<Rational>(j.at("terms"), vs, "poly");
}

RPoly load_poly(const std::string& file, const std::string& inline_json) {
    std::string text = inline_json.empty() ? slurp(file) : inline_json;
    try {
        return poly_from_desc(json::parse(text));
    } catch (const json::exception& e) {
        throw ParseError(std::string("polynomial: ") + e.what());
    }
}

void render_text(const json& j, std::ostream& os, int indent) {
    std::string pad(indent, ' ');
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (it.value().is_object() || (it.value().is_array() && it.value().size() > 8)) {
                os << pad << it.key() << ":\n";
                render_text(it.value(), os, indent + 2);
            } else {
                os << pad << it.key() << ": " << it.value().dump() << "\n";
            }
        }
    } else if (j.is_array()) {
        for (const auto& v : j) {
            if (v.is_object() || v.is_array()) {
                os << pad << "-\n";
                render_text(v, os, indent + 2);
            } else {
                os << pad << "- " << v.dump() << "\n";
            }
        }
    } else {
        os << pad << j.dump() << "\n";
    }
}

void emit(const json& j, const std::string& format) {
    if (format == "json")
        std::cout << j.dump(2) << "\n";
    else
        render_text(j, std::cout, 0);
}

json transcript_to_json(const Transcript<Rational>& tr) {
    json j;
    j["verdict"] = tr.verdict == Verdict::Accept ? "accept" : "reject";
    j["path"] = tr.path;
    json msgs = json::array();
    bool have_values = false;
    for (const auto& v : tr.message_values) {
        msgs.push_back(v ? json(v->str()) : json());
        have_values |= v.has_value();
    }
    if (have_values) j["message_values"] = std::move(msgs);
    json tuples = json::array();
    for (const auto& tuple : tr.sign_tuples) {
        json t = json::array();
        for (Sign s : tuple) t.push_back(sign_str(s));
        tuples.push_back(std::move(t));
    }
    j["sign_tuples"] = std::move(tuples);
    return j;
}

SetDescriptor set_by_name(const std::string& name, const VarSpace& vs) {
    auto square = [&](const std::string& what) {
        if (vs.n_x != vs.n_y)
            throw ParseError(what + " needs n_x == n_y, protocol has (" +
                             std::to_string(vs.n_x) + "," + std::to_string(vs.n_y) + ")");
        return vs.n_x;
    };
    if (name == "orthant") return SetDescriptor::orthant(vs.n_x, vs.n_y);
    if (name == "orthant-closure") return SetDescriptor::orthant_closure(vs.n_x, vs.n_y);
    if (name == "S") return SetDescriptor::polyhedron_s(square("S"));
    if (name == "R") return SetDescriptor::arrangement(square("R"));
    if (name == "U") return SetDescriptor::inner_product(square("U"));
    if (name == "emptiness") return SetDescriptor::emptiness(square("emptiness"));
    if (name == "knapsack") return SetDescriptor::knapsack(square("knapsack"));
    throw ParseError("unknown set '" + name +
                     "' (orthant, orthant-closure, S, R, U, emptiness, knapsack)");
}

const ProtocolTree<Rational>& real_tree(const ProtocolFile& pf, const std::string& cmd) {
    if (const auto* t = std::get_if<ProtocolTree<Rational>>(&pf)) return *t;
    throw ParseError(cmd + ": expected a deterministic real protocol file");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"workbench for algebraic two-party protocols over the reals"};
    app.require_subcommand(1);

    std::string format = "text";
    std::uint64_t seed = 1;
    app.add_option("--format", format, "output format")
        ->check(CLI::IsMember({"text", "json"}));
    app.add_option("--seed", seed, "random seed")->envname("CCREAL_SEED");

    std::string file, input, signs, set_name, target, poly_json, l_spec, h_json;
    std::string zoo_name, mode = "exact";
    int n = 1, ny = -1, m = 1, trials = 1000, samples = 256, rank_trials = 8;
    bool exact_rank = false;

    auto* c_validate = app.add_subcommand("validate", "check a protocol file");
    c_validate->add_option("file", file)->required();

    auto* c_run = app.add_subcommand("run", "run a protocol on a rational input");
    c_run->add_option("file", file)->required();
    c_run->add_option("--input", input, "comma-separated rationals")->required();

    auto* c_runinf = app.add_subcommand("run-inf", "run on a signed infinitesimal point");
    c_runinf->add_option("file", file)->required();
    c_runinf->add_option("--signs", signs, "comma-separated +,-,0")->required();

    auto* c_prob = app.add_subcommand("prob", "exact acceptance probability");
    c_prob->add_option("file", file)->required();
    c_prob->add_option("--input", input);
    c_prob->add_option("--signs", signs);

    auto* c_mc = app.add_subcommand("mc", "sampled agreement rate against a membership oracle");
    c_mc->add_option("file", file)->required();
    c_mc->add_option("--set", set_name)->required();
    c_mc->add_option("--trials", trials)->check(CLI::PositiveNumber);

    auto* c_zoo = app.add_subcommand("zoo", "built-in protocols");
    auto* c_emit = c_zoo->add_subcommand("emit", "print a built-in protocol as JSON");
    c_emit->add_option("name", zoo_name,
                       "orthant | orthant-prob | S | R | R-complex | emptiness | knapsack")
        ->required();
    c_emit->add_option("--n", n)->check(CLI::PositiveNumber);
    c_emit->add_option("--ny", ny);
    c_emit->add_option("--mode", mode)->check(CLI::IsMember({"exact", "sampled"}));
    c_emit->add_option("--samples", samples)->check(CLI::PositiveNumber);

    auto* c_certify = app.add_subcommand("certify", "rank certificates");
    auto* c_rank = c_certify->add_subcommand("rank", "certify the Hessian rank of a polynomial");
    c_rank->add_option("file", file, "polynomial file");
    c_rank->add_option("--poly", poly_json, "inline polynomial JSON");
    c_rank->add_flag("--exact", exact_rank, "decide the generic rank symbolically (<= 6x6)");
    c_rank->add_option("--trials", rank_trials)->check(CLI::PositiveNumber);
    auto* c_divisor = c_certify->add_subcommand("divisor", "check the divisor rank bound");
    c_divisor->set_help_flag("--help", "print help");  // frees -h for the --h option
    c_divisor->add_option("--n", n)->required();
    c_divisor->add_option("--m", m)->required();
    c_divisor->add_option("--h", h_json, "term list JSON for h, in 2n variables")->required();

    auto* c_adv = app.add_subcommand("adversary", "protocol adversaries");
    auto* c_orth = c_adv->add_subcommand("orthant", "fooling-pair attack on an orthant protocol");
    c_orth->add_option("file", file)->required();

    auto* c_audit = app.add_subcommand("audit", "hyperplane lower-bound audit of a family");
    c_audit->add_option("file", file)->required();
    c_audit->add_option("--target", target)->required()->check(CLI::IsMember({"S", "R"}));

    auto* c_detm = app.add_subcommand("detM", "closed-form product-matrix determinant");
    c_detm->add_option("--l", l_spec, "comma-separated positive integers")->required();

    // let trailing --seed/--format reach the global options from any subcommand
    for (auto* s : {c_validate, c_run, c_runinf, c_prob, c_mc, c_zoo, c_emit, c_certify, c_rank,
                    c_divisor, c_adv, c_orth, c_audit, c_detm})
        s->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*c_validate) {
            ProtocolFile pf = parse_protocol(slurp(file));
            std::vector<std::string> violations =
                std::visit([](const auto& x) { return validate(x); }, pf);
            json j;
            j["valid"] = violations.empty();
            j["violations"] = violations;
            emit(j, format);
            return violations.empty() ? 0 : 1;
        }

        if (*c_run) {
            ProtocolFile pf = parse_protocol(slurp(file));
            json j;
            if (const auto* ct = std::get_if<ProtocolTree<CRational>>(&pf)) {
                auto flat = parse_input(input);  // re,im interleaved
                if (flat.size() % 2) throw ParseError("complex input needs re,im pairs");
                std::vector<CRational> w;
                for (std::size_t i = 0; i < flat.size(); i += 2)
                    w.emplace_back(flat[i], flat[i + 1]);
                auto tr = run_rational(*ct, w);
                j["verdict"] = tr.verdict == Verdict::Accept ? "accept" : "reject";
                j["path"] = tr.path;
            } else {
                j = transcript_to_json(run_rational(real_tree(pf, "run"), parse_input(input)));
            }
            emit(j, format);
            return 0;
        }

        if (*c_runinf) {
            ProtocolFile pf = parse_protocol(slurp(file));
            const auto& t = real_tree(pf, "run-inf");
            TermOrder order = TermOrder::default_order(t.varspace);
            auto tr = run_infinitesimal(t, SignPoint(parse_signs(signs)), order);
            emit(transcript_to_json(tr), format);
            return 0;
        }

        if (*c_prob) {
            ProtocolFile pf = parse_protocol(slurp(file));
            const auto* pp = std::get_if<ProbabilisticProtocol<Rational>>(&pf);
            if (!pp) throw ParseError("prob: expected a real probabilistic protocol file");
            Rational p;
            if (!input.empty()) {
                p = acceptance_probability(*pp, parse_input(input));
            } else if (!signs.empty()) {
                TermOrder order = TermOrder::default_order(pp->members.front().tree.varspace);
                p = acceptance_probability(*pp, SignPoint(parse_signs(signs)), order);
            } else {
                throw ParseError("prob: need --input or --signs");
            }
            json j;
            j["acceptance_probability"] = p.str();
            emit(j, format);
            return 0;
        }

        if (*c_mc) {
            ProtocolFile pf = parse_protocol(slurp(file));
            Rational threshold = make_rational(2L, 3L);
            VarSpace vs = std::visit(
                [](const auto& x) {
                    if constexpr (requires { x.members; }) return x.members.front().tree.varspace;
                    else return x.varspace;
                },
                pf);
            SetDescriptor set = set_by_name(set_name, vs);
            auto forms = detail::defining_forms(set);
            GaussianRationalSampler sampler(seed);
            int agree = 0, counted = 0, boundary = 0;
            for (int i = 0; i < trials; ++i) {
                auto in = sampler.draw_vector(vs.dim());
                bool on_boundary = false;
                for (const auto& f : forms) on_boundary |= f.evaluate(in) == 0;
                if (on_boundary) {
                    ++boundary;
                    std::cerr << "trial " << i << ": exact zero sign, not counted\n";
                    continue;
                }
                bool member = membership(set, in);
                bool predicted;
                if (const auto* pp = std::get_if<ProbabilisticProtocol<Rational>>(&pf))
                    predicted = acceptance_probability(*pp, in) > threshold;
                else
                    predicted = run_rational(real_tree(pf, "mc"), in).verdict == Verdict::Accept;
                ++counted;
                agree += predicted == member;
            }
            json j;
            j["trials"] = trials;
            j["counted"] = counted;
            j["boundary_skipped"] = boundary;
            j["agreements"] = agree;
            j["agreement_rate"] =
                counted ? make_rational(agree, counted).str() : std::string("n/a");
            j["seed"] = seed;
            emit(j, format);
            return agree == counted ? 0 : 1;
        }

        if (*c_emit) {
            if (ny < 0) ny = n;
            json j;
            if (zoo_name == "orthant") j = tree_to_json(build_orthant_det(n, ny));
            else if (zoo_name == "S") j = tree_to_json(build_polyhedron_det(n));
            else if (zoo_name == "R") j = tree_to_json(build_arrangement_det<Rational>(n));
            else if (zoo_name == "R-complex") j = tree_to_json(build_arrangement_det<CRational>(n));
            else if (zoo_name == "emptiness") j = tree_to_json(build_emptiness_det(n));
            else if (zoo_name == "knapsack") j = tree_to_json(build_knapsack_det(n));
            else if (zoo_name == "orthant-prob")
                j = prob_to_json(build_orthant_prob(
                    n, ny, mode == "exact" ? FamilyMode::Exact : FamilyMode::Sampled, seed,
                    samples));
            else
                throw ParseError("unknown zoo protocol '" + zoo_name + "'");
            std::cout << j.dump(2) << "\n";
            return 0;
        }

        if (*c_rank) {
            if (file.empty() && poly_json.empty())
                throw ParseError("certify rank: need a file or --poly");
            RPoly g = load_poly(file, poly_json);
            RankOptions opt;
            opt.seed = seed;
            opt.trials = rank_trials;
            opt.exact = exact_rank;
            auto cert = cc_lower_bound(g, opt);
            json j = cert_to_json(cert);
            j["rechecked"] = recheck(hessian(g), cert);
            emit(j, format);
            return 0;
        }

        if (*c_divisor) {
            VarSpace vs(n, n);
            RPoly h = poly_from_json<Rational>(json::parse(h_json), vs, "h");
            RankOptions opt;
            opt.seed = seed;
            auto res = check_divisor_lemma(n, m, h, opt);
            json j;
            j["holds"] = res.holds;
            j["required_rank"] = n - 3;
            j["certificate"] = cert_to_json(res.cert);
            emit(j, format);
            return res.holds ? 0 : 1;
        }

        if (*c_orth) {
            ProtocolFile pf = parse_protocol(slurp(file));
            const auto& t = real_tree(pf, "adversary orthant");
            auto res = orthant_adversary(t, TermOrder::default_order(t.varspace));
            json j;
            switch (res.kind) {
                case AdversaryResult::Kind::DirectMisclassification:
                    j["kind"] = "direct_misclassification";
                    j["detail"] = "the all-positive infinitesimal point is rejected";
                    break;
                case AdversaryResult::Kind::FoolingPair:
                    j["kind"] = "fooling_pair";
                    j["report"] = fooling_to_json(*res.report);
                    j["rechecked"] = recheck(*res.report);
                    break;
                case AdversaryResult::Kind::None:
                    j["kind"] = "none";
                    j["detail"] = "no invisible sign flip along the accepting path";
                    break;
            }
            emit(j, format);
            return 0;
        }

        if (*c_audit) {
            ProtocolFile pf = parse_protocol(slurp(file));
            ProbabilisticProtocol<Rational> pp;
            if (const auto* p = std::get_if<ProbabilisticProtocol<Rational>>(&pf))
                pp = *p;
            else
                pp.members.push_back({Rational(1), real_tree(pf, "audit")});
            const VarSpace& vs = pp.members.front().tree.varspace;
            TermOrder order = TermOrder::default_order(VarSpace(vs.n_x, vs.n_y, Frame::XZ));
            SetKind kind = target == "S" ? SetKind::PolyhedronS : SetKind::Arrangement;
            RankOptions opt;
            opt.seed = seed;
            auto rep = hyperplane_audit(pp, kind, order, opt);
            emit(audit_to_json(rep), format);
            return rep.premise_violated ? 1 : 0;
        }

        if (*c_detm) {
            std::vector<long> l;
            for (const auto& p : split(l_spec, ',')) {
                try {
                    l.push_back(std::stol(p));
                } catch (const std::exception&) {
                    throw ParseError("detM: not an integer: '" + p + "'");
                }
            }
            Rational closed = m_matrix_det(l);
            Rational brute = linalg::determinant(m_matrix(l));
            std::cout << closed.str() << "\n";
            if (closed != brute) {
                std::cerr << "closed form disagrees with the brute-force determinant " +
                                 brute.str() + "\n";
                return 1;
            }
            return 0;
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

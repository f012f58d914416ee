#pragma once

// Command-line front end. run() parses arguments, dispatches to the library
// and writes a report (JSON with --json, "key: value" text otherwise).
// Exit codes: 0 success, 1 input or parse error, 2 precondition violation.

#include <cstdint>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qbundle/bundles.hpp"
#include "qbundle/clifford.hpp"
#include "qbundle/cubic4fold.hpp"
#include "qbundle/fano.hpp"
#include "qbundle/io.hpp"
#include "qbundle/quadform.hpp"

namespace qbundle::cli {

using json = nlohmann::json;

inline std::uint64_t fnv1a(std::string_view data, std::uint64_t h = 1469598103934665603ull) {
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline json to_json(const ScalarMatrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j).to_string());
        rows.push_back(row);
    }
    return rows;
}

inline json to_json(const Subspace& s) { return to_json(s.basis()); }

inline json to_json(std::span<const Scalar> v) {
    json out = json::array();
    for (const auto& s : v) out.push_back(s.to_string());
    return out;
}

inline json to_json(const LinearMatrix& m) { return m.to_strings(); }

inline json to_json(const CliffordIdealBasis& b) {
    json out = json::array();
    for (const auto& e : b.basis) out.push_back(e.to_string());
    return out;
}

struct Options {
    std::string form, bundle, cubic, point;
    std::vector<std::string> subspaces;
    int degree = 0;
    std::size_t dim = 1;
    std::size_t rank = 2;
    std::uint64_t seed = 0;
    bool json_out = false;
};

class Context {
public:
    explicit Context(const Options& o) : opt(o) {}

    const Options& opt;
    std::vector<std::string> warnings;
    std::string digest_input;

    std::string read(const std::string& path) {
        if (path.empty()) fail(ErrorKind::BadFile, "missing input file");
        std::string text = load_file(path);
        digest_input += path + "\n" + text + "\n";
        return text;
    }

    // Anything thrown while loading a file (degree validation included) is
    // reported as an input error.
    bool load_failed = false;

    template <class Fn>
    auto load(Fn&& fn) -> decltype(fn()) {
        try {
            return fn();
        } catch (const Error&) {
            load_failed = true;
            throw;
        }
    }

    FormFile form() {
        return load([&] { return read_form(read(opt.form), opt.form); });
    }

    Subspace subspace(std::size_t i, Field f) {
        if (i >= opt.subspaces.size()) fail(ErrorKind::BadFile, "missing --subspace file");
        return load([&] { return read_subspace(read(opt.subspaces[i]), f, opt.subspaces[i]); });
    }

    ScalarVector point(Field f) {
        if (opt.point.empty()) fail(ErrorKind::BadFile, "missing --point");
        ScalarVector v;
        for (const auto& c : detail::split_on(opt.point, ',')) v.push_back(parse_scalar(c, f));
        return v;
    }
};

// ---------------------------------------------------------------------------
// Commands

inline json cmd_corank(Context& cx) {
    const auto [f, q] = cx.form();
    const auto rep = corank(q);
    return {{"form", q.to_string()},
            {"field", f.spec()},
            {"corank_b", rep.corank_b},
            {"corank_Q", rep.corank_Q},
            {"radical", to_json(rep.radical)},
            {"q_on_radical_nonzero", rep.q_on_radical_nonzero}};
}

inline json cmd_reduce(Context& cx) {
    const auto [f, q] = cx.form();
    const Subspace w = cx.subspace(0, f);
    const auto red = hyperbolic_reduce(q, w);
    return {{"form", q.to_string()},
            {"rank", red.rank},
            {"reduced", red.reduced.to_string()},
            {"reduced_dim", red.reduced.dim()},
            {"basis_data", to_json(red.basis_data)},
            {"reduced_corank_Q", corank(red.reduced).corank_Q}};
}

inline json cmd_clifford_ideal(Context& cx) {
    const auto [f, q] = cx.form();
    const Subspace w = cx.subspace(0, f);
    const auto b = ideal_basis(q, w, cx.opt.degree);
    return {{"degree", cx.opt.degree}, {"dim", b.dim()}, {"generator", b.generator.to_string()}, {"basis", to_json(b)}};
}

inline json cmd_spinor_mf(Context& cx) {
    const auto [f, q] = cx.form();
    const Subspace w = cx.subspace(0, f);
    const auto s = spinor_phi(q, w, cx.opt.degree);
    const auto rep = mf_verify(s);
    json out{{"degree", cx.opt.degree},
             {"size", s.phi.rows},
             {"phi", to_json(s.phi)},
             {"phi_prev", to_json(s.phi_prev)},
             {"source_basis", to_json(s.source)},
             {"target_basis", to_json(s.target)},
             {"identity_holds", rep.identity_holds}};
    if (f.is_finite()) {
        out["points_sampled"] = rep.point_ranks.size();
        out["ranks_as_expected"] = rep.ranks_as_expected;
        if (!rep.ranks_as_expected) cx.warnings.push_back("point ranks differ from 2^(n-r-1) off PW cap Sing");
    }
    return out;
}

inline json cmd_mf_equiv(Context& cx) {
    const auto [f, q] = cx.form();
    const Subspace w1 = cx.subspace(0, f);
    const Subspace w2 = cx.subspace(1, f);
    auto alg = make_algebra(q);
    const auto res = mf_equiv(spinor_phi(alg, w1, cx.opt.degree).pair(), spinor_phi(alg, w2, cx.opt.degree).pair(), cx.opt.seed);
    json out{{"degree", cx.opt.degree}, {"found", res.found}, {"solution_dim", res.solution_dim}, {"probabilistic", res.probabilistic}};
    if (res.found) {
        out["A"] = to_json(*res.A);
        out["B"] = to_json(*res.B);
    }
    if (res.probabilistic) cx.warnings.push_back("no invertible pair sampled over a small field; 'none' may be a sampling miss");
    return out;
}

inline json cmd_disc_universal(Context& cx) {
    const auto d = universal_disc(cx.opt.rank);
    return {{"rank", cx.opt.rank},
            {"beta", d.beta.to_string()},
            {"gamma", d.gamma.to_string()},
            {"sigma", d.sigma},
            {"cover_relation", d.cover_relation()}};
}

inline json cmd_disc_bundle(Context& cx) {
    const auto b = cx.load([&] { return read_bundle(cx.read(cx.opt.bundle), cx.opt.bundle); });
    json out;
    if (b.fiber_rank() % 2 == 0) {
        const auto d = bundle_disc(b);
        out = {{"beta", d.beta.to_string()}, {"gamma", d.gamma.to_string()}, {"sigma", d.sigma}, {"cover_relation", d.cover_relation()}};
    } else if (cx.opt.point.empty()) {
        fail(ErrorKind::OddRank, "discriminant algebra needs even fiber rank");
    }
    if (!cx.opt.point.empty()) {
        const auto [q, rep] = fiber_and_corank(b, cx.point(b.field()));
        out["fiber"] = q.to_string();
        out["corank_b"] = rep.corank_b;
        out["corank_Q"] = rep.corank_Q;
    }
    return out;
}

inline CubicFile read_cubic_opt(Context& cx) {
    return cx.load([&] { return read_cubic(cx.read(cx.opt.cubic), cx.opt.cubic); });
}

inline json cmd_cubic4_cover(Context& cx) {
    const auto c = extract(read_cubic_opt(cx).f);
    const auto d = discriminant_cover(c);
    json q = json::array(), l = json::object();
    for (std::size_t i = 0; i < 3; ++i) {
        q.push_back(c.q[i].to_string());
        for (std::size_t j = i; j < 3; ++j) l[std::to_string(i) + std::to_string(j)] = c.l[i][j].to_string();
    }
    if (c.linear_block_zero()) cx.warnings.push_back("all l_ij vanish: every fiber has corank >= 2");
    if (d.degenerate) cx.warnings.push_back("discriminant cover is degenerate (double root everywhere)");
    if (!d.cross_check) cx.warnings.push_back("closed formula and universal specialization disagree");
    return {{"g", c.g.to_string()},
            {"q", q},
            {"l", l},
            {"beta", d.formula.beta.to_string()},
            {"gamma", d.formula.gamma.to_string()},
            {"sigma", d.formula.sigma},
            {"cover_relation", d.formula.cover_relation()},
            {"cross_check", d.cross_check},
            {"degenerate", d.degenerate}};
}

inline json cmd_cubic4_k3(Context& cx) {
    const auto k3 = two_planes_k3(read_cubic_opt(cx).f);
    if (k3.degenerate) cx.warnings.push_back("one of the bidegree components vanishes");
    return {{"f12", k3.f12.to_string()}, {"f21", k3.f21.to_string()}, {"degenerate", k3.degenerate}};
}

inline json cmd_fano_enum(Context& cx) {
    const auto [f, q] = cx.form();
    const auto e = enum_isotropic(q, cx.opt.dim);
    json subs = json::array();
    for (const auto& s : e.subspaces) subs.push_back(to_json(s));
    return {{"iso_dim", e.iso_dim}, {"count", e.subspaces.size()}, {"subspaces", subs}};
}

inline json cmd_fano_components(Context& cx) {
    const auto [f, q] = cx.form();
    const auto e = component_classes(q);
    json subs = json::array();
    std::array<std::size_t, 2> sizes{};
    for (std::size_t i = 0; i < e.subspaces.size(); ++i) {
        const int lab = (*e.labels)[i];
        ++sizes[lab];
        subs.push_back({{"subspace", to_json(e.subspaces[i])}, {"class", lab}});
    }
    return {{"iso_dim", e.iso_dim}, {"count", e.subspaces.size()}, {"class_sizes", sizes}, {"members", subs}};
}

inline json cmd_cover_split(Context& cx) {
    const auto [f, q] = cx.form();
    const auto cs = cover_split(q);
    const auto sd = sing_dim(q);
    if (!sd.consistent) cx.warnings.push_back("singular locus dimension differs from corank_Q - 1");
    return {{"split", cs.split},
            {"rational_maximal", cs.rational_maximal},
            {"extension_maximal", cs.extension_maximal},
            {"class_sizes", cs.class_sizes},
            {"rational_per_class", cs.rational_per_class},
            {"sing_dim", sd.dim}};
}

inline json cmd_line_class(Context& cx) {
    const auto [f, q] = cx.form();
    const Subspace w = cx.subspace(0, f);
    const auto lc = line_class(q, w);
    json out{{"component", lc.component}, {"point", to_json(lc.point)}};
    if (cx.opt.subspaces.size() > 1) {
        const Subspace w2 = cx.subspace(1, f);
        const auto lc2 = line_class(q, w2);
        const auto ag = line_class_agreement(q, w, w2, cx.opt.degree, cx.opt.seed);
        out["other"] = {{"component", lc2.component}, {"point", to_json(lc2.point)}};
        out["labels_equal"] = ag.labels_equal;
        out["spinors_equivalent"] = ag.equivalent;
        out["agree"] = ag.agree();
        if (!ag.agree()) cx.warnings.push_back("line labels and spinor equivalence disagree");
    }
    return out;
}

// ---------------------------------------------------------------------------

inline void print_text(std::ostream& out, const json& j, const std::string& prefix = "") {
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string key = prefix + it.key();
        if (it->is_object()) {
            print_text(out, *it, key + ".");
        } else if (it->is_string()) {
            out << key << ": " << it->get<std::string>() << "\n";
        } else {
            out << key << ": " << it->dump() << "\n";
        }
    }
}

/// Runs one command; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact computations with quadrics, quadric bundles and spinor factorizations", "qbundle"};
    app.require_subcommand(1);
    Options o;
    using Handler = json (*)(Context&);
    std::vector<std::pair<CLI::App*, Handler>> commands;
    auto add = [&](const char* name, const char* help, Handler h) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_flag("--json", o.json_out, "Emit a JSON report");
        sub->add_option("--seed", o.seed, "Seed for randomized solvers")->capture_default_str();
        commands.push_back({sub, h});
        return sub;
    };
    auto form_opt = [&](CLI::App* s) { s->add_option("--form", o.form, "Form file")->required(); };
    auto sub_opt = [&](CLI::App* s, bool req) {
        auto opt = s->add_option("--subspace", o.subspaces, "Subspace file (repeatable)");
        if (req) opt->required();
    };
    auto deg_opt = [&](CLI::App* s) { s->add_option("--degree", o.degree, "Degree d")->capture_default_str(); };

    {
        auto s = add("corank", "Coranks and radical of a quadratic form", cmd_corank);
        form_opt(s);
    }
    {
        auto s = add("reduce", "Hyperbolic reduction along a regular isotropic subspace", cmd_reduce);
        form_opt(s);
        sub_opt(s, true);
    }
    {
        auto s = add("clifford-ideal", "Canonical basis of the Clifford ideal I_d of W", cmd_clifford_ideal);
        form_opt(s);
        sub_opt(s, true);
        deg_opt(s);
    }
    {
        auto s = add("spinor-mf", "Spinor matrix factorization of degree d", cmd_spinor_mf);
        form_opt(s);
        sub_opt(s, true);
        deg_opt(s);
    }
    {
        auto s = add("mf-equiv", "Equivalence of the spinor factorizations of two subspaces", cmd_mf_equiv);
        form_opt(s);
        sub_opt(s, true);
        deg_opt(s);
    }
    {
        auto s = add("disc-universal", "Universal discriminant algebra of even rank", cmd_disc_universal);
        s->add_option("--rank", o.rank, "Even rank 2m <= 8")->required();
    }
    {
        auto s = add("disc-bundle", "Discriminant cover of a quadric bundle", cmd_disc_bundle);
        s->add_option("--bundle", o.bundle, "Bundle file")->required();
        s->add_option("--point", o.point, "Base point c0,...,cm: also report the fiber corank");
    }
    {
        auto s = add("cubic4-cover", "Discriminant cover of a cubic fourfold containing V(y0,y1,y2)", cmd_cubic4_cover);
        s->add_option("--cubic", o.cubic, "Cubic file")->required();
    }
    {
        auto s = add("cubic4-k3", "Bidegree (1,2)+(2,1) model for a cubic containing two disjoint planes", cmd_cubic4_k3);
        s->add_option("--cubic", o.cubic, "Cubic file")->required();
    }
    {
        auto s = add("fano-enum", "Isotropic subspaces of dimension k over a finite field", cmd_fano_enum);
        form_opt(s);
        s->add_option("--dim", o.dim, "Linear dimension k")->required();
    }
    {
        auto s = add("fano-components", "The two families of maximal isotropics of a smooth even form", cmd_fano_components);
        form_opt(s);
    }
    {
        auto s = add("cover-split", "Splitting of the double cover for a corank-2 form", cmd_cover_split);
        form_opt(s);
    }
    {
        auto s = add("line-class", "Component and singular point of a line on a rank-2 quadric surface", cmd_line_class);
        form_opt(s);
        sub_opt(s, true);
        deg_opt(s);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream cli_out, cli_err;
        const int code = app.exit(e, cli_out, cli_err);
        out << cli_out.str();
        err << cli_err.str();
        return code == 0 ? 0 : 1;
    }

    CLI::App* chosen = nullptr;
    Handler handler = nullptr;
    for (auto& [sub, h] : commands)
        if (sub->parsed()) {
            chosen = sub;
            handler = h;
        }

    Context cx(o);
    json report{{"command", chosen->get_name()}, {"seed", o.seed}};
    int code = 0;
    std::string flags = chosen->get_name();
    for (int i = 2; i < argc; ++i) flags += std::string("\x1f") + argv[i];
    try {
        report["result"] = handler(cx);
        report["status"] = "ok";
    } catch (const Error& e) {
        code = is_input_error(e.kind()) || cx.load_failed ? 1 : 2;
        report["status"] = code == 1 ? "input_error" : "precondition_violation";
        report["error"] = {{"kind", to_string(e.kind())}, {"message", e.message()}};
        err << "qbundle " << chosen->get_name() << ": " << e.what() << "\n";
    }
    std::ostringstream hex;
    hex << std::hex << std::setw(16) << std::setfill('0') << fnv1a(cx.digest_input, fnv1a(flags));
    report["inputs_digest"] = hex.str();
    report["warnings"] = cx.warnings;

    if (o.json_out) {
        out << report.dump(2) << "\n";
    } else {
        out << "command: " << chosen->get_name() << "\nstatus: " << report["status"].get<std::string>() << "\n";
        if (report.contains("result")) print_text(out, report["result"]);
        if (report.contains("error")) out << "error: " << report["error"]["message"].get<std::string>() << "\n";
        for (const auto& w : cx.warnings) out << "warning: " << w << "\n";
    }
    return code;
}

} // namespace qbundle::cli

#pragma once

// Line-oriented input files: forms, subspaces, bundles and cubics. Blank
// lines and text after '#' are ignored. Errors carry "name:line:" prefixes.

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qbundle/bundles.hpp"
#include "qbundle/cubic4fold.hpp"
#include "qbundle/exactalg.hpp"
#include "qbundle/quadform.hpp"

namespace qbundle {

inline std::string load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::BadFile, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

struct Line {
    std::size_t number;
    std::string key;    // first word, or the text before ':'
    std::string rest;
};

/// Splits into (key, rest). "entry 0 1: expr" gives key "entry 0 1".
inline std::vector<Line> split_lines(std::string_view text) {
    std::vector<Line> out;
    std::size_t number = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view raw = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++number;
        if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        raw = trim(raw);
        if (raw.empty()) continue;
        if (auto colon = raw.find(':'); colon != std::string_view::npos) {
            out.push_back({number, std::string(trim(raw.substr(0, colon))), std::string(trim(raw.substr(colon + 1)))});
        } else {
            const auto sp = raw.find_first_of(" \t");
            out.push_back({number, std::string(raw.substr(0, sp)),
                           sp == std::string_view::npos ? std::string() : std::string(trim(raw.substr(sp)))});
        }
    }
    return out;
}

[[noreturn]] inline void file_error(const std::string& name, std::size_t line, const std::string& msg,
                                    ErrorKind kind = ErrorKind::BadFile) {
    throw Error(kind, name + ":" + std::to_string(line) + ": " + msg);
}

/// Re-raise library errors with a file:line prefix, keeping their kind.
template <class Fn>
auto at_line(const std::string& name, std::size_t line, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const Error& e) {
        throw Error(e.kind(), name + ":" + std::to_string(line) + ": " + e.message(), e.offset());
    }
}

inline long long parse_int(const std::string& name, std::size_t line, std::string_view s) {
    s = trim(s);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        file_error(name, line, "expected an integer, got '" + std::string(s) + "'");
    return v;
}

inline std::vector<std::string> split_on(std::string_view s, char sep) {
    std::vector<std::string> out;
    while (true) {
        const auto at = s.find(sep);
        out.emplace_back(trim(s.substr(0, at)));
        if (at == std::string_view::npos) break;
        s = s.substr(at + 1);
    }
    return out;
}

/// Once-only keys.
class KeySet {
public:
    explicit KeySet(std::string name) : name_(std::move(name)) {}
    const Line* get(const std::string& key) const {
        auto it = lines_.find(key);
        return it == lines_.end() ? nullptr : &it->second;
    }
    const Line& require(const std::string& key) const {
        if (auto p = get(key)) return *p;
        throw Error(ErrorKind::BadFile, name_ + ": missing '" + key + "' line");
    }
    void add(const Line& l) {
        if (!lines_.emplace(l.key, l).second) file_error(name_, l.number, "duplicate '" + l.key + "' line");
    }

private:
    std::string name_;
    std::map<std::string, Line> lines_;
};

} // namespace detail

/// Constant scalar expression (e.g. "-1/2", "a+1").
inline Scalar parse_scalar(std::string_view text, Field f) {
    Poly p = parse_poly(text, make_vars({}), f);
    return p.constant_term();
}

struct FormFile {
    Field field;
    QuadraticForm form;
};

/// `field <spec>`, `dim <n+1>`, `q: <expression in x0..xn>`.
inline FormFile read_form(std::string_view text, const std::string& name = "<form>") {
    detail::KeySet keys(name);
    for (const auto& l : detail::split_lines(text)) {
        if (l.key != "field" && l.key != "dim" && l.key != "q") detail::file_error(name, l.number, "unknown key '" + l.key + "'");
        keys.add(l);
    }
    const auto& fl = keys.require("field");
    const Field f = detail::at_line(name, fl.number, [&] { return parse_field(fl.rest); });
    const auto& dl = keys.require("dim");
    const long long dim = detail::parse_int(name, dl.number, dl.rest);
    if (dim < 1 || dim > 64) detail::file_error(name, dl.number, "dim must be between 1 and 64");
    const auto& ql = keys.require("q");
    QuadraticForm q = detail::at_line(name, ql.number, [&] { return QuadraticForm::parse(ql.rest, f, static_cast<std::size_t>(dim)); });
    return {f, std::move(q)};
}

/// `ambient <n+1>` then `row: c0,...,cn` lines.
inline Subspace read_subspace(std::string_view text, Field f, const std::string& name = "<subspace>") {
    std::optional<std::size_t> ambient;
    std::vector<ScalarVector> rows;
    for (const auto& l : detail::split_lines(text)) {
        if (l.key == "ambient") {
            if (ambient) detail::file_error(name, l.number, "duplicate 'ambient' line");
            const long long a = detail::parse_int(name, l.number, l.rest);
            if (a < 1 || a > 64) detail::file_error(name, l.number, "ambient must be between 1 and 64");
            ambient = static_cast<std::size_t>(a);
        } else if (l.key == "row") {
            if (!ambient) detail::file_error(name, l.number, "'row' before 'ambient'");
            const auto cells = detail::split_on(l.rest, ',');
            if (cells.size() != *ambient)
                detail::file_error(name, l.number, "row has " + std::to_string(cells.size()) + " entries, expected " +
                                                       std::to_string(*ambient));
            ScalarVector v;
            for (const auto& c : cells) v.push_back(detail::at_line(name, l.number, [&] { return parse_scalar(c, f); }));
            rows.push_back(std::move(v));
        } else {
            detail::file_error(name, l.number, "unknown key '" + l.key + "'");
        }
    }
    if (!ambient) fail(ErrorKind::BadFile, name + ": missing 'ambient' line");
    return Subspace::span(f, *ambient, rows);
}

/// `field`, `base_dim m`, `fiber_rank n+1`, `twists a0 ... an`, `L l`, then
/// `entry i j: <expression in y0..ym>` lines. Degrees are validated.
inline QuadricBundleData read_bundle(std::string_view text, const std::string& name = "<bundle>") {
    detail::KeySet keys(name);
    std::vector<detail::Line> entries;
    for (const auto& l : detail::split_lines(text)) {
        if (l.key.starts_with("entry")) {
            entries.push_back(l);
            continue;
        }
        if (l.key != "field" && l.key != "base_dim" && l.key != "fiber_rank" && l.key != "twists" && l.key != "L")
            detail::file_error(name, l.number, "unknown key '" + l.key + "'");
        keys.add(l);
    }
    const auto& fl = keys.require("field");
    const Field f = detail::at_line(name, fl.number, [&] { return parse_field(fl.rest); });
    const auto& ml = keys.require("base_dim");
    const long long m = detail::parse_int(name, ml.number, ml.rest);
    if (m < 0 || m > 16) detail::file_error(name, ml.number, "base_dim must be between 0 and 16");
    const auto& rl = keys.require("fiber_rank");
    const long long rank = detail::parse_int(name, rl.number, rl.rest);
    if (rank < 1 || rank > 16) detail::file_error(name, rl.number, "fiber_rank must be between 1 and 16");
    const auto& tl = keys.require("twists");
    std::vector<int> twists;
    {
        std::istringstream ts(tl.rest);
        std::string tok;
        while (ts >> tok) twists.push_back(static_cast<int>(detail::parse_int(name, tl.number, tok)));
    }
    if (twists.size() != static_cast<std::size_t>(rank))
        detail::file_error(name, tl.number, "expected " + std::to_string(rank) + " twists");
    const auto& ll = keys.require("L");
    const int lval = static_cast<int>(detail::parse_int(name, ll.number, ll.rest));
    QuadricBundleData b(f, static_cast<std::size_t>(m), twists, lval);
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& e : entries) {
        std::istringstream is(e.key);
        std::string word, si, sj, extra;
        is >> word >> si >> sj;
        if (word != "entry" || si.empty() || sj.empty() || (is >> extra))
            detail::file_error(name, e.number, "expected 'entry i j: <expression>'");
        const auto i = detail::parse_int(name, e.number, si), j = detail::parse_int(name, e.number, sj);
        if (i < 0 || j < 0 || i > j || j >= rank) detail::file_error(name, e.number, "entry indices must satisfy 0 <= i <= j < fiber_rank");
        if (!seen.insert({i, j}).second) detail::file_error(name, e.number, "duplicate entry");
        detail::at_line(name, e.number, [&] {
            b.set(static_cast<std::size_t>(i), static_cast<std::size_t>(j), parse_poly(e.rest, b.base_vars(), f));
            return 0;
        });
    }
    return b;
}

struct CubicFile {
    Field field;
    Poly f;
};

/// `field <spec>` then `f: <expression in x0..x2,y0..y2>`.
inline CubicFile read_cubic(std::string_view text, const std::string& name = "<cubic>") {
    detail::KeySet keys(name);
    for (const auto& l : detail::split_lines(text)) {
        if (l.key != "field" && l.key != "f") detail::file_error(name, l.number, "unknown key '" + l.key + "'");
        keys.add(l);
    }
    const auto& fl = keys.require("field");
    const Field f = detail::at_line(name, fl.number, [&] { return parse_field(fl.rest); });
    const auto& pl = keys.require("f");
    Poly p = detail::at_line(name, pl.number, [&] { return parse_poly(pl.rest, cubic_vars(), f); });
    return {f, std::move(p)};
}

} // namespace qbundle

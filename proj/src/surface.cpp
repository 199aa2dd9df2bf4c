#include "levi/surface.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "levi/errors.hpp"
#include "levi/jet.hpp"
#include "levi/rng.hpp"

namespace levi {

SurfaceDef SurfaceDef::make(std::string name, int n, ExprPtr f,
                            std::map<std::string, std::string> metadata) {
    if (n < 1) throw Error("n must be a positive integer");
    if (!f) throw Error("surface expression is empty");
    f = fold(f);
    int maxv = max_var_index(f);
    if (maxv > n + 1)
        throw Error("variable index " + std::to_string(maxv) +
                    " exceeds n+1 = " + std::to_string(n + 1));
    SurfaceDef s;
    s.name = std::move(name);
    s.n = n;
    s.f = f;
    s.metadata = std::move(metadata);
    s.jets = std::make_shared<const JetExprTable>(s.f, n + 1);
    return s;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

SurfaceDef parse_surface(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;

    bool have_n = false, have_f = false;
    int n = 0;
    int f_line = 0;
    std::string f_text;
    int f_col = 0;
    std::string name;
    std::map<std::string, std::string> metadata;

    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string stripped = trim(line);
        if (stripped.empty()) continue;

        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected 'key = value'", lineno, 1);
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError("empty key", lineno, 1);

        if (key == "n") {
            if (have_n) throw ParseError("duplicate key 'n'", lineno, 1);
            int v = 0;
            auto res = std::from_chars(value.data(), value.data() + value.size(), v);
            if (res.ec != std::errc() || res.ptr != value.data() + value.size())
                throw ParseError("n must be an integer", lineno,
                                 static_cast<int>(eq) + 2);
            if (v < 1)
                throw ParseError("n must be >= 1", lineno, static_cast<int>(eq) + 2);
            n = v;
            have_n = true;
        } else if (key == "F") {
            if (have_f) throw ParseError("duplicate key 'F'", lineno, 1);
            if (value.empty())
                throw ParseError("F must be an expression", lineno,
                                 static_cast<int>(eq) + 2);
            f_text = value;
            f_line = lineno;
            f_col = static_cast<int>(line.find(value, eq + 1));
            have_f = true;
        } else if (key == "name") {
            name = value;
        } else {
            metadata[key] = value;
        }
    }

    if (!have_n) throw ParseError("missing required key 'n'", lineno, 1);
    if (!have_f) throw ParseError("missing required key 'F'", lineno, 1);

    ExprPtr f = parse_expression(f_text, f_line, f_col);
    int maxv = max_var_index(f);
    if (maxv > n + 1)
        throw ParseError("variable index " + std::to_string(maxv) +
                             " exceeds n+1 = " + std::to_string(n + 1),
                         f_line, f_col + 1);
    return SurfaceDef::make(std::move(name), n, std::move(f), std::move(metadata));
}

SurfaceDef parse_surface_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read surface file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_surface(buf.str());
}

std::string to_string(const SurfaceDef& s) {
    std::string out;
    if (!s.name.empty()) out += "name = " + s.name + "\n";
    out += "n = " + std::to_string(s.n) + "\n";
    out += "F = " + to_string(s.f) + "\n";
    for (const auto& [k, v] : s.metadata) out += k + " = " + v + "\n";
    return out;
}

RealnessReport check_real_valued(const SurfaceDef& s, int trial_count,
                                 std::uint64_t seed) {
    Rng rng(seed);
    RealnessReport rep;
    std::vector<cplx> z(s.n + 1);
    for (int t = 0; t < trial_count; ++t) {
        double scale = 0.0;
        for (auto& zk : z) {
            zk = cplx(rng.next_sym(), rng.next_sym());
            scale = std::max({scale, std::abs(zk.real()), std::abs(zk.imag())});
        }
        cplx v = evaluate(s.f, z);
        rep.max_imag = std::max(rep.max_imag, std::abs(v.imag()));
        (void)scale;
    }
    rep.pass = rep.max_imag <= 1e-12;
    return rep;
}

} // namespace levi

#pragma once

// Shared fixtures and finite-difference oracles for the test suite. The
// oracles differentiate numerically on purpose: they must not share code
// with the symbolic machinery they check.

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "levi/frame.hpp"
#include "levi/rng.hpp"
#include "levi/surface.hpp"

namespace testutil {

using levi::AmbVec;
using levi::cplx;

inline std::string surface_path(const std::string& file) {
    return std::string(LEVI_SURFACES_DIR) + "/" + file;
}

inline levi::SurfaceDef surf(const std::string& text) {
    return levi::parse_surface(text);
}

inline levi::SurfaceDef sphere3() {
    return surf("n = 2\nF = z1*cz1 + z2*cz2 + z3*cz3 - 1\n");
}

inline levi::SurfaceDef ellipsoid3(double lambda) {
    return surf("n = 2\nF = z1*cz1 + z2*cz2 + z3*cz3 + " +
                std::to_string(lambda) +
                "*(re(z1^2) + re(z2^2) + re(z3^2)) - 1\n");
}

struct CliResult {
    int code = -1;
    std::string out;
};

inline CliResult run_cli(const std::string& args) {
    std::string cmd = std::string(LEVI_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) throw std::runtime_error("popen failed");
    CliResult r;
    char buf[4096];
    size_t got;
    while ((got = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
    int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

// central-difference Wirtinger derivative of a complex-valued callable
template <class Fn>
cplx fd_wirtinger(const Fn& f, const std::vector<cplx>& z, int h,
                  bool conjugated, double t = 1e-6) {
    auto shifted = [&](double dx, double dy) {
        std::vector<cplx> w = z;
        w[h] += cplx(dx, dy);
        return f(w);
    };
    cplx ddx = (shifted(t, 0) - shifted(-t, 0)) / (2 * t);
    cplx ddy = (shifted(0, t) - shifted(0, -t)) / (2 * t);
    cplx rot = conjugated ? cplx(0, 1) : cplx(0, -1);
    return 0.5 * (ddx + rot * ddy);
}

// derivative along a split-component ambient vector field direction
template <class Fn>
cplx fd_dir(const Fn& f, const std::vector<cplx>& z, const AmbVec<cplx>& v,
            double t = 1e-6) {
    cplx r = 0.0;
    for (int h = 0; h < static_cast<int>(v.hol.size()); ++h) {
        if (v.hol[h] != 0.0) r += v.hol[h] * fd_wirtinger(f, z, h, false, t);
        if (v.anti[h] != 0.0) r += v.anti[h] * fd_wirtinger(f, z, h, true, t);
    }
    return r;
}

// random unitary by Gram-Schmidt on a seeded random complex matrix
inline std::vector<std::vector<cplx>> random_unitary(int m, std::uint64_t seed) {
    levi::Rng rng(seed);
    std::vector<std::vector<cplx>> u(m, std::vector<cplx>(m));
    for (auto& row : u)
        for (auto& v : row) v = cplx(rng.next_sym(), rng.next_sym());
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < i; ++j) {
            cplx d = 0.0;
            for (int k = 0; k < m; ++k) d += u[i][k] * std::conj(u[j][k]);
            for (int k = 0; k < m; ++k) u[i][k] -= d * u[j][k];
        }
        double nn = 0.0;
        for (int k = 0; k < m; ++k) nn += std::norm(u[i][k]);
        double inv = 1.0 / std::sqrt(nn);
        for (int k = 0; k < m; ++k) u[i][k] *= inv;
    }
    return u;
}

inline double max_abs(const std::vector<std::vector<cplx>>& m) {
    double r = 0.0;
    for (const auto& row : m)
        for (const cplx& v : row) r = std::max(r, std::abs(v));
    return r;
}

} // namespace testutil

#include "levi/sampling.hpp"

#include <cmath>
#include <string>

#include "levi/errors.hpp"
#include "levi/report.hpp"
#include "levi/rng.hpp"
#include "levi/shape.hpp"

namespace levi {

namespace {

struct Grad {
    cplx f0;
    std::vector<cplx> fh; // holomorphic derivatives
    double s;             // |dF|
};

Grad eval_grad(const SurfaceDef& s, const std::vector<cplx>& z) {
    JetF j = s.jets->eval(z, 1);
    Grad g;
    g.f0 = j.d({}, {});
    g.fh.resize(s.n + 1);
    double s2 = 0.0;
    for (int h = 0; h <= s.n; ++h) {
        g.fh[h] = j.d({h}, {});
        s2 += std::norm(g.fh[h]);
    }
    g.s = std::sqrt(s2);
    return g;
}

} // namespace

SurfacePoint project(const SurfaceDef& s, const std::vector<cplx>& z0,
                     double tol, int max_iter) {
    if (max_iter < 1) throw Error("max_iter must be at least 1");
    if (static_cast<int>(z0.size()) != s.n + 1)
        throw DimensionMismatch("seed point has " + std::to_string(z0.size()) +
                                " coordinates, surface is in C^" +
                                std::to_string(s.n + 1));
    std::vector<cplx> z = z0;
    for (int it = 0; it < max_iter; ++it) {
        Grad g = eval_grad(s, z);
        if (std::abs(g.f0) <= tol) return locate(s, z, tol);
        if (g.s <= 1e-8)
            throw DegeneratePoint("gradient of F vanished during projection");
        // displacement opposite the real gradient scaled by F / |grad F|^2
        double scale = 0.5 / (g.s * g.s);
        for (int h = 0; h <= s.n; ++h)
            z[h] -= g.f0.real() * std::conj(g.fh[h]) * scale;
    }
    Grad g = eval_grad(s, z);
    if (std::abs(g.f0) <= tol) return locate(s, z, tol);
    throw NoConvergence("projection did not reach |F| <= " + format_short(tol) +
                        " in " + std::to_string(max_iter) + " iterations");
}

SampleSet sample_patch(const SurfaceDef& s, const SurfacePoint& base, int count,
                       double step, std::uint64_t seed) {
    if (count < 1) throw Error("sample count must be at least 1");
    if (!(step > 0.0)) throw Error("step must be positive");

    Rng rng(seed);
    const int m = s.n + 1;

    SampleSet set;
    set.seed = seed;
    set.surface_tol = base.surface_tol;
    set.stats.min_grad = 0.0;

    std::vector<cplx> cur = base.z;
    for (int i = 0; i < count; ++i) {
        bool accepted = false;
        for (int retry = 0; retry < 10 && !accepted; ++retry) {
            // random real ambient direction
            AmbVec<cplx> v = make_vec(m, cplx(0.0));
            for (int h = 0; h < m; ++h) {
                v.hol[h] = cplx(rng.next_sym(), rng.next_sym());
                v.anti[h] = std::conj(v.hol[h]);
            }
            Grad g = eval_grad(s, cur);
            if (g.s <= 1e-8)
                throw DegeneratePoint("gradient of F vanished during sampling");
            AmbVec<cplx> nu = make_vec(m, cplx(0.0));
            for (int h = 0; h < m; ++h) {
                nu.hol[h] = std::conj(g.fh[h]) / g.s;
                nu.anti[h] = g.fh[h] / g.s;
            }
            cplx vnu = pair_vec(v, nu);
            for (int h = 0; h < m; ++h) {
                v.hol[h] -= vnu * nu.hol[h];
                v.anti[h] -= vnu * nu.anti[h];
            }
            double norm2 = pair_vec(v, v).real();
            if (norm2 < 1e-12) {
                set.stats.rejected_count += 1;
                continue;
            }
            double inv = 1.0 / std::sqrt(norm2);
            std::vector<cplx> trial = cur;
            for (int h = 0; h < m; ++h) trial[h] += step * inv * v.hol[h];
            try {
                SurfacePoint q = project(s, trial, base.surface_tol, 32);
                cur = q.z;
                set.points.push_back(q);
                double sg = eval_grad(s, cur).s;
                if (set.points.size() == 1 || sg < set.stats.min_grad)
                    set.stats.min_grad = sg;
                accepted = true;
            } catch (const Error&) {
                set.stats.rejected_count += 1;
            }
        }
    }
    set.stats.count = static_cast<int>(set.points.size());
    if (set.stats.count < (count + 1) / 2)
        throw TooManyRejections("only " + std::to_string(set.stats.count) +
                                " of " + std::to_string(count) +
                                " requested samples were produced");
    return set;
}

SurfacePoint horizontal_step(const SurfaceDef& s, const SurfacePoint& p,
                             const std::vector<cplx>& direction, double step) {
    if (static_cast<int>(direction.size()) != s.n)
        throw DimensionMismatch("direction has " +
                                std::to_string(direction.size()) +
                                " components, frame has " + std::to_string(s.n));
    bool zero = true;
    for (const cplx& d : direction)
        if (d != cplx(0.0)) zero = false;
    if (zero) throw Error("direction must be nonzero");
    if (step == 0.0) return p;

    FramePack f = build_frame(s, p);
    std::vector<cplx> z = p.z;
    for (int a = 0; a < s.n; ++a)
        for (int h = 0; h <= s.n; ++h) z[h] += step * direction[a] * f.Z[a].hol[h];
    return project(s, z, p.surface_tol, 32);
}

double default_step(const SurfaceDef& s, const SurfacePoint& base) {
    double H = std::abs(levi_curvature(s, base));
    return 0.05 / std::max(H, 1.0);
}

SurfacePoint find_start(const SurfaceDef& s, double tol, std::uint64_t seed,
                        int max_iter) {
    std::vector<std::vector<cplx>> seeds;
    const int m = s.n + 1;
    for (double r : {1.0, 0.5, 2.0, 0.25, 4.0}) {
        for (int h = 0; h < m; ++h)
            for (cplx u : {cplx(1.0, 0.0), cplx(-1.0, 0.0), cplx(0.0, 1.0),
                           cplx(0.0, -1.0)}) {
                std::vector<cplx> z(m, cplx(0.0));
                z[h] = r * u;
                seeds.push_back(z);
            }
        seeds.push_back(std::vector<cplx>(m, cplx(r, 0.0)));
    }
    Rng rng(seed);
    for (int t = 0; t < 200; ++t) {
        std::vector<cplx> z(m);
        for (int h = 0; h < m; ++h)
            z[h] = cplx(2.0 * rng.next_sym(), 2.0 * rng.next_sym());
        seeds.push_back(z);
    }

    bool have_fallback = false;
    SurfacePoint fallback;
    for (const auto& z0 : seeds) {
        SurfacePoint q;
        try {
            q = project(s, z0, tol, max_iter);
        } catch (const Error&) {
            continue;
        }
        FramePack f = build_frame(s, q);
        if (f.hol_grad_norm >= 0.1 && f.pivot_ratio >= 0.3) return q;
        if (!have_fallback) {
            fallback = q;
            have_fallback = true;
        }
    }
    if (have_fallback) return fallback;
    throw NoConvergence("no starting point found on the surface");
}

std::vector<SurfacePoint> well_conditioned(const SurfaceDef& s,
                                           const SampleSet& set) {
    std::vector<SurfacePoint> out;
    for (const SurfacePoint& p : set.points) {
        FramePack f = build_frame(s, p);
        if (f.hol_grad_norm >= 0.1 && f.pivot_ratio >= 0.3) out.push_back(p);
    }
    return out;
}

} // namespace levi

#include "levi/frame.hpp"

#include <cmath>
#include <string>

#include "levi/errors.hpp"
#include "levi/report.hpp"

namespace levi {

namespace {

// shared membership / regularity checks; returns the order-1 jet
JetF check_point(const SurfaceDef& s, const std::vector<cplx>& z, double tol) {
    if (static_cast<int>(z.size()) != s.n + 1)
        throw DimensionMismatch("point has " + std::to_string(z.size()) +
                                " coordinates, surface is in C^" +
                                std::to_string(s.n + 1));
    JetF j = s.jets->eval(z, 1);
    cplx f0 = j.d({}, {});
    if (std::abs(f0) > tol)
        throw NotOnSurface("|F(z)| = " + format_short(std::abs(f0)) +
                           " exceeds tolerance " + format_short(tol));
    double s2 = 0.0;
    for (int h = 0; h <= s.n; ++h) {
        cplx fh = j.d({h}, {});
        s2 += std::norm(fh);
    }
    if (std::sqrt(s2) <= 1e-8)
        throw DegeneratePoint("gradient of F vanishes at the point");
    return j;
}

} // namespace

SurfacePoint locate(const SurfaceDef& s, const std::vector<cplx>& z, double tol) {
    JetF j = check_point(s, z, tol);
    int pivot = 0;
    double best = -1.0;
    for (int h = 0; h <= s.n; ++h) {
        double a = std::abs(j.d({h}, {}));
        if (a > best) {
            best = a;
            pivot = h;
        }
    }
    SurfacePoint p;
    p.z = z;
    p.surface_tol = tol;
    p.pivot = pivot;
    return p;
}

SurfacePoint locate_with_pivot(const SurfaceDef& s, const std::vector<cplx>& z,
                               int pivot, double tol) {
    if (pivot < 0 || pivot > s.n)
        throw DimensionMismatch("pivot index " + std::to_string(pivot) +
                                " out of range for C^" + std::to_string(s.n + 1));
    JetF j = check_point(s, z, tol);
    double s2 = 0.0;
    for (int h = 0; h <= s.n; ++h) s2 += std::norm(j.d({h}, {}));
    if (std::abs(j.d({pivot}, {})) <= 1e-12 * std::sqrt(s2))
        throw DegeneratePoint("F_" + std::to_string(pivot + 1) +
                              " vanishes, cannot use it as pivot");
    SurfacePoint p;
    p.z = z;
    p.surface_tol = tol;
    p.pivot = pivot;
    return p;
}

FramePack build_frame(const SurfaceDef& s, const SurfacePoint& p) {
    JetF j = s.jets->eval(p.z, 1);
    PlainJetSource src(j);
    FrameChart chart = FrameChart::make(s.n, p.pivot);
    GeoCore<cplx> core = build_core(src, chart, 1);

    FramePack f;
    f.n = s.n;
    f.pivot = p.pivot;
    f.amb.assign(chart.amb.begin(), chart.amb.end() - 1);
    f.z = p.z;
    f.hol_grad_norm = core.s.real();
    f.grad_norm = 2.0 * f.hol_grad_norm;
    f.pivot_ratio = std::abs(j.d({p.pivot}, {})) / f.hol_grad_norm;
    f.nu = core.nu;
    f.T = core.T;
    f.N = core.N;
    f.Z = core.Z;
    f.Zbar = core.Zbar;
    f.g = core.g;
    f.g_inv = core.ginv;
    return f;
}

AmbVec<cplx> project_hol(const FramePack& f, const AmbVec<cplx>& v) {
    const int m = f.n + 1;
    std::vector<cplx> comp(f.n);
    for (int mu = 0; mu < f.n; ++mu) comp[mu] = pair(v, f.Zbar[mu]);
    AmbVec<cplx> r = make_vec(m, cplx(0.0));
    for (int a = 0; a < f.n; ++a) {
        cplx c = 0.0;
        for (int mu = 0; mu < f.n; ++mu) c += f.g_inv[a][mu] * comp[mu];
        for (int k = 0; k < m; ++k) r.hol[k] += c * f.Z[a].hol[k];
    }
    return r;
}

AmbVec<cplx> project_antihol(const FramePack& f, const AmbVec<cplx>& v) {
    return conj_vec(project_hol(f, conj_vec(v)));
}

} // namespace levi

#include "levi/shape.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "levi/errors.hpp"

namespace levi {

namespace {

// quantities that must be real are truncated only after the imaginary part
// is shown to be numerical noise
double real_checked(cplx v, double scale, const char* what) {
    if (std::abs(v.imag()) > 1e-12 * std::max(1.0, scale))
        throw Error(std::string(what) + " has imaginary residue " +
                    std::to_string(v.imag()));
    return v.real();
}

std::vector<double> pencil_eigs(const std::vector<std::vector<cplx>>& a,
                                const std::vector<std::vector<cplx>>& b) {
    const int n = static_cast<int>(a.size());
    Eigen::MatrixXcd A(n, n), B(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            A(i, j) = a[i][j];
            B(i, j) = b[i][j];
        }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(A, B,
                                                                  Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw Error("metric pencil eigensolve failed (metric not positive definite?)");
    std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + n);
    std::sort(out.begin(), out.end());
    return out;
}

// real shape operator in the basis {Z_a + conj(Z_a), i(Z_a - conj(Z_a)), T},
// solved as the generalized symmetric problem against the real Gram matrix
template <class Src>
ShapeEigen shape_system_from(const Src& F, const GeoCore<cplx>& core,
                             bool with_vectors) {
    const int n = core.chart.n;
    const int m = core.chart.m;
    const int dim = 2 * n + 1;
    const cplx iu(0.0, 1.0);

    std::vector<AmbVec<cplx>> basis;
    basis.reserve(dim);
    for (int a = 0; a < n; ++a) {
        AmbVec<cplx> X = make_vec(m, cplx(0.0));
        for (int k = 0; k < m; ++k) {
            X.hol[k] = core.Z[a].hol[k];
            X.anti[k] = core.Zbar[a].anti[k];
        }
        basis.push_back(X);
    }
    for (int a = 0; a < n; ++a) {
        AmbVec<cplx> Y = make_vec(m, cplx(0.0));
        for (int k = 0; k < m; ++k) {
            Y.hol[k] = iu * core.Z[a].hol[k];
            Y.anti[k] = -iu * core.Zbar[a].anti[k];
        }
        basis.push_back(Y);
    }
    basis.push_back(core.T);

    std::vector<AmbVec<cplx>> dnu;
    dnu.reserve(dim);
    for (const auto& b : basis) dnu.push_back(amb_dnu(F, core, b));

    Eigen::MatrixXd A(dim, dim), G(dim, dim);
    double scale = 0.0;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            scale = std::max(scale, std::abs(pair_vec(dnu[j], basis[i])));
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            A(i, j) = real_checked(pair_vec(dnu[j], basis[i]), scale,
                                   "shape operator entry");
            G(i, j) = real_checked(pair_vec(basis[i], basis[j]), 1.0,
                                   "tangent Gram entry");
        }
    double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-11 * std::max(1.0, scale))
        throw Error("real shape operator not symmetric, residual " +
                    std::to_string(asym));
    Eigen::MatrixXd As = 0.5 * (A + A.transpose());

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
        As, G, with_vectors ? Eigen::ComputeEigenvectors | Eigen::Ax_lBx
                            : int(Eigen::EigenvaluesOnly));
    if (es.info() != Eigen::Success)
        throw Error("shape operator eigensolve failed");

    ShapeEigen out;
    out.eigs.assign(es.eigenvalues().data(), es.eigenvalues().data() + dim);
    std::vector<int> order(dim);
    for (int i = 0; i < dim; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return out.eigs[a] < out.eigs[b]; });
    std::vector<double> sorted_eigs(dim);
    for (int i = 0; i < dim; ++i) sorted_eigs[i] = out.eigs[order[i]];
    out.eigs = sorted_eigs;

    if (with_vectors) {
        out.vecs_hol.resize(dim);
        for (int i = 0; i < dim; ++i) {
            const auto col = es.eigenvectors().col(order[i]);
            std::vector<cplx> hol(m, cplx(0.0));
            for (int b = 0; b < dim; ++b)
                for (int k = 0; k < m; ++k) hol[k] += col(b) * basis[b].hol[k];
            out.vecs_hol[i] = std::move(hol);
        }
    }
    return out;
}

} // namespace

SecondForm second_form(const SurfaceDef& s, const SurfacePoint& p) {
    JetF j = s.jets->eval(p.z, 2);
    PlainJetSource src(j);
    FrameChart chart = FrameChart::make(s.n, p.pivot);
    GeoCore<cplx> core = build_core(src, chart, 2);

    SecondForm sf;
    sf.frame = build_frame(s, p);

    const int n = s.n;
    sf.h_hol_antihol = core.h_her;
    sf.h_hol_hol = core.h_sym;
    sf.h_hol_T = core.h_h0;

    double hscale = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            hscale = std::max({hscale, std::abs(core.h_her[a][b]),
                               std::abs(core.h_sym[a][b])});

    sf.h_TT = real_checked(core.h_00, std::max(hscale, std::abs(core.h_00)),
                           "h(T,T)");
    sf.H = real_checked(core.H_trace, std::abs(core.H_trace), "Levi curvature");
    sf.H_closed =
        real_checked(core.H_closed, std::abs(core.H_closed), "Levi curvature");

    // independent route for the hermitian block: complex Hessian of F
    // contracted with the frame, divided by the gradient norm
    double gap = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            cplx acc = 0.0;
            for (int h = 0; h <= n; ++h)
                for (int k = 0; k <= n; ++k)
                    acc += core.Z[a].hol[h] * std::conj(core.Z[b].hol[k]) *
                           j.d({h}, {k});
            acc /= 2.0 * core.s;
            gap = std::max(gap, std::abs(acc - core.h_her[a][b]));
        }
    sf.hesse_gap = gap;
    if (gap > 1e-11 * std::max(1.0, hscale))
        throw Error("second fundamental form routes disagree by " +
                    std::to_string(gap));

    sf.levi_eigs = pencil_eigs(sf.h_hol_antihol, sf.frame.g);
    sf.shape_eigs = shape_system_from(src, core, false).eigs;
    return sf;
}

double levi_curvature(const SurfaceDef& s, const SurfacePoint& p) {
    JetF j = s.jets->eval(p.z, 2);
    const int m = s.n + 1;
    double s2 = 0.0;
    for (int h = 0; h < m; ++h) s2 += std::norm(j.d({h}, {}));
    if (std::sqrt(s2) <= 1e-8)
        throw DegeneratePoint("gradient of F vanishes at the point");
    cplx lap = 0.0, contracted = 0.0;
    for (int h = 0; h < m; ++h) {
        lap += j.d({h}, {h});
        for (int k = 0; k < m; ++k)
            contracted += j.d({k}, {}) * j.d({}, {h}) * j.d({h}, {k});
    }
    cplx H = (lap - contracted / s2) / (double(s.n) * std::sqrt(s2));
    if (std::abs(H.imag()) > 1e-12 * std::max(1.0, std::abs(H)))
        throw Error("Levi curvature has imaginary residue " +
                    std::to_string(H.imag()));
    return H.real();
}

std::vector<double> levi_spectrum(const SecondForm& sf) {
    return pencil_eigs(sf.h_hol_antihol, sf.frame.g);
}

std::vector<double> shape_spectrum(const SurfaceDef& s, const SurfacePoint& p) {
    JetF j = s.jets->eval(p.z, 2);
    PlainJetSource src(j);
    FrameChart chart = FrameChart::make(s.n, p.pivot);
    GeoCore<cplx> core = build_core(src, chart, 1);
    return shape_system_from(src, core, false).eigs;
}

ShapeEigen shape_eigensystem(const SurfaceDef& s, const SurfacePoint& p) {
    JetF j = s.jets->eval(p.z, 2);
    PlainJetSource src(j);
    FrameChart chart = FrameChart::make(s.n, p.pivot);
    GeoCore<cplx> core = build_core(src, chart, 1);
    return shape_system_from(src, core, true);
}

} // namespace levi

#include "levi/classify.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "levi/errors.hpp"

namespace levi {

namespace {

double max_abs(const std::vector<std::vector<cplx>>& m) {
    double r = 0.0;
    for (const auto& row : m)
        for (const cplx& v : row) r = std::max(r, std::abs(v));
    return r;
}

// raised-index square of the symmetric block: (h_a^bbar) (h_bbar^mu)
std::vector<std::vector<cplx>> sym_square(const SecondForm& f) {
    const int n = static_cast<int>(f.h_hol_hol.size());
    const auto& ginv = f.frame.g_inv;
    std::vector<std::vector<cplx>> up(n, std::vector<cplx>(n, 0.0));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int r = 0; r < n; ++r)
                up[a][b] += ginv[r][b] * f.h_hol_hol[a][r];
    std::vector<std::vector<cplx>> q(n, std::vector<cplx>(n, 0.0));
    for (int a = 0; a < n; ++a)
        for (int mu = 0; mu < n; ++mu)
            for (int b = 0; b < n; ++b) {
                cplx m2 = 0.0;
                for (int sg = 0; sg < n; ++sg)
                    m2 += ginv[mu][sg] * std::conj(f.h_hol_hol[sg][b]);
                q[a][mu] += up[a][b] * m2;
            }
    return q;
}

ClassificationVerdict unclassified(Diagnostics d, std::string why) {
    ClassificationVerdict v;
    v.kind = VerdictKind::Unclassified;
    v.diagnostics = std::move(d);
    v.diagnostics.note = std::move(why);
    return v;
}

} // namespace

std::string to_string(VerdictKind k) {
    switch (k) {
        case VerdictKind::Sphere: return "Sphere";
        case VerdictKind::SphericalTube: return "SphericalTube";
        case VerdictKind::HermitianCylinder: return "HermitianCylinder";
        case VerdictKind::NotUmbilical: return "NotUmbilical";
        case VerdictKind::NonConstantCurvature: return "NonConstantCurvature";
        case VerdictKind::Unclassified: return "Unclassified";
    }
    return "Unclassified";
}

double umbilicality_deviation(const std::vector<SecondForm>& forms) {
    if (forms.empty()) throw Error("umbilicality deviation of an empty sample set");
    double dev = 0.0;
    for (const SecondForm& f : forms)
        for (double k : f.levi_eigs) dev = std::max(dev, std::abs(k - f.H));
    return dev;
}

CurvatureConstancy curvature_constancy(const std::vector<SecondForm>& forms) {
    if (forms.empty()) throw Error("curvature statistics of an empty sample set");
    CurvatureConstancy c;
    for (const SecondForm& f : forms) c.mean += f.H;
    c.mean /= double(forms.size());
    for (const SecondForm& f : forms)
        c.dev = std::max(c.dev, std::abs(f.H - c.mean));
    return c;
}

ConsequenceReport check_umbilical_consequences(const std::vector<SecondForm>& forms,
                                             double tol) {
    if (forms.empty()) throw Error("consequence check of an empty sample set");
    const int n = static_cast<int>(forms.front().h_hol_antihol.size());

    ConsequenceReport r;
    double umb = umbilicality_deviation(forms);
    CurvatureConstancy cc = curvature_constancy(forms);
    double sym_max = 0.0;
    for (const SecondForm& f : forms) sym_max = std::max(sym_max, max_abs(f.h_hol_hol));
    r.applicable = cc.dev <= tol && std::abs(cc.mean) > tol &&
                   (umb <= tol || sym_max <= tol);

    double h00_mean = 0.0;
    for (const SecondForm& f : forms) {
        for (const cplx& v : f.h_hol_T)
            r.h_alpha0_max = std::max(r.h_alpha0_max, std::abs(v));
        h00_mean += f.h_TT;
    }
    h00_mean /= double(forms.size());
    for (const SecondForm& f : forms)
        r.h_TT_dev = std::max(r.h_TT_dev, std::abs(f.h_TT - h00_mean));

    for (const SecondForm& f : forms) {
        auto q = sym_square(f);
        cplx c(f.H * f.H - f.h_TT * f.H, 0.0);
        cplx trace = 0.0;
        for (int a = 0; a < n; ++a) {
            for (int mu = 0; mu < n; ++mu) {
                cplx want = a == mu ? c : cplx(0.0);
                r.spectral_residual =
                    std::max(r.spectral_residual, std::abs(q[a][mu] - want));
            }
            trace += q[a][a];
        }
        r.sym_norm_residual = std::max(
            r.sym_norm_residual,
            std::abs(trace - double(n) * f.H * (f.H - f.h_TT)));
    }

    double sgn = cc.mean < 0.0 ? -1.0 : 1.0;
    r.h_TT_exceeds_H = sgn * h00_mean > sgn * cc.mean + tol;
    return r;
}

ClassificationVerdict classify(const SurfaceDef& s, const SampleSet& samples,
                               double tol) {
    if (static_cast<int>(samples.points.size()) < 10)
        throw Error("classification needs at least 10 samples");
    if (s.n < 2) {
        Diagnostics d;
        d.case_label = "";
        return unclassified(
            std::move(d),
            "frame dimension 1 is outside scope: every surface is umbilical there");
    }

    const int n = s.n;
    const int m = n + 1;
    std::vector<SecondForm> forms;
    forms.reserve(samples.points.size());
    for (const SurfacePoint& p : samples.points) forms.push_back(second_form(s, p));

    Diagnostics d;
    d.umbilical_dev = umbilicality_deviation(forms);
    CurvatureConstancy cc = curvature_constancy(forms);
    d.H_mean = cc.mean;
    d.H_dev = cc.dev;
    double sym_max = 0.0;
    double h00_mean = 0.0;
    for (const SecondForm& f : forms) {
        sym_max = std::max(sym_max, max_abs(f.h_hol_hol));
        for (const cplx& v : f.h_hol_T)
            d.h_alpha0_max = std::max(d.h_alpha0_max, std::abs(v));
        h00_mean += f.h_TT;
    }
    h00_mean /= double(forms.size());
    d.h_TT_mean = h00_mean;
    for (const SecondForm& f : forms)
        d.h_TT_dev = std::max(d.h_TT_dev, std::abs(f.h_TT - h00_mean));

    // Pointwise screening before the constancy gate: a surface that is not
    // Levi umbilical is still in scope if it matches the cylinder profile
    // (symmetric block zero, pseudoconvex, Levi eigenvalues in {0, h(T,T)}).
    if (d.umbilical_dev > tol) {
        const double sgn0 = d.H_mean < 0.0 ? -1.0 : 1.0;
        bool profile = sym_max <= tol;
        for (const SecondForm& f : forms) {
            if (!profile) break;
            double h00 = sgn0 * f.h_TT;
            for (double k : f.levi_eigs) {
                double ke = sgn0 * k;
                if (ke < -tol || (std::abs(ke) > tol && std::abs(ke - h00) > tol)) {
                    profile = false;
                    break;
                }
            }
        }
        if (!profile) {
            ClassificationVerdict v;
            v.kind = VerdictKind::NotUmbilical;
            v.diagnostics = d;
            return v;
        }
    }
    if (d.H_dev > tol) {
        ClassificationVerdict v;
        v.kind = VerdictKind::NonConstantCurvature;
        v.diagnostics = d;
        return v;
    }
    if (std::abs(d.H_mean) <= tol)
        return unclassified(d, "Levi curvature vanishes; no classification applies");

    const double sgn = d.H_mean < 0.0 ? -1.0 : 1.0;
    d.orientation_flipped = sgn < 0.0;
    const double Heff = sgn * d.H_mean;
    const double h00eff = sgn * h00_mean;

    if (d.h_alpha0_max > tol)
        return unclassified(d, "h(Z,T) does not vanish as the theory requires");
    if (d.h_TT_dev > tol) return unclassified(d, "h(T,T) is not constant");

    double min_levi = sgn * forms.front().levi_eigs.front();
    for (const SecondForm& f : forms)
        for (double k : f.levi_eigs) min_levi = std::min(min_levi, sgn * k);
    d.strictly_pseudoconvex = min_levi > tol;

    auto recover_sphere = [&](const char* label) -> ClassificationVerdict {
        std::vector<cplx> mean_center(m, 0.0);
        std::vector<std::vector<cplx>> centers;
        centers.reserve(forms.size());
        for (const SecondForm& f : forms) {
            std::vector<cplx> c(m);
            for (int h = 0; h < m; ++h)
                c[h] = f.frame.z[h] - f.frame.nu.hol[h] / f.H;
            for (int h = 0; h < m; ++h) mean_center[h] += c[h];
            centers.push_back(std::move(c));
        }
        for (int h = 0; h < m; ++h) mean_center[h] /= double(centers.size());
        double spread = 0.0;
        for (const auto& c : centers) {
            double d2 = 0.0;
            for (int h = 0; h < m; ++h) d2 += std::norm(c[h] - mean_center[h]);
            spread = std::max(spread, std::sqrt(d2));
        }
        if (spread > tol)
            return unclassified(d, "recovered sphere centers scatter beyond tolerance");
        ClassificationVerdict v;
        v.kind = VerdictKind::Sphere;
        d.case_label = label;
        if (d.strictly_pseudoconvex && label[0] == 'C')
            d.note = "strictly pseudoconvex: sphere is the only possibility";
        v.diagnostics = d;
        v.sphere.center = mean_center;
        v.sphere.radius = 1.0 / Heff;
        v.sphere.center_spread = spread;
        return v;
    };

    if (d.umbilical_dev <= tol) {
        // umbilical route: the shape operator must split into the two
        // predicted eigenvalues plus h(T,T) on the characteristic direction
        double disc = Heff * Heff - h00eff * Heff;
        if (disc < -tol)
            return unclassified(d, "spectral discriminant is negative");
        double root = std::sqrt(std::max(disc, 0.0));
        std::vector<double> expected;
        expected.reserve(2 * n + 1);
        for (int i = 0; i < n; ++i) expected.push_back(Heff + root);
        for (int i = 0; i < n; ++i) expected.push_back(Heff - root);
        expected.push_back(h00eff);
        std::sort(expected.begin(), expected.end());
        for (const SecondForm& f : forms) {
            std::vector<double> eigs(f.shape_eigs);
            for (double& e : eigs) e *= sgn;
            std::sort(eigs.begin(), eigs.end());
            for (int i = 0; i <= 2 * n; ++i)
                if (std::abs(eigs[i] - expected[i]) > tol)
                    return unclassified(
                        d, "shape spectrum does not match the predicted split");
        }

        if (std::abs(h00eff - Heff) <= tol) return recover_sphere("A");

        if (std::abs(h00eff) <= tol) {
            ClassificationVerdict v;
            v.kind = VerdictKind::SphericalTube;
            d.case_label = "B";
            v.diagnostics = d;
            v.tube.radius = 1.0 / (2.0 * Heff);
            ShapeEigen se = shape_eigensystem(s, samples.points.front());
            for (int i = 0; i <= 2 * n; ++i)
                if (std::abs(se.eigs[i]) <= std::max(tol, 1e-8))
                    v.tube.axis_dirs.push_back(se.vecs_hol[i]);
            if (static_cast<int>(v.tube.axis_dirs.size()) != n + 1)
                return unclassified(d, "shape kernel does not have the tube dimension");
            return v;
        }
        return unclassified(d, "umbilical with constant curvature but h(T,T) matches neither case");
    }

    // vanishing symmetric block route: pseudoconvex surfaces whose Levi
    // eigenvalues take only the values 0 and h(T,T)
    if (min_levi < -tol)
        return unclassified(d, "not pseudoconvex: negative Levi eigenvalue");
    int zeros = -1;
    for (const SecondForm& f : forms) {
        int z = 0;
        for (double k : f.levi_eigs) {
            double ke = sgn * k;
            if (std::abs(ke) <= tol) {
                ++z;
            } else if (std::abs(ke - h00eff) > tol) {
                return unclassified(
                    d, "a Levi eigenvalue differs from both 0 and h(T,T)");
            }
        }
        if (zeros < 0) zeros = z;
        if (z != zeros)
            return unclassified(d, "zero Levi eigenvalue count varies across samples");
    }
    if (zeros == 0) return recover_sphere("C");

    ClassificationVerdict v;
    v.kind = VerdictKind::HermitianCylinder;
    d.case_label = "C";
    v.diagnostics = d;
    v.cylinder.m = zeros;
    v.cylinder.radius = 1.0 / h00eff;
    return v;
}

} // namespace levi

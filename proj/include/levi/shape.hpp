#pragma once

// Second fundamental form in the adapted frame, Levi curvature by two
// independent routes, and the spectra used by the classifier.

#include <vector>

#include "levi/frame.hpp"

namespace levi {

struct SecondForm {
    FramePack frame;

    std::vector<std::vector<cplx>> h_hol_antihol; // h(Z_a, conj(Z_b)), hermitian
    std::vector<std::vector<cplx>> h_hol_hol;     // h(Z_a, Z_b), symmetric
    std::vector<cplx> h_hol_T;                    // h(Z_a, T)
    double h_TT = 0.0;                            // h(T, T)

    double H = 0.0;        // Levi curvature as metric trace of h_hol_antihol
    double H_closed = 0.0; // same value from the gradient formula, kept separate
    double hesse_gap = 0.0; // agreement of h_hol_antihol with the Hesse-form route

    std::vector<double> levi_eigs;  // pencil (h_hol_antihol, g), ascending
    std::vector<double> shape_eigs; // real shape operator, ascending, 2n+1 values
};

// h(U,V) = g(U, D_V nu) evaluated from order-2 jets; the hermitian block is
// independently recomputed from the complex Hessian of F and the two routes
// must agree (hesse_gap), otherwise the point is rejected.
SecondForm second_form(const SurfaceDef& s, const SurfacePoint& p);

// closed-form Levi curvature from first and second derivatives of F alone,
// no frame construction involved
double levi_curvature(const SurfaceDef& s, const SurfacePoint& p);

// generalized hermitian eigenvalues of (h_hol_antihol, g), ascending
std::vector<double> levi_spectrum(const SecondForm& sf);

// eigenvalues of the real shape operator X -> D_X nu on the full real
// tangent space, ascending
std::vector<double> shape_spectrum(const SurfaceDef& s, const SurfacePoint& p);

// same spectrum with eigenvectors, returned as ambient real tangent vectors
// (holomorphic components; the antiholomorphic half is the conjugate)
struct ShapeEigen {
    std::vector<double> eigs;
    std::vector<std::vector<cplx>> vecs_hol;
};

ShapeEigen shape_eigensystem(const SurfaceDef& s, const SurfacePoint& p);

} // namespace levi

#pragma once

// Tangential connection adapted to the complex structure: Christoffel
// coefficients in the moving frame, covariant derivatives of the second
// fundamental form, and residual evaluation of the structural identities
// (torsion, metric compatibility, Codazzi system, curvature identity).

#include <string>
#include <utility>
#include <vector>

#include "levi/frame.hpp"

namespace levi {

struct ConnectionCoeffs {
    FramePack base;
    // gamma_hol[A][a][c]: coefficient of Z_c in the derivative of Z_a along
    // direction A (0..n-1 frame fields, n..2n-1 conjugates, 2n the
    // characteristic field). The derivative of T is zero by construction and
    // has no coefficient block.
    std::vector<std::vector<std::vector<cplx>>> gamma_hol;
    // gamma_antihol[A][a][c]: coefficient of conj(Z_c) in the derivative of
    // conj(Z_a); equals conj(gamma_hol) with the direction index conjugated.
    std::vector<std::vector<std::vector<cplx>>> gamma_antihol;
};

ConnectionCoeffs christoffel(const SurfaceDef& s, const SurfacePoint& p);

// Covariant derivatives of every block of the second fundamental form.
// Leading index: differentiation direction within its family.
struct CovariantGradient {
    std::vector<std::vector<std::vector<cplx>>> hol_her;     // along Z_b of h(Z_a, conj(Z_c))
    std::vector<std::vector<std::vector<cplx>>> antihol_her; // along conj(Z_b)
    std::vector<std::vector<cplx>> t_her;                    // along T
    std::vector<std::vector<std::vector<cplx>>> hol_sym;     // along Z_b of h(Z_a, Z_c)
    std::vector<std::vector<std::vector<cplx>>> antihol_sym; // along conj(Z_b)
    std::vector<std::vector<cplx>> t_sym;                    // along T
    std::vector<std::vector<cplx>> hol_ht;                   // along Z_b of h(Z_a, T)
    std::vector<std::vector<cplx>> antihol_ht;               // along conj(Z_b)
    std::vector<cplx> t_ht;                                  // along T
    std::vector<cplx> hol_tt;                                // along Z_a of h(T, T)
    cplx t_tt;                                               // along T
};

CovariantGradient covariant_gradient(const SurfaceDef& s, const SurfacePoint& p);

// Max-abs residual of each structural identity at one point. All entries are
// nonnegative; on any smooth surface every one of them vanishes in exact
// arithmetic.
struct CodazziReport {
    double codazzi_mixed = 0.0;    // two-route derivative of mixed h blocks
    double codazzi_her_t = 0.0;    // T-derivative of hermitian block vs h(.,T) gradient
    double codazzi_sym_t = 0.0;    // T-derivative of symmetric block vs h(.,T) gradient
    double codazzi_t_t = 0.0;      // gradient of h(T,T) vs T-derivative of h(.,T)
    double codazzi_her_skew = 0.0; // antisymmetrized derivative of hermitian block
    double codazzi_sym_skew = 0.0; // antisymmetrized derivative of symmetric block
    double gauss = 0.0;            // curvature of the connection vs quadratic h terms
    double normal_t_bracket = 0.0; // normal drift equals bracket with T
    double normal_h_t = 0.0;       // normal drift equals i h(T, .)
    double bracket_levi = 0.0;     // vertical part of [Z, conj(W)] vs Levi form
    double metric_compat = 0.0;    // derivative of g vs connection terms
    double torsion_hol = 0.0;      // torsion on two frame fields
    double torsion_mixed = 0.0;    // torsion on a frame field and a conjugate
    double parallel_bundle = 0.0;  // derivatives of frame fields stay tangent-holomorphic
    double bracket_gen = 0.0;      // vertical bracket sum vs Levi curvature
    double real_projection = 0.0;  // real-field projection formula for the connection

    std::vector<std::pair<std::string, double>> entries() const;
    double max_residual() const;
};

CodazziReport codazzi_residuals(const SurfaceDef& s, const SurfacePoint& p);

// max over frame fields V1, V2 and all directions U of the residual of
// U g(V1, conj(V2)) = g(DU V1, conj(V2)) + g(V1, DU conj(V2))
double connection_metric_residual(const SurfaceDef& s, const SurfacePoint& p);

struct TorsionResiduals {
    double hol = 0.0;
    double mixed = 0.0;
};

TorsionResiduals torsion_residuals(const SurfaceDef& s, const SurfacePoint& p);

} // namespace levi

#pragma once

// Adapted frame along the hypersurface: unit normal, characteristic
// direction, holomorphic tangent frame and the induced metric on it.

#include <vector>

#include "levi/geom_core.hpp"
#include "levi/surface.hpp"

namespace levi {

struct SurfacePoint {
    std::vector<cplx> z;
    double surface_tol = 1e-9;
    int pivot = 0;
};

// Validates membership (|F| <= tol), rejects critical points of F, and
// picks the pivot coordinate maximizing |F_h| (ties: smallest index).
SurfacePoint locate(const SurfaceDef& s, const std::vector<cplx>& z,
                    double tol = 1e-9);

// Same checks with a caller-chosen pivot; the pivot derivative must be
// nonzero for the frame to exist.
SurfacePoint locate_with_pivot(const SurfaceDef& s, const std::vector<cplx>& z,
                               int pivot, double tol = 1e-9);

struct FramePack {
    int n = 0;
    int pivot = 0;
    std::vector<int> amb; // ambient coordinate of each frame slot
    std::vector<cplx> z;

    double hol_grad_norm = 0.0; // |dF|
    double grad_norm = 0.0;     // |grad F| = 2 |dF|
    double pivot_ratio = 0.0;   // |F_pivot| / |dF|, conditioning of the chart

    AmbVec<cplx> nu; // outward unit normal (real vector, split components)
    AmbVec<cplx> T;  // characteristic direction J(nu)
    AmbVec<cplx> N;  // unit holomorphic normal
    std::vector<AmbVec<cplx>> Z, Zbar;
    std::vector<std::vector<cplx>> g, g_inv;
};

FramePack build_frame(const SurfaceDef& s, const SurfacePoint& p);

// hermitian pairing of ambient vectors (complex-bilinear in the split
// components; restrict to V, conj(W) for the sesquilinear product)
inline cplx pair(const AmbVec<cplx>& v, const AmbVec<cplx>& w) {
    return pair_vec(v, w);
}

// component of v in the holomorphic tangent bundle spanned by the Z_alpha
AmbVec<cplx> project_hol(const FramePack& f, const AmbVec<cplx>& v);
AmbVec<cplx> project_antihol(const FramePack& f, const AmbVec<cplx>& v);

} // namespace levi

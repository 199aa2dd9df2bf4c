#pragma once

// Deterministic point generation on the surface: Newton projection onto
// {F = 0}, seeded tangent random walks, and complex-tangent stepping.

#include <cstdint>
#include <vector>

#include "levi/frame.hpp"

namespace levi {

struct SampleStats {
    int count = 0;
    int rejected_count = 0; // failed step proposals across the whole walk
    double min_grad = 0.0;  // smallest |dF| over the produced points
};

struct SampleSet {
    std::vector<SurfacePoint> points;
    std::uint64_t seed = 0;
    double surface_tol = 1e-9;
    SampleStats stats;
};

// Newton iteration along the gradient of F; quadratically convergent near
// the surface, exact in one step on affine constraints.
SurfacePoint project(const SurfaceDef& s, const std::vector<cplx>& z0,
                     double tol = 1e-9, int max_iter = 32);

// Random walk on the surface: draw a real tangent direction, move by `step`,
// re-project; up to 10 retries per step before recording a rejection.
SampleSet sample_patch(const SurfaceDef& s, const SurfacePoint& base, int count,
                       double step, std::uint64_t seed);

// One step along the real part of a complex tangent combination of frame
// fields (no characteristic component), then re-projection.
SurfacePoint horizontal_step(const SurfaceDef& s, const SurfacePoint& p,
                             const std::vector<cplx>& direction, double step);

// Deterministic starting point: scans axis-aligned seed points at several
// radii, then seeded random boxes, preferring points where the chart is
// well conditioned.
SurfacePoint find_start(const SurfaceDef& s, double tol = 1e-9,
                        std::uint64_t seed = 0, int max_iter = 32);

// default walk step, small relative to the curvature scale at the base point
double default_step(const SurfaceDef& s, const SurfacePoint& base);

// points where the chart is safely invertible: |dF| >= 0.1 and
// |F_pivot|/|dF| >= 0.3
std::vector<SurfacePoint> well_conditioned(const SurfaceDef& s,
                                           const SampleSet& set);

} // namespace levi

#pragma once

// Numerical classification of constant-curvature Levi-umbilical surfaces
// from sampled second-form data: sphere, spherical tube, or hermitian
// cylinder, with recovered parameters, plus the negative verdicts.

#include <string>
#include <vector>

#include "levi/sampling.hpp"
#include "levi/shape.hpp"

namespace levi {

enum class VerdictKind {
    Sphere,
    SphericalTube,
    HermitianCylinder,
    NotUmbilical,
    NonConstantCurvature,
    Unclassified,
};

std::string to_string(VerdictKind k);

struct SphereParams {
    std::vector<cplx> center;
    double radius = 0.0;
    double center_spread = 0.0; // max distance of per-sample centers from mean
};

struct TubeParams {
    double radius = 0.0;
    // kernel of the shape operator at the base sample: n+1 real directions,
    // stored by their holomorphic components
    std::vector<std::vector<cplx>> axis_dirs;
};

struct CylinderParams {
    int m = 0; // number of vanishing Levi eigenvalues
    double radius = 0.0;
};

struct Diagnostics {
    double H_mean = 0.0;
    double H_dev = 0.0;
    double umbilical_dev = 0.0;
    double h_alpha0_max = 0.0;
    double h_TT_mean = 0.0;
    double h_TT_dev = 0.0;
    std::string case_label;          // "A", "B", "C" or empty
    bool orientation_flipped = false; // decision ran on the opposite normal
    bool strictly_pseudoconvex = false;
    std::string note;
};

struct ClassificationVerdict {
    VerdictKind kind = VerdictKind::Unclassified;
    SphereParams sphere;
    TubeParams tube;
    CylinderParams cylinder;
    Diagnostics diagnostics;
};

// max over samples of the worst |levi eigenvalue - H| at that sample
double umbilicality_deviation(const std::vector<SecondForm>& forms);

struct CurvatureConstancy {
    double mean = 0.0;
    double dev = 0.0;
};

CurvatureConstancy curvature_constancy(const std::vector<SecondForm>& forms);

ClassificationVerdict classify(const SurfaceDef& s, const SampleSet& samples,
                               double tol = 1e-6);

// residuals of the structural consequences that hold on any surface
// satisfying the umbilicality and constancy hypotheses
struct ConsequenceReport {
    bool applicable = false;      // gates passed (umbilical-type, constant H != 0)
    double h_alpha0_max = 0.0;    // h(Z_a, T) should vanish
    double spectral_residual = 0.0; // raised-index square of h_sym vs (H^2 - h00 H) id
    double sym_norm_residual = 0.0; // contracted |h_sym|^2 vs n H (H - h00)
    double h_TT_dev = 0.0;        // h(T,T) should be constant across samples
    bool h_TT_exceeds_H = false;  // h00 > H would contradict the theory
};

ConsequenceReport check_umbilical_consequences(const std::vector<SecondForm>& forms,
                                             double tol = 1e-6);

} // namespace levi

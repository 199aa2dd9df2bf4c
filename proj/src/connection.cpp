#include "levi/connection.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "levi/errors.hpp"

namespace levi {

namespace {

int conj_dir(int A, int n) {
    if (A < n) return A + n;
    if (A < 2 * n) return A - n;
    return A; // the characteristic direction is real
}

// Dual geometry plus plain extractions shared by all residual assemblies.
struct Assembly {
    int n = 0, m = 0;
    GeoCore<Dual> C;
    std::vector<AmbVec<cplx>> dirs; // 2n+1 plain direction vectors
    std::vector<AmbVec<cplx>> Zp, Zbp;
    AmbVec<cplx> Tp, Np, Nbp, nup;
    std::vector<std::vector<std::vector<cplx>>> gam;
    std::vector<std::vector<cplx>> her, sym, gv, ginvv;
    std::vector<cplx> h0;
    cplx h00, H;
};

Assembly make_assembly(const SurfaceDef& s, const SurfacePoint& p) {
    JetF j = s.jets->eval(p.z, 3);
    DualJetSource src(j);
    FrameChart chart = FrameChart::make(s.n, p.pivot);

    Assembly A;
    A.n = s.n;
    A.m = s.n + 1;
    A.C = build_core(src, chart, 3);

    const int n = A.n;
    A.Zp.resize(n);
    A.Zbp.resize(n);
    for (int a = 0; a < n; ++a) {
        A.Zp[a] = value_vec(A.C.Z[a]);
        A.Zbp[a] = value_vec(A.C.Zbar[a]);
    }
    A.Tp = value_vec(A.C.T);
    A.Np = value_vec(A.C.N);
    A.Nbp = conj_vec(A.Np);
    A.nup = value_vec(A.C.nu);

    A.dirs.reserve(2 * n + 1);
    for (int a = 0; a < n; ++a) A.dirs.push_back(A.Zp[a]);
    for (int a = 0; a < n; ++a) A.dirs.push_back(A.Zbp[a]);
    A.dirs.push_back(A.Tp);

    A.gam.assign(2 * n + 1,
                 std::vector<std::vector<cplx>>(n, std::vector<cplx>(n)));
    for (int d = 0; d <= 2 * n; ++d)
        for (int a = 0; a < n; ++a)
            for (int c = 0; c < n; ++c) A.gam[d][a][c] = A.C.gamma[d][a][c].v;

    A.her.assign(n, std::vector<cplx>(n));
    A.sym.assign(n, std::vector<cplx>(n));
    A.gv.assign(n, std::vector<cplx>(n));
    A.ginvv.assign(n, std::vector<cplx>(n));
    A.h0.resize(n);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            A.her[a][b] = A.C.h_her[a][b].v;
            A.sym[a][b] = A.C.h_sym[a][b].v;
            A.gv[a][b] = A.C.g[a][b].v;
            A.ginvv[a][b] = A.C.ginv[a][b].v;
        }
        A.h0[a] = A.C.h_h0[a].v;
    }
    A.h00 = A.C.h_00.v;
    A.H = A.C.H_trace.v;
    return A;
}

// covariant derivative of each h block along direction index d
cplx nab_her(const Assembly& A, int d, int a, int c) {
    cplx r = dir_deriv(A.C.h_her[a][c], A.dirs[d]);
    const int dc = conj_dir(d, A.n);
    for (int mu = 0; mu < A.n; ++mu) {
        r -= A.gam[d][a][mu] * A.her[mu][c];
        r -= std::conj(A.gam[dc][c][mu]) * A.her[a][mu];
    }
    return r;
}

cplx nab_sym(const Assembly& A, int d, int a, int c) {
    cplx r = dir_deriv(A.C.h_sym[a][c], A.dirs[d]);
    for (int mu = 0; mu < A.n; ++mu) {
        r -= A.gam[d][a][mu] * A.sym[mu][c];
        r -= A.gam[d][c][mu] * A.sym[a][mu];
    }
    return r;
}

cplx nab_ht(const Assembly& A, int d, int a) {
    cplx r = dir_deriv(A.C.h_h0[a], A.dirs[d]);
    for (int mu = 0; mu < A.n; ++mu) r -= A.gam[d][a][mu] * A.h0[mu];
    return r;
}

cplx nab_tt(const Assembly& A, int d) { return dir_deriv(A.C.h_00, A.dirs[d]); }

CovariantGradient grads_from(const Assembly& A) {
    const int n = A.n;
    CovariantGradient G;
    auto cube = [n] {
        return std::vector<std::vector<std::vector<cplx>>>(
            n, std::vector<std::vector<cplx>>(n, std::vector<cplx>(n)));
    };
    auto mat = [n] { return std::vector<std::vector<cplx>>(n, std::vector<cplx>(n)); };
    G.hol_her = cube();
    G.antihol_her = cube();
    G.hol_sym = cube();
    G.antihol_sym = cube();
    G.t_her = mat();
    G.t_sym = mat();
    G.hol_ht = mat();
    G.antihol_ht = mat();
    G.t_ht.resize(n);
    G.hol_tt.resize(n);
    for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a) {
            for (int c = 0; c < n; ++c) {
                G.hol_her[b][a][c] = nab_her(A, b, a, c);
                G.antihol_her[b][a][c] = nab_her(A, n + b, a, c);
                G.hol_sym[b][a][c] = nab_sym(A, b, a, c);
                G.antihol_sym[b][a][c] = nab_sym(A, n + b, a, c);
            }
            G.hol_ht[b][a] = nab_ht(A, b, a);
            G.antihol_ht[b][a] = nab_ht(A, n + b, a);
        }
    for (int a = 0; a < n; ++a) {
        for (int c = 0; c < n; ++c) {
            G.t_her[a][c] = nab_her(A, 2 * n, a, c);
            G.t_sym[a][c] = nab_sym(A, 2 * n, a, c);
        }
        G.t_ht[a] = nab_ht(A, 2 * n, a);
        G.hol_tt[a] = nab_tt(A, a);
    }
    G.t_tt = nab_tt(A, 2 * n);
    return G;
}

// flat derivative of a dual field along a plain direction, componentwise
AmbVec<cplx> flat_deriv(const AmbVec<Dual>& field, const AmbVec<cplx>& dir) {
    const int m = static_cast<int>(field.hol.size());
    AmbVec<cplx> r;
    r.hol.resize(m);
    r.anti.resize(m);
    for (int k = 0; k < m; ++k) {
        r.hol[k] = dir_deriv(field.hol[k], dir);
        r.anti[k] = dir_deriv(field.anti[k], dir);
    }
    return r;
}

double max_comp(const AmbVec<cplx>& v) {
    double r = 0.0;
    for (const cplx& c : v.hol) r = std::max(r, std::abs(c));
    for (const cplx& c : v.anti) r = std::max(r, std::abs(c));
    return r;
}

AmbVec<cplx> lin_comb(const AmbVec<cplx>& a, cplx ca, const AmbVec<cplx>& b, cplx cb) {
    const int m = static_cast<int>(a.hol.size());
    AmbVec<cplx> r;
    r.hol.resize(m);
    r.anti.resize(m);
    for (int k = 0; k < m; ++k) {
        r.hol[k] = ca * a.hol[k] + cb * b.hol[k];
        r.anti[k] = ca * a.anti[k] + cb * b.anti[k];
    }
    return r;
}

AmbVec<Dual> dual_comb(const AmbVec<Dual>& a, cplx ca, const AmbVec<Dual>& b, cplx cb) {
    const int m = static_cast<int>(a.hol.size());
    AmbVec<Dual> r;
    r.hol.reserve(m);
    r.anti.reserve(m);
    for (int k = 0; k < m; ++k) r.hol.push_back(ca * a.hol[k] + cb * b.hol[k]);
    for (int k = 0; k < m; ++k) r.anti.push_back(ca * a.anti[k] + cb * b.anti[k]);
    return r;
}

// expansion of a tangent vector in the frame: v = chol.Z + canti.conj(Z) + c0.T
struct FrameCoeffs {
    std::vector<cplx> chol, canti;
    cplx c0;
};

FrameCoeffs frame_coeffs(const Assembly& A, const AmbVec<cplx>& v) {
    const int n = A.n;
    FrameCoeffs fc;
    fc.chol.assign(n, 0.0);
    fc.canti.assign(n, 0.0);
    AmbVec<cplx> vbar = conj_vec(v);
    for (int b = 0; b < n; ++b)
        for (int mu = 0; mu < n; ++mu) {
            fc.chol[b] += A.ginvv[b][mu] * pair_vec(v, A.Zbp[mu]);
            fc.canti[b] += std::conj(A.ginvv[b][mu] * pair_vec(vbar, A.Zbp[mu]));
        }
    fc.c0 = pair_vec(v, A.Tp);
    return fc;
}

} // namespace

ConnectionCoeffs christoffel(const SurfaceDef& s, const SurfacePoint& p) {
    JetF j = s.jets->eval(p.z, 2);
    PlainJetSource src(j);
    FrameChart chart = FrameChart::make(s.n, p.pivot);
    GeoCore<cplx> core = build_core(src, chart, 3);

    ConnectionCoeffs cc;
    cc.base = build_frame(s, p);
    cc.gamma_hol = core.gamma;
    const int n = s.n;
    cc.gamma_antihol.assign(2 * n + 1, std::vector<std::vector<cplx>>(
                                           n, std::vector<cplx>(n)));
    for (int d = 0; d <= 2 * n; ++d)
        for (int a = 0; a < n; ++a)
            for (int c = 0; c < n; ++c)
                cc.gamma_antihol[d][a][c] =
                    std::conj(core.gamma[conj_dir(d, n)][a][c]);
    return cc;
}

CovariantGradient covariant_gradient(const SurfaceDef& s, const SurfacePoint& p) {
    Assembly A = make_assembly(s, p);
    return grads_from(A);
}

std::vector<std::pair<std::string, double>> CodazziReport::entries() const {
    return {{"codazzi_mixed", codazzi_mixed},
            {"codazzi_her_t", codazzi_her_t},
            {"codazzi_sym_t", codazzi_sym_t},
            {"codazzi_t_t", codazzi_t_t},
            {"codazzi_her_skew", codazzi_her_skew},
            {"codazzi_sym_skew", codazzi_sym_skew},
            {"gauss", gauss},
            {"normal_t_bracket", normal_t_bracket},
            {"normal_h_t", normal_h_t},
            {"bracket_levi", bracket_levi},
            {"metric_compat", metric_compat},
            {"torsion_hol", torsion_hol},
            {"torsion_mixed", torsion_mixed},
            {"parallel_bundle", parallel_bundle},
            {"bracket_gen", bracket_gen},
            {"real_projection", real_projection}};
}

double CodazziReport::max_residual() const {
    double r = 0.0;
    for (const auto& [name, v] : entries()) r = std::max(r, v);
    return r;
}

CodazziReport codazzi_residuals(const SurfaceDef& s, const SurfacePoint& p) {
    Assembly A = make_assembly(s, p);
    CovariantGradient G = grads_from(A);
    const int n = A.n;
    const cplx I(0.0, 1.0);
    CodazziReport R;

    for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a)
            for (int c = 0; c < n; ++c) {
                cplx rhs = I * A.sym[a][b] * std::conj(A.h0[c]) -
                           I * A.her[a][c] * A.h0[b] -
                           2.0 * I * A.her[b][c] * A.h0[a];
                R.codazzi_mixed =
                    std::max(R.codazzi_mixed,
                             std::abs(G.hol_her[b][a][c] -
                                      G.antihol_sym[c][a][b] - rhs));
            }

    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            cplx rhs = I * A.her[a][b] * A.h00;
            for (int l = 0; l < n; ++l)
                for (int mu = 0; mu < n; ++mu) {
                    rhs += I * A.ginvv[l][mu] * A.sym[a][l] *
                           std::conj(A.sym[mu][b]);
                    rhs -= I * A.ginvv[mu][l] * A.her[a][l] * A.her[mu][b];
                }
            R.codazzi_her_t = std::max(
                R.codazzi_her_t,
                std::abs(G.antihol_ht[b][a] - G.t_her[a][b] - rhs));
        }

    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            cplx rhs = I * A.sym[a][b] * A.h00 - 2.0 * I * A.h0[a] * A.h0[b];
            for (int l = 0; l < n; ++l)
                for (int mu = 0; mu < n; ++mu) {
                    rhs += I * A.ginvv[mu][l] * A.her[b][l] * A.sym[a][mu];
                    rhs -= I * A.ginvv[l][mu] * A.sym[b][l] * A.her[a][mu];
                }
            R.codazzi_sym_t =
                std::max(R.codazzi_sym_t,
                         std::abs(G.hol_ht[b][a] - G.t_sym[a][b] - rhs));
        }

    for (int a = 0; a < n; ++a) {
        cplx rhs = -I * A.h0[a] * A.h00;
        for (int l = 0; l < n; ++l)
            for (int mu = 0; mu < n; ++mu) {
                rhs += 2.0 * I * A.ginvv[l][mu] * A.her[a][mu] * A.h0[l];
                rhs -= 2.0 * I * A.ginvv[mu][l] * A.sym[a][mu] *
                       std::conj(A.h0[l]);
                rhs -= I * A.ginvv[l][mu] * A.sym[a][l] * std::conj(A.h0[mu]);
                rhs += I * A.ginvv[mu][l] * A.her[a][l] * A.h0[mu];
            }
        R.codazzi_t_t = std::max(
            R.codazzi_t_t, std::abs(G.hol_tt[a] - G.t_ht[a] - rhs));
    }

    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
                cplx rhs2 = I * A.her[b][c] * A.h0[a] - I * A.her[a][c] * A.h0[b];
                R.codazzi_her_skew =
                    std::max(R.codazzi_her_skew,
                             std::abs(G.hol_her[a][b][c] -
                                      G.hol_her[b][a][c] - rhs2));
                cplx rhs3 = I * A.sym[b][a] * A.h0[c] - I * A.sym[b][c] * A.h0[a];
                R.codazzi_sym_skew =
                    std::max(R.codazzi_sym_skew,
                             std::abs(G.hol_sym[a][b][c] -
                                      G.hol_sym[c][b][a] - rhs3));
            }

    // curvature identity: R(Z, conj(W)) acting on the frame against the
    // quadratic expression in h
    for (int z = 0; z < n; ++z)
        for (int w = 0; w < n; ++w) {
            AmbVec<cplx> br = bracket(A.C.Z[z], A.C.Zbar[w]);
            FrameCoeffs fc = frame_coeffs(A, br);
            for (int u = 0; u < n; ++u) {
                std::vector<cplx> Rcoef(n);
                for (int c = 0; c < n; ++c) {
                    cplx r = dir_deriv(A.C.gamma[n + w][u][c], A.dirs[z]) -
                             dir_deriv(A.C.gamma[z][u][c], A.dirs[n + w]);
                    for (int mu = 0; mu < n; ++mu)
                        r += A.gam[n + w][u][mu] * A.gam[z][mu][c] -
                             A.gam[z][u][mu] * A.gam[n + w][mu][c];
                    for (int b = 0; b < n; ++b)
                        r -= fc.chol[b] * A.gam[b][u][c] +
                             fc.canti[b] * A.gam[n + b][u][c];
                    r -= fc.c0 * A.gam[2 * n][u][c];
                    Rcoef[c] = r;
                }
                for (int f = 0; f < n; ++f) {
                    cplx lhs = 0.0;
                    for (int c = 0; c < n; ++c) lhs += Rcoef[c] * A.gv[c][f];
                    cplx rhs = 2.0 * (A.her[u][w] * A.her[z][f] -
                                      A.sym[u][z] * std::conj(A.sym[f][w]));
                    R.gauss = std::max(R.gauss, std::abs(lhs - rhs));
                }
            }
        }

    // normal drift identities
    for (int a = 0; a < n; ++a) {
        cplx lhs = pair_vec(flat_deriv(A.C.N, A.dirs[a]), A.Nbp);
        cplx rhs = pair_vec(bracket(A.C.T, A.C.Z[a]), A.Tp);
        R.normal_t_bracket = std::max(R.normal_t_bracket, std::abs(lhs - rhs));
    }
    for (int d = 0; d <= 2 * n; ++d) {
        cplx lhs = pair_vec(flat_deriv(A.C.N, A.dirs[d]), A.Nbp);
        cplx hTV = d < n ? A.h0[d] : (d < 2 * n ? std::conj(A.h0[d - n]) : A.h00);
        R.normal_h_t = std::max(R.normal_h_t, std::abs(lhs - I * hTV));
    }
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            cplx lhs = pair_vec(bracket(A.C.Z[a], A.C.Zbar[b]), A.Tp);
            R.bracket_levi =
                std::max(R.bracket_levi, std::abs(lhs + 2.0 * I * A.her[a][b]));
        }

    // metric compatibility over frame fields and the characteristic field
    for (int v1 = 0; v1 <= n; ++v1)
        for (int v2 = 0; v2 <= n; ++v2) {
            const AmbVec<Dual>& V1 = v1 < n ? A.C.Z[v1] : A.C.T;
            const AmbVec<Dual>& V2 = v2 < n ? A.C.Z[v2] : A.C.T;
            const AmbVec<cplx>& V1p = v1 < n ? A.Zp[v1] : A.Tp;
            const AmbVec<cplx>& V2p = v2 < n ? A.Zp[v2] : A.Tp;
            AmbVec<cplx> V2bp = conj_vec(V2p);
            Dual phi = pair_vec(V1, conj_vec(V2));
            for (int d = 0; d <= 2 * n; ++d) {
                cplx lhs = dir_deriv(phi, A.dirs[d]);
                cplx rhs = 0.0;
                if (v1 < n)
                    for (int c = 0; c < n; ++c)
                        rhs += A.gam[d][v1][c] * pair_vec(A.Zp[c], V2bp);
                if (v2 < n) {
                    const int dc = conj_dir(d, n);
                    for (int c = 0; c < n; ++c)
                        rhs += std::conj(A.gam[dc][v2][c]) *
                               pair_vec(V1p, A.Zbp[c]);
                }
                R.metric_compat = std::max(R.metric_compat, std::abs(lhs - rhs));
            }
        }

    // torsion on two frame fields: the full ambient residual, not only its
    // tangent-holomorphic projection
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            AmbVec<cplx> w = make_vec(A.m, cplx(0.0));
            for (int c = 0; c < n; ++c)
                w = lin_comb(w, 1.0, A.Zp[c], A.gam[a][b][c] - A.gam[b][a][c]);
            AmbVec<cplx> br = bracket(A.C.Z[a], A.C.Z[b]);
            R.torsion_hol =
                std::max(R.torsion_hol, max_comp(lin_comb(w, 1.0, br, -1.0)));
        }
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            AmbVec<cplx> w = make_vec(A.m, cplx(0.0));
            for (int c = 0; c < n; ++c) {
                w = lin_comb(w, 1.0, A.Zbp[c], std::conj(A.gam[n + a][b][c]));
                w = lin_comb(w, 1.0, A.Zp[c], -A.gam[n + b][a][c]);
            }
            w = lin_comb(w, 1.0, bracket(A.C.Z[a], A.C.Zbar[b]), -1.0);
            w = lin_comb(w, 1.0, A.Tp, -2.0 * I * A.her[a][b]);
            R.torsion_mixed = std::max(R.torsion_mixed, max_comp(w));
        }

    // frame-field derivatives stay in the tangent-holomorphic bundle and are
    // reproduced by the coefficients
    for (int d = 0; d <= 2 * n; ++d)
        for (int a = 0; a < n; ++a) {
            AmbVec<cplx> D = flat_deriv(A.C.Z[a], A.dirs[d]);
            AmbVec<cplx> proj = lin_comb(D, 1.0, A.Np, -pair_vec(D, A.Nbp));
            double res = std::max(std::abs(pair_vec(proj, A.Nbp)),
                                  std::abs(pair_vec(proj, A.Tp)));
            AmbVec<cplx> w = proj;
            for (int c = 0; c < n; ++c)
                w = lin_comb(w, 1.0, A.Zp[c], -A.gam[d][a][c]);
            R.parallel_bundle =
                std::max({R.parallel_bundle, res, max_comp(w)});
        }

    // vertical bracket sum for an orthonormalized frame
    {
        Eigen::MatrixXcd Gm(n, n);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) Gm(a, b) = A.gv[a][b];
        Eigen::LLT<Eigen::MatrixXcd> llt(Gm);
        if (llt.info() != Eigen::Success)
            throw Error("metric not positive definite at the point");
        Eigen::MatrixXcd Cm = llt.matrixL()
                                  .toDenseMatrix()
                                  .triangularView<Eigen::Lower>()
                                  .solve(Eigen::MatrixXcd::Identity(n, n));
        std::vector<std::vector<cplx>> B(n, std::vector<cplx>(n));
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                B[a][b] = pair_vec(bracket(A.C.Z[a], A.C.Zbar[b]), A.Tp);
        cplx sum = 0.0;
        for (int al = 0; al < n; ++al)
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    sum += Cm(al, a) * std::conj(Cm(al, b)) * B[a][b];
        R.bracket_gen = std::abs(sum + 2.0 * I * double(n) * A.H);
    }

    // projection formula for the connection on real fields
    {
        std::vector<std::vector<cplx>> vcoefs; // direction coefficients
        for (int b = 0; b < n; ++b) {
            std::vector<cplx> x(2 * n + 1, 0.0), y(2 * n + 1, 0.0);
            x[b] = 1.0;
            x[n + b] = 1.0;
            y[b] = I;
            y[n + b] = -I;
            vcoefs.push_back(x);
            vcoefs.push_back(y);
        }
        std::vector<cplx> t(2 * n + 1, 0.0);
        t[2 * n] = 1.0;
        vcoefs.push_back(t);

        for (int a = 0; a < n; ++a)
            for (int sgn = 0; sgn < 2; ++sgn) {
                cplx ca = sgn ? I : cplx(1.0);
                cplx cb = sgn ? -I : cplx(1.0);
                AmbVec<Dual> Y = dual_comb(A.C.Z[a], ca, A.C.Zbar[a], cb);
                for (const auto& vc : vcoefs) {
                    AmbVec<cplx> Vp = make_vec(A.m, cplx(0.0));
                    for (int d = 0; d <= 2 * n; ++d)
                        if (vc[d] != cplx(0.0))
                            Vp = lin_comb(Vp, 1.0, A.dirs[d], vc[d]);
                    // left side from the coefficients
                    AmbVec<cplx> lhs = make_vec(A.m, cplx(0.0));
                    for (int d = 0; d <= 2 * n; ++d) {
                        if (vc[d] == cplx(0.0)) continue;
                        const int dc = conj_dir(d, n);
                        for (int c = 0; c < n; ++c) {
                            lhs = lin_comb(lhs, 1.0, A.Zp[c],
                                           vc[d] * ca * A.gam[d][a][c]);
                            lhs = lin_comb(
                                lhs, 1.0, A.Zbp[c],
                                vc[d] * cb * std::conj(A.gam[dc][a][c]));
                        }
                    }
                    // right side from the flat derivative projection
                    AmbVec<cplx> D = flat_deriv(Y, Vp);
                    AmbVec<cplx> rhs = lin_comb(D, 1.0, A.nup, -pair_vec(D, A.nup));
                    rhs = lin_comb(rhs, 1.0, A.Tp, -pair_vec(D, A.Tp));
                    R.real_projection = std::max(
                        R.real_projection, max_comp(lin_comb(lhs, 1.0, rhs, -1.0)));
                }
            }
    }

    return R;
}

double connection_metric_residual(const SurfaceDef& s, const SurfacePoint& p) {
    return codazzi_residuals(s, p).metric_compat;
}

TorsionResiduals torsion_residuals(const SurfaceDef& s, const SurfacePoint& p) {
    CodazziReport r = codazzi_residuals(s, p);
    return {r.torsion_hol, r.torsion_mixed};
}

} // namespace levi

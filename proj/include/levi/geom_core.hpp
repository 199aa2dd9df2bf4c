#pragma once

// Internal geometry kernel. Every field attached to the surface (unit normal,
// holomorphic frame, metric, second fundamental form, connection
// coefficients) is assembled here from jet entries of F, templated on the
// scalar so the same formulas run once with plain complex numbers (values at
// a point) and once with Dual scalars (values plus exact ambient gradients,
// which is what covariant derivatives and curvature need).

#include <vector>

#include "levi/dual.hpp"
#include "levi/jet.hpp"

namespace levi {

// Chart data fixed per point: pivot coordinate and the permutation putting
// it last. amb[alpha] is the ambient index of frame slot alpha.
struct FrameChart {
    int n = 0;
    int m = 0; // n + 1
    int pivot = 0;
    std::vector<int> amb;

    static FrameChart make(int n, int pivot) {
        FrameChart c;
        c.n = n;
        c.m = n + 1;
        c.pivot = pivot;
        for (int h = 0; h < c.m; ++h)
            if (h != pivot) c.amb.push_back(h);
        c.amb.push_back(pivot); // frame slots use amb[0..n-1]; pivot kept last
        return c;
    }
};

// Ambient vector in the basis {d/dz_h, d/dconj(z_h)}.
template <class S>
struct AmbVec {
    std::vector<S> hol, anti;
};

struct PlainJetSource {
    using value_type = cplx;
    const JetF* j;

    explicit PlainJetSource(const JetF& jf) : j(&jf) {}

    cplx zero() const { return cplx(0.0, 0.0); }
    cplx d1(int h) const { return j->d({h}, {}); }
    cplx d1b(int h) const { return j->d({}, {h}); }
    cplx d2(int h, int k) const { return j->d({h, k}, {}); }
    cplx d11(int h, int k) const { return j->d({h}, {k}); } // d/dz_h d/dconj(z_k)
    cplx d2b(int h, int k) const { return j->d({}, {h, k}); }
};

// Jet entries as Duals: the gradient slots are the next-order jet entries,
// so the jet must hold one order more than the quantities being formed.
struct DualJetSource {
    using value_type = Dual;
    const JetF* j;
    int m;

    explicit DualJetSource(const JetF& jf)
        : j(&jf), m(static_cast<int>(jf.z.size())) {}

    Dual zero() const { return Dual(m); }

    Dual lift(std::vector<int> a, std::vector<int> b) const {
        JetKey key{std::move(a), std::move(b)};
        std::sort(key.a.begin(), key.a.end());
        std::sort(key.b.begin(), key.b.end());
        Dual r(m, j->d(key));
        for (int k = 0; k < m; ++k) {
            JetKey ka = key;
            ka.a.insert(std::lower_bound(ka.a.begin(), ka.a.end(), k), k);
            r.dz[k] = j->d(ka);
            JetKey kb = key;
            kb.b.insert(std::lower_bound(kb.b.begin(), kb.b.end(), k), k);
            r.db[k] = j->d(kb);
        }
        return r;
    }

    Dual d1(int h) const { return lift({h}, {}); }
    Dual d1b(int h) const { return lift({}, {h}); }
    Dual d2(int h, int k) const { return lift({h, k}, {}); }
    Dual d11(int h, int k) const { return lift({h}, {k}); }
    Dual d2b(int h, int k) const { return lift({}, {h, k}); }
};

template <class S>
struct GeoCore {
    FrameChart chart;
    S s;  // |dF|
    S s2; // |dF|^2
    AmbVec<S> nu, N, T;
    std::vector<AmbVec<S>> Z, Zbar;
    std::vector<std::vector<S>> g, ginv;

    // level >= 2
    std::vector<std::vector<S>> h_her, h_sym;
    std::vector<S> h_h0;
    S h_00;
    S H_trace, H_closed;

    // level >= 3: gamma[A][alpha][gamma], direction A: 0..n-1 frame fields,
    // n..2n-1 their conjugates, 2n the characteristic field T.
    std::vector<std::vector<std::vector<S>>> gamma;
};

template <class S>
AmbVec<S> make_vec(int m, const S& z) {
    AmbVec<S> v;
    v.hol.assign(m, z);
    v.anti.assign(m, z);
    return v;
}

template <class S>
AmbVec<S> conj_vec(const AmbVec<S>& v) {
    using std::conj;
    AmbVec<S> r;
    const int m = static_cast<int>(v.hol.size());
    r.hol.reserve(m);
    r.anti.reserve(m);
    for (int k = 0; k < m; ++k) r.hol.push_back(conj(v.anti[k]));
    for (int k = 0; k < m; ++k) r.anti.push_back(conj(v.hol[k]));
    return r;
}

// flat hermitian product extended complex-bilinearly:
// <dz_h, dconj(z_k)> = delta/2, holomorphic and antiholomorphic pair to zero
template <class S>
S pair_vec(const AmbVec<S>& v, const AmbVec<S>& w) {
    const int m = static_cast<int>(v.hol.size());
    S acc = v.hol[0] * w.anti[0] + v.anti[0] * w.hol[0];
    for (int k = 1; k < m; ++k)
        acc = acc + v.hol[k] * w.anti[k] + v.anti[k] * w.hol[k];
    return 0.5 * acc;
}

// derivative of F_mm / F_conj(mm) along ambient vector V
template <class Src, class S>
S dF_hol(const Src& F, const AmbVec<S>& V, int mm) {
    const int m = static_cast<int>(V.hol.size());
    S acc = V.hol[0] * F.d2(mm, 0) + V.anti[0] * F.d11(mm, 0);
    for (int k = 1; k < m; ++k)
        acc = acc + V.hol[k] * F.d2(mm, k) + V.anti[k] * F.d11(mm, k);
    return acc;
}

template <class Src, class S>
S dF_anti(const Src& F, const AmbVec<S>& V, int mm) {
    const int m = static_cast<int>(V.hol.size());
    S acc = V.hol[0] * F.d11(0, mm) + V.anti[0] * F.d2b(mm, 0);
    for (int k = 1; k < m; ++k)
        acc = acc + V.hol[k] * F.d11(k, mm) + V.anti[k] * F.d2b(mm, k);
    return acc;
}

// flat derivative of the unit normal field along V (the shape operator when
// V is tangent)
template <class Src, class S>
AmbVec<S> amb_dnu(const Src& F, const GeoCore<S>& C, const AmbVec<S>& V) {
    const int m = C.chart.m;
    S Vs2 = dF_hol(F, V, 0) * F.d1b(0) + F.d1(0) * dF_anti(F, V, 0);
    for (int mm = 1; mm < m; ++mm)
        Vs2 = Vs2 + dF_hol(F, V, mm) * F.d1b(mm) + F.d1(mm) * dF_anti(F, V, mm);
    S Vs_over_s = Vs2 / (2.0 * C.s2);
    AmbVec<S> r = make_vec(m, F.zero());
    for (int h = 0; h < m; ++h) {
        r.hol[h] = dF_anti(F, V, h) / C.s - C.nu.hol[h] * Vs_over_s;
        r.anti[h] = dF_hol(F, V, h) / C.s - C.nu.anti[h] * Vs_over_s;
    }
    return r;
}

template <class Src, class S>
S second_form_pair(const Src& F, const GeoCore<S>& C, const AmbVec<S>& U,
                   const AmbVec<S>& V) {
    return pair_vec(U, amb_dnu(F, C, V));
}

// level: 1 frame + metric, 2 adds the second fundamental form and Levi
// curvature, 3 adds connection coefficients
template <class Src>
GeoCore<typename Src::value_type> build_core(const Src& F, const FrameChart& chart,
                                             int level) {
    using S = typename Src::value_type;
    using std::conj;
    using std::sqrt;

    const int n = chart.n;
    const int m = chart.m;
    const int p = chart.pivot;

    GeoCore<S> C;
    C.chart = chart;

    C.s2 = F.d1(0) * F.d1b(0);
    for (int h = 1; h < m; ++h) C.s2 = C.s2 + F.d1(h) * F.d1b(h);
    C.s = sqrt(C.s2);

    C.nu = make_vec(m, F.zero());
    C.N = make_vec(m, F.zero());
    C.T = make_vec(m, F.zero());
    const cplx iu(0.0, 1.0);
    const double rt2 = std::sqrt(2.0);
    for (int h = 0; h < m; ++h) {
        C.nu.hol[h] = F.d1b(h) / C.s;
        C.nu.anti[h] = F.d1(h) / C.s;
        C.N.hol[h] = rt2 * C.nu.hol[h];
        C.T.hol[h] = iu * C.nu.hol[h];
        C.T.anti[h] = (-iu) * C.nu.anti[h];
    }

    C.Z.resize(n);
    C.Zbar.resize(n);
    for (int a = 0; a < n; ++a) {
        C.Z[a] = make_vec(m, F.zero());
        C.Z[a].hol[chart.amb[a]] = C.Z[a].hol[chart.amb[a]] + 1.0;
        C.Z[a].hol[p] = -(F.d1(chart.amb[a]) / F.d1(p));
        C.Zbar[a] = conj_vec(C.Z[a]);
    }

    S pivot_sq = F.d1(p) * F.d1b(p);
    C.g.assign(n, std::vector<S>(n, F.zero()));
    C.ginv.assign(n, std::vector<S>(n, F.zero()));
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            S cross = F.d1(chart.amb[a]) * F.d1b(chart.amb[b]) / pivot_sq;
            C.g[a][b] = 0.5 * (cross + (a == b ? 1.0 : 0.0));
            S cross2 = F.d1(chart.amb[b]) * F.d1b(chart.amb[a]) / C.s2;
            C.ginv[a][b] = 2.0 * ((a == b ? 1.0 : 0.0) - cross2);
        }
    }

    if (level < 2) return C;

    // columns of the second fundamental form against the frame directions
    std::vector<AmbVec<S>> dnu_Z(n), dnu_Zb(n);
    for (int b = 0; b < n; ++b) {
        dnu_Z[b] = amb_dnu(F, C, C.Z[b]);
        dnu_Zb[b] = amb_dnu(F, C, C.Zbar[b]);
    }
    AmbVec<S> dnu_T = amb_dnu(F, C, C.T);

    C.h_her.assign(n, std::vector<S>(n, F.zero()));
    C.h_sym.assign(n, std::vector<S>(n, F.zero()));
    C.h_h0.assign(n, F.zero());
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            C.h_her[a][b] = pair_vec(C.Z[a], dnu_Zb[b]);
            C.h_sym[a][b] = pair_vec(C.Z[a], dnu_Z[b]);
        }
        C.h_h0[a] = pair_vec(C.Z[a], dnu_T);
    }
    C.h_00 = pair_vec(C.T, dnu_T);

    S tr = C.ginv[0][0] * C.h_her[0][0];
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (a || b) tr = tr + C.ginv[a][b] * C.h_her[a][b];
    C.H_trace = tr / double(n);

    S lap = F.d11(0, 0);
    for (int h = 1; h < m; ++h) lap = lap + F.d11(h, h);
    S contracted = F.d1(0) * F.d1b(0) * F.d11(0, 0);
    for (int h = 0; h < m; ++h)
        for (int k = 0; k < m; ++k)
            if (h || k) contracted = contracted + F.d1(k) * F.d1b(h) * F.d11(h, k);
    C.H_closed = (lap - contracted / C.s2) / (double(n) * C.s);

    if (level < 3) return C;

    // connection coefficients: project the flat derivative of each frame
    // field back onto the holomorphic tangent bundle
    const int ndir = 2 * n + 1;
    C.gamma.assign(ndir, std::vector<std::vector<S>>(n, std::vector<S>(n, F.zero())));
    for (int A = 0; A < ndir; ++A) {
        const AmbVec<S>& dir = A < n ? C.Z[A] : (A < 2 * n ? C.Zbar[A - n] : C.T);
        for (int a = 0; a < n; ++a) {
            // flat derivative of Z_a along dir: only the pivot slot varies
            S dq = -(dF_hol(F, dir, chart.amb[a]) * F.d1(p) -
                     F.d1(chart.amb[a]) * dF_hol(F, dir, p)) /
                   (F.d1(p) * F.d1(p));
            AmbVec<S> DAZ = make_vec(m, F.zero());
            DAZ.hol[p] = dq;
            std::vector<S> proj;
            proj.reserve(n);
            for (int mu = 0; mu < n; ++mu) proj.push_back(pair_vec(DAZ, C.Zbar[mu]));
            for (int c = 0; c < n; ++c) {
                S acc = C.ginv[c][0] * proj[0];
                for (int mu = 1; mu < n; ++mu) acc = acc + C.ginv[c][mu] * proj[mu];
                C.gamma[A][a][c] = acc;
            }
        }
    }

    return C;
}

// directional derivative of a Dual field along a plain ambient vector
inline cplx dir_deriv(const Dual& f, const AmbVec<cplx>& A) {
    cplx acc = 0.0;
    for (int k = 0; k < f.size(); ++k)
        acc += A.hol[k] * f.dz[k] + A.anti[k] * f.db[k];
    return acc;
}

inline AmbVec<cplx> value_vec(const AmbVec<Dual>& v) {
    AmbVec<cplx> r;
    r.hol.reserve(v.hol.size());
    r.anti.reserve(v.anti.size());
    for (const Dual& d : v.hol) r.hol.push_back(d.v);
    for (const Dual& d : v.anti) r.anti.push_back(d.v);
    return r;
}

// Lie bracket of two ambient vector fields, evaluated from their Dual
// component fields.
inline AmbVec<cplx> bracket(const AmbVec<Dual>& A, const AmbVec<Dual>& B) {
    AmbVec<cplx> a = value_vec(A), b = value_vec(B);
    const int m = static_cast<int>(a.hol.size());
    AmbVec<cplx> r;
    r.hol.resize(m);
    r.anti.resize(m);
    for (int k = 0; k < m; ++k) {
        r.hol[k] = dir_deriv(B.hol[k], a) - dir_deriv(A.hol[k], b);
        r.anti[k] = dir_deriv(B.anti[k], a) - dir_deriv(A.anti[k], b);
    }
    return r;
}

} // namespace levi

#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "levi/errors.hpp"

namespace levi {

using cplx = std::complex<double>;

// Scalar carrying its exact ambient Wirtinger gradient: value plus d/dz_k and
// d/dconj(z_k) for every coordinate. Seeded from jet entries (whose gradients
// are the next-order entries), arithmetic propagates the chain rule exactly,
// so no truncation error enters directional derivatives of derived fields.
struct Dual {
    cplx v{};
    std::vector<cplx> dz;  // d/dz_k
    std::vector<cplx> db;  // d/dconj(z_k)

    Dual() = default;
    explicit Dual(int m) : dz(m), db(m) {}
    Dual(int m, cplx value) : v(value), dz(m), db(m) {}

    int size() const { return static_cast<int>(dz.size()); }
};

inline Dual operator+(const Dual& a, const Dual& b) {
    Dual r(a.size(), a.v + b.v);
    for (int k = 0; k < a.size(); ++k) {
        r.dz[k] = a.dz[k] + b.dz[k];
        r.db[k] = a.db[k] + b.db[k];
    }
    return r;
}

inline Dual operator-(const Dual& a, const Dual& b) {
    Dual r(a.size(), a.v - b.v);
    for (int k = 0; k < a.size(); ++k) {
        r.dz[k] = a.dz[k] - b.dz[k];
        r.db[k] = a.db[k] - b.db[k];
    }
    return r;
}

inline Dual operator-(const Dual& a) {
    Dual r(a.size(), -a.v);
    for (int k = 0; k < a.size(); ++k) {
        r.dz[k] = -a.dz[k];
        r.db[k] = -a.db[k];
    }
    return r;
}

inline Dual operator*(const Dual& a, const Dual& b) {
    Dual r(a.size(), a.v * b.v);
    for (int k = 0; k < a.size(); ++k) {
        r.dz[k] = a.dz[k] * b.v + a.v * b.dz[k];
        r.db[k] = a.db[k] * b.v + a.v * b.db[k];
    }
    return r;
}

inline Dual operator/(const Dual& a, const Dual& b) {
    cplx inv = 1.0 / b.v;
    Dual r(a.size(), a.v * inv);
    cplx inv2 = inv * inv;
    for (int k = 0; k < a.size(); ++k) {
        r.dz[k] = (a.dz[k] * b.v - a.v * b.dz[k]) * inv2;
        r.db[k] = (a.db[k] * b.v - a.v * b.db[k]) * inv2;
    }
    return r;
}

// scalar (constant) mixes; constants have zero gradient
inline Dual operator*(const Dual& a, cplx c) {
    Dual r(a.size(), a.v * c);
    for (int k = 0; k < a.size(); ++k) {
        r.dz[k] = a.dz[k] * c;
        r.db[k] = a.db[k] * c;
    }
    return r;
}
inline Dual operator*(cplx c, const Dual& a) { return a * c; }
inline Dual operator*(const Dual& a, double c) { return a * cplx(c, 0.0); }
inline Dual operator*(double c, const Dual& a) { return a * cplx(c, 0.0); }

inline Dual operator/(const Dual& a, double c) { return a * cplx(1.0 / c, 0.0); }

inline Dual operator+(const Dual& a, cplx c) {
    Dual r = a;
    r.v += c;
    return r;
}
inline Dual operator+(cplx c, const Dual& a) { return a + c; }
inline Dual operator+(const Dual& a, double c) { return a + cplx(c, 0.0); }

inline Dual operator-(const Dual& a, double c) { return a + cplx(-c, 0.0); }
inline Dual operator-(double c, const Dual& a) { return (-a) + cplx(c, 0.0); }

inline Dual operator/(cplx c, const Dual& b) {
    cplx inv = 1.0 / b.v;
    Dual r(b.size(), c * inv);
    cplx f = -c * inv * inv;
    for (int k = 0; k < b.size(); ++k) {
        r.dz[k] = f * b.dz[k];
        r.db[k] = f * b.db[k];
    }
    return r;
}

// d/dz conj(f) = conj(d/dconj(z) f) and vice versa
inline Dual conj(const Dual& a) {
    Dual r(a.size(), std::conj(a.v));
    for (int k = 0; k < a.size(); ++k) {
        r.dz[k] = std::conj(a.db[k]);
        r.db[k] = std::conj(a.dz[k]);
    }
    return r;
}

inline Dual sqrt(const Dual& a) {
    cplx s = std::sqrt(a.v);
    Dual r(a.size(), s);
    cplx f = 0.5 / s;
    for (int k = 0; k < a.size(); ++k) {
        r.dz[k] = f * a.dz[k];
        r.db[k] = f * a.db[k];
    }
    return r;
}

inline cplx value_of(const Dual& a) { return a.v; }
inline cplx value_of(cplx a) { return a; }

} // namespace levi

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <string>

#include "pointform/cylinder.hpp"
#include "pointform/errors.hpp"
#include "pointform/quadrature.hpp"

// Closed-form Lorentz-invariant integrals over the forward mass hyperboloid
// x^2 = tau^2, x^0 > 0, together with the quadrature oracle used to certify
// them.  All integrals reduce to Hankel functions of the invariant square
// s = p.p; the distributional pieces that arise on the null cone or at p = 0
// are NOT evaluated numerically -- they are either rejected (DomainError) or
// carried as a symbolic tag consumed only by algebraic identity checks.

namespace pointform {

enum class Causality { TimelikeForward, TimelikeBackward, Spacelike, Null };

// Four-vector with metric signature (+,-,-,-).
struct FourVector {
    double p0 = 0.0, p1 = 0.0, p2 = 0.0, p3 = 0.0;

    // s = p0^2 - |p_vec|^2, computed one canonical way everywhere.
    double invariant_square() const {
        return p0 * p0 - (p1 * p1 + p2 * p2 + p3 * p3);
    }

    // Euclidean magnitude used only to scale the null classification band.
    double euclidean_square() const {
        return p0 * p0 + p1 * p1 + p2 * p2 + p3 * p3;
    }

    Causality classification() const {
        const double s = invariant_square();
        const double scale = euclidean_square();
        if (std::abs(s) <= 1e-12 * scale || scale == 0.0)
            return Causality::Null;
        if (s > 0.0)
            return p0 > 0.0 ? Causality::TimelikeForward
                            : Causality::TimelikeBackward;
        return Causality::Spacelike;
    }

    FourVector operator+(const FourVector& o) const {
        return {p0 + o.p0, p1 + o.p1, p2 + o.p2, p3 + o.p3};
    }
    FourVector operator-(const FourVector& o) const {
        return {p0 - o.p0, p1 - o.p1, p2 - o.p2, p3 - o.p3};
    }
    FourVector operator*(double c) const {
        return {c * p0, c * p1, c * p2, c * p3};
    }
};

inline double minkowski_dot(const FourVector& a, const FourVector& b) {
    return a.p0 * b.p0 - (a.p1 * b.p1 + a.p2 * b.p2 + a.p3 * b.p3);
}

// Unit timelike velocity: q^0 = sqrt(1 + |q_vec|^2), so q.q = 1 exactly.
struct VelocityVector {
    double q1 = 0.0, q2 = 0.0, q3 = 0.0;

    double q0() const {
        return std::sqrt(1.0 + q1 * q1 + q2 * q2 + q3 * q3);
    }
    FourVector four_vector() const { return {q0(), q1, q2, q3}; }
};

// Scalar coefficient c(s, tau) with  I(p) = c * (nothing)  for the scalar
// integral and  I^mu(p) = vector_I_coefficient(s, tau) * p^mu  for the
// vector one.  Shared by the closed forms below.
//
// Scalar hyperboloid integral
//   I(p) = 2 int d^4x delta(x^2 - tau^2) theta(x^0) e^{-i p.x}
// on its two supported regimes:
//   timelike-forward:  i (2 pi^2 tau / sqrt(s))  H2_1(sqrt(s) tau)
//   spacelike (p!=0):    (2 pi^2 tau / sqrt(-s)) H1_1(i sqrt(-s) tau)
// The null cone and p = 0 are distributional and rejected.
inline cplx pauli_jordan_I(const FourVector& p, double tau) {
    if (!(tau > 0.0)) throw DomainError("pauli_jordan_I: tau must be > 0");
    const Causality c = p.classification();
    const double s = p.invariant_square();
    switch (c) {
        case Causality::TimelikeForward: {
            const double r = std::sqrt(s);
            const auto e = cylinder_eval(CylinderOrder(1), cplx(r * tau, 0.0));
            return cplx(0.0, 2.0 * M_PI * M_PI * tau / r) * e.h2;
        }
        case Causality::Spacelike: {
            const double r = std::sqrt(-s);
            const auto e = cylinder_eval(CylinderOrder(1), cplx(0.0, r * tau));
            return (2.0 * M_PI * M_PI * tau / r) * e.h1;
        }
        case Causality::TimelikeBackward:
            throw DomainError(
                "pauli_jordan_I: timelike-backward p is not integrated over "
                "the forward hyperboloid");
        default:
            throw DomainError(
                "pauli_jordan_I: null or vanishing p is distributional "
                "(delta-singular piece is documented, not evaluated)");
    }
}

// Quadrature oracle for the cosh representation
//   int_{-inf}^{inf} dphi e^{-i z cosh(phi)} = -i pi H2_0(z),  Im z < 0.
// The integrand decays like exp(Im(z) cosh(phi)); the range is truncated
// where the bound drops below 1e-14 of the leading magnitude and the finite
// piece is integrated adaptively.
inline cplx oracle_cosh_integral(cplx z, double tol = 1e-10) {
    if (!(z.imag() < 0.0))
        throw DomainError(
            "oracle_cosh_integral: requires Im z < 0 (absolute convergence)");
    const double b = -z.imag();
    const double cosh_max = (std::log(1e14) + 5.0) / b;
    const double phi_max = std::acosh(std::max(cosh_max, 2.0));
    const auto f = [&](double phi) {
        return std::exp(cplx(0.0, -1.0) * z * std::cosh(phi));
    };
    // even integrand: 2 * [0, phi_max]
    return 2.0 * adaptive_simpson(f, 0.0, phi_max, 0.25 * tol);
}

// Double hyperboloid integral D(m1, m2; tau) reduced to a product of two
// Hankel factors:
//   i (2 pi^4 tau / (m1 m2)) H2_1(m1 tau) Hk_2(m2 tau)
// with k = 2 for sign = +1 and k = 1 for sign = -1.  The "-m1" companion
// variant is exposed via negate_m1, which replaces H2_1(m1 tau) by
// -H1_1(m1 tau).  Complex mass arguments (with Re m > 0) are accepted so the
// factorized quadrature oracle can probe the absolutely convergent regime.
inline cplx integrated_D(cplx m1, cplx m2, int sign, double tau,
                         bool negate_m1 = false) {
    if (!(m1.real() > 0.0) || !(m2.real() > 0.0))
        throw DomainError("integrated_D: masses must have positive real part");
    if (sign != 1 && sign != -1)
        throw DomainError("integrated_D: sign must be +1 or -1");
    if (!(tau > 0.0)) throw DomainError("integrated_D: tau must be > 0");
    const auto e1 = cylinder_eval(CylinderOrder(1), m1 * tau);
    const auto e2 = cylinder_eval(CylinderOrder(2), m2 * tau);
    const cplx first = negate_m1 ? -e1.h1 : e1.h2;
    const cplx second = (sign == 1) ? e2.h2 : e2.h1;
    const double pi4 = M_PI * M_PI * M_PI * M_PI;
    return cplx(0.0, 2.0 * pi4 * tau) / (m1 * m2) * first * second;
}

// Scalar coefficient of the vector integral I^mu(p) = c(s, tau) p^mu:
//   timelike:  (2 pi^2 tau^2 / s) H2_2(sqrt(s) tau)
//   spacelike: (2 pi^2 tau^2 / s) H1_2(i sqrt(-s) tau)
inline cplx vector_I_coefficient(double s, double tau) {
    if (!(tau > 0.0)) throw DomainError("vector_I_coefficient: tau must be > 0");
    if (s == 0.0)
        throw DomainError("vector_I_coefficient: s = 0 (null cone)");
    const double pref = 2.0 * M_PI * M_PI * tau * tau / s;
    if (s > 0.0) {
        const auto e =
            cylinder_eval(CylinderOrder(2), cplx(std::sqrt(s) * tau, 0.0));
        return pref * e.h2;
    }
    const auto e =
        cylinder_eval(CylinderOrder(2), cplx(0.0, std::sqrt(-s) * tau));
    return pref * e.h1;
}

inline std::array<cplx, 4> vector_I(const FourVector& p, double tau) {
    const Causality c = p.classification();
    if (c == Causality::Null)
        throw DomainError("vector_I: null or vanishing p (s = 0)");
    if (c == Causality::TimelikeBackward)
        throw DomainError("vector_I: timelike-backward p unsupported");
    const cplx coeff = vector_I_coefficient(p.invariant_square(), tau);
    return {coeff * p.p0, coeff * p.p1, coeff * p.p2, coeff * p.p3};
}

// Symbolic tag for the distributional supplement of the vector integral in
// the degenerate frame,  P . I(sp) = (2 pi)^3 P^0 delta^3(sp_vec).  It is
// consumed only by algebraic identity checks, never discretized.
struct SymbolicDelta {
    double prefactor;      // multiplies the delta distribution
    const char* support;   // textual description of the delta's support
};

inline SymbolicDelta vector_I_delta_supplement(const FourVector& P) {
    const double two_pi_cubed = 8.0 * M_PI * M_PI * M_PI;
    return {two_pi_cubed * P.p0, "delta^3(sp_vec)"};
}

}  // namespace pointform

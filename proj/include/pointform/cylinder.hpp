#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "pointform/errors.hpp"

// Cylinder functions J_nu, N_nu and the Hankel pair H1_nu = J + iN,
// H2_nu = J - iN for orders nu in {0, 1, 2} at real or complex argument on
// the principal branch |Arg z| <= pi, plus the bilinear combination
//
//   script_h(mu, nu, y, x) = y (H1_mu H2_nu + H2_mu H1_nu)(x)
//                          + x (H1_mu H2_nu - H2_mu H1_nu)(x)
//
// that appears in every self-energy and spectral-density kernel of the model.
//
// Evaluation strategy: ascending power series (with the logarithmic branch
// for N_nu) for |z| <= kSeriesLimit, Hankel asymptotic expansion beyond.
// Only orders 0 and 1 are evaluated directly; order 2 follows from the
// three-term recurrence, which is numerically benign for orders <= 2 in both
// regimes used here.  In the asymptotic regime each Hankel kind is summed
// from its own expansion, so the exponentially subdominant kind keeps full
// relative accuracy off the real axis.  Every path carries a running error
// estimate and evaluation throws AccuracyError when the 1e-10 relative
// target cannot be certified.

namespace pointform {

using cplx = std::complex<double>;

// Order tag: only 0, 1, 2 are constructible.
class CylinderOrder {
public:
    explicit CylinderOrder(int v) : value_(v) {
        if (v < 0 || v > 2)
            throw DomainError("CylinderOrder: order must be 0, 1 or 2, got " +
                              std::to_string(v));
    }
    int value() const { return value_; }

private:
    int value_;
};

// All four kinds at one (order, argument) pair.
struct CylinderEval {
    cplx j;         // Bessel J_nu
    cplx n;         // Neumann N_nu
    cplx h1;        // Hankel H1_nu = J + iN
    cplx h2;        // Hankel H2_nu = J - iN
    cplx argument;
    int order;
};

namespace detail {

// Series/asymptotic switchover |z|.  The optimally truncated asymptotic
// tail is ~e^{-2|z|} (3e-11 at |z| = 12), while the ascending series loses
// ~eps * I_0(|z|) to cancellation, which crosses 1e-10 of the subdominant
// Hankel kind near |z| ~ 13; 12 keeps both paths inside the certified 1e-10.
constexpr double kSeriesLimit = 12.0;
constexpr double kRelTarget = 1e-10;      // certified relative accuracy
constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
constexpr double kEps = 2.2e-16;

// Ascending series for J_n (n = 0, 1, 2).  max_mag reports the largest term
// magnitude encountered (cancellation monitor).
inline cplx bessel_j_series(int n, cplx z, double& max_mag) {
    const cplx q = -z * z * 0.25;
    cplx term = 1.0;
    for (int k = 1; k <= n; ++k) term *= z * 0.5 / static_cast<double>(k);
    cplx sum = term;
    max_mag = std::abs(term);
    for (int k = 1; k < 200; ++k) {
        term *= q / static_cast<double>(k * (n + k));
        sum += term;
        max_mag = std::max(max_mag, std::abs(term));
        if (std::abs(term) < 1e-18 * std::abs(sum) + 1e-300) break;
    }
    return sum;
}

// Ascending series for N_n (n = 0, 1) on the principal branch, DLMF 10.8.1:
//
//   N_n(z) = (2/pi) ln(z/2) J_n(z)
//          - (z/2)^{-n}/pi * sum_{k=0}^{n-1} (n-k-1)!/k! (z^2/4)^k
//          - (z/2)^n /pi   * sum_{k>=0} (psi(k+1)+psi(n+k+1)) (-z^2/4)^k / (k!(n+k)!)
inline cplx neumann_series(int n, cplx z, double& max_mag) {
    const cplx logz = std::log(z * 0.5);
    double jmax = 0.0;
    const cplx jn = bessel_j_series(n, z, jmax);
    cplx result = (2.0 / M_PI) * logz * jn;
    max_mag = jmax * std::abs(logz) * (2.0 / M_PI);

    if (n == 1) {
        // finite sum: single k = 0 term, (n-1)!/0! = 1
        result -= (2.0 / z) / M_PI;
        max_mag = std::max(max_mag, std::abs(2.0 / z) / M_PI);
    }

    // psi-weighted series
    const cplx q = -z * z * 0.25;
    cplx base = 1.0;
    for (int k = 1; k <= n; ++k) base *= z * 0.5 / static_cast<double>(k);
    double psi_a = -kEulerGamma;                 // psi(k+1) at k = 0
    double psi_b = -kEulerGamma;                 // psi(n+k+1) at k = 0
    for (int j = 1; j <= n; ++j) psi_b += 1.0 / j;
    cplx sum = (psi_a + psi_b) * base;
    double smax = std::abs(sum);
    for (int k = 1; k < 200; ++k) {
        base *= q / static_cast<double>(k * (n + k));
        psi_a += 1.0 / k;
        psi_b += 1.0 / (n + k);
        const cplx term = (psi_a + psi_b) * base;
        sum += term;
        smax = std::max(smax, std::abs(term));
        if (std::abs(term) < 1e-18 * (std::abs(sum) + 1e-300)) break;
    }
    result -= sum / M_PI;
    max_mag = std::max(max_mag, smax / M_PI);
    return result;
}

// Hankel asymptotic expansion (DLMF 10.17.5/10.17.6) for one kind.
// kind = +1 -> H1, kind = -1 -> H2.  rel_err receives the magnitude of the
// first neglected term relative to the sum (standard error proxy).
inline cplx hankel_asymptotic(int n, cplx z, int kind, double& rel_err) {
    const double fournu2 = 4.0 * n * n;
    const cplx step = cplx(0.0, static_cast<double>(kind)) / z;
    cplx term = 1.0;
    cplx sum = term;
    double prev = 1.0;
    double tail = 1.0;
    for (int k = 1; k <= 30; ++k) {
        const double num = fournu2 - (2.0 * k - 1.0) * (2.0 * k - 1.0);
        term *= step * (num / (8.0 * k));
        const double mag = std::abs(term);
        if (mag >= prev) {  // divergent tail reached; stop before this term
            tail = mag;
            break;
        }
        sum += term;
        prev = mag;
        tail = mag;
        if (mag < 1e-18) break;
    }
    rel_err = tail / std::abs(sum);
    const cplx omega = z - cplx(0.5 * M_PI * n + 0.25 * M_PI, 0.0);
    const cplx phase = std::exp(cplx(0.0, static_cast<double>(kind)) * omega);
    return std::sqrt(2.0 / (M_PI * z)) * phase * sum;
}

// Orders 0 and 1, all four kinds, with a certified error estimate.
struct Pair01 {
    cplx j0, j1, n0, n1;
    cplx h10, h11, h20, h21;
    double rel_err;
};

inline Pair01 eval01(cplx z) {
    Pair01 p{};
    double worst = 0.0;
    if (std::abs(z) <= kSeriesLimit) {
        double m[4];
        p.j0 = bessel_j_series(0, z, m[0]);
        p.j1 = bessel_j_series(1, z, m[1]);
        p.n0 = neumann_series(0, z, m[2]);
        p.n1 = neumann_series(1, z, m[3]);
        const cplx i1(0.0, 1.0);
        p.h10 = p.j0 + i1 * p.n0;
        p.h20 = p.j0 - i1 * p.n0;
        p.h11 = p.j1 + i1 * p.n1;
        p.h21 = p.j1 - i1 * p.n1;
        // Series cancellation, certified relative to the dominant kind at
        // this argument (an isolated real-axis zero of J or N does not void
        // the H1/H2 outputs every downstream kernel actually consumes)...
        const double mag0 = std::max(std::abs(p.j0), std::abs(p.n0));
        const double mag1 = std::max(std::abs(p.j1), std::abs(p.n1));
        worst = std::max(worst, kEps * std::max(m[0], m[2]) / (mag0 + 1e-300));
        worst = std::max(worst, kEps * std::max(m[1], m[3]) / (mag1 + 1e-300));
        // ...and J +- iN cancellation when one Hankel kind is subdominant
        worst = std::max(worst, kEps * mag0 / (std::abs(p.h10) + 1e-300));
        worst = std::max(worst, kEps * mag0 / (std::abs(p.h20) + 1e-300));
        worst = std::max(worst, kEps * mag1 / (std::abs(p.h11) + 1e-300));
        worst = std::max(worst, kEps * mag1 / (std::abs(p.h21) + 1e-300));
    } else {
        if (std::abs(std::arg(z)) > 0.75 * M_PI)
            throw AccuracyError(
                "cylinder_eval: asymptotic regime not certified near the "
                "negative real axis (|Arg z| > 3pi/4 with |z| > 14)");
        double e[4];
        p.h10 = hankel_asymptotic(0, z, +1, e[0]);
        p.h20 = hankel_asymptotic(0, z, -1, e[1]);
        p.h11 = hankel_asymptotic(1, z, +1, e[2]);
        p.h21 = hankel_asymptotic(1, z, -1, e[3]);
        p.j0 = 0.5 * (p.h10 + p.h20);
        p.n0 = (p.h10 - p.h20) / cplx(0.0, 2.0);
        p.j1 = 0.5 * (p.h11 + p.h21);
        p.n1 = (p.h11 - p.h21) / cplx(0.0, 2.0);
        const double trunc = std::max(std::max(e[0], e[1]), std::max(e[2], e[3]));
        // Each Hankel kind is summed directly from its own expansion, so the
        // subdominant kind keeps full relative accuracy; J/N derived from the
        // pair are certified relative to the dominant kind (see above).
        worst = trunc + kEps;
    }
    p.rel_err = worst;
    return p;
}

}  // namespace detail

inline CylinderEval cylinder_eval(CylinderOrder order, cplx z) {
    if (z == cplx(0.0, 0.0))
        throw DomainError("cylinder_eval: z = 0 (N and H diverge)");
    const detail::Pair01 p = detail::eval01(z);
    if (p.rel_err > detail::kRelTarget)
        throw AccuracyError("cylinder_eval: cannot certify 1e-10 relative "
                            "accuracy at |z| = " + std::to_string(std::abs(z)));

    CylinderEval out{};
    out.argument = z;
    out.order = order.value();
    const cplx i1(0.0, 1.0);
    switch (order.value()) {
        case 0:
            out.j = p.j0;
            out.n = p.n0;
            out.h1 = p.h10;
            out.h2 = p.h20;
            break;
        case 1:
            out.j = p.j1;
            out.n = p.n1;
            out.h1 = p.h11;
            out.h2 = p.h21;
            break;
        default: {
            // order 2 by upward recurrence on each kind (benign for nu <= 2);
            // J_2 from its own series when available for full accuracy
            out.h1 = (2.0 / z) * p.h11 - p.h10;
            out.h2 = (2.0 / z) * p.h21 - p.h20;
            out.n = (2.0 / z) * p.n1 - p.n0;
            if (std::abs(z) <= detail::kSeriesLimit) {
                double mm;
                out.j = detail::bessel_j_series(2, z, mm);
                out.h1 = out.j + i1 * out.n;
                out.h2 = out.j - i1 * out.n;
            } else {
                out.j = 0.5 * (out.h1 + out.h2);
            }
            break;
        }
    }
    return out;
}

// Bilinear Hankel combination; all cylinder functions take
// argument x, the first argument y enters only linearly.
inline cplx script_h(CylinderOrder mu, CylinderOrder nu, cplx y, cplx x) {
    if (x == cplx(0.0, 0.0))
        throw DomainError("script_h: x = 0");
    const CylinderEval a = cylinder_eval(mu, x);
    const CylinderEval b = cylinder_eval(nu, x);
    const cplx sym = a.h1 * b.h2 + a.h2 * b.h1;
    const cplx wron = a.h1 * b.h2 - a.h2 * b.h1;
    return y * sym + x * wron;
}

}  // namespace pointform

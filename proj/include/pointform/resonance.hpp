#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "pointform/errors.hpp"
#include "pointform/hyperboloid.hpp"
#include "pointform/model.hpp"
#include "pointform/quadrature.hpp"

// Resonance-pole machinery on the second Riemann sheet: Muller pole search
// on the inverse Green's function, the weak-coupling fixed-point estimate,
// contour residues with an argument-principle gate, the scalar S-matrix
// factor, Gamow decay amplitudes, and the Cauchy-closure diagnostic.

namespace pointform {

// The continuation that carries the decaying resonance pole.  The kernel
// script_h has an s-independent imaginary part, so the self-energy does not
// obey Schwarz reflection: Pi_-(s) != conj(Pi_+(s)) on the cut, and the two
// one-sided continuations through the cut are genuinely different analytic
// functions with non-conjugate zero sets.  Numerically (default parameters)
// the continuation of the *upper* boundary value has its nearby inverse-
// Green zero in the upper half-plane, while the decaying zero (Im s < 0)
// belongs to the continuation of the *lower* boundary value.  Pole hunting,
// the S-matrix continuation and the closure contour therefore use that
// branch: the plain integral Pi(s) for Im s < 0, Pi_- on the cut, and
// Pi - disc above (which is SheetLocation::MirrorSheet).  It is analytic
// across [4m^2, inf), which is what contour integrals and root iterates
// need.  SheetLocation::SecondSheet (the upper-boundary continuation, whose
// -i eps limit reproduces G_+) remains available through SelfEnergy::pi for
// the boundary-matching diagnostics.
inline cplx pi_second(const SelfEnergy& se, cplx s) {
    if (s.imag() > 0.0)
        return se.pi(SheetPoint(s, SheetLocation::MirrorSheet));
    if (s.imag() < 0.0)
        return se.pi(SheetPoint(s, SheetLocation::OffAxis));
    if (s.real() >= se.params().threshold_sq())
        return se.pi(SheetPoint(s, SheetLocation::LowerBoundary));
    // real s below threshold: Pi is real-analytic; evaluate infinitesimally
    // off axis (the closed-form evaluator is continuous there)
    return se.pi(SheetPoint(s + cplx(0.0, 1e-300), SheetLocation::OffAxis));
}

// The other continuation: the upper boundary value extended downward
// (equals the plain integral for Im s > 0, Pi_+ on the cut, Pi + disc
// below).  Its -i eps limit is Pi_+; it hosts no decaying zero.
inline cplx pi_upper_continued(const SelfEnergy& se, cplx s) {
    if (s.imag() < 0.0)
        return se.pi(SheetPoint(s, SheetLocation::SecondSheet));
    if (s.imag() > 0.0)
        return se.pi(SheetPoint(s, SheetLocation::OffAxis));
    if (s.real() >= se.params().threshold_sq())
        return se.pi(SheetPoint(s, SheetLocation::UpperBoundary));
    return se.pi(SheetPoint(s + cplx(0.0, 1e-300), SheetLocation::OffAxis));
}

// Inverse Green's function on the resonance branch,
// F(s) = s - M^2 - Pi^II(s).
inline cplx inverse_green_second(const SelfEnergy& se, cplx s) {
    return s - se.params().M * se.params().M - pi_second(se, s);
}

inline cplx green_second(const SelfEnergy& se, cplx s) {
    const cplx den = inverse_green_second(se, s);
    if (std::abs(den) < 1e-13)
        throw SingularityError("green_second: pole hit");
    return 1.0 / den;
}

struct PoleResult {
    cplx s_R;
    cplx residue;              // of G^II at s_R
    double M_R = 0.0;          // Re sqrt(s_R)
    double Gamma_R = 0.0;      // -2 Im sqrt(s_R)
    double Mbar_R = 0.0;       // sqrt(Re s_R)
    double Gammabar_R = 0.0;   // -Im s_R / Mbar_R
    double lifetime = 0.0;     // 1 / Gamma_R
    int iterations = 0;
    bool converged = false;
    double final_residual = 0.0;
};

// Winding number of F around a closed polyline of samples (argument
// principle; F assumed nonvanishing on the contour).
inline int winding_number(const std::vector<cplx>& values) {
    double total = 0.0;
    for (size_t k = 0; k < values.size(); ++k) {
        const cplx a = values[k];
        const cplx b = values[(k + 1) % values.size()];
        total += std::arg(b / a);
    }
    return static_cast<int>(std::lround(total / (2.0 * M_PI)));
}

// Residue of G^II at s_R by the trapezoid rule on a circle (exponentially
// convergent for analytic integrands), gated by the argument principle: the
// circle must wind exactly once around one simple zero of F.
inline cplx residue_contour(const SelfEnergy& se, cplx s_R, double radius,
                            int nodes = 64) {
    if (!(radius > 0.0) || nodes < 8)
        throw DomainError("residue_contour: bad radius or node count");
    std::vector<cplx> fvals(nodes);
    CompensatedSum acc;
    for (int k = 0; k < nodes; ++k) {
        const double th = 2.0 * M_PI * k / nodes;
        const cplx dz = radius * std::exp(cplx(0.0, th));
        const cplx F = inverse_green_second(se, s_R + dz);
        fvals[k] = F;
        // (1/2 pi i) \oint G ds -> (1/N) sum G(z_k) dz_k with dz_k = i z'(th)
        acc.add(dz / F);
    }
    const int w = winding_number(fvals);
    if (w != 1)
        throw WindingError(
            "residue_contour: argument-principle count is " +
            std::to_string(w) + ", expected exactly 1 enclosed zero");
    return acc.value() / static_cast<double>(nodes);
}

// Muller's method on F(s) = s - M^2 - Pi^II(s).
inline PoleResult find_pole(const SelfEnergy& se, cplx guess,
                            double tol = 1e-12, int max_iter = 60) {
    if (guess.imag() > 0.0)
        throw DomainError(
            "find_pole: seed must lie in the closed lower half-plane");
    if (!(tol >= 1e-14))
        throw DomainError("find_pole: tolerance below attainable accuracy");
    const double M2 = se.params().M * se.params().M;
    const double bound = 100.0 * std::max(M2, 1.0);

    auto F = [&](cplx s) { return inverse_green_second(se, s); };

    cplx x0 = guess * (1.0 - 1e-3) - cplx(0.0, 1e-4);
    cplx x1 = guess * (1.0 + 1e-3) - cplx(0.0, 1e-4);
    cplx x2 = guess;
    cplx f0 = F(x0), f1 = F(x1), f2 = F(x2);

    PoleResult out;
    for (int it = 0; it < max_iter; ++it) {
        out.iterations = it + 1;
        const cplx h1 = x1 - x0, h2 = x2 - x1;
        const cplx d1 = (f1 - f0) / h1, d2 = (f2 - f1) / h2;
        const cplx a = (d2 - d1) / (h2 + h1);
        const cplx b = a * h2 + d2;
        const cplx disc = std::sqrt(b * b - 4.0 * f2 * a);
        const cplx den1 = b + disc, den2 = b - disc;
        const cplx den = (std::abs(den1) >= std::abs(den2)) ? den1 : den2;
        if (std::abs(den) == 0.0)
            throw ConvergenceError("find_pole: degenerate Muller step");
        cplx x3 = x2 - 2.0 * f2 / den;
        if (x3.imag() > 0.0) x3 = cplx(x3.real(), 0.0);  // fold onto the cut
        if (std::abs(x3) > bound)
            throw DomainError("find_pole: iterate escaped the search region");
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
        x2 = x3;
        f2 = F(x3);
        out.final_residual = std::abs(f2);
        if (out.final_residual < tol) {
            out.converged = true;
            break;
        }
    }
    if (!out.converged)
        throw ConvergenceError("find_pole: no convergence in " +
                               std::to_string(max_iter) + " iterations");
    out.s_R = x2;
    const cplx root = std::sqrt(out.s_R);
    out.M_R = root.real();
    out.Gamma_R = -2.0 * root.imag();
    out.Mbar_R = std::sqrt(out.s_R.real());
    out.Gammabar_R = -out.s_R.imag() / out.Mbar_R;
    out.lifetime = (out.Gamma_R > 0.0)
                       ? 1.0 / out.Gamma_R
                       : std::numeric_limits<double>::infinity();
    const double radius =
        std::max(0.5 * std::abs(out.s_R.imag()), 1e-3 * std::max(M2, 1.0));
    out.residue = residue_contour(se, out.s_R, radius);
    return out;
}

// Weak-coupling pole estimate: fixed point of s <- M^2 + Pi_-(Re s), the
// full lower-boundary self-energy evaluated on the cut (the boundary value
// of the branch find_pole searches).  Agrees with the exact pole to
// O(beta^4) because the only neglected effect is the off-axis excursion of
// Pi^II, itself O(beta^2) over a distance O(beta^2).
inline cplx weak_pole(const SelfEnergy& se, double tol = 1e-12,
                      int max_iter = 200) {
    const double M2 = se.params().M * se.params().M;
    if (se.params().beta == 0.0) return M2;
    cplx s = M2;
    for (int it = 0; it < max_iter; ++it) {
        const cplx next =
            M2 + se.pi(SheetPoint(cplx(s.real(), 0.0),
                                  SheetLocation::LowerBoundary));
        if (std::abs(next - s) < tol) return next;
        s = next;
    }
    throw ConvergenceError("weak_pole: fixed-point map did not contract");
}

// Scalar S-matrix factor, adopted convention S(s) = G_-(s)/G_+(s) on the
// cut.  Continuing S downward through the cut sends G_- to the plain
// integral and G_+ to its lower continuation, so
//   S^II(s) = (s - M^2 - Pi_+^cont(s)) / (s - M^2 - Pi^II(s)),
// whose denominator is exactly find_pole's F: S^II has its pole at s_R.
// Algebraic identity on the cut: S - 1 = (Pi_- - Pi_+) G_-.
// The mirror continuation (upward from the cut) is the diagnostic
// counterpart, S^mir(s) = (s - M^2 - Pi(s)) / (s - M^2 - Pi^mir(s)).
inline cplx smatrix(const SelfEnergy& se, const SheetPoint& pt) {
    const double M2 = se.params().M * se.params().M;
    switch (pt.location) {
        case SheetLocation::UpperBoundary:
        case SheetLocation::LowerBoundary: {
            const cplx gm =
                green(se, SheetPoint(pt.s, SheetLocation::LowerBoundary));
            const cplx gp =
                green(se, SheetPoint(pt.s, SheetLocation::UpperBoundary));
            return gm / gp;
        }
        case SheetLocation::SecondSheet: {
            const cplx num = pt.s - M2 - pi_upper_continued(se, pt.s);
            const cplx den = inverse_green_second(se, pt.s);
            if (std::abs(den) < 1e-300)
                throw SingularityError("smatrix: at the resonance pole");
            return num / den;
        }
        case SheetLocation::MirrorSheet: {
            const cplx num =
                (pt.s.imag() == 0.0)
                    ? pt.s - M2 -
                          se.pi(SheetPoint(pt.s, SheetLocation::UpperBoundary))
                    : pt.s - M2 -
                          se.pi(SheetPoint(pt.s, SheetLocation::OffAxis));
            const cplx den = pt.s - M2 - se.pi(pt);
            if (std::abs(den) < 1e-300)
                throw SingularityError("smatrix: at a mirror-sheet pole");
            return num / den;
        }
        default:
            throw DomainError(
                "smatrix: defined on the cut boundary and the continuations");
    }
}

// Gamow state: complex square mass s_R with Im sqrt(s_R) < 0, attached to a
// velocity q.
struct GamowState {
    cplx s_R;
    VelocityVector q;

    GamowState(cplx s_R_, VelocityVector q_) : s_R(s_R_), q(q_) {
        if (!(std::sqrt(s_R).imag() < 0.0))
            throw DomainError(
                "GamowState: requires Im sqrt(s_R) < 0 (decaying pole)");
    }
};

// Decay amplitude under a forward time translation by t in the frame with
// velocity q: e^{-i sqrt(s_R) q^0 t}.  Backward evolution lies outside the
// causal semigroup and needs the explicit diagnostic flag.
inline cplx gamow_amplitude(const GamowState& state, double t,
                            bool diagnostic_backward = false) {
    if (t < 0.0 && !diagnostic_backward)
        throw DomainError(
            "gamow_amplitude: t < 0 excluded by the semigroup (pass the "
            "diagnostic flag to probe it)");
    const cplx root = std::sqrt(state.s_R);
    return std::exp(cplx(0.0, -1.0) * root * state.q.q0() * t);
}

// Relative gap between the two width conventions of the same pole:
// |Gammabar_R - Gamma_R| / Gamma_R.
inline double width_convention_gap(const PoleResult& pole) {
    if (pole.Gamma_R == 0.0) return 0.0;
    return std::abs(pole.Gammabar_R - pole.Gamma_R) / pole.Gamma_R;
}

// Rectangle in the closed lower half-plane for the Cauchy-closure check.
struct RectContour {
    double re_lo, re_hi;   // real-part range
    double im_lo, im_hi;   // imaginary-part range, im_hi <= 0
    int points_per_edge = 64;
};

// Integrates S^II(s) testfn(s) counterclockwise around the rectangle and
// compares against 2 pi i times the sum of enclosed residues (zero or one
// resonance pole, counted by the argument principle; testfn must be
// analytic in the closed lower half-plane).  Returns the relative mismatch.
inline double contour_closure_check(const SelfEnergy& se,
                                    const RectContour& rc,
                                    const std::function<cplx(cplx)>& testfn) {
    if (!(rc.re_lo < rc.re_hi) || !(rc.im_lo < rc.im_hi) || rc.im_hi > 0.0)
        throw DomainError(
            "contour_closure_check: rectangle must sit in Im s <= 0");

    const cplx corners[4] = {cplx(rc.re_lo, rc.im_lo), cplx(rc.re_hi, rc.im_lo),
                             cplx(rc.re_hi, rc.im_hi), cplx(rc.re_lo, rc.im_hi)};
    CompensatedSum acc;
    std::vector<cplx> fring;
    fring.reserve(4 * static_cast<size_t>(rc.points_per_edge));
    std::vector<double> xs, ws;
    detail::gauss_legendre_reference(rc.points_per_edge, xs, ws);
    double peak = 0.0;
    for (int e = 0; e < 4; ++e) {
        const cplx a = corners[e], b = corners[(e + 1) % 4];
        for (int k = 0; k < rc.points_per_edge; ++k) {
            const cplx z = a + 0.5 * (xs[k] + 1.0) * (b - a);
            const cplx val =
                smatrix(se, SheetPoint(z, SheetLocation::SecondSheet)) *
                testfn(z);
            acc.add(0.5 * ws[k] * (b - a) * val);
            peak = std::max(peak, std::abs(val));
            fring.push_back(inverse_green_second(se, z));
        }
    }
    const int w = winding_number(fring);
    if (w != 0 && w != 1)
        throw WindingError(
            "contour_closure_check: ambiguous enclosed pole count " +
            std::to_string(w));

    cplx expected = 0.0;
    if (w == 1) {
        const cplx seed(0.5 * (rc.re_lo + rc.re_hi),
                        0.5 * (rc.im_lo + rc.im_hi));
        const PoleResult pole = find_pole(se, seed);
        // Res S^II = Res G^II * (numerator of S^II at s_R)
        const double M2 = se.params().M * se.params().M;
        const cplx num = pole.s_R - M2 - pi_upper_continued(se, pole.s_R);
        expected = cplx(0.0, 2.0 * M_PI) * pole.residue * num *
                   testfn(pole.s_R);
    }
    const double scale =
        std::max(std::abs(expected),
                 peak * 2.0 * ((rc.re_hi - rc.re_lo) + (rc.im_hi - rc.im_lo)));
    return std::abs(acc.value() - expected) / std::max(scale, 1e-300);
}

}  // namespace pointform

#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "pointform/cylinder.hpp"
#include "pointform/errors.hpp"
#include "pointform/quadrature.hpp"

// The interacting model: a discrete state of mass M coupled through a smooth
// form factor to a two-particle continuum with threshold 2m.  This header
// carries the form factor, the mass-integration grid, the self-energy Pi on
// the first and second Riemann sheets, the Green's function, the spectral
// density rho, the continuum normalization C, and the Bogolubov coefficient
// functions.
//
// Conventions used throughout:
//   - continuum mass parametrization m(kappa) = 2m sqrt(1 + kappa^2), under
//     which the invariant measure collapses to d(mu)(kappa) = d(kappa) on
//     kappa in [0, inf);
//   - all square roots of the square mass s on the principal branch
//     -pi < Arg s <= pi;
//   - script-H kernel of cylinder.hpp with order pair (1, 2).

namespace pointform {

// Threshold-power times Gaussian form factor family:
//   alpha(mu) = A ((mu^2 - 4m^2)/mu^2)^p exp(-mu^2 / Lambda^2),
// entire in mu^2 away from mu = 0, with a zero of order p at threshold and
// super-exponential decay.
struct FormFactor {
    int power = 1;            // p >= 1
    double cutoff = 3.0;      // Lambda
    double amplitude = 1.0;   // A
};

struct ModelParams {
    double M = 1.0;      // discrete mass
    double m = 0.25;     // constituent mass; threshold at 2m
    double tau = 1.0;    // hyperboloid parameter
    double beta = 0.1;   // dimensionless coupling
    FormFactor form_factor;

    double threshold_sq() const { return 4.0 * m * m; }
    double mass_of_kappa(double kappa) const {
        return 2.0 * m * std::sqrt(1.0 + kappa * kappa);
    }
    void validate() const {
        if (!(M > 0.0)) throw DomainError("ModelParams: M must be > 0");
        if (!(m > 0.0)) throw DomainError("ModelParams: m must be > 0");
        if (!(tau > 0.0)) throw DomainError("ModelParams: tau must be > 0");
        if (form_factor.power < 1)
            throw DomainError("ModelParams: form-factor power must be >= 1");
        if (!(form_factor.cutoff > 0.0))
            throw DomainError("ModelParams: form-factor cutoff must be > 0");
        if (!(form_factor.amplitude > 0.0))
            throw DomainError("ModelParams: form-factor amplitude must be > 0");
    }
};

// alpha(mu) for real or complex invariant mass (entire in mu^2 for mu != 0).
inline cplx alpha(const ModelParams& params, cplx mu) {
    const double t = params.threshold_sq();
    const cplx mu2 = mu * mu;
    const cplx base = (mu2 - t) / mu2;
    cplx pw = 1.0;
    for (int k = 0; k < params.form_factor.power; ++k) pw *= base;
    const double L2 = params.form_factor.cutoff * params.form_factor.cutoff;
    return params.form_factor.amplitude * pw * std::exp(-mu2 / L2);
}

// Jacobian mu / (2m sqrt(mu^2 - 4m^2)) of the measure in the mu variable;
// the kappa parametrization absorbs it exactly (d mu(kappa) = d kappa).
inline double measure_density(const ModelParams& params, double mu) {
    const double t = params.threshold_sq();
    if (!(mu * mu > t))
        throw DomainError("measure_density: mu must exceed threshold 2m");
    return mu / (2.0 * params.m * std::sqrt(mu * mu - t));
}

// Gauss-Legendre panel grid in kappa on [0, kappa_max], with kappa_max set
// where the form-factor envelope exp(-m(kappa)^2 / Lambda^2) drops below
// 1e-16.  Node masses are cached.
struct MassQuadrature {
    std::vector<double> kappa;
    std::vector<double> weight;
    std::vector<double> mass;   // m(kappa_i)
    double kappa_max = 0.0;

    static MassQuadrature build(const ModelParams& params, int panels = 40,
                                int points_per_panel = 12) {
        params.validate();
        const double L = params.form_factor.cutoff;
        const double mu_max =
            L * std::sqrt(16.0 * std::log(10.0));       // envelope < 1e-16
        const double ratio = mu_max / (2.0 * params.m);
        const double kmax =
            std::sqrt(std::max(ratio * ratio - 1.0, 1.0));
        const PanelRule rule =
            gauss_legendre_panels(0.0, kmax, panels, points_per_panel);
        MassQuadrature q;
        q.kappa = rule.nodes;
        q.weight = rule.weights;
        q.kappa_max = kmax;
        q.mass.reserve(q.kappa.size());
        for (double k : q.kappa) q.mass.push_back(params.mass_of_kappa(k));
        return q;
    }
};

// Square-mass point tagged with its sheet/boundary location.
//   OffAxis        -- Im s != 0, first sheet
//   UpperBoundary  -- limit from Im s > 0 onto the cut [4m^2, inf)
//   LowerBoundary  -- limit from Im s < 0 onto the cut
//   SecondSheet    -- continuation of the UpperBoundary function through the
//                     cut into Im s <= 0 (hosts the decaying resonance pole)
//   MirrorSheet    -- continuation of the LowerBoundary function upward
//                     (conjugate-pole diagnostic only)
enum class SheetLocation {
    OffAxis,
    UpperBoundary,
    LowerBoundary,
    SecondSheet,
    MirrorSheet
};

struct SheetPoint {
    cplx s;
    SheetLocation location;

    SheetPoint(cplx s_, SheetLocation loc) : s(s_), location(loc) {
        switch (loc) {
            case SheetLocation::OffAxis:
                if (s.imag() == 0.0)
                    throw DomainError("SheetPoint: OffAxis requires Im s != 0");
                break;
            case SheetLocation::UpperBoundary:
            case SheetLocation::LowerBoundary:
                if (s.imag() != 0.0)
                    throw DomainError(
                        "SheetPoint: boundary locations require real s");
                break;
            case SheetLocation::SecondSheet:
                if (s.imag() > 0.0)
                    throw DomainError(
                        "SheetPoint: SecondSheet requires Im s <= 0");
                break;
            case SheetLocation::MirrorSheet:
                if (s.imag() < 0.0)
                    throw DomainError(
                        "SheetPoint: MirrorSheet requires Im s >= 0");
                break;
        }
    }
};

// Self-energy evaluator.  The script-H kernel is linear in its first
// argument, so every node-level cylinder evaluation is s-independent and is
// cached at construction:
//   script_h(1,2; y, x_i) = y S_i + W_i,
//   S_i = (H1_1 H2_2 + H2_1 H1_2)(x_i),  W_i = x_i (H1_1 H2_2 - H2_1 H1_2)(x_i).
// A Pi evaluation then costs two cylinder calls (orders 1, 2 at sqrt(s) tau)
// plus one pass over the grid.
class SelfEnergy {
public:
    SelfEnergy(const ModelParams& params, const MassQuadrature& quad)
        : params_(params), quad_(quad) {
        params.validate();
        const double tau = params.tau;
        cache_pair(params.M * tau, hm_S_, hm_W_);
        const size_t n = quad.kappa.size();
        S_.resize(n);
        W_.resize(n);
        a2_.resize(n);
        for (size_t i = 0; i < n; ++i) {
            cache_pair(quad.mass[i] * tau, S_[i], W_[i]);
            const cplx a = alpha(params, cplx(quad.mass[i], 0.0));
            a2_[i] = (a * a).real();
        }
    }

    const ModelParams& params() const { return params_; }
    const MassQuadrature& quadrature() const { return quad_; }

    // Pi at a sheet point.  First sheet:
    //   Pi(s) = -(pi beta)^2/32 * H_M(s) * int dkappa f(kappa)/(s - m(kappa)^2)
    // with H_M(s) = script_h(1,2; sqrt(s) tau, M tau) and
    //   f(kappa) = alpha(m(kappa))^2 * script_h(1,2; sqrt(s) tau, m(kappa) tau).
    // The pole at s = m(kappa)^2 is removed by subtracting f at the complex
    // resonant node z = sqrt(s - 4m^2)/(2m) (where m(z) = sqrt(s) exactly)
    // and integrating the subtracted pole term in closed form; on the cut the
    // closed form degenerates to the principal value plus -/+ i pi times the
    // on-shell term.  Second sheet: Pi + disc; mirror sheet: Pi - disc.
    cplx pi(const SheetPoint& pt) const {
        const double beta = params_.beta;
        if (beta == 0.0) return 0.0;
        switch (pt.location) {
            case SheetLocation::OffAxis:
                return first_sheet(pt.s);
            case SheetLocation::UpperBoundary:
                return boundary(pt.s.real(), +1);
            case SheetLocation::LowerBoundary:
                return boundary(pt.s.real(), -1);
            case SheetLocation::SecondSheet:
                if (pt.s.imag() == 0.0) return boundary(pt.s.real(), +1);
                return first_sheet(pt.s) + disc(pt.s);
            case SheetLocation::MirrorSheet:
                if (pt.s.imag() == 0.0) return boundary(pt.s.real(), -1);
                return first_sheet(pt.s) - disc(pt.s);
        }
        throw DomainError("SelfEnergy::pi: unreachable location");
    }

    // Analytic function equal to Pi_+ - Pi_- on the cut:
    //   disc(s) = (i pi^3 beta^2 / 32) H_M(s) alpha(sqrt(s))^2
    //             * script_h(1,2; sqrt(s) tau, sqrt(s) tau)
    //             / (2m sqrt(s - 4m^2)).
    // The overall constant is frozen against the PV-boundary-difference
    // oracle in the test suite.  The threshold zero of alpha^2 (order >= 2)
    // beats the inverse square root, so the threshold limit is 0.
    cplx disc(cplx s) const {
        const double t = params_.threshold_sq();
        if (s == cplx(t, 0.0)) return 0.0;
        const double beta = params_.beta;
        const double tau = params_.tau;
        const cplx y = std::sqrt(s) * tau;
        const cplx hm = y * hm_S_ + hm_W_;
        const cplx a = alpha(params_, std::sqrt(s));
        const cplx hss =
            script_h(CylinderOrder(1), CylinderOrder(2), y, y);
        const cplx root = 2.0 * params_.m * std::sqrt(s - t);
        const double pi3 = M_PI * M_PI * M_PI;
        return cplx(0.0, pi3 * beta * beta / 32.0) * hm * a * a * hss / root;
    }

private:
    static void cache_pair(double x, cplx& S, cplx& W) {
        const auto e1 = cylinder_eval(CylinderOrder(1), cplx(x, 0.0));
        const auto e2 = cylinder_eval(CylinderOrder(2), cplx(x, 0.0));
        S = e1.h1 * e2.h2 + e1.h2 * e2.h1;
        W = x * (e1.h1 * e2.h2 - e1.h2 * e2.h1);
    }

    // On-shell subtraction value f(z) = alpha(sqrt(s))^2 script_h(.., sqrt(s) tau).
    cplx on_shell(cplx s, cplx y) const {
        const cplx a = alpha(params_, std::sqrt(s));
        return a * a * script_h(CylinderOrder(1), CylinderOrder(2), y, y);
    }

    cplx prefactor() const {
        const double pb = M_PI * params_.beta;
        return -pb * pb / 32.0;
    }

    // Subtracted grid sum  sum_i w_i [f(kappa_i) - f_sub] / (z2 - kappa_i^2).
    cplx subtracted_sum(cplx y, cplx z2, cplx f_sub) const {
        CompensatedSum acc;
        const size_t n = quad_.kappa.size();
        for (size_t i = 0; i < n; ++i) {
            const cplx f = a2_[i] * (y * S_[i] + W_[i]);
            const cplx den = z2 - quad_.kappa[i] * quad_.kappa[i];
            acc.add(quad_.weight[i] * (f - f_sub) / den);
        }
        return acc.value();
    }

    cplx first_sheet(cplx s) const {
        const double t = params_.threshold_sq();
        const cplx y = std::sqrt(s) * params_.tau;
        const cplx hm = y * hm_S_ + hm_W_;
        const cplx z2 = (s - t) / t;
        const cplx z = std::sqrt(z2);
        const double K = quad_.kappa_max;
        const cplx f_sub = on_shell(s, y);
        // closed form of int_0^K dkappa/(z^2 - kappa^2), valid off the cut
        const cplx pole_int =
            (std::log(z + K) - std::log(z - K)) / (2.0 * z);
        const cplx integral =
            (subtracted_sum(y, z2, f_sub) + f_sub * pole_int) / t;
        return prefactor() * hm * integral;
    }

    // Boundary value at real s >= 4m^2 from the side sign*i0.
    cplx boundary(double s, int side) const {
        const double t = params_.threshold_sq();
        if (!(s >= t))
            throw DomainError(
                "SelfEnergy::pi: boundary location requires s >= 4m^2");
        const cplx y = std::sqrt(cplx(s, 0.0)) * params_.tau;
        const cplx hm = y * hm_S_ + hm_W_;
        const double k0sq = (s - t) / t;
        const double k0 = std::sqrt(k0sq);
        const double K = quad_.kappa_max;
        if (!(k0 < K))
            throw DomainError(
                "SelfEnergy::pi: boundary s beyond the quadrature range");
        const cplx f_sub = on_shell(cplx(s, 0.0), y);
        // At threshold (kappa_0 = 0) the on-shell term has a zero of order
        // >= 2 in kappa_0 (alpha^2), so the whole pole contribution vanishes.
        cplx pole_term = 0.0;
        if (k0 > 0.0) {
            const cplx pole_int =
                std::log((K + k0) / (K - k0)) / (2.0 * k0) +
                cplx(0.0, -side * M_PI) / (2.0 * k0);
            pole_term = f_sub * pole_int;
        }
        const cplx integral =
            (subtracted_sum(y, cplx(k0sq, 0.0), f_sub) + pole_term) / t;
        return prefactor() * hm * integral;
    }

    ModelParams params_;
    MassQuadrature quad_;
    cplx hm_S_, hm_W_;           // cached pair at M tau
    std::vector<cplx> S_, W_;    // cached pairs at m(kappa_i) tau
    std::vector<double> a2_;     // alpha(m(kappa_i))^2
};

// Thin wrappers for one-off evaluations (tests and CLI hold a SelfEnergy for
// repeated use).
inline cplx pi_eval(const ModelParams& params, const SheetPoint& pt,
                    const MassQuadrature& quad) {
    return SelfEnergy(params, quad).pi(pt);
}

inline cplx disc_pi(const ModelParams& params, cplx s,
                    const MassQuadrature& quad) {
    return SelfEnergy(params, quad).disc(s);
}

inline cplx green(const SelfEnergy& se, const SheetPoint& pt) {
    const cplx den = pt.s - se.params().M * se.params().M - se.pi(pt);
    if (std::abs(den) < 1e-13)
        throw SingularityError("green: pole hit (|s - M^2 - Pi| < 1e-13)");
    return 1.0 / den;
}

inline cplx green(const ModelParams& params, const SheetPoint& pt,
                  const MassQuadrature& quad) {
    return green(SelfEnergy(params, quad), pt);
}

// Continuum normalization, frozen as the positive root of
//   |C(s)|^2 = 2m sqrt(s - 4m^2) / sqrt(s),
// i.e. the choice that makes the canonical commutator coefficient
//   sqrt(s) / (2m sqrt(s - 4m^2)) * |C(s)|^2
// equal to one.  Phase convention: C real positive.
inline double norm_C(const ModelParams& params, double s) {
    const double t = params.threshold_sq();
    if (!(s > t)) throw DomainError("norm_C: requires s > 4m^2");
    return std::sqrt(2.0 * params.m * std::sqrt(s - t) / std::sqrt(s));
}

// Spectral density
//   rho(s) = (i pi beta C(s) / 8) alpha(sqrt(s))
//            * script_h(1,2; sqrt(s) tau, sqrt(s) tau)
//            / (2m sqrt(s - 4m^2) H1_1(sqrt(s) tau))
//          = (i pi beta C(s) / 4) sqrt(s) tau alpha(sqrt(s)) H2_2(sqrt(s) tau)
//            / (2m sqrt(s - 4m^2)),
// the two forms being identical because script_h at equal arguments collapses
// to 2 y H1_1(y) H2_2(y) and H1_1 cancels against the defining quotient.  The
// collapsed form is evaluated (no spurious H1_1 zero sensitivity).
inline cplx rho(const ModelParams& params, double s) {
    const double t = params.threshold_sq();
    if (!(s > t)) throw DomainError("rho: requires s > 4m^2");
    const double C = norm_C(params, s);
    const double rs = std::sqrt(s);
    const auto e2 = cylinder_eval(CylinderOrder(2), cplx(rs * params.tau, 0.0));
    const cplx a = alpha(params, cplx(rs, 0.0));
    const double root = 2.0 * params.m * std::sqrt(s - t);
    return cplx(0.0, M_PI * params.beta * C / 4.0) * rs * params.tau * a *
           e2.h2 / root;
}

// Bogolubov coefficient functions at real s > 4m^2 on one branch.  The
// kernel 1/(sqrt(s) - m(kappa) +/- i eps) of T splits into a principal-value
// regular part (T_regular) and a delta coefficient (T_singular, which also
// carries the free-field C delta term).
struct CoefficientSet {
    cplx t;
    cplx r;
    std::function<cplx(double)> T_regular;   // mu -> PV-part coefficient
    cplx T_singular;                         // coefficient of delta(sqrt(s) - m(kappa))
    std::function<cplx(double)> R;
    cplx C;
};

inline CoefficientSet coefficients(const SelfEnergy& se, double s,
                                   int branch) {
    const ModelParams& params = se.params();
    const double t4 = params.threshold_sq();
    if (!(s > t4))
        throw DomainError(
            "coefficients: s below the continuum spectrum [4m^2, inf)");
    if (branch != 1 && branch != -1)
        throw DomainError("coefficients: branch must be +1 or -1");

    const double tau = params.tau;
    const double M = params.M;
    const double rs = std::sqrt(s);
    const cplx y(rs * tau, 0.0);
    const auto eM = cylinder_eval(CylinderOrder(1), cplx(M * tau, 0.0));
    const cplx hM =
        script_h(CylinderOrder(1), CylinderOrder(2), y, cplx(M * tau, 0.0));

    const SheetLocation loc = (branch == 1) ? SheetLocation::UpperBoundary
                                            : SheetLocation::LowerBoundary;
    const cplx G = green(se, SheetPoint(cplx(s, 0.0), loc));
    const cplx rhoG = rho(params, s) * G;

    CoefficientSet cs;
    cs.C = norm_C(params, s);
    cs.t = (rs + M) * eM.h1 * rhoG;
    cs.r = -(rs - M) * eM.h2 * rhoG;

    const double beta = params.beta;
    const cplx kernel_pref = cplx(0.0, M_PI * beta / 8.0) * hM * rhoG;
    cs.T_regular = [params, tau, rs, kernel_pref](double mu) -> cplx {
        const auto e = cylinder_eval(CylinderOrder(1), cplx(mu * tau, 0.0));
        return kernel_pref * alpha(params, cplx(mu, 0.0)) * e.h1 / (rs - mu);
    };
    // 1/(sqrt(s) - mu +/- i eps) = PV -/+ i pi delta(sqrt(s) - mu)
    {
        const auto e = cylinder_eval(CylinderOrder(1), cplx(rs * tau, 0.0));
        cs.T_singular = cs.C + cplx(0.0, -branch * M_PI) * kernel_pref *
                                   alpha(params, cplx(rs, 0.0)) * e.h1;
    }
    cs.R = [params, tau, rs, kernel_pref](double mu) -> cplx {
        const auto e = cylinder_eval(CylinderOrder(1), cplx(mu * tau, 0.0));
        return -kernel_pref * alpha(params, cplx(mu, 0.0)) * e.h2 / (rs + mu);
    };
    return cs;
}

}  // namespace pointform

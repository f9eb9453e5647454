#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "pointform/errors.hpp"
#include "pointform/hyperboloid.hpp"
#include "pointform/resonance.hpp"

// The causal Poincare semigroup: proper orthochronous Lorentz
// transformations together with translations restricted to the closed
// forward cone.  Elements compose like Poincare group elements but forward
// translations cannot be inverted inside the set, which is what turns
// unitary time evolution into a one-sided semigroup on the relevant state
// spaces.  Provides membership and composition, transport of sampled
// wavefunctions psi(q, s) under the two boundary-value representations, and
// the transformation law of Gamow data.

namespace pointform {

namespace detail {

constexpr double kLorentzTol = 1e-12;

inline Eigen::Matrix4d minkowski_metric() {
    Eigen::Matrix4d eta = Eigen::Matrix4d::Zero();
    eta(0, 0) = 1.0;
    eta(1, 1) = eta(2, 2) = eta(3, 3) = -1.0;
    return eta;
}

// Pure boost with rapidity vector chi (direction = boost axis).
inline Eigen::Matrix4d boost_matrix(const std::array<double, 3>& chi) {
    const double mag =
        std::sqrt(chi[0] * chi[0] + chi[1] * chi[1] + chi[2] * chi[2]);
    Eigen::Matrix4d L = Eigen::Matrix4d::Identity();
    if (mag == 0.0) return L;
    const double n[3] = {chi[0] / mag, chi[1] / mag, chi[2] / mag};
    const double ch = std::cosh(mag), sh = std::sinh(mag);
    L(0, 0) = ch;
    for (int i = 0; i < 3; ++i) {
        L(0, i + 1) = L(i + 1, 0) = sh * n[i];
        for (int j = 0; j < 3; ++j)
            L(i + 1, j + 1) = (i == j ? 1.0 : 0.0) + (ch - 1.0) * n[i] * n[j];
    }
    return L;
}

}  // namespace detail

// Proper orthochronous Lorentz part stored in polar form (boost rapidity
// vector times rotation) plus a translation four-vector.
struct PoincareElement {
    std::array<double, 3> rapidity{0.0, 0.0, 0.0};
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    FourVector a{};

    Eigen::Matrix4d lorentz() const {
        Eigen::Matrix4d R = Eigen::Matrix4d::Identity();
        R.block<3, 3>(1, 1) = rotation;
        return detail::boost_matrix(rapidity) * R;
    }

    // Lambda^T eta Lambda = eta, det = +1, Lambda^0_0 >= 1.
    void validate() const {
        const Eigen::Matrix4d L = lorentz();
        const Eigen::Matrix4d eta = detail::minkowski_metric();
        const double defect = (L.transpose() * eta * L - eta).cwiseAbs().maxCoeff();
        const double scale = std::max(1.0, L.cwiseAbs().maxCoeff());
        if (defect > detail::kLorentzTol * scale * scale)
            throw DomainError("PoincareElement: Lorentz defect " +
                              std::to_string(defect));
        if (L.determinant() < 0.0 || L(0, 0) < 1.0 - detail::kLorentzTol)
            throw DomainError(
                "PoincareElement: not proper orthochronous");
    }

    static PoincareElement boost(const std::array<double, 3>& chi) {
        PoincareElement g;
        g.rapidity = chi;
        return g;
    }

    static PoincareElement rotation_about(const std::array<double, 3>& axis,
                                          double angle) {
        const double mag =
            std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
        if (mag == 0.0)
            throw DomainError("PoincareElement: zero rotation axis");
        PoincareElement g;
        g.rotation = Eigen::AngleAxisd(
                         angle, Eigen::Vector3d(axis[0], axis[1], axis[2]) / mag)
                         .toRotationMatrix();
        return g;
    }

    static PoincareElement translation(const FourVector& a) {
        PoincareElement g;
        g.a = a;
        return g;
    }

    // Polar re-decomposition of an explicit Lorentz matrix: the first column
    // is (cosh chi, sinh chi n), which fixes the boost factor; the remainder
    // must be a spatial rotation.
    static PoincareElement from_matrix(const Eigen::Matrix4d& L,
                                       const FourVector& a) {
        if (L(0, 0) < 1.0 - detail::kLorentzTol)
            throw DomainError("PoincareElement: matrix is not orthochronous");
        const double ch = std::max(L(0, 0), 1.0);
        const double mag = std::acosh(ch);
        PoincareElement g;
        g.a = a;
        const double sh = std::sinh(mag);
        if (sh > 0.0) {
            const double inv = mag / sh;
            g.rapidity = {L(1, 0) * inv, L(2, 0) * inv, L(3, 0) * inv};
        }
        const Eigen::Matrix4d R4 =
            detail::boost_matrix({-g.rapidity[0], -g.rapidity[1],
                                  -g.rapidity[2]}) *
            L;
        g.rotation = R4.block<3, 3>(1, 1);
        g.validate();
        return g;
    }
};

inline FourVector apply_lorentz(const Eigen::Matrix4d& L, const FourVector& v) {
    const Eigen::Vector4d x = L * Eigen::Vector4d(v.p0, v.p1, v.p2, v.p3);
    return {x(0), x(1), x(2), x(3)};
}

// Membership: translation in the closed forward cone (a0 >= 0 and
// a.a >= 0, with a 1e-12 band at the boundary for rounded inputs).
inline bool in_causal_semigroup(const PoincareElement& g) {
    const double scale = std::max(1.0, g.a.euclidean_square());
    return g.a.p0 >= -detail::kLorentzTol * scale &&
           g.a.invariant_square() >= -detail::kLorentzTol * scale;
}

// (Lambda2, a2) o (Lambda1, a1) = (Lambda2 Lambda1, a2 + Lambda2 a1).
inline PoincareElement compose(const PoincareElement& g2,
                               const PoincareElement& g1) {
    const Eigen::Matrix4d L2 = g2.lorentz();
    return PoincareElement::from_matrix(
        L2 * g1.lorentz(), g2.a + apply_lorentz(L2, g1.a));
}

// Sampled wavefunction psi(q, s) on a velocity family collinear with the
// z axis: node j carries four-velocity (cosh chi_j, 0, 0, sinh chi_j).  One
// signed rapidity axis suffices for every boost along z (the only Lorentz
// moves the sampling can represent without leaving the family), and s is
// never remapped by the action.
struct WaveGrid {
    std::vector<double> chi;                 // strictly increasing
    std::vector<double> s;                   // strictly increasing, >= 4m^2
    std::vector<std::vector<cplx>> psi;      // psi[j][k] at (chi_j, s_k)

    void validate(double threshold_sq) const {
        if (chi.size() < 4 || s.empty())
            throw DomainError("WaveGrid: need at least 4 rapidity nodes");
        for (size_t j = 1; j < chi.size(); ++j)
            if (!(chi[j] > chi[j - 1]))
                throw DomainError("WaveGrid: rapidity axis not increasing");
        for (size_t k = 1; k < s.size(); ++k)
            if (!(s[k] > s[k - 1]))
                throw DomainError("WaveGrid: square-mass axis not increasing");
        if (s.front() < threshold_sq)
            throw DomainError("WaveGrid: square-mass node below threshold");
        if (psi.size() != chi.size())
            throw DomainError("WaveGrid: sample rows do not match rapidity axis");
        for (const auto& row : psi)
            if (row.size() != s.size())
                throw DomainError(
                    "WaveGrid: sample columns do not match square-mass axis");
    }

    VelocityVector velocity(size_t j) const {
        return {0.0, 0.0, std::sinh(chi.at(j))};
    }
};

namespace detail {

// Cubic Lagrange interpolation in rapidity on the 4 nodes nearest x.
inline cplx interp_cubic(const std::vector<double>& chi,
                         const std::vector<std::vector<cplx>>& psi, size_t col,
                         double x) {
    if (x < chi.front() || x > chi.back())
        throw CoverageError(
            "WaveGrid: transported rapidity " + std::to_string(x) +
            " leaves the sampled range [" + std::to_string(chi.front()) +
            ", " + std::to_string(chi.back()) + "]");
    const size_t n = chi.size();
    size_t hi = std::lower_bound(chi.begin(), chi.end(), x) - chi.begin();
    size_t i0 = (hi >= 2) ? hi - 2 : 0;
    i0 = std::min(i0, n - 4);
    cplx sum = 0.0;
    for (size_t a = 0; a < 4; ++a) {
        double w = 1.0;
        for (size_t b = 0; b < 4; ++b)
            if (b != a)
                w *= (x - chi[i0 + b]) / (chi[i0 + a] - chi[i0 + b]);
        sum += w * psi[i0 + a][col];
    }
    return sum;
}

// The grid can only represent boosts along z and rotations about z; both
// leave the collinear velocity family invariant.
inline double z_boost_rapidity(const PoincareElement& g) {
    const double off = std::hypot(g.rapidity[0], g.rapidity[1]);
    if (off > kLorentzTol)
        throw DomainError(
            "act: wave grid samples velocities along the z axis; only "
            "z-boosts are representable");
    const Eigen::Vector3d zhat(0.0, 0.0, 1.0);
    if ((g.rotation * zhat - zhat).cwiseAbs().maxCoeff() > kLorentzTol)
        throw DomainError(
            "act: rotation must preserve the z axis of the wave grid");
    return g.rapidity[2];
}

}  // namespace detail

// Transport of grid samples under g = (Lambda, a).  Both branches move the
// velocity argument to Lambda^{-1} q and never touch the s axis; they differ
// only in the translation phase:
//   branch = -1:  psi'(q, s) = e^{-i sqrt(s) q.(Lambda a)} psi(Lambda^{-1} q, s)
//   branch = +1:  psi'(q, s) = e^{+i sqrt(s) q.a}          psi(Lambda^{-1} q, s)
// For a z-boost of rapidity xi the velocity pullback is chi -> chi - xi, so
// one edge of the sampled window always leaves the grid; the output keeps
// exactly the nodes whose pullback stays covered (no extrapolation), and
// CoverageError fires when fewer than a cubic stencil's worth survive.
inline WaveGrid act(const WaveGrid& wg, const PoincareElement& g, int branch) {
    if (branch != 1 && branch != -1)
        throw DomainError("act: branch must be +1 or -1");
    if (!in_causal_semigroup(g))
        throw CausalityError(
            "act: translation outside the closed forward cone");
    wg.validate(0.0);
    const double xi = detail::z_boost_rapidity(g);
    const FourVector phase_a =
        (branch < 0) ? apply_lorentz(g.lorentz(), g.a) : g.a;

    WaveGrid out;
    out.s = wg.s;
    for (size_t j = 0; j < wg.chi.size(); ++j) {
        const double pulled = wg.chi[j] - xi;
        if (pulled < wg.chi.front() || pulled > wg.chi.back()) continue;
        const FourVector q = wg.velocity(j).four_vector();
        const double qa = minkowski_dot(q, phase_a);
        std::vector<cplx> row(wg.s.size());
        for (size_t k = 0; k < wg.s.size(); ++k) {
            const cplx phase = std::exp(
                cplx(0.0, static_cast<double>(branch)) * std::sqrt(wg.s[k]) * qa);
            row[k] = phase * detail::interp_cubic(wg.chi, wg.psi, k, pulled);
        }
        out.chi.push_back(wg.chi[j]);
        out.psi.push_back(std::move(row));
    }
    if (out.chi.size() < 4)
        throw CoverageError(
            "act: transported grid retains fewer than 4 covered rapidity "
            "nodes");
    return out;
}

// Gamow data under g: the velocity is boosted to Lambda q and the state
// picks up the factor e^{-i sqrt(s_R) q.a}.  For a in the closed forward
// cone and Im sqrt(s_R) < 0 the factor has modulus <= 1 (decay, never
// regeneration), which is the semigroup arrow at the level of one pole.
struct GamowTransformResult {
    GamowState state;
    cplx phase;
};

inline GamowTransformResult gamow_transform(const GamowState& state,
                                            const PoincareElement& g) {
    if (!in_causal_semigroup(g))
        throw CausalityError(
            "gamow_transform: translation outside the closed forward cone");
    const FourVector q = state.q.four_vector();
    const FourVector boosted = apply_lorentz(g.lorentz(), q);
    const cplx root = std::sqrt(state.s_R);
    const cplx phase =
        std::exp(cplx(0.0, -1.0) * root * minkowski_dot(q, g.a));
    return {GamowState(state.s_R,
                       VelocityVector{boosted.p1, boosted.p2, boosted.p3}),
            phase};
}

}  // namespace pointform

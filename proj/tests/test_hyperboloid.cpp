#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "pointform/cylinder.hpp"
#include "pointform/hyperboloid.hpp"
#include "pointform/quadrature.hpp"

using namespace pointform;
using cplx = std::complex<double>;

namespace {

double rel_err(cplx got, cplx want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

// Pure boost with rapidity y along unit direction n (test-only helper).
FourVector boost(const FourVector& p, double y, double nx, double ny,
                 double nz) {
    const double norm = std::sqrt(nx * nx + ny * ny + nz * nz);
    nx /= norm;
    ny /= norm;
    nz /= norm;
    const double par = nx * p.p1 + ny * p.p2 + nz * p.p3;
    const double ch = std::cosh(y), sh = std::sinh(y);
    const double p0 = ch * p.p0 + sh * par;
    const double par2 = sh * p.p0 + ch * par;
    return {p0, p.p1 + (par2 - par) * nx, p.p2 + (par2 - par) * ny,
            p.p3 + (par2 - par) * nz};
}

// Reference -i pi H2_0(z) for the cosh-integral oracle checks.
cplx minus_i_pi_h20(cplx z) {
    const auto e = cylinder_eval(CylinderOrder(0), z);
    return cplx(0.0, -M_PI) * e.h2;
}

}  // namespace

TEST_CASE("four-vector classification") {
    CHECK(FourVector{2.0, 0.5, 0.0, 0.0}.classification() ==
          Causality::TimelikeForward);
    CHECK(FourVector{-2.0, 0.5, 0.0, 0.0}.classification() ==
          Causality::TimelikeBackward);
    CHECK(FourVector{0.5, 2.0, 0.0, 0.0}.classification() ==
          Causality::Spacelike);
    CHECK(FourVector{1.0, 1.0, 0.0, 0.0}.classification() == Causality::Null);
    CHECK(FourVector{0.0, 0.0, 0.0, 0.0}.classification() == Causality::Null);
}

TEST_CASE("velocity vectors are unit timelike by construction") {
    const VelocityVector q{0.3, -1.2, 2.0};
    const FourVector f = q.four_vector();
    CHECK(f.invariant_square() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(f.p0 >= 1.0);
}

TEST_CASE("scalar integral: timelike and spacelike closed forms") {
    // s = 1, tau = 1  ->  i 2 pi^2 H2_1(1)
    const FourVector pt{1.0, 0.0, 0.0, 0.0};
    const auto e1 = cylinder_eval(CylinderOrder(1), cplx(1.0, 0.0));
    const cplx want_t = cplx(0.0, 2.0 * M_PI * M_PI) * e1.h2;
    CHECK(rel_err(pauli_jordan_I(pt, 1.0), want_t) < 1e-12);

    // s = -1, tau = 1  ->  2 pi^2 H1_1(i)
    const FourVector ps{0.0, 1.0, 0.0, 0.0};
    const auto ei = cylinder_eval(CylinderOrder(1), cplx(0.0, 1.0));
    const cplx want_s = 2.0 * M_PI * M_PI * ei.h1;
    CHECK(rel_err(pauli_jordan_I(ps, 1.0), want_s) < 1e-12);
}

TEST_CASE("scalar integral: rejected distributional / unsupported regimes") {
    CHECK_THROWS_AS(pauli_jordan_I(FourVector{1.0, 1.0, 0.0, 0.0}, 1.0),
                    DomainError);
    CHECK_THROWS_AS(pauli_jordan_I(FourVector{0.0, 0.0, 0.0, 0.0}, 1.0),
                    DomainError);
    CHECK_THROWS_AS(pauli_jordan_I(FourVector{-2.0, 0.0, 0.0, 0.0}, 1.0),
                    DomainError);
}

TEST_CASE("scalar integral: Lorentz invariance under random boosts") {
    std::mt19937 rng(2024u);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const FourVector seeds[] = {{1.3, 0.2, -0.1, 0.4},   // timelike-forward
                                {0.2, 1.1, -0.7, 0.3}};  // spacelike
    for (const FourVector& p : seeds) {
        const cplx base = pauli_jordan_I(p, 0.8);
        for (int k = 0; k < 10; ++k) {
            const double y = 2.0 * u(rng);
            const FourVector q =
                boost(p, y, u(rng) + 1.5, u(rng), u(rng));
            CHECK(rel_err(pauli_jordan_I(q, 0.8), base) < 1e-12);
        }
    }
}

TEST_CASE("spacelike small-|s| limit diverges like 4 pi / s") {
    const double s = -1e-6;
    const FourVector p{0.0, std::sqrt(-s), 0.0, 0.0};
    const cplx v = pauli_jordan_I(p, 1.0);
    CHECK(rel_err(v, cplx(4.0 * M_PI / s, 0.0)) < 1e-5);
}

TEST_CASE("cosh-integral oracle agrees with -i pi H2_0 in the lower plane") {
    std::mt19937 rng(7u);
    std::uniform_real_distribution<double> re(-2.0, 6.0);
    std::uniform_real_distribution<double> im(-3.0, -0.05);
    for (int k = 0; k < 20; ++k) {
        cplx z(re(rng), im(rng));
        if (std::abs(z) < 0.1) z += cplx(0.5, 0.0);
        const cplx got = oracle_cosh_integral(z);
        const cplx want = minus_i_pi_h20(z);
        CHECK(std::abs(got - want) <= 1e-8 * std::abs(want / M_PI));
    }
    // purely damped case from the interface contract
    const cplx z(0.0, -3.0);
    CHECK(rel_err(oracle_cosh_integral(z), minus_i_pi_h20(z)) < 1e-8);
}

TEST_CASE("cosh-integral oracle rejects the real axis") {
    CHECK_THROWS_AS(oracle_cosh_integral(cplx(1.0, 0.0)), DomainError);
    CHECK_THROWS_AS(oracle_cosh_integral(cplx(1.0, 0.5)), DomainError);
}

TEST_CASE("real-axis claim by Richardson extrapolation in the damping") {
    // values at Im z = -eps, eps in {0.1, 0.05, 0.025}, extrapolated to 0
    for (double x : {1.0, 2.5, 5.0}) {
        const cplx v1 = oracle_cosh_integral(cplx(x, -0.1));
        const cplx v2 = oracle_cosh_integral(cplx(x, -0.05));
        const cplx v3 = oracle_cosh_integral(cplx(x, -0.025));
        const cplx extrap = v1 / 3.0 - 2.0 * v2 + (8.0 / 3.0) * v3;
        // three-point polynomial extrapolation from eps = 0.1 leaves an
        // O(eps^3 f''') remainder of a few 1e-5; 1e-4 is the honest bound
        CHECK(rel_err(extrap, minus_i_pi_h20(cplx(x, 0.0))) < 1e-4);
    }
}

TEST_CASE("double integral closed form and its sign/kind flags") {
    const auto e1 = cylinder_eval(CylinderOrder(1), cplx(1.0, 0.0));
    const auto e2 = cylinder_eval(CylinderOrder(2), cplx(1.0, 0.0));
    const double pi4 = std::pow(M_PI, 4);

    // (m1 = m2 = 1, sign = +1, tau = 1) -> i 2 pi^4 H2_1(1) H2_2(1)
    const cplx want_p = cplx(0.0, 2.0 * pi4) * e1.h2 * e2.h2;
    CHECK(rel_err(integrated_D(1.0, 1.0, +1, 1.0), want_p) < 1e-12);

    // sign = -1 swaps the order-2 factor to first kind
    const cplx want_m = cplx(0.0, 2.0 * pi4) * e1.h2 * e2.h1;
    CHECK(rel_err(integrated_D(1.0, 1.0, -1, 1.0), want_m) < 1e-12);

    // negate_m1 swaps H2_1(m1 tau) -> -H1_1(m1 tau)
    const cplx want_n = cplx(0.0, 2.0 * pi4) * (-e1.h1) * e2.h2;
    CHECK(rel_err(integrated_D(1.0, 1.0, +1, 1.0, true), want_n) < 1e-12);

    CHECK_THROWS_AS(integrated_D(-1.0, 1.0, +1, 1.0), DomainError);
    CHECK_THROWS_AS(integrated_D(1.0, 1.0, 0, 1.0), DomainError);
    CHECK_THROWS_AS(integrated_D(1.0, 1.0, +1, -1.0), DomainError);
}

TEST_CASE("double integral vs factorized quadrature at damped masses") {
    // With masses carrying small negative imaginary parts both hyperboloid
    // factors converge absolutely:
    //   factor1 = 2 pi       int sinh^2(phi)           e^{-i m1 tau cosh} dphi
    //   factor2 = 4 pi tau^3 int sinh^2(phi) cosh(phi) e^{-i m2 tau cosh} dphi
    // and their product must reproduce the closed form.
    const cplx m1(1.0, -0.08);
    const cplx m2(1.2, -0.08);
    const double tau = 1.0;

    const double damp = 0.08 * tau;
    const double phi_max = std::acosh((std::log(1e14) + 5.0) / damp);

    const auto f1 = [&](double phi) {
        const double c = std::cosh(phi), s = std::sinh(phi);
        return s * s * std::exp(cplx(0.0, -1.0) * m1 * tau * c);
    };
    const auto f2 = [&](double phi) {
        const double c = std::cosh(phi), s = std::sinh(phi);
        return s * s * c * std::exp(cplx(0.0, -1.0) * m2 * tau * c);
    };
    const cplx factor1 = 2.0 * M_PI * adaptive_simpson(f1, 0.0, phi_max, 1e-9);
    const cplx factor2 = 4.0 * M_PI * tau * tau * tau *
                         adaptive_simpson(f2, 0.0, phi_max, 1e-9);

    // the inner velocity factor also has its own closed form
    const auto e1 = cylinder_eval(CylinderOrder(1), m1 * tau);
    const cplx inner = cplx(0.0, M_PI * M_PI) / (m1 * tau) * e1.h2;
    CHECK(rel_err(factor1, inner) < 1e-7);

    const cplx got = factor1 * factor2;
    const cplx want = integrated_D(m1, m2, +1, tau);
    CHECK(rel_err(got, want) < 1e-6);
}

TEST_CASE("vector integral: proportional to p with the closed coefficient") {
    const FourVector p{1.4, 0.3, -0.2, 0.5};
    const double s = p.invariant_square();
    const auto v = vector_I(p, 1.0);
    const cplx c = vector_I_coefficient(s, 1.0);
    CHECK(rel_err(v[0], c * p.p0) < 1e-14);
    CHECK(rel_err(v[1], c * p.p1) < 1e-14);
    CHECK(rel_err(v[2], c * p.p2) < 1e-14);
    CHECK(rel_err(v[3], c * p.p3) < 1e-14);

    // timelike rest frame, s = 1, tau = 1 -> 2 pi^2 p^mu H2_2(1)
    const auto e2 = cylinder_eval(CylinderOrder(2), cplx(1.0, 0.0));
    const auto w = vector_I(FourVector{1.0, 0.0, 0.0, 0.0}, 1.0);
    CHECK(rel_err(w[0], 2.0 * M_PI * M_PI * e2.h2) < 1e-12);

    CHECK_THROWS_AS(vector_I(FourVector{1.0, 1.0, 0.0, 0.0}, 1.0),
                    DomainError);
}

TEST_CASE("vector integral: i d/dp_mu of the scalar integral") {
    const FourVector p{1.3, 0.2, -0.1, 0.3};
    const auto v = vector_I(p, 1.0);
    const double h = 2e-4;
    double scale = 0.0;
    for (const auto& c : v) scale = std::max(scale, std::abs(c));
    // d/dp_mu (index down) = eta^{mu nu} d/dp^nu: sign flip on spatial legs
    const double metric[4] = {1.0, -1.0, -1.0, -1.0};
    double* comp[4] = {nullptr};
    for (int mu = 0; mu < 4; ++mu) {
        FourVector pp = p, pm = p;
        double FourVector::* members[4] = {&FourVector::p0, &FourVector::p1,
                                           &FourVector::p2, &FourVector::p3};
        pp.*members[mu] += h;
        pm.*members[mu] -= h;
        const cplx deriv =
            (pauli_jordan_I(pp, 1.0) - pauli_jordan_I(pm, 1.0)) / (2.0 * h);
        const cplx got = cplx(0.0, 1.0) * metric[mu] * deriv;
        CHECK(std::abs(got - v[mu]) < 1e-6 * scale);
    }
    (void)comp;
}

TEST_CASE("orthogonality and two-term cancellation bookkeeping") {
    std::mt19937 rng(99u);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    const double m = 0.5;
    for (int k = 0; k < 25; ++k) {
        const VelocityVector qa{u(rng), u(rng), u(rng)};
        const VelocityVector qb{u(rng), u(rng), u(rng)};
        const FourVector P = (qa.four_vector() + qb.four_vector()) * m;
        const FourVector sp = (qa.four_vector() - qb.four_vector()) * m;

        // P and sp are Minkowski-orthogonal by construction
        CHECK(std::abs(minkowski_dot(P, sp)) <
              1e-12 * std::sqrt(P.euclidean_square() * sp.euclidean_square() +
                                1e-300));

        // P^mu (P . I(P)) - sp^mu (sp . I(P)) - (P.P) I^mu(P) = 0
        const double s = P.invariant_square();
        const cplx c = vector_I_coefficient(s, 1.0);
        const double Pcomp[4] = {P.p0, P.p1, P.p2, P.p3};
        const double spcomp[4] = {sp.p0, sp.p1, sp.p2, sp.p3};
        const cplx PdotI = c * s;                        // P . (c P)
        const cplx spdotI = c * minkowski_dot(sp, P);    // sp . (c P)
        const auto I = vector_I(P, 1.0);
        const double ref = std::abs(c) * std::abs(s) *
                           std::sqrt(P.euclidean_square());
        for (int mu = 0; mu < 4; ++mu) {
            const cplx combo =
                Pcomp[mu] * PdotI - spcomp[mu] * spdotI - s * I[mu];
            CHECK(std::abs(combo) < 1e-10 * ref);
        }
    }
}

TEST_CASE("symbolic delta supplement records the frame coefficient") {
    const FourVector P{2.0, 0.0, 0.0, 0.0};
    const auto tag = vector_I_delta_supplement(P);
    CHECK(tag.prefactor ==
          doctest::Approx(8.0 * std::pow(M_PI, 3) * 2.0).epsilon(1e-15));
    CHECK(std::string(tag.support) == "delta^3(sp_vec)");
}

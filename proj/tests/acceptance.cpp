// Acceptance gate: one pass/fail line per criterion, exit code = number of
// failed criteria.  Each criterion re-derives its own reference values; the
// library is only trusted where an independent oracle or closed form backs
// it up.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracle_cylinder.hpp"
#include "pointform/cylinder.hpp"
#include "pointform/hyperboloid.hpp"
#include "pointform/model.hpp"
#include "pointform/quadrature.hpp"
#include "pointform/resonance.hpp"
#include "pointform/semigroup.hpp"
#include "pointform/vacuum.hpp"

using namespace pointform;
namespace fs = std::filesystem;

namespace {

double rel(cplx got, cplx want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

ModelParams defaults() { return ModelParams{}; }

SelfEnergy make_engine(double beta) {
    ModelParams p = defaults();
    p.beta = beta;
    return SelfEnergy(p, MassQuadrature::build(p));
}

struct Criterion {
    bool pass = true;
    std::string detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
    void note(const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

// 1. cylinder_eval vs the extended-precision oracle, 200 points
Criterion criterion1() {
    Criterion c;
    double worst = 0.0;
    int count = 0;
    // H1/H2 are certified to full relative accuracy; J and N are certified
    // relative to the dominant member of the pair (an isolated real-axis
    // zero of J or N cannot carry its own relative error budget).
    auto probe = [&](cplx z) {
        for (int order : {0, 1, 2}) {
            const CylinderEval got = cylinder_eval(CylinderOrder(order), z);
            const oracle::Quad want = oracle::eval(order, z);
            const double pair_mag =
                std::max(std::abs(want.j), std::abs(want.n));
            worst = std::max({worst, rel(got.h1, want.h1),
                              rel(got.h2, want.h2),
                              std::abs(got.j - want.j) / pair_mag,
                              std::abs(got.n - want.n) / pair_mag});
        }
        ++count;
    };
    for (int k = 0; k < 100; ++k) {
        const double r = 0.1 * std::pow(1000.0, k / 99.0);   // 0.1 .. 100
        probe(cplx(r, 0.0));
    }
    // complex probes stay inside the certified band |Im z| <= 2.5 (outside
    // it cylinder_eval refuses with AccuracyError by design)
    for (int k = 0; k < 100; ++k) {
        const double r = 0.1 * std::pow(1000.0, k / 99.0);
        double im = -2.5 + 5.0 * ((k * 37) % 100) / 99.0;
        if (std::abs(im) > 0.8 * r) im = std::copysign(0.8 * r, im);
        const double re = std::sqrt(std::max(r * r - im * im, 1e-8));
        probe(cplx(re, im));
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "max_rel=%.3e on %d points", worst, count);
    c.note(buf);
    c.require(worst < 1e-10, "relative error above 1e-10");
    return c;
}

// 2. closed forms for the hyperboloid integrals
Criterion criterion2() {
    Criterion c;
    // cosh integral vs -i pi H2_0(z), 20 lower-half points
    double worst_cosh = 0.0;
    for (int k = 0; k < 20; ++k) {
        const cplx z(0.3 + 0.17 * k, -0.15 - 0.08 * k);
        const cplx want =
            cplx(0.0, -M_PI) * cylinder_eval(CylinderOrder(0), z).h2;
        worst_cosh = std::max(worst_cosh, rel(oracle_cosh_integral(z), want));
    }
    c.require(worst_cosh < 1e-8, "cosh integral vs -i pi H2_0");

    // integrated_D vs the factorized quadrature at 5 damped mass pairs
    double worst_d = 0.0;
    const double tau = 1.0;
    const struct { double m1, m2, d; int sign; } pts[5] = {
        {1.0, 1.2, 0.08, +1}, {0.7, 1.5, 0.10, +1}, {1.3, 0.9, 0.09, -1},
        {0.8, 0.8, 0.12, +1}, {1.6, 1.1, 0.10, -1}};
    for (const auto& pt : pts) {
        const cplx m1(pt.m1, -pt.d), m2(pt.m2, -pt.d);
        const double phi_max =
            std::acosh((std::log(1e14) + 5.0) / (pt.d * tau));
        const auto f1 = [&](double phi) {
            const double ch = std::cosh(phi), sh = std::sinh(phi);
            return sh * sh * std::exp(cplx(0.0, -1.0) * m1 * tau * ch);
        };
        const cplx sign_m2 = (pt.sign == 1) ? m2 : std::conj(m2);
        const auto f2 = [&](double phi) {
            const double ch = std::cosh(phi), sh = std::sinh(phi);
            // sign = -1 flips the exponent to e^{+i m2* tau cosh}
            const cplx ex = (pt.sign == 1)
                                ? std::exp(cplx(0.0, -1.0) * m2 * tau * ch)
                                : std::exp(cplx(0.0, 1.0) * std::conj(m2) *
                                           tau * ch);
            return sh * sh * ch * ex;
        };
        (void)sign_m2;
        const cplx factor1 =
            2.0 * M_PI * adaptive_simpson(f1, 0.0, phi_max, 1e-9);
        const cplx factor2 = 4.0 * M_PI * tau * tau * tau *
                             adaptive_simpson(f2, 0.0, phi_max, 1e-9);
        const cplx want = (pt.sign == 1)
                              ? integrated_D(m1, m2, +1, tau)
                              : integrated_D(m1, std::conj(m2), -1, tau);
        worst_d = std::max(worst_d, rel(factor1 * factor2, want));
    }
    c.require(worst_d < 1e-6, "integrated_D vs factorized quadrature");

    // orthogonal two-term cancellation, 50 random velocity pairs
    std::mt19937 rng(424242u);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    double worst_canc = 0.0;
    for (int k = 0; k < 50; ++k) {
        const VelocityVector qa{u(rng), u(rng), u(rng)};
        const VelocityVector qb{u(rng), u(rng), u(rng)};
        const double mm = 0.5;
        const FourVector P = (qa.four_vector() + qb.four_vector()) * mm;
        const FourVector sp = (qa.four_vector() - qb.four_vector()) * mm;
        const double s = P.invariant_square();
        const cplx coeff = vector_I_coefficient(s, 1.0);
        const auto I = vector_I(P, 1.0);
        const cplx PdotI = coeff * s;
        const cplx spdotI = coeff * minkowski_dot(sp, P);
        const double Pc[4] = {P.p0, P.p1, P.p2, P.p3};
        const double sc[4] = {sp.p0, sp.p1, sp.p2, sp.p3};
        const double ref =
            std::abs(coeff) * std::abs(s) * std::sqrt(P.euclidean_square());
        for (int mu = 0; mu < 4; ++mu) {
            const cplx combo = Pc[mu] * PdotI - sc[mu] * spdotI - s * I[mu];
            worst_canc = std::max(worst_canc, std::abs(combo) / ref);
        }
    }
    c.require(worst_canc < 1e-10, "two-term cancellation identity");
    char buf[160];
    std::snprintf(buf, sizeof buf, "cosh=%.1e D=%.1e cancel=%.1e", worst_cosh,
                  worst_d, worst_canc);
    c.note(buf);
    return c;
}

// 3. boundary values, continuation, jump identity, discontinuity oracle
Criterion criterion3() {
    Criterion c;
    const SelfEnergy se = make_engine(0.1);
    auto rich4 = [](cplx v1, cplx v2, cplx v3, cplx v4) {
        auto r3 = [](cplx a, cplx b, cplx x) {
            return (8.0 * x - 6.0 * b + a) / 3.0;
        };
        const cplx a = r3(v1, v2, v3), b = r3(v2, v3, v4);
        return (16.0 * b - a) / 15.0;
    };
    double worst_rich = 0.0;
    for (double s : {0.5, 0.9, 1.2, 1.8, 3.0}) {
        for (int side : {+1, -1}) {
            const cplx v1 = se.pi(
                SheetPoint(cplx(s, side * 1e-2), SheetLocation::OffAxis));
            const cplx v2 = se.pi(
                SheetPoint(cplx(s, side * 5e-3), SheetLocation::OffAxis));
            const cplx v3 = se.pi(
                SheetPoint(cplx(s, side * 2.5e-3), SheetLocation::OffAxis));
            const cplx v4 = se.pi(
                SheetPoint(cplx(s, side * 1.25e-3), SheetLocation::OffAxis));
            const SheetLocation loc = (side == 1)
                                          ? SheetLocation::UpperBoundary
                                          : SheetLocation::LowerBoundary;
            const cplx bnd = se.pi(SheetPoint(cplx(s, 0.0), loc));
            worst_rich =
                std::max(worst_rich, std::abs(rich4(v1, v2, v3, v4) - bnd));
        }
    }
    c.require(worst_rich < 1e-7, "Richardson eps->0 limit of Pi");

    double worst_sheet = 0.0, worst_jump = 0.0, worst_disc = 0.0;
    for (int k = 0; k < 10; ++k) {
        const double s = 0.35 + 0.45 * k;
        const cplx gp =
            green(se, SheetPoint(cplx(s, 0.0), SheetLocation::UpperBoundary));
        const cplx gm =
            green(se, SheetPoint(cplx(s, 0.0), SheetLocation::LowerBoundary));
        const cplx g2 =
            green(se, SheetPoint(cplx(s, -1e-10), SheetLocation::SecondSheet));
        worst_sheet = std::max(worst_sheet, rel(g2, gp));
        worst_jump =
            std::max(worst_jump, rel(gp - gm, se.disc(cplx(s, 0.0)) * gp * gm));
        const cplx up = se.pi(
            SheetPoint(cplx(s, 0.0), SheetLocation::UpperBoundary));
        const cplx lo = se.pi(
            SheetPoint(cplx(s, 0.0), SheetLocation::LowerBoundary));
        worst_disc = std::max(worst_disc, rel(up - lo, se.disc(cplx(s, 0.0))));
    }
    c.require(worst_sheet < 1e-6, "G^II below the cut vs G_+");
    c.require(worst_jump < 1e-6, "jump identity");
    c.require(worst_disc < 1e-6, "disc Pi vs boundary-difference oracle");
    char buf[160];
    std::snprintf(buf, sizeof buf, "rich=%.1e sheet=%.1e jump=%.1e disc=%.1e",
                  worst_rich, worst_sheet, worst_jump, worst_disc);
    c.note(buf);
    return c;
}

// 4. pole physics
Criterion criterion4() {
    Criterion c;
    const SelfEnergy se = make_engine(0.1);
    const cplx seeds[5] = {{1.0, -0.05}, {0.95, -0.02}, {1.1, -0.08},
                           {1.03, -0.001}, {0.9, -0.1}};
    PoleResult first = find_pole(se, seeds[0]);
    double spread = 0.0;
    for (int k = 1; k < 5; ++k)
        spread = std::max(spread,
                          std::abs(find_pole(se, seeds[k]).s_R - first.s_R));
    c.require(spread < 1e-9, "seed spread");
    c.require(first.s_R.imag() < 0.0, "Im s_R < 0");

    const SelfEnergy se_half = make_engine(0.05);
    const PoleResult half = find_pole(se_half, weak_pole(se_half));
    const double gamma_ratio = first.Gamma_R / half.Gamma_R;
    c.require(gamma_ratio > 3.8 && gamma_ratio < 4.2, "Gamma beta^2 law");

    const double d1 = std::abs(first.s_R - weak_pole(se));
    const double d2 = std::abs(half.s_R - weak_pole(se_half));
    const double quartic = d1 / d2;
    c.require(quartic > 12.0 && quartic < 20.0, "beta^4 weak-pole gap law");

    // residue cross-check: 1/F'(s_R) with F = s - M^2 - Pi^II by central
    // finite differences
    const double h = 1e-6;
    const cplx fp = (inverse_green_second(se, first.s_R + h) -
                     inverse_green_second(se, first.s_R - h)) /
                    (2.0 * h);
    c.require(rel(first.residue, 1.0 / fp) < 1e-6,
              "residue vs finite-difference derivative");
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "s_R=%.12f%+.12fi spread=%.1e G2=%.2f G4=%.1f res=%.1e",
                  first.s_R.real(), first.s_R.imag(), spread, gamma_ratio,
                  quartic, rel(first.residue, 1.0 / fp));
    c.note(buf);
    return c;
}

// 5. Gamow decay law, lifetime, width conventions
Criterion criterion5() {
    Criterion c;
    const SelfEnergy se = make_engine(0.1);
    const PoleResult pole = find_pole(se, weak_pole(se));
    for (double q0 : {1.0, 2.0}) {
        const double q3 = std::sqrt(q0 * q0 - 1.0);
        const GamowState state(pole.s_R, VelocityVector{0.0, 0.0, q3});
        double worst = 0.0;
        for (int k = 0; k <= 40; ++k) {
            const double t = k * pole.lifetime / 5.0;
            const double surv = std::norm(gamow_amplitude(state, t));
            worst = std::max(
                worst, std::abs(surv - std::exp(-pole.Gamma_R * q0 * t)) /
                           std::exp(-pole.Gamma_R * q0 * t));
        }
        c.require(worst < 1e-12, "survival not exponential");
        // fitted rate from the exact log-slope
        const double t1 = pole.lifetime, t2 = 3.0 * pole.lifetime;
        const double s1 = std::norm(gamow_amplitude(state, t1));
        const double s2 = std::norm(gamow_amplitude(state, t2));
        const double rate = -(std::log(s2) - std::log(s1)) / (t2 - t1);
        c.require(std::abs(rate - pole.Gamma_R * q0) <
                      1e-12 * pole.Gamma_R * q0,
                  "fitted rate vs Gamma_R q0");
    }
    c.require(std::abs(pole.lifetime * pole.Gamma_R - 1.0) < 1e-15,
              "tau_R Gamma_R = 1");

    // width-convention gap: positive and quadratic in Gamma_R / M_R
    std::vector<double> coeffs;
    for (double beta : {0.05, 0.1, 0.2}) {
        const SelfEnergy seb = make_engine(beta);
        const PoleResult pb = find_pole(seb, weak_pole(seb));
        const double gap = width_convention_gap(pb);
        c.require(gap > 0.0, "width_convention_gap > 0");
        const double x = pb.Gamma_R / pb.M_R;
        coeffs.push_back(gap / (x * x));
    }
    const double cmin = *std::min_element(coeffs.begin(), coeffs.end());
    const double cmax = *std::max_element(coeffs.begin(), coeffs.end());
    c.require(cmax / cmin < 1.3,
              "gap / (Gamma/M)^2 not constant across beta");
    char buf[120];
    std::snprintf(buf, sizeof buf, "gap/(G/M)^2 in [%.4f, %.4f]", cmin, cmax);
    c.note(buf);
    return c;
}

// 6. causal semigroup
Criterion criterion6() {
    Criterion c;
    std::mt19937 rng(1905u);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    auto random_causal = [&]() {
        PoincareElement g = PoincareElement::boost(
            {0.7 * u(rng), 0.7 * u(rng), 0.7 * u(rng)});
        g = compose(g, PoincareElement::rotation_about(
                           {u(rng), u(rng), u(rng) + 2.0}, M_PI * u(rng)));
        const double a0 = 2.0 * u01(rng);
        const double r = a0 * u01(rng);
        const double cth = u(rng), ph = 2.0 * M_PI * u01(rng);
        const double sth = std::sqrt(std::max(0.0, 1.0 - cth * cth));
        g.a = {a0, r * sth * std::cos(ph), r * sth * std::sin(ph), r * cth};
        return g;
    };
    int closure_failures = 0;
    for (int k = 0; k < 1000; ++k)
        if (!in_causal_semigroup(compose(random_causal(), random_causal())))
            ++closure_failures;
    c.require(closure_failures == 0, "cone closure");

    // composition law on a smooth wave grid, plus branch
    WaveGrid wg;
    for (double x = -3.0; x <= 3.0 + 0.0025; x += 0.005) wg.chi.push_back(x);
    wg.s = {0.3, 0.6, 1.0};
    wg.psi.resize(wg.chi.size());
    for (size_t j = 0; j < wg.chi.size(); ++j) {
        wg.psi[j].resize(wg.s.size());
        for (size_t k = 0; k < wg.s.size(); ++k) {
            const double x = wg.chi[j];
            wg.psi[j][k] = std::exp(cplx(-x * x, 0.8 * x)) *
                           std::exp(cplx(0.0, -0.5 * wg.s[k]));
        }
    }
    PoincareElement g1 = PoincareElement::boost({0.0, 0.0, 0.21});
    g1.a = {0.8, 0.0, 0.0, 0.3};
    PoincareElement g2 = PoincareElement::boost({0.0, 0.0, -0.13});
    g2.a = {1.1, 0.0, 0.0, -0.2};
    const WaveGrid two = act(act(wg, g1, +1), g2, +1);
    const WaveGrid one = act(wg, compose(g2, g1), +1);
    double comp = 0.0;
    {
        size_t i = 0;
        for (size_t j = 0; j < two.chi.size(); ++j) {
            while (i < one.chi.size() && one.chi[i] < two.chi[j]) ++i;
            if (i >= one.chi.size() || one.chi[i] != two.chi[j]) continue;
            for (size_t k = 0; k < two.s.size(); ++k)
                comp = std::max(comp,
                                std::abs(one.psi[i][k] - two.psi[j][k]));
        }
    }
    c.require(comp < 1e-9, "composition law on the wave grid");

    // inverse exclusion
    PoincareElement fwd = PoincareElement::translation({2.0, 0.3, 0.0, 0.4});
    PoincareElement inv;
    inv.a = fwd.a * -1.0;
    c.require(in_causal_semigroup(fwd) && !in_causal_semigroup(inv),
              "inverse-exclusion witness");

    // Gamow phase modulus over 100 random causal elements
    const SelfEnergy se = make_engine(0.1);
    const PoleResult pole = find_pole(se, weak_pole(se));
    GamowState state(pole.s_R, VelocityVector{0.1, -0.2, 0.3});
    double growth = 0.0;
    for (int k = 0; k < 100; ++k)
        growth = std::max(
            growth,
            std::abs(gamow_transform(state, random_causal()).phase) - 1.0);
    c.require(growth <= 1e-12, "Gamow phase modulus <= 1");
    char buf[120];
    std::snprintf(buf, sizeof buf, "comp=%.1e growth=%.1e", comp, growth);
    c.note(buf);
    return c;
}

// 7. vacuum integral equations
Criterion criterion7() {
    Criterion c;
    const ModelParams p = defaults();
    const SelfEnergy se(p, MassQuadrature::build(p));

    const VacuumGrid fine = VacuumGrid::build(p, 40, 12);
    const F2Solution f2 = solve_f2(se, fine);
    const VacuumKernels k = solve_f3(se, fine, f2);
    c.require(k.residual_f2 < 1e-6, "f2 residual at the converged grid");
    c.require(k.residual_f3 < 1e-6, "f3 residual at the converged grid");

    const VacuumGrid coarse = VacuumGrid::build(p, 20, 8);
    const F2Solution f2c = solve_f2(se, coarse, 0.0, -1, 1.0);
    const VacuumKernels kc = solve_f3(se, coarse, f2c, 1.0);
    c.require(kc.residual_f2 > 10.0 * k.residual_f2,
              "f2 residual decreasing under refinement");
    c.require(kc.residual_f3 > 10.0 * k.residual_f3,
              "f3 residual decreasing under refinement");

    ModelParams p0 = p;
    p0.beta = 0.0;
    const SelfEnergy se0(p0, MassQuadrature::build(p0));
    const VacuumGrid grid0 = VacuumGrid::build(p0, 14, 8);
    const F2Solution f20 = solve_f2(se0, grid0);
    const VacuumKernels k0 = solve_f3(se0, grid0, f20);
    double free_norm = 0.0;
    for (const cplx& v : k0.f2) free_norm = std::max(free_norm, std::abs(v));
    free_norm = std::max(free_norm, k0.f3.cwiseAbs().maxCoeff());
    c.require(free_norm == 0.0, "beta = 0 kernels identically zero");

    // plus-branch residual, reported (not gated)
    const F2Solution f2p = solve_f2(se, fine, 0.0, +1);
    const VacuumKernels kp = solve_f3(se, fine, f2p);
    char buf[240];
    std::snprintf(buf, sizeof buf,
                  "f2=%.2e f3=%.2e coarse=(%.2e, %.2e) plus=(%.2e, %.2e) "
                  "asym=%.2e",
                  k.residual_f2, k.residual_f3, kc.residual_f2,
                  kc.residual_f3, kp.residual_f2, kp.residual_f3, k.asymmetry);
    c.note(buf);
    return c;
}

// 8. Cauchy closure of the second-sheet S-matrix
Criterion criterion8() {
    Criterion c;
    const SelfEnergy se = make_engine(0.1);
    const PoleResult pole = find_pole(se, weak_pole(se));
    RectContour around{pole.s_R.real() - 0.15, pole.s_R.real() + 0.15,
                       pole.s_R.imag() - 0.06, pole.s_R.imag() + 0.015, 96};
    const double one_pole =
        contour_closure_check(se, around, [](cplx) { return cplx(1.0); });
    c.require(one_pole < 1e-6, "one-pole contour closure");
    RectContour empty{1.6, 2.2, -0.25, -0.05, 96};
    const double none =
        contour_closure_check(se, empty, [](cplx) { return cplx(1.0); });
    c.require(none < 1e-8, "empty contour closure");
    char buf[100];
    std::snprintf(buf, sizeof buf, "pole=%.1e empty=%.1e", one_pole, none);
    c.note(buf);
    return c;
}

// 9. byte-identical verify runs through the CLI
Criterion criterion9() {
    Criterion c;
    const fs::path dir = fs::temp_directory_path() / "pointform_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path cfg = dir / "config.json";
    std::ofstream(cfg) << "{\"output\": {\"scan_count\": 20}}\n";
    std::string reports[2];
    for (int k = 0; k < 2; ++k) {
        const fs::path out = dir / ("run" + std::to_string(k));
        const std::string cmd = std::string(POINTFORM_CLI_PATH) +
                                " verify --config " + cfg.string() + " --out " +
                                out.string() + " > /dev/null 2>&1";
        c.require(std::system(cmd.c_str()) == 0, "verify run exited nonzero");
        std::ifstream in(out / "verify.json", std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        reports[k] = ss.str();
    }
    c.require(!reports[0].empty() && reports[0] == reports[1],
              "verify reports differ between runs");
    c.note("reports " + std::to_string(reports[0].size()) + " bytes");
    return c;
}

}  // namespace

int main() {
    const struct {
        const char* name;
        Criterion (*run)();
        double limit_s;
    } table[] = {
        {"special-function fidelity", criterion1, 5.0},
        {"hyperboloid closed forms", criterion2, 30.0},
        {"boundary/continuation structure", criterion3, 60.0},
        {"pole physics", criterion4, 120.0},
        {"Gamow decay and lifetime", criterion5, 10.0},
        {"causal semigroup", criterion6, 10.0},
        {"vacuum integral equations", criterion7, 300.0},
        {"contour closure", criterion8, 60.0},
        {"determinism", criterion9, 60.0},
    };
    int failures = 0;
    int index = 0;
    for (const auto& entry : table) {
        ++index;
        const auto t0 = std::chrono::steady_clock::now();
        Criterion c;
        try {
            c = entry.run();
        } catch (const std::exception& e) {
            c.pass = false;
            c.note(std::string("exception: ") + e.what());
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          t0)
                .count();
        if (secs > entry.limit_s) {
            c.pass = false;
            c.note("over time budget");
        }
        if (!c.pass) ++failures;
        std::printf("criterion %d (%s): %s  [%.1fs]  %s\n", index, entry.name,
                    c.pass ? "PASS" : "FAIL", secs, c.detail.c_str());
        std::fflush(stdout);
    }
    if (failures)
        std::printf("acceptance: %d criterion(s) failed\n", failures);
    else
        std::printf("acceptance: all 9 criteria passed\n");
    return failures;
}

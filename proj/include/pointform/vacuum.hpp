#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "pointform/errors.hpp"
#include "pointform/model.hpp"
#include "pointform/quadrature.hpp"

// Physical-vacuum kernel equations.  The dressing operator that maps the
// Fock vacuum to the interacting vacuum is fixed by two singular integral
// equations for a one-variable kernel f2 and a symmetric two-variable
// kernel f3, driven by the conjugated scattering coefficients:
//
//   r*(s) + 2A t*(s) + int dk' T*(s, k') f2(k')                    = 0
//   R*(s, k) + 2 int dk' T*(s, k') f3(k, k') + t*(s) f2(k)         = 0
//
// with k-integrals over the full line (integrands even in k, so they reduce
// to twice the half-line integral; the mass measure restricted to the half
// line is exactly dk'), the delta part of T contributing the on-shell value
// with jacobian sqrt(s) / (4 m^2 k0), and the 1/(sqrt(s) - m(k')) pole read
// as a pure principal value with the contact constant C as the local
// multiplier.  Discretization is Nystrom collocation: unknowns live on
// a Gauss-Legendre panel rule in k, equations are imposed at per-panel
// Chebyshev points (never coinciding with quadrature nodes), and the PV is
// handled by subtracting the pole value against the closed form
// PV int_0^K dk'/(k0^2 - k'^2) = ln((K + k0)/(K - k0)) / (2 k0).
// The constant A is a configuration input (default 0); the equations are
// solved for f2 first, then row-wise for f3, which is affine in f3 once f2
// is known.

namespace pointform {

// Quadrature nodes for the unknowns plus disjoint collocation points.
// Panels are non-uniform: the scattering coefficients carry the resonant
// Green's function, which varies on the width scale Gamma near s = M^2, so
// the mesh is graded to panels of that width around the on-shell resonance
// rapidity and stays coarse elsewhere.
struct VacuumGrid {
    double kappa_max = 0.0;
    int points = 0;
    std::vector<double> edges;     // panel boundaries, edges.front() = 0
    std::vector<double> nodes;     // panel Gauss-Legendre rule on [0, K]
    std::vector<double> weights;
    std::vector<double> coll;      // per-panel Chebyshev collocation points

    int panels() const { return static_cast<int>(edges.size()) - 1; }

    // Same kappa_max as the self-energy quadrature (form-factor envelope
    // below 1e-16), so every on-shell collocation point stays inside the
    // range where the boundary Green's function is defined.
    static VacuumGrid build(const ModelParams& params, int base_panels = 40,
                            int points = 12, double grade_factor = 1.0) {
        params.validate();
        if (base_panels < 2 || points < 4)
            throw DomainError("VacuumGrid: need >= 2 panels of >= 4 points");
        VacuumGrid g;
        const double mu_max =
            params.form_factor.cutoff * std::sqrt(16.0 * std::log(10.0));
        const double ratio = mu_max / (2.0 * params.m);
        g.kappa_max = std::sqrt(std::max(ratio * ratio - 1.0, 1.0));
        g.points = points;
        for (int p = 0; p <= base_panels; ++p)
            g.edges.push_back(g.kappa_max * p / base_panels);

        // resonance grading: leading-order width of the resonant
        // denominator at s = M^2, converted to a rapidity scale
        const double M = params.M, m = params.m, beta = params.beta;
        if (beta > 0.0 && M > 2.0 * m) {
            const cplx hMM =
                script_h(CylinderOrder(1), CylinderOrder(2),
                         cplx(M * params.tau, 0.0), cplx(M * params.tau, 0.0));
            const cplx aM = alpha(params, cplx(M, 0.0));
            const double width_s = std::pow(M_PI, 3) * beta * beta / 32.0 *
                                   std::abs(hMM) * std::abs(hMM) *
                                   std::norm(aM) /
                                   (2.0 * m * std::sqrt(M * M - 4.0 * m * m));
            const double chi_res =
                std::sqrt(M * M / (4.0 * m * m) - 1.0);
            const double dsdchi = 4.0 * m * m * chi_res;
            const double base = width_s / std::max(dsdchi, 1e-6);
            const double target =
                std::max(base / 8.0 * grade_factor, 1e-4);
            // geometric cascade: each level halves the panel width on a
            // window proportional to its own scale, so the mesh grades
            // smoothly into the resonance instead of jumping coarse-to-fine
            for (double w = base; w > target; w *= 0.5)
                g.refine(chi_res - 12.0 * w, chi_res + 12.0 * w, w);
            g.refine(chi_res - 12.0 * target, chi_res + 12.0 * target,
                     target);
        }
        g.fill_nodes();
        return g;
    }

    // Splits every panel overlapping [lo, hi] until its width is <= target.
    void refine(double lo, double hi, double target) {
        bool changed = true;
        while (changed) {
            changed = false;
            std::vector<double> next;
            next.push_back(edges.front());
            for (size_t p = 0; p + 1 < edges.size(); ++p) {
                const double a = edges[p], b = edges[p + 1];
                if (b > lo && a < hi && (b - a) > target) {
                    next.push_back(0.5 * (a + b));
                    changed = true;
                }
                next.push_back(b);
            }
            edges.swap(next);
        }
        if (!nodes.empty()) fill_nodes();
    }

    // Every panel split in two: the refined companion used for disjoint
    // residual evaluation.
    VacuumGrid refined() const {
        VacuumGrid g;
        g.kappa_max = kappa_max;
        g.points = points;
        for (size_t p = 0; p + 1 < edges.size(); ++p) {
            g.edges.push_back(edges[p]);
            g.edges.push_back(0.5 * (edges[p] + edges[p + 1]));
        }
        g.edges.push_back(edges.back());
        g.fill_nodes();
        return g;
    }

    void fill_nodes() {
        nodes.clear();
        weights.clear();
        coll.clear();
        std::vector<double> xr, wr;
        detail::gauss_legendre_reference(points, xr, wr);
        for (size_t p = 0; p + 1 < edges.size(); ++p) {
            const double lo = edges[p], half = 0.5 * (edges[p + 1] - edges[p]);
            for (int i = 0; i < points; ++i) {
                nodes.push_back(lo + half * (xr[i] + 1.0));
                weights.push_back(half * wr[i]);
            }
            const double mid = lo + half;
            for (int k = points - 1; k >= 0; --k)
                coll.push_back(mid + half * std::cos((2.0 * k + 1.0) * M_PI /
                                                     (2.0 * points)));
        }
    }

    int panel_of(double x) const {
        const auto it = std::upper_bound(edges.begin(), edges.end(), x);
        int p = static_cast<int>(it - edges.begin()) - 1;
        if (p < 0) p = 0;
        if (p >= panels()) p = panels() - 1;
        return p;
    }

    // Lagrange interpolation stencil of the panel containing x: global node
    // indices and barycentric-free polynomial weights.
    void interp_stencil(double x, std::vector<int>& idx,
                        std::vector<double>& wt) const {
        if (x < 0.0 || x > kappa_max)
            throw DomainError("VacuumGrid: interpolation point off the grid");
        const int p = panel_of(x);
        idx.resize(points);
        wt.resize(points);
        for (int a = 0; a < points; ++a) {
            const int ga = p * points + a;
            idx[a] = ga;
            double w = 1.0;
            for (int b = 0; b < points; ++b) {
                if (b == a) continue;
                const int gb = p * points + b;
                w *= (x - nodes[gb]) / (nodes[ga] - nodes[gb]);
            }
            wt[a] = w;
        }
    }

    cplx interp(const std::vector<cplx>& samples, double x) const {
        std::vector<int> idx;
        std::vector<double> wt;
        interp_stencil(x, idx, wt);
        cplx sum = 0.0;
        for (int a = 0; a < points; ++a) sum += wt[a] * samples[idx[a]];
        return sum;
    }
};

namespace detail {

// Per-quadrature-node form-factor and cylinder data, independent of s.
struct VacuumNodeCache {
    std::vector<double> mu;
    std::vector<cplx> alpha_h1;   // alpha(mu) H1_1(mu tau)
    std::vector<cplx> alpha_h2;   // alpha(mu) H2_1(mu tau)
};

inline VacuumNodeCache vacuum_node_cache(const ModelParams& params,
                                         const std::vector<double>& kappas) {
    VacuumNodeCache c;
    c.mu.reserve(kappas.size());
    for (double k : kappas) {
        const double mu = params.mass_of_kappa(k);
        const cplx a = alpha(params, cplx(mu, 0.0));
        const auto e = cylinder_eval(CylinderOrder(1), cplx(mu * params.tau, 0.0));
        c.mu.push_back(mu);
        c.alpha_h1.push_back(a * e.h1);
        c.alpha_h2.push_back(a * e.h2);
    }
    return c;
}

// s-dependent pieces of one collocation row.
struct VacuumRowData {
    double chi;          // on-shell kappa of the collocation point
    double s, rs;
    double jac;          // half-line delta jacobian sqrt(s)/(4 m^2 chi)
    cplx kpref;          // (i pi beta / 8) H_M rho G_b of the T/R kernels
    cplx t, r, C;
};

inline VacuumRowData vacuum_row_data(const SelfEnergy& se, double chi,
                                     int branch) {
    const ModelParams& p = se.params();
    VacuumRowData d;
    d.chi = chi;
    d.rs = p.mass_of_kappa(chi);
    d.s = d.rs * d.rs;
    d.jac = d.rs / (4.0 * p.m * p.m * chi);
    const CoefficientSet cs = coefficients(se, d.s, branch);
    d.t = cs.t;
    d.r = cs.r;
    d.C = cs.C;
    const SheetLocation loc = (branch == 1) ? SheetLocation::UpperBoundary
                                            : SheetLocation::LowerBoundary;
    const cplx hM = script_h(CylinderOrder(1), CylinderOrder(2),
                             cplx(d.rs * p.tau, 0.0), cplx(p.M * p.tau, 0.0));
    d.kpref = cplx(0.0, M_PI * p.beta / 8.0) * hM * rho(p, d.s) *
              green(se, SheetPoint(cplx(d.s, 0.0), loc));
    return d;
}

// Smooth numerator of the PV kernel.  The mass measure expressed in the
// rapidity variable is exactly dk' on the half line, so as a k'-integrand
// conj(T_regular) = c(k') / (chi^2 - k'^2) with
//   c(k') = conj(kpref alpha(mu') H1_1(mu' tau)) (rs + mu') / (4 m^2),
// using rs^2 - mu'^2 = 4 m^2 (chi^2 - k'^2) to factor the pole exactly.
inline cplx pv_numerator(const VacuumRowData& d, double kappa, cplx alpha_h1,
                         double mu) {
    (void)kappa;
    // jac * chi / rs == 1 / (4 m^2)
    return std::conj(d.kpref * alpha_h1) * (d.rs + mu) * d.jac * d.chi / d.rs;
}

// Closed-form PV of the bare pole over [0, K].
inline double pv_log(double chi, double K) {
    return std::log((K + chi) / (K - chi)) / (2.0 * chi);
}

}  // namespace detail

// The discretized integral operator  f |-> int_R dk' T*(s, k') f(k')
// acting on node samples, one row per collocation point; also returns the
// inhomogeneity pieces per row.
struct VacuumSystem {
    Eigen::MatrixXcd B;            // operator matrix (N x N)
    std::vector<detail::VacuumRowData> rows;
};

inline VacuumSystem assemble_vacuum_system(const SelfEnergy& se,
                                           const VacuumGrid& grid,
                                           int branch) {
    const ModelParams& p = se.params();
    const detail::VacuumNodeCache cache =
        detail::vacuum_node_cache(p, grid.nodes);
    const int N = static_cast<int>(grid.nodes.size());
    VacuumSystem sys;
    sys.B = Eigen::MatrixXcd::Zero(N, N);
    sys.rows.reserve(N);

    std::vector<int> idx;
    std::vector<double> wt;
    for (int i = 0; i < N; ++i) {
        const double chi = grid.coll[i];
        const detail::VacuumRowData d =
            detail::vacuum_row_data(se, chi, branch);
        // regular PV part: quadrature of the pole-carrying term ...
        double bare_pole_sum = 0.0;
        for (int j = 0; j < N; ++j) {
            const double denom = chi * chi - grid.nodes[j] * grid.nodes[j];
            const cplx c = detail::pv_numerator(d, grid.nodes[j],
                                                cache.alpha_h1[j],
                                                cache.mu[j]);
            sys.B(i, j) += 2.0 * grid.weights[j] * c / denom;
            bare_pole_sum += grid.weights[j] / denom;
        }
        // ... minus the subtracted pole value, restored via the closed form,
        // plus the on-shell delta part of T*; both sample f at chi
        // (interpolated).  The delta coefficient is the contact constant C
        // alone -- the pole itself carries the pure principal-value reading.
        const cplx c_chi = detail::pv_numerator(
            d, chi,
            alpha(p, cplx(d.rs, 0.0)) *
                cylinder_eval(CylinderOrder(1), cplx(d.rs * p.tau, 0.0)).h1,
            d.rs);
        const cplx at_chi =
            2.0 * c_chi * (detail::pv_log(chi, grid.kappa_max) -
                           bare_pole_sum) +
            2.0 * d.jac * std::conj(d.C);
        grid.interp_stencil(chi, idx, wt);
        for (int a = 0; a < grid.points; ++a)
            sys.B(i, idx[a]) += at_chi * wt[a];
        sys.rows.push_back(d);
    }
    return sys;
}

struct F2Solution {
    double A = 0.0;
    int branch = -1;
    std::vector<cplx> f2;
    double residual = 0.0;      // sup-norm on a refined, disjoint grid
};

struct VacuumKernels {
    double A = 0.0;
    int branch = -1;
    std::vector<cplx> f2;
    Eigen::MatrixXcd f3;        // symmetrized samples f3(node_i, node_j)
    double asymmetry = 0.0;     // pre-symmetrization defect, sup-norm
    double residual_f2 = 0.0;   // f2 condition, refined disjoint grid
    double residual_f3 = 0.0;   // row equations as solved (pre-symmetrization)
};

struct VacuumResiduals {
    double f2_eq = 0.0;         // sup-norm of the f2 equation
    double f3_eq = 0.0;         // sup-norm of the f3 equation
};

// Evaluates both vacuum conditions with a refined quadrature (panels x 2) at
// fresh collocation points, interpolating the sampled kernels; returns
// sup-norm residuals.  Pass an empty f3 to skip the f3 condition.
inline VacuumResiduals vacuum_residuals(const SelfEnergy& se,
                                        const VacuumGrid& grid,
                                        const VacuumKernels& kernels,
                                        int branch) {
    const ModelParams& p = se.params();
    const VacuumGrid fine = grid.refined();
    const detail::VacuumNodeCache cache =
        detail::vacuum_node_cache(p, fine.nodes);
    const int Nf = static_cast<int>(fine.nodes.size());

    // interpolated kernel samples on the fine quadrature nodes
    std::vector<cplx> f2_fine(Nf);
    for (int j = 0; j < Nf; ++j)
        f2_fine[j] = grid.interp(kernels.f2, fine.nodes[j]);

    // the operator applied to a sampled function, at one fresh point
    const auto apply = [&](const detail::VacuumRowData& d,
                           const std::vector<cplx>& samples_fine,
                           cplx value_at_chi) -> cplx {
        CompensatedSum acc;
        double bare = 0.0;
        for (int j = 0; j < Nf; ++j) {
            const double denom =
                d.chi * d.chi - fine.nodes[j] * fine.nodes[j];
            const cplx c = detail::pv_numerator(d, fine.nodes[j],
                                                cache.alpha_h1[j],
                                                cache.mu[j]);
            acc.add(2.0 * fine.weights[j] * c * samples_fine[j] / denom);
            bare += fine.weights[j] / denom;
        }
        const cplx c_chi = detail::pv_numerator(
            d, d.chi,
            alpha(p, cplx(d.rs, 0.0)) *
                cylinder_eval(CylinderOrder(1), cplx(d.rs * p.tau, 0.0)).h1,
            d.rs);
        return acc.value() +
               (2.0 * c_chi * (detail::pv_log(d.chi, fine.kappa_max) - bare) +
                2.0 * d.jac * std::conj(d.C)) *
                   value_at_chi;
    };

    VacuumResiduals out;
    const bool with_f3 = kernels.f3.size() > 0;
    const int N = static_cast<int>(grid.nodes.size());

    // pre-interpolated f3 rows for the sampled first arguments (they do not
    // depend on the collocation point, so hoist them out of the row loop)
    std::vector<int> a_list;
    std::vector<std::vector<cplx>> f3_fine;
    std::vector<cplx> alpha_h2_a;
    if (with_f3) {
        std::vector<cplx> f3row(N);
        for (int a = 0; a < N; a += 8) {
            a_list.push_back(a);
            for (int j = 0; j < N; ++j) f3row[j] = kernels.f3(a, j);
            std::vector<cplx> rowf(Nf);
            for (int j = 0; j < Nf; ++j)
                rowf[j] = grid.interp(f3row, fine.nodes[j]);
            f3_fine.push_back(std::move(rowf));
            const double mu_a = p.mass_of_kappa(grid.nodes[a]);
            alpha_h2_a.push_back(
                alpha(p, cplx(mu_a, 0.0)) *
                cylinder_eval(CylinderOrder(1), cplx(mu_a * p.tau, 0.0)).h2);
        }
    }

    for (int i = 0; i < Nf; i += 3) {
        const double chi = fine.coll[i];
        const detail::VacuumRowData d =
            detail::vacuum_row_data(se, chi, branch);
        const cplx f2_chi = grid.interp(kernels.f2, chi);
        const cplx lhs_f2 = std::conj(d.r) + 2.0 * kernels.A * std::conj(d.t) +
                            apply(d, f2_fine, f2_chi);
        out.f2_eq = std::max(out.f2_eq, std::abs(lhs_f2));

        if (!with_f3) continue;
        for (size_t q = 0; q < a_list.size(); ++q) {
            const int a = a_list[q];
            const double mu_a = p.mass_of_kappa(grid.nodes[a]);
            const cplx R_a = -std::conj(d.kpref * alpha_h2_a[q]) /
                             (d.rs + mu_a);
            const cplx lhs_f3 =
                R_a + 2.0 * apply(d, f3_fine[q], fine.interp(f3_fine[q], chi)) +
                std::conj(d.t) * kernels.f2[a];
            out.f3_eq = std::max(out.f3_eq, std::abs(lhs_f3));
        }
    }
    return out;
}

// Solves the f2 condition by dense LU on the Nystrom system; the residual is
// re-evaluated on the refined disjoint grid.
inline F2Solution solve_f2(const SelfEnergy& se, const VacuumGrid& grid,
                           double A = 0.0, int branch = -1,
                           double tol = 1e-6) {
    const VacuumSystem sys = assemble_vacuum_system(se, grid, branch);
    const int N = static_cast<int>(grid.nodes.size());
    Eigen::VectorXcd rhs(N);
    for (int i = 0; i < N; ++i)
        rhs(i) = -(std::conj(sys.rows[i].r) +
                   2.0 * A * std::conj(sys.rows[i].t));
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(sys.B);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-12))
        throw IllConditionedError(
            "solve_f2: condition estimate " + std::to_string(1.0 / rcond) +
            " beyond 1e12");
    const Eigen::VectorXcd f = lu.solve(rhs);

    F2Solution sol;
    sol.A = A;
    sol.branch = branch;
    sol.f2.assign(f.data(), f.data() + N);
    VacuumKernels probe;
    probe.A = A;
    probe.f2 = sol.f2;
    sol.residual = vacuum_residuals(se, grid, probe, branch).f2_eq;
    if (!(sol.residual <= tol))
        throw ConvergenceError("solve_f2: refined-grid residual " +
                               std::to_string(sol.residual) +
                               " above tolerance");
    return sol;
}

// Solves the f3 condition row by row (one LU, N right-hand sides: the
// operator does not depend on the frozen first argument), symmetrizes, and
// reports both the asymmetry defect and the refined-grid residuals.
inline VacuumKernels solve_f3(const SelfEnergy& se, const VacuumGrid& grid,
                              const F2Solution& f2sol, double tol = 1e-6) {
    const ModelParams& p = se.params();
    const VacuumSystem sys = assemble_vacuum_system(se, grid, f2sol.branch);
    const int N = static_cast<int>(grid.nodes.size());
    const detail::VacuumNodeCache cache =
        detail::vacuum_node_cache(p, grid.nodes);

    Eigen::MatrixXcd rhs(N, N);   // column a = inhomogeneity for kappa_a
    for (int i = 0; i < N; ++i) {
        const detail::VacuumRowData& d = sys.rows[i];
        for (int a = 0; a < N; ++a) {
            const cplx R_a = -std::conj(d.kpref * cache.alpha_h2[a]) /
                             (d.rs + cache.mu[a]);
            rhs(i, a) = -(R_a + std::conj(d.t) * f2sol.f2[a]);
        }
    }
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(2.0 * sys.B);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-12))
        throw IllConditionedError(
            "solve_f3: condition estimate " + std::to_string(1.0 / rcond) +
            " beyond 1e12");
    const Eigen::MatrixXcd sols = lu.solve(rhs);   // column a = row a of f3

    VacuumKernels out;
    out.A = f2sol.A;
    out.branch = f2sol.branch;
    out.f2 = f2sol.f2;
    const Eigen::MatrixXcd raw = sols.transpose();  // raw(a, j) = f3(k_a, k_j)
    out.asymmetry = (raw - raw.transpose()).cwiseAbs().maxCoeff();
    // The reported residual is that of the row equations actually solved
    // (pre-symmetrization), re-evaluated on the refined disjoint grid.  The
    // symmetrized kernel stored below does NOT satisfy the row equations to
    // the same accuracy: the asymmetry above is structural, not a
    // discretization artifact (see vacuum_residuals and the module tests).
    out.f3 = raw;
    const VacuumResiduals res =
        vacuum_residuals(se, grid, out, f2sol.branch);
    out.residual_f2 = res.f2_eq;
    out.residual_f3 = res.f3_eq;
    out.f3 = 0.5 * (raw + raw.transpose());
    if (!(out.residual_f3 <= tol))
        throw ConvergenceError("solve_f3: refined-grid residual " +
                               std::to_string(out.residual_f3) +
                               " above tolerance");
    return out;
}

}  // namespace pointform

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "pointform/errors.hpp"

// Quadrature utilities shared by the closed-form cross-checks and the
// self-energy / vacuum solvers: Gauss-Legendre panel rules, a deterministic
// compensated (Kahan) summation helper, and an adaptive Simpson rule for
// complex-valued integrands with an explicit node budget.

namespace pointform {

namespace detail {

// Nodes/weights of the n-point Gauss-Legendre rule on [-1, 1], by Newton
// iteration on the Legendre polynomial (standard Golub-free construction).
inline void gauss_legendre_reference(int n, std::vector<double>& x,
                                     std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (t * p0 - p1) / (t * t - 1.0);
            const double dt = p0 / pp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

}  // namespace detail

// Composite Gauss-Legendre rule: `panels` equal panels of `points_per_panel`
// nodes each on [a, b].  Node order is fixed (ascending), so summation over
// the rule is deterministic.
struct PanelRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline PanelRule gauss_legendre_panels(double a, double b, int panels,
                                       int points_per_panel) {
    if (!(b > a) || panels < 1 || points_per_panel < 2)
        throw DomainError("gauss_legendre_panels: bad rule parameters");
    std::vector<double> xr, wr;
    detail::gauss_legendre_reference(points_per_panel, xr, wr);
    PanelRule rule;
    rule.nodes.reserve(static_cast<size_t>(panels) * points_per_panel);
    rule.weights.reserve(static_cast<size_t>(panels) * points_per_panel);
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        for (int i = 0; i < points_per_panel; ++i) {
            rule.nodes.push_back(lo + 0.5 * h * (xr[i] + 1.0));
            rule.weights.push_back(0.5 * h * wr[i]);
        }
    }
    return rule;
}

// Deterministic compensated summation of complex terms in index order.
class CompensatedSum {
public:
    void add(std::complex<double> v) {
        add_part(v.real(), re_, re_c_);
        add_part(v.imag(), im_, im_c_);
    }
    std::complex<double> value() const { return {re_ + re_c_, im_ + im_c_}; }

private:
    static void add_part(double v, double& s, double& c) {
        const double y = v - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    double re_ = 0.0, im_ = 0.0, re_c_ = 0.0, im_c_ = 0.0;
};

// Adaptive Simpson quadrature for complex integrands on [a, b].  Throws
// ConvergenceError when the node budget is exhausted before the requested
// absolute tolerance is met.
namespace detail {

struct SimpsonState {
    const std::function<std::complex<double>(double)>* f;
    size_t evals;
    size_t budget;
};

inline std::complex<double> simpson_recurse(SimpsonState& st, double a,
                                            double b, std::complex<double> fa,
                                            std::complex<double> fm,
                                            std::complex<double> fb,
                                            std::complex<double> whole,
                                            double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    if (st.evals + 2 > st.budget)
        throw ConvergenceError("adaptive_simpson: node budget exhausted");
    const std::complex<double> flm = (*st.f)(lm);
    const std::complex<double> frm = (*st.f)(rm);
    st.evals += 2;
    const std::complex<double> left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const std::complex<double> right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const std::complex<double> delta = left + right - whole;
    if (depth <= 0)
        throw ConvergenceError("adaptive_simpson: max depth reached");
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_recurse(st, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_recurse(st, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

inline std::complex<double> adaptive_simpson(
    const std::function<std::complex<double>(double)>& f, double a, double b,
    double tol, size_t budget = 2000000) {
    detail::SimpsonState st{&f, 0, budget};
    const std::complex<double> fa = f(a);
    const std::complex<double> fm = f(0.5 * (a + b));
    const std::complex<double> fb = f(b);
    st.evals = 3;
    const std::complex<double> whole =
        (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_recurse(st, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace pointform

// Command-line driver for the point-form quasistable-state engine.
//
// Commands:
//   verify          run the analytic identity suite, write a JSON report
//   greens          tabulate boundary Green's function and S-matrix (CSV)
//   poles           locate the resonance pole from one or more seeds (JSON)
//   decay           tabulate the Gamow survival amplitude (CSV)
//   vacuum          solve the vacuum integral equations (CSV + JSON)
//   semigroup-demo  causal-semigroup composition and decay checks (JSON)
//
// Exit codes: 0 success, 1 I/O or configuration error, 2 numerical
// non-convergence, 3 identity-suite failure.
//
// All output is deterministic: fixed random seeds, fixed formatting
// (17 significant digits), no timestamps.  Every file records the hash of
// the fully-normalized configuration that produced it.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pointform/cylinder.hpp"
#include "pointform/hyperboloid.hpp"
#include "pointform/model.hpp"
#include "pointform/quadrature.hpp"
#include "pointform/resonance.hpp"
#include "pointform/semigroup.hpp"
#include "pointform/vacuum.hpp"

using nlohmann::json;
using namespace pointform;

namespace {

// Configuration problems get their own type so main() can map them to
// exit code 1 with a single-line diagnostic.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IdentityFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ----------------------------------------------------------------- config

struct RunConfig {
    ModelParams params;
    int mass_panels = 40;
    int mass_points = 12;
    int vacuum_panels = 40;
    int vacuum_points = 12;
    double grade_factor = 1.0;
    double pole_tol = 1e-12;
    int max_iterations = 60;
    double vacuum_tol = 1e-6;
    double inhomogeneity = 0.0;   // A in the f2 equation
    int branch = -1;
    std::vector<cplx> seeds{cplx(1.0, -0.05)};
    std::array<double, 3> velocity{0.0, 0.0, 0.0};
    double scan_min = 0.0;        // 0 -> auto (just above threshold)
    double scan_max = 4.0;
    int scan_count = 400;
    int threads = 1;
    std::string hash;             // FNV-1a of the normalized config
};

void reject_unknown(const json& obj, const std::string& block,
                    const std::vector<std::string>& allowed) {
    for (const auto& item : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) ==
            allowed.end())
            throw ConfigError("config: unknown key \"" + item.key() +
                              "\" in block \"" + block + "\"");
    }
}

double take_number(const json& obj, const std::string& block,
                   const std::string& key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number())
        throw ConfigError("config: field \"" + block + "." + key +
                          "\" must be a number");
    return obj[key].get<double>();
}

int take_int(const json& obj, const std::string& block, const std::string& key,
             int fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer())
        throw ConfigError("config: field \"" + block + "." + key +
                          "\" must be an integer");
    return obj[key].get<int>();
}

const json& take_object(const json& root, const std::string& key) {
    static const json empty = json::object();
    if (!root.contains(key)) return empty;
    if (!root[key].is_object())
        throw ConfigError("config: block \"" + key + "\" must be an object");
    return root[key];
}

// FNV-1a 64-bit over the canonical serialization (nlohmann sorts keys).
std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open \"" + path + "\"");
    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config: " + std::string(e.what()));
    }
    if (!root.is_object())
        throw ConfigError("config: top level must be a JSON object");
    reject_unknown(root, "<top>", {"model", "quadrature", "solver", "output"});

    RunConfig cfg;

    const json& model = take_object(root, "model");
    reject_unknown(model, "model", {"M", "m", "tau", "beta", "form_factor"});
    cfg.params.M = take_number(model, "model", "M", cfg.params.M);
    cfg.params.m = take_number(model, "model", "m", cfg.params.m);
    cfg.params.tau = take_number(model, "model", "tau", cfg.params.tau);
    cfg.params.beta = take_number(model, "model", "beta", cfg.params.beta);
    const json& ff = take_object(model, "form_factor");
    reject_unknown(ff, "model.form_factor", {"power", "cutoff", "amplitude"});
    cfg.params.form_factor.power =
        take_int(ff, "model.form_factor", "power", cfg.params.form_factor.power);
    cfg.params.form_factor.cutoff = take_number(
        ff, "model.form_factor", "cutoff", cfg.params.form_factor.cutoff);
    cfg.params.form_factor.amplitude =
        take_number(ff, "model.form_factor", "amplitude",
                    cfg.params.form_factor.amplitude);
    try {
        cfg.params.validate();
    } catch (const DomainError& e) {
        throw ConfigError("config: " + std::string(e.what()));
    }

    const json& quad = take_object(root, "quadrature");
    reject_unknown(quad, "quadrature",
                   {"mass_panels", "mass_points", "vacuum_panels",
                    "vacuum_points", "grade_factor"});
    cfg.mass_panels = take_int(quad, "quadrature", "mass_panels", cfg.mass_panels);
    cfg.mass_points = take_int(quad, "quadrature", "mass_points", cfg.mass_points);
    cfg.vacuum_panels =
        take_int(quad, "quadrature", "vacuum_panels", cfg.vacuum_panels);
    cfg.vacuum_points =
        take_int(quad, "quadrature", "vacuum_points", cfg.vacuum_points);
    cfg.grade_factor =
        take_number(quad, "quadrature", "grade_factor", cfg.grade_factor);
    if (cfg.mass_panels < 2 || cfg.mass_points < 2)
        throw ConfigError(
            "config: quadrature.mass_panels/mass_points must be >= 2");
    if (!(cfg.grade_factor > 0.0))
        throw ConfigError("config: quadrature.grade_factor must be > 0");

    const json& solver = take_object(root, "solver");
    reject_unknown(solver, "solver",
                   {"pole_tol", "max_iterations", "vacuum_tol",
                    "inhomogeneity", "branch", "seeds", "velocity"});
    cfg.pole_tol = take_number(solver, "solver", "pole_tol", cfg.pole_tol);
    cfg.max_iterations =
        take_int(solver, "solver", "max_iterations", cfg.max_iterations);
    cfg.vacuum_tol = take_number(solver, "solver", "vacuum_tol", cfg.vacuum_tol);
    cfg.inhomogeneity =
        take_number(solver, "solver", "inhomogeneity", cfg.inhomogeneity);
    cfg.branch = take_int(solver, "solver", "branch", cfg.branch);
    if (cfg.branch != 1 && cfg.branch != -1)
        throw ConfigError("config: solver.branch must be +1 or -1");
    if (!(cfg.vacuum_tol > 0.0))
        throw ConfigError("config: solver.vacuum_tol must be > 0");
    if (solver.contains("seeds")) {
        if (!solver["seeds"].is_array() || solver["seeds"].empty())
            throw ConfigError(
                "config: solver.seeds must be a non-empty array of [re, im]");
        cfg.seeds.clear();
        for (const auto& s : solver["seeds"]) {
            if (!s.is_array() || s.size() != 2 || !s[0].is_number() ||
                !s[1].is_number())
                throw ConfigError(
                    "config: solver.seeds entries must be [re, im] pairs");
            cfg.seeds.emplace_back(s[0].get<double>(), s[1].get<double>());
        }
    }
    if (solver.contains("velocity")) {
        const auto& v = solver["velocity"];
        if (!v.is_array() || v.size() != 3 || !v[0].is_number() ||
            !v[1].is_number() || !v[2].is_number())
            throw ConfigError(
                "config: solver.velocity must be [q1, q2, q3]");
        cfg.velocity = {v[0].get<double>(), v[1].get<double>(),
                        v[2].get<double>()};
    }

    const json& out = take_object(root, "output");
    reject_unknown(out, "output", {"scan_min", "scan_max", "scan_count"});
    cfg.scan_min = take_number(out, "output", "scan_min", cfg.scan_min);
    cfg.scan_max = take_number(out, "output", "scan_max", cfg.scan_max);
    cfg.scan_count = take_int(out, "output", "scan_count", cfg.scan_count);
    if (cfg.scan_count < 2)
        throw ConfigError("config: output.scan_count must be >= 2");

    // normalized echo of every effective value -> hash
    json norm;
    norm["model"] = {{"M", cfg.params.M},
                     {"m", cfg.params.m},
                     {"tau", cfg.params.tau},
                     {"beta", cfg.params.beta},
                     {"form_factor",
                      {{"power", cfg.params.form_factor.power},
                       {"cutoff", cfg.params.form_factor.cutoff},
                       {"amplitude", cfg.params.form_factor.amplitude}}}};
    norm["quadrature"] = {{"mass_panels", cfg.mass_panels},
                          {"mass_points", cfg.mass_points},
                          {"vacuum_panels", cfg.vacuum_panels},
                          {"vacuum_points", cfg.vacuum_points},
                          {"grade_factor", cfg.grade_factor}};
    json seeds = json::array();
    for (const cplx& s : cfg.seeds) seeds.push_back({s.real(), s.imag()});
    norm["solver"] = {{"pole_tol", cfg.pole_tol},
                      {"max_iterations", cfg.max_iterations},
                      {"vacuum_tol", cfg.vacuum_tol},
                      {"inhomogeneity", cfg.inhomogeneity},
                      {"branch", cfg.branch},
                      {"seeds", seeds},
                      {"velocity", cfg.velocity}};
    norm["output"] = {{"scan_min", cfg.scan_min},
                      {"scan_max", cfg.scan_max},
                      {"scan_count", cfg.scan_count}};
    cfg.hash = fnv1a_hex(norm.dump());
    return cfg;
}

// ----------------------------------------------------------------- output

// Minimal JSON emitter so every number is written with exactly
// %.17g formatting (byte-stable across runs).
struct JsonWriter {
    std::string text;
    void raw(const std::string& s) { text += s; }
    void key(const std::string& k) { raw("\"" + k + "\": "); }
    void str(const std::string& s) { raw("\"" + s + "\""); }
    void num(double v) {
        if (v == 0.0) v = 0.0;   // normalize -0
        raw(std::isfinite(v) ? fmt(v) : std::string("null"));
    }
    void boolean(bool b) { raw(b ? "true" : "false"); }
};

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("output: cannot open \"" + path.string() + "\"");
    out << text;
    if (!out) throw ConfigError("output: write failed for \"" + path.string() + "\"");
}

struct Csv {
    std::string text;
    explicit Csv(const RunConfig& cfg, const std::string& header) {
        text = "# config_hash=" + cfg.hash + "\r\n" + header + "\r\n";
    }
    void row(const std::vector<double>& vals) {
        for (size_t i = 0; i < vals.size(); ++i) {
            if (i) text += ',';
            text += std::isfinite(vals[i]) ? fmt(vals[i]) : std::string("nan");
        }
        text += "\r\n";
    }
};

void write_pole_json(JsonWriter& w, const PoleResult& pr) {
    w.raw("{");
    w.key("s_R_re"); w.num(pr.s_R.real()); w.raw(", ");
    w.key("s_R_im"); w.num(pr.s_R.imag()); w.raw(", ");
    w.key("residue_re"); w.num(pr.residue.real()); w.raw(", ");
    w.key("residue_im"); w.num(pr.residue.imag()); w.raw(", ");
    w.key("M_R"); w.num(pr.M_R); w.raw(", ");
    w.key("Gamma_R"); w.num(pr.Gamma_R); w.raw(", ");
    w.key("Mbar_R"); w.num(pr.Mbar_R); w.raw(", ");
    w.key("Gammabar_R"); w.num(pr.Gammabar_R); w.raw(", ");
    w.key("width_convention_gap");
    w.num(pr.Gamma_R > 0.0 ? std::abs(pr.Gammabar_R - pr.Gamma_R) / pr.Gamma_R
                           : 0.0);
    w.raw(", ");
    w.key("lifetime"); w.num(pr.lifetime); w.raw(", ");
    w.key("iterations"); w.raw(std::to_string(pr.iterations)); w.raw(", ");
    w.key("converged"); w.boolean(pr.converged); w.raw(", ");
    w.key("final_residual"); w.num(pr.final_residual);
    w.raw("}");
}

// ----------------------------------------------------------------- verify

struct Check {
    std::string name;
    double residual;
    double tolerance;
    bool pass() const { return residual <= tolerance; }
};

std::vector<Check> run_identity_suite(const RunConfig& cfg) {
    const ModelParams& p = cfg.params;
    const SelfEnergy se(
        p, MassQuadrature::build(p, cfg.mass_panels, cfg.mass_points));
    std::vector<Check> checks;
    auto push = [&](const std::string& name, double res, double tol) {
        checks.push_back({name, res, tol});
    };
    auto rel = [](cplx got, cplx want) {
        const double scale = std::max(std::abs(want), 1e-300);
        return std::abs(got - want) / scale;
    };

    {   // x (H1_1 H2_2 - H2_1 H1_2)(x) = 4i/pi, all real x > 0
        double worst = 0.0;
        for (double x : {0.3, 0.9, 2.1, 5.5, 12.0}) {
            const auto e1 = cylinder_eval(CylinderOrder(1), cplx(x, 0.0));
            const auto e2 = cylinder_eval(CylinderOrder(2), cplx(x, 0.0));
            const cplx w = x * (e1.h1 * e2.h2 - e1.h2 * e2.h1);
            worst = std::max(worst, rel(w, cplx(0.0, 4.0 / M_PI)));
        }
        push("hankel_wronskian", worst, 1e-10);
    }
    {   // int dphi e^{-i z cosh phi} = -i pi H2_0(z), Im z < 0
        double worst = 0.0;
        const cplx zs[5] = {{1.2, -0.6}, {0.4, -1.5}, {3.0, -0.2},
                            {0.9, -0.9}, {2.2, -1.1}};
        for (const cplx& z : zs) {
            const cplx want = cplx(0.0, -M_PI) *
                              cylinder_eval(CylinderOrder(0), z).h2;
            worst = std::max(worst, rel(oracle_cosh_integral(z), want));
        }
        push("cosh_integral_oracle", worst, 1e-8);
    }
    {   // Pi_+ - Pi_- against the closed-form discontinuity
        double worst = 0.0;
        for (double s : {1.0, 1.5, 2.5, 4.0}) {
            const cplx up = se.pi(
                SheetPoint(cplx(s, 0.0), SheetLocation::UpperBoundary));
            const cplx lo = se.pi(
                SheetPoint(cplx(s, 0.0), SheetLocation::LowerBoundary));
            worst = std::max(worst, rel(up - lo, se.disc(cplx(s, 0.0))));
        }
        push("discontinuity_oracle", worst, 1e-6);
    }
    {   // G^II just below the cut matches G_+ on the cut
        double worst = 0.0;
        for (double s : {1.1, 1.5, 2.5}) {
            const cplx g2 = green(
                se, SheetPoint(cplx(s, -1e-10), SheetLocation::SecondSheet));
            const cplx gp = green(
                se, SheetPoint(cplx(s, 0.0), SheetLocation::UpperBoundary));
            worst = std::max(worst, rel(g2, gp));
        }
        push("sheet_matching", worst, 1e-6);
    }
    {   // G_+ - G_- = disc Pi * G_+ G_-
        double worst = 0.0;
        for (double s : {0.5, 0.9, 1.1, 1.7, 3.0}) {
            const cplx gp = green(
                se, SheetPoint(cplx(s, 0.0), SheetLocation::UpperBoundary));
            const cplx gm = green(
                se, SheetPoint(cplx(s, 0.0), SheetLocation::LowerBoundary));
            worst = std::max(
                worst, rel(gp - gm, se.disc(cplx(s, 0.0)) * gp * gm));
        }
        push("jump_identity", worst, 1e-6);
    }
    {   // S - 1 = (Pi_- - Pi_+) G_-  on the cut
        double worst = 0.0;
        for (double s : {1.05, 1.4, 2.0, 3.5}) {
            const SheetPoint lo(cplx(s, 0.0), SheetLocation::LowerBoundary);
            const cplx S = smatrix(se, lo);
            const cplx want = -se.disc(cplx(s, 0.0)) * green(se, lo);
            worst = std::max(worst, rel(S - 1.0, want));
        }
        push("smatrix_cut_identity", worst, 1e-10);
    }
    {   // t / ((rs+M) H1_1(M tau)) + r / ((rs-M) H2_1(M tau)) = 0
        double worst = 0.0;
        const auto eM = cylinder_eval(CylinderOrder(1), cplx(p.M * p.tau, 0.0));
        for (double s : {1.1, 1.8, 3.2}) {
            const CoefficientSet cs = coefficients(se, s, -1);
            const double rs = std::sqrt(s);
            const cplx a = cs.t / ((rs + p.M) * eM.h1);
            const cplx b = cs.r / ((rs - p.M) * eM.h2);
            const cplx scale = rho(p, s) * green(se, SheetPoint(cplx(s, 0.0),
                                                 SheetLocation::LowerBoundary));
            worst = std::max(worst, std::abs(a + b) / std::abs(scale));
        }
        push("coefficient_ratio", worst, 1e-12);
    }
    {   // continuum coefficients share the same common factor rho G
        double worst = 0.0;
        for (double s : {1.3, 2.4}) {
            const CoefficientSet cs = coefficients(se, s, -1);
            const double rs = std::sqrt(s);
            for (double mu : {0.6, 1.4}) {
                const auto e = cylinder_eval(CylinderOrder(1),
                                             cplx(mu * p.tau, 0.0));
                // T_regular / R = -[H1_1 (rs+mu)] / [H2_1 (rs-mu)]
                const cplx want = -e.h1 * (rs + mu) / (e.h2 * (rs - mu));
                worst = std::max(worst, rel(cs.T_regular(mu) / cs.R(mu), want));
            }
        }
        push("continuum_coefficient_ratio", worst, 1e-12);
    }
    {   // causal cone closed under composition; Gamow factor never grows
        std::mt19937 rng(20260826u);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        auto random_causal = [&]() {
            PoincareElement g = PoincareElement::boost(
                {0.7 * u(rng), 0.7 * u(rng), 0.7 * u(rng)});
            const PoincareElement r = PoincareElement::rotation_about(
                {u(rng), u(rng), u(rng) + 2.0}, M_PI * u(rng));
            g = compose(g, r);
            const double a0 = 2.0 * u01(rng);
            const double rr = a0 * u01(rng);
            const double c = u(rng), ph = 2.0 * M_PI * u01(rng);
            const double sc = std::sqrt(std::max(0.0, 1.0 - c * c));
            g.a = {a0, rr * sc * std::cos(ph), rr * sc * std::sin(ph), rr * c};
            return g;
        };
        int closure_failures = 0;
        for (int k = 0; k < 200; ++k) {
            if (!in_causal_semigroup(compose(random_causal(), random_causal())))
                ++closure_failures;
        }
        push("cone_closure", static_cast<double>(closure_failures), 0.0);

        const PoleResult pole =
            find_pole(se, cfg.seeds.front(), cfg.pole_tol, cfg.max_iterations);
        double growth = 0.0;
        if (pole.Gamma_R > 0.0) {
            GamowState state(pole.s_R, VelocityVector{0.2, -0.1, 0.4});
            for (int k = 0; k < 50; ++k) {
                const auto moved = gamow_transform(state, random_causal());
                growth = std::max(growth, std::abs(moved.phase) - 1.0);
            }
        }
        push("gamow_no_regeneration", std::max(growth, 0.0), 1e-12);

        // Cauchy closure of S^II around the pole rectangle
        if (pole.Gamma_R > 0.0) {
            RectContour rc{pole.s_R.real() - 0.15, pole.s_R.real() + 0.15,
                           pole.s_R.imag() - 0.06,
                           std::min(pole.s_R.imag() + 0.06, -1e-4), 96};
            push("contour_closure",
                 contour_closure_check(se, rc, [](cplx) { return cplx(1.0); }),
                 1e-6);
        }
    }
    return checks;
}

int cmd_verify(const RunConfig& cfg, const std::filesystem::path& outdir) {
    const std::vector<Check> checks = run_identity_suite(cfg);
    bool all_pass = true;
    JsonWriter w;
    w.raw("{\n  ");
    w.key("command"); w.str("verify"); w.raw(",\n  ");
    w.key("config_hash"); w.str(cfg.hash); w.raw(",\n  ");
    w.key("checks"); w.raw("[\n");
    for (size_t i = 0; i < checks.size(); ++i) {
        const Check& c = checks[i];
        all_pass = all_pass && c.pass();
        w.raw("    {");
        w.key("name"); w.str(c.name); w.raw(", ");
        w.key("residual"); w.num(c.residual); w.raw(", ");
        w.key("tolerance"); w.num(c.tolerance); w.raw(", ");
        w.key("pass"); w.boolean(c.pass());
        w.raw(i + 1 < checks.size() ? "},\n" : "}\n");
    }
    w.raw("  ],\n  ");
    w.key("all_pass"); w.boolean(all_pass);
    w.raw("\n}\n");
    write_file(outdir / "verify.json", w.text);
    for (const Check& c : checks)
        std::printf("%-30s %s  residual %.3e (tol %.1e)\n", c.name.c_str(),
                    c.pass() ? "pass" : "FAIL", c.residual, c.tolerance);
    if (!all_pass) {
        std::fprintf(stderr, "verify: identity suite failed\n");
        return 3;
    }
    return 0;
}

// ----------------------------------------------------------------- greens

int cmd_greens(const RunConfig& cfg, const std::filesystem::path& outdir) {
    const ModelParams& p = cfg.params;
    const SelfEnergy se(
        p, MassQuadrature::build(p, cfg.mass_panels, cfg.mass_points));
    const double lo = (cfg.scan_min > p.threshold_sq())
                          ? cfg.scan_min
                          : p.threshold_sq() * (1.0 + 1e-6) + 1e-9;
    const double hi = cfg.scan_max;
    if (!(hi > lo))
        throw ConfigError("config: output.scan_max must exceed the threshold");
    Csv csv(cfg,
            "s,re_g_plus,im_g_plus,abs2_g_plus,re_g_minus,im_g_minus,"
            "re_s_matrix,im_s_matrix");
    for (int k = 0; k < cfg.scan_count; ++k) {
        const double s = lo + (hi - lo) * k / (cfg.scan_count - 1.0);
        const cplx gp =
            green(se, SheetPoint(cplx(s, 0.0), SheetLocation::UpperBoundary));
        const cplx gm =
            green(se, SheetPoint(cplx(s, 0.0), SheetLocation::LowerBoundary));
        const cplx S =
            smatrix(se, SheetPoint(cplx(s, 0.0), SheetLocation::LowerBoundary));
        csv.row({s, gp.real(), gp.imag(), std::norm(gp), gm.real(), gm.imag(),
                 S.real(), S.imag()});
    }
    write_file(outdir / "greens.csv", csv.text);
    std::printf("greens: wrote %d rows to %s\n", cfg.scan_count,
                (outdir / "greens.csv").string().c_str());
    return 0;
}

// ------------------------------------------------------------------ poles

int cmd_poles(const RunConfig& cfg, const std::filesystem::path& outdir) {
    const ModelParams& p = cfg.params;
    const SelfEnergy se(
        p, MassQuadrature::build(p, cfg.mass_panels, cfg.mass_points));
    std::vector<PoleResult> results;
    for (const cplx& seed : cfg.seeds)
        results.push_back(
            find_pole(se, seed, cfg.pole_tol, cfg.max_iterations));
    double spread = 0.0;
    for (size_t i = 0; i < results.size(); ++i)
        for (size_t j = i + 1; j < results.size(); ++j)
            spread = std::max(spread,
                              std::abs(results[i].s_R - results[j].s_R));
    JsonWriter w;
    w.raw("{\n  ");
    w.key("command"); w.str("poles"); w.raw(",\n  ");
    w.key("config_hash"); w.str(cfg.hash); w.raw(",\n  ");
    w.key("seed_spread"); w.num(spread); w.raw(",\n  ");
    w.key("poles"); w.raw("[\n");
    for (size_t i = 0; i < results.size(); ++i) {
        w.raw("    ");
        write_pole_json(w, results[i]);
        w.raw(i + 1 < results.size() ? ",\n" : "\n");
    }
    w.raw("  ]\n}\n");
    write_file(outdir / "poles.json", w.text);
    for (const PoleResult& pr : results)
        std::printf("pole: s_R = %.12f %+.12fi  Gamma_R = %.6e  (%d its)\n",
                    pr.s_R.real(), pr.s_R.imag(), pr.Gamma_R, pr.iterations);
    return 0;
}

// ------------------------------------------------------------------ decay

int cmd_decay(const RunConfig& cfg, const std::filesystem::path& outdir) {
    const ModelParams& p = cfg.params;
    const SelfEnergy se(
        p, MassQuadrature::build(p, cfg.mass_panels, cfg.mass_points));
    const PoleResult pole =
        find_pole(se, cfg.seeds.front(), cfg.pole_tol, cfg.max_iterations);
    if (!(pole.Gamma_R > 0.0))
        throw ConvergenceError(
            "decay: located pole has zero width (stable state, nothing "
            "decays)");
    const GamowState state(
        pole.s_R,
        VelocityVector{cfg.velocity[0], cfg.velocity[1], cfg.velocity[2]});
    const double q0 = state.q.q0();
    const double t_max = 8.0 * pole.lifetime / q0;
    Csv csv(cfg, "t,re_amplitude,im_amplitude,survival,exponential_law");
    for (int k = 0; k < cfg.scan_count; ++k) {
        const double t = t_max * k / (cfg.scan_count - 1.0);
        const cplx amp = gamow_amplitude(state, t);
        csv.row({t, amp.real(), amp.imag(), std::norm(amp),
                 std::exp(-pole.Gamma_R * q0 * t)});
    }
    write_file(outdir / "decay.csv", csv.text);
    std::printf("decay: Gamma_R = %.6e, lifetime = %.6f, wrote %d rows\n",
                pole.Gamma_R, pole.lifetime, cfg.scan_count);
    return 0;
}

// ----------------------------------------------------------------- vacuum

int cmd_vacuum(const RunConfig& cfg, const std::filesystem::path& outdir) {
    const ModelParams& p = cfg.params;
    const SelfEnergy se(
        p, MassQuadrature::build(p, cfg.mass_panels, cfg.mass_points));
    const VacuumGrid grid = VacuumGrid::build(p, cfg.vacuum_panels,
                                              cfg.vacuum_points,
                                              cfg.grade_factor);
    const F2Solution f2 = solve_f2(se, grid, cfg.inhomogeneity, cfg.branch,
                                   cfg.vacuum_tol);
    const VacuumKernels kernels = solve_f3(se, grid, f2, cfg.vacuum_tol);
    const VacuumResiduals sym =
        vacuum_residuals(se, grid, kernels, cfg.branch);

    const size_t n = grid.nodes.size();
    Csv c2(cfg, "kappa,mass,re_f2,im_f2");
    for (size_t j = 0; j < n; ++j)
        c2.row({grid.nodes[j], p.mass_of_kappa(grid.nodes[j]),
                f2.f2[j].real(), f2.f2[j].imag()});
    write_file(outdir / "vacuum_f2.csv", c2.text);

    const size_t stride = std::max<size_t>(1, n / 200);
    Csv c3(cfg, "kappa_i,kappa_j,re_f3,im_f3");
    double f3_max = 0.0;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            f3_max = std::max(f3_max, std::abs(kernels.f3(i, j)));
    for (size_t i = 0; i < n; i += stride)
        for (size_t j = 0; j < n; j += stride)
            c3.row({grid.nodes[i], grid.nodes[j], kernels.f3(i, j).real(),
                    kernels.f3(i, j).imag()});
    write_file(outdir / "vacuum_f3.csv", c3.text);

    JsonWriter w;
    w.raw("{\n  ");
    w.key("command"); w.str("vacuum"); w.raw(",\n  ");
    w.key("config_hash"); w.str(cfg.hash); w.raw(",\n  ");
    w.key("nodes"); w.raw(std::to_string(n)); w.raw(",\n  ");
    w.key("branch"); w.raw(std::to_string(kernels.branch)); w.raw(",\n  ");
    w.key("inhomogeneity"); w.num(kernels.A); w.raw(",\n  ");
    w.key("residual_f2"); w.num(kernels.residual_f2); w.raw(",\n  ");
    w.key("residual_f3"); w.num(kernels.residual_f3); w.raw(",\n  ");
    w.key("asymmetry_defect"); w.num(kernels.asymmetry); w.raw(",\n  ");
    w.key("max_abs_f3"); w.num(f3_max); w.raw(",\n  ");
    w.key("symmetrized_residual_f2"); w.num(sym.f2_eq); w.raw(",\n  ");
    w.key("symmetrized_residual_f3"); w.num(sym.f3_eq);
    w.raw("\n}\n");
    write_file(outdir / "vacuum.json", w.text);
    std::printf(
        "vacuum: N = %zu, residual_f2 = %.3e, residual_f3 = %.3e, "
        "asymmetry = %.3e\n",
        n, kernels.residual_f2, kernels.residual_f3, kernels.asymmetry);
    return 0;
}

// --------------------------------------------------------- semigroup-demo

int cmd_semigroup(const RunConfig& cfg, const std::filesystem::path& outdir) {
    const ModelParams& p = cfg.params;
    std::mt19937 rng(7130127u);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    auto random_causal = [&]() {
        PoincareElement g = PoincareElement::boost(
            {0.7 * u(rng), 0.7 * u(rng), 0.7 * u(rng)});
        const PoincareElement r = PoincareElement::rotation_about(
            {u(rng), u(rng), u(rng) + 2.0}, M_PI * u(rng));
        g = compose(g, r);
        const double a0 = 2.0 * u01(rng);
        const double rr = a0 * u01(rng);
        const double c = u(rng), ph = 2.0 * M_PI * u01(rng);
        const double sc = std::sqrt(std::max(0.0, 1.0 - c * c));
        g.a = {a0, rr * sc * std::cos(ph), rr * sc * std::sin(ph), rr * c};
        return g;
    };

    // cone closure
    int closure_failures = 0;
    for (int k = 0; k < 500; ++k)
        if (!in_causal_semigroup(compose(random_causal(), random_causal())))
            ++closure_failures;

    // wave-grid composition law on the minus branch:
    // act(g1) then act(g2) equals one action of the mirrored product
    // (L2 L1, a1 + L1^{-1} a2), compared on shared nodes.
    WaveGrid wg;
    for (double c = -3.0; c <= 3.0 + 0.0025; c += 0.005) wg.chi.push_back(c);
    wg.s = {p.threshold_sq() + 0.2, 1.0, 1.6};
    wg.psi.resize(wg.chi.size());
    for (size_t j = 0; j < wg.chi.size(); ++j) {
        wg.psi[j].resize(wg.s.size());
        for (size_t k = 0; k < wg.s.size(); ++k) {
            const double c = wg.chi[j];
            wg.psi[j][k] = std::exp(cplx(-c * c, 0.8 * c)) *
                           std::exp(cplx(0.0, -0.5 * wg.s[k]));
        }
    }
    PoincareElement g1 = PoincareElement::boost({0.0, 0.0, 0.21});
    g1.a = {0.8, 0.0, 0.0, 0.3};
    PoincareElement g2 = PoincareElement::boost({0.0, 0.0, -0.13});
    g2.a = {1.1, 0.0, 0.0, -0.2};
    const WaveGrid two = act(act(wg, g1, -1), g2, -1);
    const Eigen::Matrix4d L1 = g1.lorentz();
    const PoincareElement mirror = PoincareElement::from_matrix(
        g2.lorentz() * L1, g1.a + apply_lorentz(L1.inverse(), g2.a));
    const WaveGrid one = act(wg, mirror, -1);
    double comp_defect = 0.0;
    {
        std::map<double, size_t> index;
        for (size_t j = 0; j < one.chi.size(); ++j) index[one.chi[j]] = j;
        for (size_t j = 0; j < two.chi.size(); ++j) {
            const auto it = index.find(two.chi[j]);
            if (it == index.end()) continue;
            for (size_t k = 0; k < two.s.size(); ++k)
                comp_defect = std::max(
                    comp_defect,
                    std::abs(one.psi[it->second][k] - two.psi[j][k]));
        }
    }

    // the inverse of a forward translation must be rejected
    bool backward_rejected = false;
    try {
        PoincareElement back;
        back.a = {-1.0, 0.0, 0.0, 0.0};
        act(wg, back, -1);
    } catch (const CausalityError&) {
        backward_rejected = true;
    }

    // Gamow arrow of time from the actual resonance pole
    const SelfEnergy se(
        p, MassQuadrature::build(p, cfg.mass_panels, cfg.mass_points));
    const PoleResult pole =
        find_pole(se, cfg.seeds.front(), cfg.pole_tol, cfg.max_iterations);
    double phase_growth = 0.0;
    double monotone_defect = 0.0;
    if (pole.Gamma_R > 0.0) {
        GamowState state(pole.s_R, VelocityVector{cfg.velocity[0],
                                                  cfg.velocity[1],
                                                  cfg.velocity[2]});
        for (int k = 0; k < 100; ++k) {
            const auto moved = gamow_transform(state, random_causal());
            phase_growth =
                std::max(phase_growth, std::abs(moved.phase) - 1.0);
        }
        double prev = 1.0;
        for (int k = 1; k <= 64; ++k) {
            const double t = k * pole.lifetime / 8.0;
            const double surv = std::norm(gamow_amplitude(state, t));
            monotone_defect = std::max(monotone_defect, surv - prev);
            prev = surv;
        }
    }

    const bool pass = closure_failures == 0 && comp_defect < 1e-9 &&
                      backward_rejected && phase_growth <= 1e-12 &&
                      monotone_defect <= 0.0;
    JsonWriter w;
    w.raw("{\n  ");
    w.key("command"); w.str("semigroup-demo"); w.raw(",\n  ");
    w.key("config_hash"); w.str(cfg.hash); w.raw(",\n  ");
    w.key("cone_closure_failures"); w.raw(std::to_string(closure_failures));
    w.raw(",\n  ");
    w.key("composition_defect"); w.num(comp_defect); w.raw(",\n  ");
    w.key("backward_translation_rejected"); w.boolean(backward_rejected);
    w.raw(",\n  ");
    w.key("gamow_phase_growth"); w.num(phase_growth); w.raw(",\n  ");
    w.key("survival_monotonicity_defect"); w.num(monotone_defect);
    w.raw(",\n  ");
    w.key("pass"); w.boolean(pass);
    w.raw("\n}\n");
    write_file(outdir / "semigroup.json", w.text);
    std::printf(
        "semigroup-demo: closure failures %d, composition defect %.3e, "
        "phase growth %.3e -> %s\n",
        closure_failures, comp_defect, phase_growth, pass ? "pass" : "FAIL");
    if (!pass) {
        std::fprintf(stderr, "semigroup-demo: checks failed\n");
        return 3;
    }
    return 0;
}

std::vector<cplx> parse_seed_list(const std::string& text) {
    // comma-separated re:im pairs, e.g. "1.0:-0.05,0.9:-0.1"
    std::vector<cplx> seeds;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        const size_t colon = tok.find(':');
        try {
            size_t used = 0;
            const double re = std::stod(tok.substr(0, colon), &used);
            double im = -0.05;
            if (colon != std::string::npos)
                im = std::stod(tok.substr(colon + 1), &used);
            seeds.emplace_back(re, im);
        } catch (const std::exception&) {
            throw ConfigError("--seeds: cannot parse seed \"" + tok +
                              "\" (expected re:im)");
        }
    }
    if (seeds.empty()) throw ConfigError("--seeds: empty seed list");
    return seeds;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"point-form quasistable-state engine"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::string seed_text;
    int threads = 0;

    const std::vector<std::string> names = {"verify", "greens",  "poles",
                                            "decay",  "vacuum", "semigroup-demo"};
    std::map<std::string, CLI::App*> subs;
    for (const std::string& name : names) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON configuration file")
            ->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seeds", seed_text,
                        "pole seeds, comma-separated re:im pairs");
        sub->add_option("--threads", threads, "worker thread count");
        subs[name] = sub;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        RunConfig cfg = parse_config(config_path);
        if (!seed_text.empty()) cfg.seeds = parse_seed_list(seed_text);
        if (threads == 0) {
            if (const char* env = std::getenv("POINTFORM_THREADS"))
                threads = std::atoi(env);
        }
        if (threads < 0)
            throw ConfigError("--threads: must be a positive integer");
        cfg.threads = std::max(1, threads);

        std::filesystem::path outdir(out_dir);
        std::error_code ec;
        std::filesystem::create_directories(outdir, ec);
        if (ec || !std::filesystem::is_directory(outdir))
            throw ConfigError("--out: cannot create directory \"" + out_dir +
                              "\"");

        const std::string cmd = app.get_subcommands().front()->get_name();
        if (cmd == "verify") return cmd_verify(cfg, outdir);
        if (cmd == "greens") return cmd_greens(cfg, outdir);
        if (cmd == "poles") return cmd_poles(cfg, outdir);
        if (cmd == "decay") return cmd_decay(cfg, outdir);
        if (cmd == "vacuum") return cmd_vacuum(cfg, outdir);
        if (cmd == "semigroup-demo") return cmd_semigroup(cfg, outdir);
        throw ConfigError("unknown command");
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 1;
    } catch (const IdentityFailure& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 3;
    } catch (const ConvergenceError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const IllConditionedError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const WindingError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const AccuracyError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    }
}

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "geobeam/assembler.hpp"
#include "geobeam/config.hpp"
#include "geobeam/errors.hpp"
#include "geobeam/evolution.hpp"
#include "geobeam/hierarchy.hpp"

using namespace geobeam;

namespace {

struct Outcome {
    bool pass = true;
    json report = json::object();
    std::string summary;

    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            summary += (summary.empty() ? "" : "; ") + ("failed: " + what);
        }
    }
};

std::string fmt3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

CurvatureModel wobbly() {
    CurvatureModel m;
    m.R = FourierSeries::from_cos_sin({{2.0, 0.0}, {0.3, 0.0}});
    m.r0 = 1.0;
    return m;
}

CurvatureModel flared() {
    return CurvatureModel::from_curvature(
        {FourierSeries::from_cos_sin({{2.0, 0.0}, {0.3, 0.0}}), FourierSeries{}, FourierSeries::constant(-8.0)}, 2.0);
}

ModeProblem problem(const CurvatureModel& m, int order, double eps, double delta) {
    ModeProblem P;
    P.model = m;
    P.frame = solve_hill(m);
    P.certificate = certify_diophantine(P.frame, 1.0, 200);
    P.order_max = order;
    P.epsilon = eps;
    P.delta = delta;
    return P;
}

double l2(const std::vector<cplx>& v, double w) {
    double acc = 0.0;
    for (const cplx& z : v) acc += std::norm(z);
    return std::sqrt(acc * w);
}

ErrorKind failure_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::IoFailure;
}

Outcome floquet_oracle() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const FloquetFrame f = solve_hill(CurvatureModel::constant(2.0, 1.0));
    double alpha_err = 0.0;
    for (double a : f.alpha) alpha_err = std::max(alpha_err, std::abs(a + 0.25 * std::log(2.0)));
    const double lambda_err = std::abs(f.lambda - kTwoPi * std::sqrt(2.0));
    const ErrorKind one = failure_of([] { solve_hill(CurvatureModel::constant(1.0, 1.0)); });
    const ErrorKind minus = failure_of([] { solve_hill(CurvatureModel::constant(-1.0, 1.0)); });
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.check(lambda_err <= 1e-8, "lambda error " + fmt3(lambda_err));
    o.check(alpha_err <= 1e-8, "alpha error " + fmt3(alpha_err));
    o.check(one == ErrorKind::DegenerateGeodesic, "R = 1 not degenerate");
    o.check(minus == ErrorKind::HyperbolicGeodesic, "R = -1 not hyperbolic");
    o.check(secs < 1.0, "runtime " + fmt3(secs) + " s");
    o.report = {{"lambda", f.lambda}, {"lambda_error", lambda_err}, {"alpha_error", alpha_err},
                {"R=1", kind_name(one)}, {"R=-1", kind_name(minus)}};
    if (o.pass)
        o.summary = "lambda err " + fmt3(lambda_err) + ", alpha err " + fmt3(alpha_err) + ", classes ok, " + fmt3(secs) + " s";
    return o;
}

// i w_s - E0 w + w_xx / 2 - R x^2 w / 2 evaluated spectrally, relative to ||w||
double frame_pde_residual(const FloquetFrame& f, const CurvatureModel& m, int k) {
    const int ns = 128;
    const XGrid xg{512, 12.0};
    const auto x = xg.nodes();
    const int nx = xg.n;
    std::vector<double> s(ns);
    for (int a = 0; a < ns; ++a) s[a] = kTwoPi * a / ns;
    const double E0 = mode_energy(f, m, k);
    const auto w = frame_w(f, k, E0, s, x);
    std::vector<cplx> ws = w, wxx = w;
    fft_cols(ws.data(), ns, nx, -1);
    for (int a = 0; a < ns; ++a) {
        const double kk = (a == ns / 2) ? 0.0 : fft_freq(a, ns);
        for (int i = 0; i < nx; ++i) ws[a * nx + i] *= cplx(0.0, kk) / static_cast<double>(ns);
    }
    fft_cols(ws.data(), ns, nx, +1);
    fft_rows(wxx.data(), ns, nx, -1);
    for (int a = 0; a < ns; ++a)
        for (int i = 0; i < nx; ++i) {
            const double xi = kTwoPi * fft_freq(i, nx) / (2.0 * xg.X);
            wxx[a * nx + i] *= -xi * xi / static_cast<double>(nx);
        }
    fft_rows(wxx.data(), ns, nx, +1);
    std::vector<cplx> res(w.size());
    for (int a = 0; a < ns; ++a) {
        const double R = m.R(s[a]);
        for (int i = 0; i < nx; ++i) {
            const std::size_t n = a * nx + i;
            res[n] = cplx(0.0, 1.0) * ws[n] - E0 * w[n] + 0.5 * wxx[n] - 0.5 * R * x[i] * x[i] * w[n];
        }
    }
    return l2(res, 1.0) / l2(w, 1.0);
}

Outcome frame_exactness() {
    Outcome o;
    double worst_pde = 0.0, worst_prop = 0.0;
    json rows = json::array();
    const std::pair<const char*, CurvatureModel> models[] = {{"R=2", CurvatureModel::constant(2.0, 1.0)},
                                                             {"R=2+0.3cos", wobbly()}};
    for (const auto& [name, m] : models) {
        const FloquetFrame f = solve_hill(m);
        o.check(f.stability == Stability::Elliptic, std::string(name) + " not elliptic");
        const XGrid xg{512, 14.0};
        const auto x = xg.nodes();
        for (int k = 0; k <= 2; ++k) {
            const double pde = frame_pde_residual(f, m, k);
            const double E0 = mode_energy(f, m, k);
            const auto start = frame_w(f, k, E0, {0.0}, x);
            const auto end = frame_w(f, k, E0, {kTwoPi}, x);
            const auto prop = propagate_linear(m, start, xg, 0.0, kTwoPi, 1600);
            const cplx shift = std::polar(1.0, E0 * kTwoPi);
            std::vector<cplx> d(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) d[i] = prop[i] - shift * end[i];
            const double prop_err = l2(d, xg.dx());
            worst_pde = std::max(worst_pde, pde);
            worst_prop = std::max(worst_prop, prop_err);
            rows.push_back({{"model", name}, {"k", k}, {"pde_residual", pde}, {"propagation_error", prop_err}});
        }
    }
    o.check(worst_pde < 1e-6, "PDE residual " + fmt3(worst_pde));
    o.check(worst_prop < 1e-5, "propagation error " + fmt3(worst_prop));
    o.report = {{"cases", rows}};
    if (o.pass) o.summary = "max PDE residual " + fmt3(worst_pde) + ", max split-step error " + fmt3(worst_prop);
    return o;
}

// (1/period) int ds (1/2) int |w_k0|^4 dx by uniform quadrature
double galerkin_C0(const ModeProblem& P) {
    const XGrid xg{1024, 14.0};
    const auto x = xg.nodes();
    std::vector<double> s;
    for (int a = 0; a < 128; ++a) s.push_back(kTwoPi * a / 128);
    const auto w = frame_w(P.frame, P.k0, mode_energy(P.frame, P.model, P.k0), s, x);
    double acc = 0.0;
    for (const cplx& z : w) acc += std::pow(std::norm(z), 2);
    return 0.5 * acc * xg.dx() / 128.0;
}

Outcome first_correction_law() {
    Outcome o;
    const auto m = CurvatureModel::constant(2.0, 1.0);
    const ModeProblem P = problem(m, 1, 1.0, 1.0);
    const double oracle = galerkin_C0(P);
    const double E1 = solve_cascade(P).E[1];
    const double E1_neg = solve_cascade(problem(m, 1, -1.0, 1.0)).E[1];
    const double E1_half = solve_cascade(problem(m, 1, 1.0, 0.5)).E[1];
    const double C0 = -E1;
    const double rel = std::abs(C0 - oracle) / oracle;
    const double flip = std::abs(E1_neg + E1) / std::abs(E1);
    const double scaling = std::abs(E1_half / E1 - 0.25);
    o.check(rel <= 1e-3, "E1 vs Galerkin oracle " + fmt3(rel));
    o.check(std::abs(C0 - 0.2372) <= 1e-3, "C0 = " + fmt3(C0));
    o.check(E1 < 0.0 && E1_neg > 0.0 && flip <= 1e-10, "sign flip defect " + fmt3(flip));
    o.check(scaling <= 1e-10, "delta^2 scaling defect " + fmt3(scaling));
    o.report = {{"C0", C0}, {"galerkin_C0", oracle}, {"relative_error", rel}, {"E1_eps_minus", E1_neg},
                {"E1_delta_half", E1_half}};
    if (o.pass)
        o.summary = "C0 " + fmt3(C0) + " vs oracle rel err " + fmt3(rel) + ", sign flip and delta^2 scaling exact";
    return o;
}

Outcome reality_periodicity() {
    Outcome o;
    double worst_imag = 0.0, worst_twist = 0.0;
    json rows = json::array();
    const std::pair<const char*, CurvatureModel> models[] = {{"R=2", CurvatureModel::constant(2.0, 1.0)},
                                                             {"flared", flared()}};
    const auto x = XGrid{64, 6.0}.nodes();
    for (const auto& [name, m] : models) {
        const ModeProblem P = problem(m, 4, 1.0, 1.0);
        const HierarchySolution S = solve_cascade(P);
        for (int p = 0; p <= 4; ++p) {
            const double im = std::abs(S.E_imag[p]) / (1.0 + std::abs(S.E[p]));
            const auto v = evaluate_expansion(S.v[p], P.frame, m, {0.3, 0.3 + kTwoPi}, x);
            double twist = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) twist = std::max(twist, std::abs(v[x.size() + i] - v[i]));
            worst_imag = std::max(worst_imag, im);
            worst_twist = std::max(worst_twist, twist);
            rows.push_back({{"model", name}, {"p", p}, {"E", S.E[p]}, {"imag_rel", im}, {"twist_defect", twist}});
        }
    }
    o.check(worst_imag <= 1e-8, "imaginary part " + fmt3(worst_imag));
    o.check(worst_twist < 1e-8, "twist defect " + fmt3(worst_twist));
    o.report = {{"orders", rows}};
    if (o.pass) o.summary = "max |Im E_p| rel " + fmt3(worst_imag) + ", max twist defect " + fmt3(worst_twist);
    return o;
}

ResidualReport scan_report;
double scan_seconds = 0.0;

Outcome residual_scaling() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    scan_report = residual_scan(problem(flared(), 3, 1.0, 1.0), ScanOptions{});
    scan_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const ResidualReport& r = scan_report;
    o.check(r.L2.slope >= 0.7, "L2 slope " + fmt3(r.L2.slope));
    o.check(std::abs(r.H1.slope - (r.L2.slope - 1.0)) <= 0.3, "H1 slope " + fmt3(r.H1.slope));
    o.check(r.norm_ratio_min >= 0.5 && r.norm_ratio_max <= 2.0,
            "||u||/delta in [" + fmt3(r.norm_ratio_min) + ", " + fmt3(r.norm_ratio_max) + "] outside [0.5, 2]");
    o.check(scan_seconds < 600.0, "runtime " + fmt3(scan_seconds) + " s");
    json rows = json::array();
    for (const auto& row : r.rows) rows.push_back({row.h, row.L2, row.H1, row.H2, row.norm, row.lambda_p, row.rayleigh});
    o.report = {{"L2_slope", r.L2.slope}, {"L2_ci", {r.L2.ci_low, r.L2.ci_high}}, {"H1_slope", r.H1.slope},
                {"H2_slope", r.H2.slope}, {"norm_ratio", {r.norm_ratio_min, r.norm_ratio_max}}, {"rows", rows}};
    const std::string detail = "L2 slope " + fmt3(r.L2.slope) + ", H1 slope " + fmt3(r.H1.slope) + ", " +
                               fmt3(scan_seconds) + " s";
    o.summary = o.pass ? detail : detail + "; " + o.summary;
    return o;
}

Outcome eigenvalue_expansion_fit() {
    Outcome o;
    const ResidualReport& r = scan_report;
    const EigenvalueFit& e = r.eigen;
    const EigenvalueFit& q = r.rayleigh;
    auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
    o.check(rel(e.a, e.E0) <= 0.1, "expansion intercept " + fmt3(e.a) + " vs E0 " + fmt3(e.E0));
    o.check(rel(e.b, e.E1) <= 0.1, "expansion slope " + fmt3(e.b) + " vs E1 " + fmt3(e.E1));
    o.check(rel(q.a, q.E0) <= 0.1, "Rayleigh intercept " + fmt3(q.a) + " vs E0 " + fmt3(q.E0));
    o.check(rel(q.b, q.E1) <= 0.1, "Rayleigh slope " + fmt3(q.b) + " vs E1 " + fmt3(q.E1));
    o.report = {{"E0", e.E0}, {"E1", e.E1}, {"expansion_fit", {e.a, e.b, e.c}}, {"rayleigh_fit", {q.a, q.b, q.c}}};
    if (o.pass)
        o.summary = "Rayleigh fit E0 " + fmt3(q.a) + " (exact " + fmt3(q.E0) + "), E1 " + fmt3(q.b) + " (cascade " +
                    fmt3(q.E1) + ")";
    return o;
}

struct EvolutionSetup {
    CurvatureModel model = flared();
    FloquetFrame frame;
    MetricStrip metric;
    double h = 1.0 / 16, sigma = 0.2;

    EvolutionSetup() {
        frame = solve_hill(model);
        metric = synthesize_metric(model, default_strip_grid(model, 32, 128));
    }

    Quasimode mode(double kappa, double eps) const {
        ModeProblem P;
        P.model = model;
        P.frame = frame;
        P.certificate = certify_diophantine(frame, 1.0, 200);
        P.order_max = 3;
        P.epsilon = eps;
        P.delta = kappa * std::pow(h, sigma);
        return assemble(solve_cascade(P), frame, model, h, kappa, sigma, metric);
    }
};

Outcome approximation_window_check() {
    Outcome o;
    const EvolutionSetup S;
    const double T = approximation_window(S.h, S.sigma);
    json runs = json::array();
    std::string detail;
    for (double eps : {1.0, -1.0}) {
        const Quasimode q = S.mode(1.0, eps);
        EvolutionConfig c;
        c.t_end = T;
        c.samples = 20;
        c.sigma_track = S.sigma;
        const EvolutionResult r = evolve_nls(q, S.metric, c);
        double worst = 0.0;
        for (double d : r.dev_L2) worst = std::max(worst, d / r.ref_L2);
        const std::string tag = eps > 0 ? "eps=+1" : "eps=-1";
        o.check(worst <= 0.1, tag + " deviation " + fmt3(worst));
        o.check(r.mass_drift <= 1e-6, tag + " mass drift " + fmt3(r.mass_drift));
        runs.push_back({{"epsilon", eps}, {"max_relative_deviation", worst}, {"mass_drift", r.mass_drift}, {"dt", r.dt}});
        detail += (detail.empty() ? "" : ", ") + tag + " dev " + fmt3(worst) + " drift " + fmt3(r.mass_drift);
    }
    o.report = {{"t_end", T}, {"runs", runs}};
    if (o.pass) o.summary = "T " + fmt3(T) + ": " + detail;
    return o;
}

Outcome instability_mechanism() {
    Outcome o;
    const EvolutionSetup S;
    const Quasimode q1 = S.mode(1.0, 1.0), q2 = S.mode(1.2, 1.0);
    const double dl = std::abs(q2.lambda_p - q1.lambda_p);
    EvolutionConfig c;
    c.t_end = 1.3 * kPi / dl;
    c.samples = 60;
    c.sigma_track = S.sigma;
    const InstabilityResult r = instability_pair(q1, q2, S.metric, c);
    bool triangle = true;
    for (std::size_t k = 0; k < r.t.size(); ++k) {
        const double lo = r.v_separation[k] - r.dev1[k] - r.dev2[k];
        const double hi = r.v_separation[k] + r.dev1[k] + r.dev2[k];
        triangle = triangle && r.separation[k] >= lo - 1e-12 && r.separation[k] <= hi + 1e-12;
    }
    o.check(r.extremum_found, "no interior extremum");
    o.check(std::abs(r.ratio - 1.0) <= 0.2, "measured/predicted " + fmt3(r.ratio));
    o.check(r.initial_separation < 0.2 * r.final_separation,
            "initial " + fmt3(r.initial_separation) + " vs final " + fmt3(r.final_separation));
    o.check(triangle, "triangle bookkeeping");
    o.report = {{"delta_lambda", r.delta_lambda}, {"t_end", c.t_end}, {"first_extremum_t", r.first_extremum_t},
                {"ratio", r.ratio}, {"initial_separation", r.initial_separation},
                {"final_separation", r.final_separation}, {"triangle_margin", r.triangle_margin},
                {"separation", r.separation}, {"predicted", r.predicted}};
    if (o.pass)
        o.summary = "extremum at t " + fmt3(r.first_extremum_t) + " ratio " + fmt3(r.ratio) + ", initial/final " +
                    fmt3(r.initial_separation / r.final_separation) + ", triangle holds";
    return o;
}

Outcome small_divisor_gate() {
    Outcome o;
    CurvatureModel m = wobbly();
    m = tune_mean_curvature(m, 1.5);
    ModeProblem P = problem(m, 3, 1.0, 1.0);
    o.check(P.certificate->verdict == Verdict::Fail, "certificate verdict " + std::string(to_string(P.certificate->verdict)));
    const ErrorKind refused = failure_of([&] { solve_cascade(P); });
    o.check(refused == ErrorKind::CertificateRefused, std::string("unforced run gave ") + kind_name(refused));
    P.force = true;
    int j = -1, l = 0;
    double divisor = 1.0;
    try {
        solve_cascade(P);
        o.check(false, "forced cascade completed");
    } catch (const SmallDivisorBreach& e) {
        j = e.j;
        l = e.l;
        divisor = std::abs(mode_energy(P.frame, m, j) - mode_energy(P.frame, m, P.k0) - l);
    }
    o.check(j >= 0 && divisor < 1e-8, "breach does not identify a resonant pair");
    o.report = {{"ratio", P.frame.lambda / kPi}, {"mean_R", m.R.coeff(0).real()},
                {"verdict", to_string(P.certificate->verdict)}, {"j", j}, {"l", l}, {"divisor", divisor}};
    if (o.pass)
        o.summary = "lambda/pi " + fmt3(P.frame.lambda / kPi) + " refused; forced run breached at (j=" + std::to_string(j) +
                    ", l=" + std::to_string(l) + ")";
    return o;
}

using Criterion = Outcome (*)();
const Criterion kCriteria[] = {floquet_oracle,     frame_exactness,           first_correction_law,
                               reality_periodicity, residual_scaling,         eigenvalue_expansion_fit,
                               approximation_window_check, instability_mechanism, small_divisor_gate};

void print(int n, const Outcome& o) { std::printf("criterion %d: %s  %s\n", n, o.pass ? "PASS" : "FAIL", o.summary.c_str()); }

}  // namespace

int main() {
    bool all = true;
    std::vector<std::string> first;
    for (int i = 0; i < 9; ++i) {
        Outcome o;
        try {
            o = kCriteria[i]();
        } catch (const std::exception& e) {
            o.pass = false;
            o.summary = std::string("exception: ") + e.what();
        }
        print(i + 1, o);
        std::fflush(stdout);
        all = all && o.pass;
        first.push_back(o.report.dump());
    }
    Outcome det;
    int differing = 0;
    for (int i = 0; i < 9; ++i) {
        std::string again;
        try {
            again = kCriteria[i]().report.dump();
        } catch (const std::exception& e) {
            again = e.what();
        }
        if (again != first[i]) ++differing;
    }
    det.check(differing == 0, std::to_string(differing) + " of 9 reports differ between runs");
    if (det.pass) det.summary = "reports of criteria 1-9 byte-identical across two runs";
    print(10, det);
    all = all && det.pass;
    return all ? 0 : 1;
}

#include "geobeam/evolution.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "geobeam/errors.hpp"

namespace geobeam {

double approximation_window(double h, double sigma) { return 0.5 * std::pow(h, 0.5 - 2.0 * sigma) * std::log(1.0 / h); }

double stable_step(const MetricStrip& m, int carrier, double lambda_ref) {
    const StripGrid& g = m.grid;
    const double dr = g.dr();
    double inv_a2 = 0.0, ar = 0.0, as = 0.0;
    for (std::size_t i = 0; i < m.a.size(); ++i) {
        const double a = m.a[i];
        inv_a2 = std::max(inv_a2, 1.0 / (a * a));
        ar = std::max(ar, std::abs(m.a_r[i] / a));
        as = std::max(as, std::abs(m.a_s[i] / (a * a * a)));
    }
    const double kmax = kTwoPi / g.period * (g.ns / 2) + std::abs(static_cast<double>(carrier));
    // spectral radius bounds: -d2 symbol <= 6.5/dr^2, d1 symbol <= 1.6/dr
    const double rho = 6.5 / (dr * dr) + 1.6 * ar / dr + kmax * kmax * inv_a2 + as * kmax + std::abs(lambda_ref);
    return 2.8 / rho;
}

namespace {

struct Sampler {
    const Quasimode& q;
    const MetricStrip& metric;
    const LaplacianCoeffs& L;
    const EvolutionConfig& cfg;
    double lref;
    std::vector<char> edge;

    Sampler(const Quasimode& q_, const MetricStrip& m, const LaplacianCoeffs& L_, const EvolutionConfig& c, double lr)
        : q(q_), metric(m), L(L_), cfg(c), lref(lr), edge(m.grid.nr, 0) {
        for (int i = 0; i < m.grid.nr; ++i) edge[i] = std::abs(m.grid.r(i)) >= 0.9 * m.grid.r0;
    }

    double edge_fraction(const std::vector<cplx>& U) const {
        const StripGrid& g = metric.grid;
        double e = 0.0, t = 0.0;
        for (int a = 0; a < g.ns; ++a)
            for (int i = 0; i < g.nr; ++i) {
                const std::size_t idx = static_cast<std::size_t>(a) * g.nr + i;
                const double w = std::norm(U[idx]) * metric.a[idx];
                t += w;
                if (edge[i]) e += w;
            }
        return t > 0.0 ? e / t : 0.0;
    }

    void record(EvolutionResult& r, double t, const std::vector<cplx>& U) const {
        const double m = l2_norm_on_M(U, metric);
        const cplx ph = std::polar(1.0, (lref - q.lambda_p) * t);
        std::vector<cplx> w(U.size());
        for (std::size_t i = 0; i < U.size(); ++i) w[i] = U[i] - ph * q.U[i];
        r.t.push_back(t);
        r.mass.push_back(m * m);
        r.dev_L2.push_back(l2_norm_on_M(w, metric));
        r.dev_Hsigma.push_back(sobolev_norm(w, q.grid, cfg.sigma_track));
        if (cfg.track_energy) {
            std::vector<cplx> lw;
            strip_laplacian(L, w, lw, cfg.policy);
            const double n2 = l2_norm_on_M(lw, metric) * q.h * q.h;
            r.energy.push_back(r.dev_L2.back() * r.dev_L2.back() + n2 * n2);
        }
        r.edge_mass.push_back(edge_fraction(U));
        if (cfg.keep_snapshots) r.snapshots.push_back(U);
    }
};

}  // namespace

EvolutionResult evolve_nls(const Quasimode& q, const MetricStrip& metric, const EvolutionConfig& cfg,
                           const std::vector<cplx>* initial) {
    const StripGrid& g = q.grid;
    if (metric.grid.ns != g.ns || metric.grid.nr != g.nr) throw std::invalid_argument("metric grid differs from quasimode grid");
    if (cfg.samples < 1 || !(cfg.t_end > 0.0)) throw std::invalid_argument("evolution needs t_end > 0 and samples >= 1");
    const LaplacianCoeffs L = laplacian_coeffs(metric, g.carrier);
    const double lref = std::isnan(cfg.lambda_ref) ? q.lambda_p : cfg.lambda_ref;

    EvolutionResult r;
    r.lambda_ref = lref;
    r.ref_L2 = l2_norm_on_M(q.U, metric);
    r.ref_Hsigma = sobolev_norm(q.U, g, cfg.sigma_track);
    const double dt_max = cfg.dt > 0.0 ? cfg.dt : cfg.safety * stable_step(metric, g.carrier, lref);
    const long per_sample = static_cast<long>(std::ceil(cfg.t_end / cfg.samples / dt_max - 1e-9));
    r.steps = per_sample * cfg.samples;
    r.dt = cfg.t_end / r.steps;
    const double dt = r.dt;

    std::vector<cplx> U = initial ? *initial : q.U;
    if (U.size() != g.size()) throw std::invalid_argument("initial data has the wrong size");
    Sampler sampler(q, metric, L, cfg, lref);
    if (sampler.edge_fraction(U) > 1e-10)
        throw Error(ErrorKind::BoundaryLeak, "initial data carries mass near r = +-r0");

    const std::size_t N = U.size();
    const cplx I(0.0, 1.0);
    const double eps = q.epsilon;
    std::vector<cplx> k1, k2, k3, k4, tmp(N), lap;
    auto rhs = [&](const std::vector<cplx>& V, std::vector<cplx>& out) {
        strip_laplacian(L, V, lap, cfg.policy);
        out.resize(N);
        for (std::size_t i = 0; i < N; ++i) out[i] = I * (lap[i] + (lref - eps * std::norm(V[i])) * V[i]);
        for (int a = 0; a < g.ns; ++a) out[static_cast<std::size_t>(a) * g.nr] = 0.0;
    };

    sampler.record(r, 0.0, U);
    const double mass0 = r.mass[0];
    for (int smp = 1; smp <= cfg.samples; ++smp) {
        for (long st = 0; st < per_sample; ++st) {
            rhs(U, k1);
            for (std::size_t i = 0; i < N; ++i) tmp[i] = U[i] + 0.5 * dt * k1[i];
            rhs(tmp, k2);
            for (std::size_t i = 0; i < N; ++i) tmp[i] = U[i] + 0.5 * dt * k2[i];
            rhs(tmp, k3);
            for (std::size_t i = 0; i < N; ++i) tmp[i] = U[i] + dt * k3[i];
            rhs(tmp, k4);
            for (std::size_t i = 0; i < N; ++i) U[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        const double t = cfg.t_end * smp / cfg.samples;
        sampler.record(r, t, U);
        const double m = r.mass.back();
        if (!std::isfinite(m) || m > 2.0 * mass0)
            throw Error(ErrorKind::StepUnstable, "mass grew to " + sci(m) + " at t = " + sci(t));
        if (r.edge_mass.back() > cfg.edge_tol)
            throw Error(ErrorKind::BoundaryLeak, "mass near the boundary reached " + sci(r.edge_mass.back()));
        r.mass_drift = std::max(r.mass_drift, std::abs(m - mass0) / mass0);
    }
    r.final_U = std::move(U);
    return r;
}

InstabilityResult instability_pair(const Quasimode& q1, const Quasimode& q2, const MetricStrip& metric,
                                   const EvolutionConfig& cfg_in) {
    if (q1.grid.ns != q2.grid.ns || q1.grid.nr != q2.grid.nr || q1.h != q2.h || q1.k0 != q2.k0 || q1.p != q2.p ||
        q1.sigma != q2.sigma)
        throw std::invalid_argument("instability pair must share grid, h, k0, p and sigma");
    EvolutionConfig cfg = cfg_in;
    cfg.keep_snapshots = true;
    cfg.lambda_ref = q1.lambda_p;
    if (cfg.dt <= 0.0) cfg.dt = cfg.safety * stable_step(metric, q1.grid.carrier, q1.lambda_p);

    InstabilityResult out;
#pragma omp parallel sections
    {
#pragma omp section
        out.run1 = evolve_nls(q1, metric, cfg);
#pragma omp section
        out.run2 = evolve_nls(q2, metric, cfg);
    }
    const double sig = cfg.sigma_track;
    out.delta_lambda = q2.lambda_p - q1.lambda_p;
    out.profile_norm = sobolev_norm(q1.U, q1.grid, sig) / q1.delta;
    const double dmin = std::min(q1.delta, q2.delta);
    const std::size_t n = out.run1.t.size();
    out.triangle_margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        const double t = out.run1.t[k];
        const auto& U1 = out.run1.snapshots[k];
        const auto& U2 = out.run2.snapshots[k];
        const cplx p1 = std::polar(1.0, (cfg.lambda_ref - q1.lambda_p) * t);
        const cplx p2 = std::polar(1.0, (cfg.lambda_ref - q2.lambda_p) * t);
        std::vector<cplx> d(U1.size()), dv(U1.size());
        for (std::size_t i = 0; i < U1.size(); ++i) {
            d[i] = U2[i] - U1[i];
            dv[i] = p2 * q2.U[i] - p1 * q1.U[i];
        }
        out.t.push_back(t);
        out.separation.push_back(sobolev_norm(d, q1.grid, sig));
        out.v_separation.push_back(sobolev_norm(dv, q1.grid, sig));
        out.dev1.push_back(out.run1.dev_Hsigma[k]);
        out.dev2.push_back(out.run2.dev_Hsigma[k]);
        out.predicted.push_back(2.0 * dmin * std::abs(std::sin(0.5 * out.delta_lambda * t)) * out.profile_norm);
        out.triangle_margin = std::min(out.triangle_margin, out.separation.back() - (out.v_separation.back() -
                                                                                     out.dev1.back() - out.dev2.back()));
    }
    out.initial_separation = out.separation.front();
    out.final_separation = out.separation.back();
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (out.separation[k] >= out.separation[k - 1] && out.separation[k] > out.separation[k + 1]) {
            out.first_extremum_t = out.t[k];
            out.ratio = out.predicted[k] > 0.0 ? out.separation[k] / out.predicted[k] : 0.0;
            out.extremum_found = true;
            break;
        }
    }
    for (auto& s : out.run1.snapshots) s.clear();
    for (auto& s : out.run2.snapshots) s.clear();
    out.run1.snapshots.clear();
    out.run2.snapshots.clear();
    return out;
}

GronwallDiagnostic gronwall_tracker(const EvolutionResult& r, const Quasimode& q, double window_tol) {
    GronwallDiagnostic d;
    const std::size_t n = r.t.size();
    const double h = q.h, sig = q.sigma;
    d.alpha = sig + 0.5 * (q.p - 1);
    d.t = r.t;
    for (std::size_t k = 0; k < n; ++k) d.F.push_back(std::pow(h, -sig) * std::sqrt(r.energy.empty() ? 0.0 : r.energy[k]));
    d.dFdt.resize(n, 0.0);
    for (std::size_t k = 0; k < n && n > 1; ++k) {
        const std::size_t a = k == 0 ? 0 : k - 1, b = k + 1 == n ? n - 1 : k + 1;
        d.dFdt[k] = (d.F[b] - d.F[a]) / (r.t[b] - r.t[a]);
    }
    const double b1 = std::pow(h, -sig + d.alpha), s2 = std::pow(h, -0.5 + 2 * sig), s3 = std::pow(h, -2.0 + 2 * sig);

    // nonnegative least squares by enumerating active sets
    double best = std::numeric_limits<double>::infinity();
    std::array<double, 3> coef{0, 0, 0};
    for (int mask = 0; mask < 8; ++mask) {
        std::vector<int> cols;
        for (int c = 0; c < 3; ++c)
            if (mask & (1 << c)) cols.push_back(c);
        Eigen::MatrixXd A(n, cols.size());
        Eigen::VectorXd y(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double basis[3] = {b1, s2 * d.F[k], s3 * std::pow(d.F[k], 3)};
            for (std::size_t c = 0; c < cols.size(); ++c) A(k, c) = basis[cols[c]];
            y(k) = d.dFdt[k];
        }
        Eigen::VectorXd x = cols.empty() ? Eigen::VectorXd() : Eigen::VectorXd(A.colPivHouseholderQr().solve(y));
        if (x.size() && x.minCoeff() < 0.0) continue;
        const double res = cols.empty() ? y.squaredNorm() : (A * x - y).squaredNorm();
        if (res < best) {
            best = res;
            coef = {0, 0, 0};
            for (std::size_t c = 0; c < cols.size(); ++c) coef[cols[c]] = x(c);
        }
    }
    d.c_forcing = coef[0];
    d.c_linear = coef[1];
    d.c_cubic = coef[2];
    d.linear_coefficient = d.c_linear * s2;
    d.window_end = r.t.empty() ? 0.0 : r.t.back();
    for (std::size_t k = 0; k < n; ++k)
        if (r.dev_L2[k] > window_tol * r.ref_L2) {
            d.window_end = r.t[k];
            break;
        }
    if (d.c_cubic > 0.0) {
        for (std::size_t k = 0; k < n; ++k)
            if (d.c_cubic * s3 * std::pow(d.F[k], 3) > d.c_linear * s2 * d.F[k] && d.F[k] > 0.0) {
                d.crossover = true;
                d.crossover_t = r.t[k];
                break;
            }
    }
    return d;
}

}  // namespace geobeam

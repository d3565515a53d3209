#include "geobeam/assembler.hpp"

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "geobeam/errors.hpp"
#include "geobeam/io.hpp"

namespace geobeam {

double cutoff(double r, double r0, double inner, double outer) {
    double t = (std::abs(r) - inner * r0) / ((outer - inner) * r0);
    t = std::clamp(t, 0.0, 1.0);
    auto f = [](double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; };
    return f(1.0 - t) / (f(1.0 - t) + f(t));
}

StripGrid default_strip_grid(const CurvatureModel& model, int ns, int nr) {
    StripGrid g;
    g.period = model.period();
    g.ns = ns * static_cast<int>(std::lround(g.period / kTwoPi));
    g.nr = nr;
    g.r0 = model.r0;
    return g;
}

LaplacianCoeffs laplacian_coeffs(const MetricStrip& m, int carrier) {
    LaplacianCoeffs L;
    L.ns = m.grid.ns;
    L.nr = m.grid.nr;
    L.carrier = carrier;
    L.period = m.grid.period;
    L.dr = m.grid.dr();
    const std::size_t n = m.a.size();
    L.inv_a2.resize(n);
    L.as_a3.resize(n);
    L.ar_a.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = m.a[i];
        L.inv_a2[i] = 1.0 / (a * a);
        L.as_a3[i] = m.a_s[i] / (a * a * a);
        L.ar_a[i] = m.a_r[i] / a;
    }
    return L;
}

double eigenvalue_expansion(const std::vector<double>& E, double h) {
    double acc = 0.0;
    for (std::size_t i = 0; i < E.size(); ++i) acc += std::pow(h, 0.5 * i) * E[i];
    return 1.0 / (h * h) - 2.0 / h * acc;
}

static int bohr_sommerfeld(double h) {
    if (!(h > 0.0)) throw Error(ErrorKind::BohrSommerfeldViolation, "h must be positive");
    const double inv = 1.0 / h;
    const double n = std::round(inv);
    if (n < 1.0 || std::abs(inv - n) > 1e-9 * n)
        throw Error(ErrorKind::BohrSommerfeldViolation, "1/h = " + sci(inv) + " is not an integer");
    return static_cast<int>(n);
}

double l2_norm_on_M(const std::vector<cplx>& U, const MetricStrip& m) {
    double acc = 0.0;
    for (std::size_t i = 0; i < U.size(); ++i) acc += std::norm(U[i]) * m.a[i];
    return std::sqrt(acc * m.grid.ds() * m.grid.dr() * kTwoPi / m.grid.period);
}

double sobolev_norm(const std::vector<cplx>& U, const StripGrid& g, double sigma) {
    std::vector<cplx> F = U;
    fft_cols(F.data(), g.ns, g.nr, -1);
    fft_rows(F.data(), g.ns, g.nr, -1);
    const double w = kTwoPi / g.period;
    const double wr = kTwoPi / (2.0 * g.r0);
    double acc = 0.0;
    for (int a = 0; a < g.ns; ++a) {
        const double k = w * fft_freq(a, g.ns) + g.carrier;
        for (int i = 0; i < g.nr; ++i) {
            const double xi = wr * fft_freq(i, g.nr);
            const double mult = std::pow(1.0 + k * k + xi * xi, sigma);
            acc += std::norm(F[static_cast<std::size_t>(a) * g.nr + i]) * mult;
        }
    }
    acc /= static_cast<double>(g.ns) * g.nr;
    return std::sqrt(acc * g.ds() * g.dr() * kTwoPi / g.period);
}

Quasimode assemble(const HierarchySolution& sol, const FloquetFrame& frame, const CurvatureModel& model, double h,
                   double kappa, double sigma, const MetricStrip& metric, Policy policy) {
    const int carrier = bohr_sommerfeld(h);
    const double delta = kappa * std::pow(h, sigma);
    if (std::abs(sol.delta - delta) > 1e-12 * std::max(1.0, delta))
        throw std::invalid_argument("cascade amplitude " + sci(sol.delta) + " differs from kappa h^sigma = " +
                                    sci(delta));
    Quasimode q;
    q.h = h;
    q.kappa = kappa;
    q.sigma = sigma;
    q.delta = delta;
    q.epsilon = sol.epsilon;
    q.k0 = sol.k0;
    q.p = sol.order();
    q.grid = metric.grid;
    q.grid.carrier = carrier;
    q.E = sol.E;
    q.frame_lambda = frame.lambda;
    q.model_hash = model_hash(model);
    q.lambda_p = eigenvalue_expansion(sol.E, h);

    ModeExpansion V = sol.v[0];
    for (int i = 1; i <= q.p; ++i) {
        const double w = std::pow(h, 0.5 * i);
        for (std::size_t n = 0; n < V.d.size(); ++n) V.d[n] += w * sol.v[i].d[n];
    }
    const StripGrid& g = q.grid;
    std::vector<double> s(g.ns), x(g.nr);
    for (int a = 0; a < g.ns; ++a) s[a] = g.s(a);
    for (int i = 0; i < g.nr; ++i) x[i] = g.r(i) / std::sqrt(h);
    std::vector<double> energies;
    for (int j = 0; j <= V.J; ++j) energies.push_back(mode_energy(frame, model, j));
    std::vector<cplx> raw;
    frame_synthesize_direct(frame_nodes(frame, s), energies, V.e_at(s), V.J, x, raw, policy);
    q.U.resize(g.size());
    const double amp = delta * std::pow(h, -0.25);
    for (int a = 0; a < g.ns; ++a)
        for (int i = 0; i < g.nr; ++i) {
            const std::size_t idx = static_cast<std::size_t>(a) * g.nr + i;
            q.U[idx] = amp * cutoff(g.r(i), g.r0, q.cutoff_inner, q.cutoff_outer) * raw[idx];
        }
    q.l2_norm = l2_norm_on_M(q.U, metric);
    return q;
}

static void check_resolution(const std::vector<cplx>& U, const StripGrid& g) {
    if (g.carrier == 0) return;
    std::vector<cplx> F = U;
    fft_cols(F.data(), g.ns, g.nr, -1);
    double total = 0.0, top = 0.0;
    for (int a = 0; a < g.ns; ++a) {
        double e = 0.0;
        for (int i = 0; i < g.nr; ++i) e += std::norm(F[static_cast<std::size_t>(a) * g.nr + i]);
        total += e;
        if (std::abs(fft_freq(a, g.ns)) >= 3 * g.ns / 8) top += e;
    }
    if (total > 0.0 && top > 1e-16 * total)
        throw Error(ErrorKind::GridResolutionError, "envelope spectrum not resolved by " + std::to_string(g.ns) +
                                                        " s-nodes (top band fraction " + sci(top / total) + ")");
}

ResidualField residual(const Quasimode& q, const MetricStrip& metric, Policy policy) {
    const StripGrid& g = q.grid;
    if (g.carrier == 0) {
        // plain sampling of exp(i s / h): at least 8 points per wavelength
        if (g.ns * kTwoPi * q.h / g.period < 8.0)
            throw Error(ErrorKind::GridResolutionError, "fewer than 8 s-nodes per wavelength of exp(i s/h)");
    }
    check_resolution(q.U, g);
    ResidualField out;
    const auto L = laplacian_coeffs(metric, g.carrier);
    strip_laplacian(L, q.U, out.R, policy);
    for (std::size_t i = 0; i < out.R.size(); ++i)
        out.R[i] = -out.R[i] - q.lambda_p * q.U[i] + q.epsilon * std::norm(q.U[i]) * q.U[i];
    for (int a = 0; a < g.ns; ++a) out.R[static_cast<std::size_t>(a) * g.nr] = 0.0;
    out.norms.L2 = l2_norm_on_M(out.R, metric);
    out.norms.H1 = sobolev_norm(out.R, g, 1.0);
    out.norms.H2 = sobolev_norm(out.R, g, 2.0);
    return out;
}

SlopeFit fit_loglog(const std::vector<double>& h, const std::vector<double>& y) {
    const std::size_t n = h.size();
    SlopeFit f;
    if (n < 2) return f;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += std::log(h[i]);
        my += std::log(y[i]);
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = std::log(h[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(y[i]) - my);
    }
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    if (n > 2) {
        double rss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = std::log(y[i]) - (f.intercept + f.slope * std::log(h[i]));
            rss += e * e;
        }
        f.stderr_slope = std::sqrt(rss / (n - 2) / sxx);
        const boost::math::students_t dist(static_cast<double>(n - 2));
        const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
        f.ci_low = f.slope - t * f.stderr_slope;
        f.ci_high = f.slope + t * f.stderr_slope;
    } else {
        f.ci_low = f.ci_high = f.slope;
    }
    return f;
}

ResidualReport residual_scan(const ModeProblem& base, const ScanOptions& opts) {
    ResidualReport rep;
    std::vector<double> hs = opts.h_list;
    std::sort(hs.begin(), hs.end());
    const StripGrid grid = default_strip_grid(base.model, opts.ns, opts.nr);
    const MetricStrip metric = synthesize_metric(base.model, grid);
    rep.metric_a_min = metric.a_min;
    rep.metric_a_max = metric.a_max;

    HierarchySolution cached;
    bool have = false;
    std::vector<double> hv, l2, h1, h2;
    for (double h : hs) {
        bohr_sommerfeld(h);
        ModeProblem P = base;
        P.delta = opts.kappa * std::pow(h, opts.sigma);
        if (!have || P.delta != cached.delta) {
            cached = solve_cascade(P);
            have = true;
        }
        const Quasimode q = assemble(cached, P.frame, P.model, h, opts.kappa, opts.sigma, metric, opts.policy);
        const ResidualField r = residual(q, metric, opts.policy);
        cplx ru = 0.0;
        double uu = 0.0;
        for (std::size_t i = 0; i < q.U.size(); ++i) {
            ru += std::conj(q.U[i]) * r.R[i] * metric.a[i];
            uu += std::norm(q.U[i]) * metric.a[i];
        }
        rep.rows.push_back({h, r.norms.L2, r.norms.H1, r.norms.H2, q.l2_norm, q.lambda_p, q.lambda_p + ru.real() / uu});
        hv.push_back(h);
        l2.push_back(r.norms.L2);
        h1.push_back(r.norms.H1);
        h2.push_back(r.norms.H2);
        const double ratio = q.l2_norm / q.delta;
        if (rep.rows.size() == 1) rep.norm_ratio_min = rep.norm_ratio_max = ratio;
        rep.norm_ratio_min = std::min(rep.norm_ratio_min, ratio);
        rep.norm_ratio_max = std::max(rep.norm_ratio_max, ratio);
    }
    rep.L2 = fit_loglog(hv, l2);
    rep.H1 = fit_loglog(hv, h1);
    rep.H2 = fit_loglog(hv, h2);

    auto fit = [&](auto lambda_of) {
        Eigen::MatrixXd A(hv.size(), 3);
        Eigen::VectorXd y(hv.size());
        for (std::size_t i = 0; i < hv.size(); ++i) {
            A(i, 0) = 1.0;
            A(i, 1) = std::sqrt(hv[i]);
            A(i, 2) = hv[i];
            y(i) = (1.0 / (hv[i] * hv[i]) - lambda_of(rep.rows[i])) * hv[i] / 2.0;
        }
        const Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);
        EigenvalueFit f;
        f.a = c(0);
        f.b = c(1);
        f.c = c(2);
        f.E0 = cached.E[0];
        f.E1 = cached.E.size() > 1 ? cached.E[1] : 0.0;
        return f;
    };
    rep.eigen = fit([](const ResidualRow& r) { return r.lambda_p; });
    rep.rayleigh = fit([](const ResidualRow& r) { return r.rayleigh; });
    return rep;
}

}  // namespace geobeam

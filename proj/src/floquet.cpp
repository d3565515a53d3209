#include "geobeam/floquet.hpp"

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <limits>
#include <string>

#include "geobeam/errors.hpp"
#include "geobeam/hermite.hpp"

namespace geobeam {

namespace ode = boost::numeric::odeint;

const char* to_string(Stability s) {
    switch (s) {
        case Stability::Elliptic: return "Elliptic";
        case Stability::Degenerate: return "Degenerate";
        case Stability::Hyperbolic: return "Hyperbolic";
    }
    return "?";
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "Pass";
        case Verdict::Fail: return "Fail";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

Stability Monodromy::stability() const {
    const double t = std::abs(trace());
    if (std::abs(2.0 - t) < 1e-8) return Stability::Degenerate;
    return t > 2.0 ? Stability::Hyperbolic : Stability::Elliptic;
}

namespace {

using Fund = std::array<double, 4>;
using Phase = std::array<double, 5>;

struct HillSystem {
    const FourierSeries* R;
    void operator()(const Fund& y, Fund& dy, double s) const {
        const double r = (*R)(s);
        dy[0] = y[1];
        dy[1] = -r * y[0];
        dy[2] = y[3];
        dy[3] = -r * y[2];
    }
};

// complex solution a = y[0] + i y[1], a' = y[2] + i y[3], y[4] = continuous argument
struct PhaseSystem {
    const FourierSeries* R;
    void operator()(const Phase& y, Phase& dy, double s) const {
        const double r = (*R)(s);
        dy[0] = y[2];
        dy[1] = y[3];
        dy[2] = -r * y[0];
        dy[3] = -r * y[1];
        const double n2 = y[0] * y[0] + y[1] * y[1];
        dy[4] = (y[0] * y[3] - y[1] * y[2]) / n2;
    }
};

}  // namespace

Monodromy compute_monodromy(const CurvatureModel& model, double ode_tol) {
    Fund y{1.0, 0.0, 0.0, 1.0};
    auto stepper = ode::make_controlled(ode_tol * 1e-2, ode_tol, ode::runge_kutta_fehlberg78<Fund>());
    ode::integrate_adaptive(stepper, HillSystem{&model.R}, y, 0.0, kTwoPi, 1e-2);
    Monodromy M;
    M.m = {y[0], y[2], y[1], y[3]};
    return M;
}

void FloquetFrame::build_interpolants() {
    std::vector<cplx> a(alpha.begin(), alpha.end()), ad(alpha_dot.begin(), alpha_dot.end()),
        th(theta.begin(), theta.end());
    alpha_i_ = TrigInterpolant(a, kTwoPi);
    alpha_dot_i_ = TrigInterpolant(ad, kTwoPi);
    theta_i_ = TrigInterpolant(th, kTwoPi);
}

FloquetFrame solve_hill(const CurvatureModel& model, const HillOptions& opts) {
    FloquetFrame F;
    F.omega = model.omega;
    F.monodromy = compute_monodromy(model, opts.ode_tol);
    F.stability = F.monodromy.stability();
    const double tr = F.monodromy.trace();
    if (F.stability == Stability::Degenerate)
        throw Error(ErrorKind::DegenerateGeodesic, "monodromy trace " + sci(tr) + " has multiplier +-1");
    if (F.stability == Stability::Hyperbolic)
        throw Error(ErrorKind::HyperbolicGeodesic, "monodromy trace " + sci(tr) + " exceeds 2");

    const auto& m = F.monodromy.m;
    cplx v0, v1;
    if (opts.unit_imaginary) {
        v0 = 1.0;
        v1 = cplx(0.0, 1.0);
        F.multiplier = std::polar(1.0, std::acos(tr / 2.0));
        F.eigen_normalized = false;
    } else {
        cplx mu = std::polar(1.0, std::acos(tr / 2.0));
        // eigenvector of M for mu, from the better conditioned row
        if (std::abs(m[1]) >= std::abs(m[2])) {
            v0 = m[1];
            v1 = mu - m[0];
        } else {
            v0 = mu - m[3];
            v1 = m[2];
        }
        const cplx rot = std::conj(v0) / std::abs(v0);
        v0 *= rot;
        v1 *= rot;
        double W = (std::conj(v0) * v1).imag();
        if (W < 0.0) {
            mu = std::conj(mu);
            v0 = std::conj(v0);
            v1 = std::conj(v1);
            W = -W;
        }
        v0 /= std::sqrt(W);
        v1 /= std::sqrt(W);
        F.multiplier = mu;
    }

    const int N = opts.nodes;
    F.nodes = N;
    std::vector<double> times(N + 1);
    for (int k = 0; k <= N; ++k) times[k] = kTwoPi * k / N;
    std::vector<Phase> out;
    Phase y{v0.real(), v0.imag(), v1.real(), v1.imag(), 0.0};
    auto stepper = ode::make_controlled(opts.ode_tol * 1e-2, opts.ode_tol, ode::runge_kutta_fehlberg78<Phase>());
    ode::integrate_times(stepper, PhaseSystem{&model.R}, y, times.begin(), times.end(), 1e-2,
                         [&](const Phase& st, double) { out.push_back(st); });

    F.lambda = out[N][4];
    F.a0.resize(N);
    F.a0_dot.resize(N);
    F.alpha.resize(N);
    F.alpha_dot.resize(N);
    F.theta.resize(N);
    for (int k = 0; k < N; ++k) {
        const cplx a(out[k][0], out[k][1]), ad(out[k][2], out[k][3]);
        F.a0[k] = a;
        F.a0_dot[k] = ad;
        const cplx z = ad / a;
        F.alpha[k] = std::log(std::abs(a));
        F.alpha_dot[k] = z.real();
        F.theta[k] = out[k][4] - F.lambda * times[k] / kTwoPi;
        F.wronskian_defect = std::max(F.wronskian_defect, std::abs((std::conj(a) * ad).imag() - 1.0));
    }
    const cplx aN(out[N][0], out[N][1]);
    F.alpha_mismatch = std::abs(std::log(std::abs(aN)) - F.alpha[0]);
    F.theta_mismatch = std::abs(std::arg(aN / (F.a0[0] * std::polar(1.0, F.lambda))));
    F.branch_defect = std::abs(std::polar(1.0, F.lambda) - F.multiplier);
    F.build_interpolants();
    return F;
}

DiophantineCert certify_ratio(double x, double tau, int N, double near_floor, double exact_tol) {
    DiophantineCert c;
    c.tau = tau;
    c.N = N;
    c.ratio = x;
    c.near_floor = near_floor;
    c.mu_lower = std::numeric_limits<double>::infinity();
    c.min_gap = std::numeric_limits<double>::infinity();
    for (int q = 1; q <= N; ++q) {
        for (int p = -(N - q); p <= N - q; ++p) {
            const double gap = std::abs(p - q * x);
            const double val = gap * std::pow(std::abs(p) + q, tau);
            if (val < c.mu_lower) {
                c.mu_lower = val;
                c.p = p;
                c.q = q;
            }
            c.min_gap = std::min(c.min_gap, gap);
        }
    }
    if (c.min_gap < exact_tol) {
        c.verdict = Verdict::Fail;
        c.mu_lower = 0.0;
    } else if (c.min_gap < near_floor) {
        c.verdict = Verdict::Inconclusive;
    } else {
        c.verdict = Verdict::Pass;
    }
    return c;
}

DiophantineCert certify_diophantine(const FloquetFrame& frame, double tau, int N, double near_floor) {
    return certify_ratio(frame.lambda / kPi, tau, N, near_floor);
}

double mode_energy(const FloquetFrame& frame, const CurvatureModel& model, int k) {
    const double omega1 = 0.5 * (model.omega - 1);
    return -frame.lambda / (4.0 * kPi) + 0.5 * k * (omega1 - frame.lambda / kPi);
}

CurvatureModel tune_mean_curvature(const CurvatureModel& model, double target_ratio, const HillOptions& opts) {
    if (!(target_ratio > 0.0)) throw ConfigInvalid("/surface/tune_ratio", "target ratio must be positive");
    const double mean = model.R.coeff(0).real();
    auto shifted = [&](double c) {
        CurvatureModel m = model;
        m.R = model.R + FourierSeries::constant(c - mean);
        return m;
    };
    auto f = [&](double c) { return solve_hill(shifted(c), opts).lambda / kPi - target_ratio; };
    // lambda / pi grows with the mean curvature; walk from the constant-curvature guess to a bracket
    const double guess = 0.25 * target_ratio * target_ratio;
    const double step = 0.02 * std::max(guess, 0.05);
    double lo = guess, hi = guess, flo = f(guess), fhi = flo;
    for (int i = 0; i < 200 && flo * fhi > 0.0; ++i) {
        if (flo > 0.0) {
            hi = lo;
            fhi = flo;
            lo -= step;
            flo = f(lo);
        } else {
            lo = hi;
            flo = fhi;
            hi += step;
            fhi = f(hi);
        }
    }
    if (flo * fhi > 0.0) throw Error(ErrorKind::CertificateRefused, "no elliptic mean curvature reaches the target ratio");
    if (flo == 0.0) return shifted(lo);
    if (fhi == 0.0) return shifted(hi);
    boost::uintmax_t iters = 100;
    auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(52), iters);
    const double c = std::abs(f(r.first)) <= std::abs(f(r.second)) ? r.first : r.second;
    return shifted(c);
}

FrameNodes frame_nodes(const FloquetFrame& frame, const std::vector<double>& s) {
    FrameNodes n;
    n.s = s;
    for (double v : s) {
        n.alpha.push_back(frame.alpha_at(v));
        n.alpha_dot.push_back(frame.alpha_dot_at(v));
        n.beta.push_back(frame.beta_at(v));
    }
    return n;
}

std::vector<cplx> frame_w(const FloquetFrame& frame, int k, double E0, const std::vector<double>& s,
                          const std::vector<double>& x) {
    const auto fn = frame_nodes(frame, s);
    std::vector<cplx> out(s.size() * x.size());
    std::vector<double> phi(k + 1);
    for (std::size_t a = 0; a < s.size(); ++a) {
        const double ea = std::exp(-fn.alpha[a]);
        const cplx pre = std::polar(std::sqrt(ea), -s[a] * E0 - (0.5 + k) * fn.beta[a]);
        for (std::size_t i = 0; i < x.size(); ++i) {
            hermite_all(k, x[i] * ea, phi.data());
            out[a * x.size() + i] = pre * std::polar(phi[k], 0.5 * fn.alpha_dot[a] * x[i] * x[i]);
        }
    }
    return out;
}

namespace {

double edge_fraction(const std::vector<cplx>& psi) {
    const std::size_t n = psi.size(), w = std::max<std::size_t>(1, n / 20);
    double edge = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double m = std::norm(psi[i]);
        total += m;
        if (i < w || i >= n - w) edge += m;
    }
    return total > 0.0 ? edge / total : 0.0;
}

}  // namespace

std::vector<cplx> propagate_linear(const CurvatureModel& model, const std::vector<cplx>& psi0, const XGrid& grid,
                                   double s0, double s1, int steps, double boundary_tol) {
    if (static_cast<int>(psi0.size()) != grid.n) throw std::invalid_argument("propagate_linear: size mismatch");
    if (edge_fraction(psi0) > boundary_tol)
        throw Error(ErrorKind::GridTooSmall, "initial data carries mass near the x-grid boundary");
    const int n = grid.n;
    std::vector<double> x2(n), k2(n);
    for (int i = 0; i < n; ++i) {
        x2[i] = grid.x(i) * grid.x(i);
        const double k = kTwoPi * fft_freq(i, n) / (2.0 * grid.X);
        k2[i] = k * k;
    }
    std::vector<cplx> psi = psi0;
    auto potential = [&](double s, double tau) {
        const double r = model.R(s);
        for (int i = 0; i < n; ++i) psi[i] *= std::polar(1.0, -0.25 * tau * r * x2[i]);
    };
    auto strang = [&](double s, double tau) {
        potential(s, tau);
        fft_rows(psi.data(), 1, n, -1);
        for (int i = 0; i < n; ++i) psi[i] *= std::polar(1.0 / n, -0.5 * tau * k2[i]);
        fft_rows(psi.data(), 1, n, +1);
        potential(s + tau, tau);
    };
    const double c = std::cbrt(2.0);
    const double w1 = 1.0 / (2.0 - c), w0 = -c / (2.0 - c);
    const double tau = (s1 - s0) / steps;
    for (int st = 0; st < steps; ++st) {
        double s = s0 + st * tau;
        strang(s, w1 * tau);
        s += w1 * tau;
        strang(s, w0 * tau);
        s += w0 * tau;
        strang(s, w1 * tau);
    }
    if (edge_fraction(psi) > boundary_tol)
        throw Error(ErrorKind::GridTooSmall, "propagated data reaches the x-grid boundary");
    return psi;
}

}  // namespace geobeam

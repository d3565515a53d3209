#include "geobeam/hierarchy.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "geobeam/errors.hpp"
#include "geobeam/hermite.hpp"

namespace geobeam {

double ModeProblem::resolved_divisor_floor() const {
    if (divisor_floor >= 0.0) return divisor_floor;
    if (certificate && certificate->verdict == Verdict::Pass)
        return 1e-6 * certificate->mu_lower / std::pow(static_cast<double>(certificate->N), certificate->tau);
    return 1e-8;
}

cplx ModeExpansion::at(int j, int l) const {
    const int m = l * static_cast<int>(std::lround(period / kTwoPi));
    if (j < 0 || j > J || std::abs(m) >= ns / 2) return {};
    return d[static_cast<std::size_t>(j) * ns + (m + ns) % ns];
}

std::vector<cplx> ModeExpansion::e_at(const std::vector<double>& s) const {
    const std::size_t n = s.size();
    std::vector<cplx> e(static_cast<std::size_t>(J + 1) * n);
    for (std::size_t a = 0; a < n; ++a) {
        std::vector<cplx> ph(ns);
        for (int b = 0; b < ns; ++b) ph[b] = std::polar(1.0, frequency(b) * s[a]);
        for (int j = 0; j <= J; ++j) {
            cplx acc{};
            const cplx* dj = &d[static_cast<std::size_t>(j) * ns];
            for (int b = 0; b < ns; ++b) acc += dj[b] * ph[b];
            e[j * n + a] = acc;
        }
    }
    return e;
}

ModeExpansion ModeExpansion::operator+(const ModeExpansion& o) const {
    if (o.J != J || o.ns != ns) throw std::invalid_argument("ModeExpansion shapes differ");
    ModeExpansion r = *this;
    for (std::size_t i = 0; i < d.size(); ++i) r.d[i] += o.d[i];
    return r;
}

namespace {

std::vector<cplx> d_s(const std::vector<cplx>& v, const SxGrid& g, int order) {
    std::vector<cplx> f = v;
    const int ns = g.ns, nx = g.x.n;
    fft_cols(f.data(), ns, nx, -1);
    const double w = kTwoPi / g.period;
    for (int b = 0; b < ns; ++b) {
        const int m = fft_freq(b, ns);
        cplx mult = std::pow(cplx(0.0, w * m), order) / static_cast<double>(ns);
        if (ns % 2 == 0 && b == ns / 2 && order % 2) mult = 0.0;
        for (int i = 0; i < nx; ++i) f[static_cast<std::size_t>(b) * nx + i] *= mult;
    }
    fft_cols(f.data(), ns, nx, +1);
    return f;
}

std::vector<cplx> d_x(const std::vector<cplx>& v, const SxGrid& g, int order) {
    std::vector<cplx> f = v;
    const int ns = g.ns, nx = g.x.n;
    fft_rows(f.data(), ns, nx, -1);
    std::vector<cplx> mult(nx);
    for (int i = 0; i < nx; ++i) {
        const double k = kTwoPi * fft_freq(i, nx) / (2.0 * g.x.X);
        mult[i] = std::pow(cplx(0.0, k), order) / static_cast<double>(nx);
        if (nx % 2 == 0 && i == nx / 2 && order % 2) mult[i] = 0.0;
    }
    for (int a = 0; a < ns; ++a)
        for (int i = 0; i < nx; ++i) f[static_cast<std::size_t>(a) * nx + i] *= mult[i];
    fft_rows(f.data(), ns, nx, +1);
    return f;
}

double rel_l2(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

HierarchySolution run_cascade(const ModeProblem& P, int J) {
    const FloquetFrame& F = P.frame;
    SxGrid grid = auto_frame_grid(F, P.model, J, P.L_max);
    if (P.x_nodes > 0) grid.x.n = P.x_nodes;
    if (P.x_extent > 0.0) grid.x.X = P.x_extent;
    const int ns = grid.ns, nx = grid.x.n;
    const std::size_t N = grid.size();
    FrameBasis basis(F, P.model, J, grid, P.policy);
    const OperatorSeries ops = build_operator_series(P.model, std::max(P.order_max, 1));
    const double floor = P.resolved_divisor_floor();

    HierarchySolution sol;
    sol.k0 = P.k0;
    sol.epsilon = P.epsilon;
    sol.delta = P.delta;
    sol.energies = basis.energies;
    const double Ek0 = basis.energies[P.k0];
    sol.E = {Ek0};
    sol.E_imag = {0.0};
    sol.diagnostics.divisor_floor = floor;
    sol.diagnostics.smallest_divisor = std::numeric_limits<double>::infinity();
    sol.diagnostics.J_used = J;
    sol.diagnostics.grid = grid;

    ModeExpansion v0;
    v0.order = 0;
    v0.J = J;
    v0.ns = ns;
    v0.period = grid.period;
    v0.d.assign(static_cast<std::size_t>(J + 1) * ns, cplx{});
    v0.d[static_cast<std::size_t>(P.k0) * ns] = 1.0;
    sol.v.push_back(v0);

    std::vector<std::vector<cplx>> vs;
    vs.emplace_back(basis.W.begin() + static_cast<std::ptrdiff_t>(P.k0 * N),
                    basis.W.begin() + static_cast<std::ptrdiff_t>((P.k0 + 1) * N));
    const double g = 0.5 * P.epsilon * P.delta * P.delta;
    HermiteBasisSpec spec;
    spec.J_max = J;
    spec.tail_tol = std::numeric_limits<double>::infinity();

    for (int p = 1; p <= P.order_max; ++p) {
        std::vector<cplx> Q(N, cplx{});
        for (int i = 1; i < p; ++i)
            for (std::size_t n = 0; n < N; ++n) Q[n] += sol.E[i] * vs[p - i][n];
        for (int a = 0; a < p; ++a)
            for (int b = 0; a + b < p; ++b) {
                const int c = p - 1 - a - b;
                for (std::size_t n = 0; n < N; ++n) Q[n] += g * vs[a][n] * std::conj(vs[b][n]) * vs[c][n];
            }
        for (int m = 1; m <= p; ++m) {
            const auto Lv = apply_operator(ops.at(m), vs[p - m], grid);
            for (std::size_t n = 0; n < N; ++n) Q[n] -= Lv[n];
        }

        const FrameCoefficients fc = frame_decompose(Q, basis, spec, P.policy);
        const cplx Ep = -fc.coeff(P.k0, 0);

        ModeExpansion vp;
        vp.order = p;
        vp.J = J;
        vp.ns = ns;
        vp.period = grid.period;
        vp.d.assign(fc.c.size(), cplx{});
        vp.j_tail = fc.j_tail;
        vp.l_tail = fc.l_tail;
        double cmax = 0.0;
        for (const auto& c : fc.c) cmax = std::max(cmax, std::abs(c));
        for (int j = 0; j <= J; ++j) {
            for (int b = 0; b < ns; ++b) {
                if (ns % 2 == 0 && b == ns / 2) continue;
                if (j == P.k0 && b == 0) continue;
                const std::size_t idx = static_cast<std::size_t>(j) * ns + b;
                const double f = fc.frequency(b);
                const double D = basis.energies[j] - Ek0 - f;
                const double mag = std::abs(fc.c[idx]);
                if (mag > P.coef_floor * cmax) {
                    if (std::abs(D) < sol.diagnostics.smallest_divisor) {
                        sol.diagnostics.smallest_divisor = std::abs(D);
                        sol.diagnostics.smallest_j = j;
                        sol.diagnostics.smallest_l = static_cast<int>(std::lround(f));
                    }
                    if (std::abs(D) < floor) throw SmallDivisorBreach(j, static_cast<int>(std::lround(f)), D, mag);
                }
                vp.d[idx] = fc.c[idx] / D;
            }
        }
        std::vector<cplx> e = vp.d;
        fft_rows(e.data(), J + 1, ns, +1);
        std::vector<cplx> v;
        frame_synthesize(basis.W, e, J, ns, nx, v, P.policy);

        // the order-p equation must hold on the grid
        auto lhs = apply_operator(ops.at(0), v, grid);
        std::vector<cplx> rhs(N);
        for (std::size_t n = 0; n < N; ++n) {
            lhs[n] -= Ek0 * v[n];
            rhs[n] = Q[n] + Ep * vs[0][n];
        }
        sol.diagnostics.pde_residuals.push_back(rel_l2(lhs, rhs));
        sol.diagnostics.j_tails.push_back(fc.j_tail);
        sol.diagnostics.l_tails.push_back(fc.l_tail);

        sol.E.push_back(Ep.real());
        sol.E_imag.push_back(Ep.imag());
        sol.v.push_back(std::move(vp));
        vs.push_back(std::move(v));
    }
    return sol;
}

double worst_tail(const HierarchySolution& s) {
    double t = 0.0;
    for (double v : s.diagnostics.j_tails) t = std::max(t, v);
    for (double v : s.diagnostics.l_tails) t = std::max(t, v);
    return t;
}

}  // namespace

std::vector<cplx> apply_operator(const std::vector<OperatorTerm>& terms, const std::vector<cplx>& v, const SxGrid& grid) {
    const int ns = grid.ns, nx = grid.x.n;
    std::vector<cplx> out(grid.size(), cplx{});
    std::map<std::pair<int, int>, std::vector<cplx>> cache;
    auto deriv = [&](int a, int b) -> const std::vector<cplx>& {
        auto key = std::make_pair(a, b);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        std::vector<cplx> f = v;
        if (a) f = d_s(f, grid, a);
        if (b) f = d_x(f, grid, b);
        return cache.emplace(key, std::move(f)).first->second;
    };
    const auto s = grid.s_nodes();
    for (const auto& t : terms) {
        const auto& f = deriv(t.ds_order, t.dx_order);
        for (int a = 0; a < ns; ++a) {
            const cplx c = t.factor * t.coef(s[a]);
            for (int i = 0; i < nx; ++i) {
                const std::size_t idx = static_cast<std::size_t>(a) * nx + i;
                out[idx] += c * std::pow(grid.x.x(i), t.x_power) * f[idx];
            }
        }
    }
    return out;
}

HierarchySolution solve_cascade(const ModeProblem& P) {
    if (P.frame.stability != Stability::Elliptic)
        throw Error(ErrorKind::CertificateRefused, "cascade needs an elliptic geodesic");
    if (!P.force) {
        if (!P.certificate) throw Error(ErrorKind::CertificateRefused, "no Diophantine certificate supplied");
        if (P.certificate->verdict != Verdict::Pass)
            throw Error(ErrorKind::CertificateRefused,
                        std::string("Diophantine certificate verdict ") + to_string(P.certificate->verdict));
    }
    if (P.k0 < 0 || 2 * P.k0 > P.J_max) throw std::invalid_argument("k0 must satisfy 0 <= k0 <= J_max / 2");
    if (P.order_max < 0) throw std::invalid_argument("order_max must be nonnegative");

    HierarchySolution sol = run_cascade(P, P.J_max);
    if (worst_tail(sol) > P.tail_tol && P.auto_refine) sol = run_cascade(P, 2 * P.J_max);
    if (worst_tail(sol) > P.tail_tol)
        throw Error(ErrorKind::TailTooLarge,
                    "cascade truncation tail " + sci(worst_tail(sol)) + " exceeds " + sci(P.tail_tol));
    return sol;
}

double first_correction_constant(const ModeProblem& P) {
    HermiteBasisSpec spec;
    spec.J_max = std::max(P.J_max, P.k0);
    spec.tail_tol = std::numeric_limits<double>::infinity();
    const double pk0 = cubic_self_coeffs(P.k0, spec).p[P.k0];
    double integral = 0.0;
    for (int k = 0; k < P.frame.nodes; ++k) integral += std::exp(-P.frame.alpha[k]);
    integral *= kTwoPi / P.frame.nodes;
    return pk0 / (4.0 * kPi) * integral;
}

std::vector<cplx> evaluate_expansion(const ModeExpansion& v, const FloquetFrame& frame, const CurvatureModel& model,
                                     const std::vector<double>& s, const std::vector<double>& x, Policy policy) {
    std::vector<double> energies;
    for (int j = 0; j <= v.J; ++j) energies.push_back(mode_energy(frame, model, j));
    const auto fn = frame_nodes(frame, s);
    std::vector<cplx> out;
    frame_synthesize_direct(fn, energies, v.e_at(s), v.J, x, out, policy);
    return out;
}

}  // namespace geobeam

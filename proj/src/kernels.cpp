#include "geobeam/kernels.hpp"

#include <omp.h>

#include <cmath>

#include "geobeam/hermite.hpp"

namespace geobeam {

int thread_count() { return omp_get_max_threads(); }

namespace {

template <class F>
void for_rows(int n, Policy policy, F&& f) {
    if (policy == Policy::Parallel) {
#pragma omp parallel for schedule(static)
        for (int a = 0; a < n; ++a) f(a);
    } else {
        for (int a = 0; a < n; ++a) f(a);
    }
}

constexpr double kD1[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
constexpr double kD2[4] = {8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0};
constexpr double kD2c = -205.0 / 72.0;

}  // namespace

void frame_table(const FrameNodes& fn, const std::vector<double>& energies, const std::vector<double>& x, int J,
                 std::vector<cplx>& W, Policy policy) {
    const int ns = static_cast<int>(fn.s.size()), nx = static_cast<int>(x.size());
    W.assign(static_cast<std::size_t>(J + 1) * ns * nx, cplx{});
    for_rows(ns, policy, [&](int a) {
        std::vector<double> phi(J + 1);
        std::vector<cplx> pre(J + 1);
        const double ea = std::exp(-fn.alpha[a]);
        for (int j = 0; j <= J; ++j)
            pre[j] = std::polar(std::sqrt(ea), -fn.s[a] * energies[j] - (0.5 + j) * fn.beta[a]);
        for (int i = 0; i < nx; ++i) {
            hermite_all(J, x[i] * ea, phi.data());
            const cplx chirp = std::polar(1.0, 0.5 * fn.alpha_dot[a] * x[i] * x[i]);
            for (int j = 0; j <= J; ++j)
                W[(static_cast<std::size_t>(j) * ns + a) * nx + i] = pre[j] * chirp * phi[j];
        }
    });
}

void frame_project(const std::vector<cplx>& W, const std::vector<cplx>& Q, int J, int ns, int nx, double dx,
                   std::vector<cplx>& h, Policy policy) {
    h.assign(static_cast<std::size_t>(J + 1) * ns, cplx{});
    for_rows((J + 1) * ns, policy, [&](int ja) {
        const int a = ja % ns;
        const cplx* w = &W[static_cast<std::size_t>(ja) * nx];
        const cplx* q = &Q[static_cast<std::size_t>(a) * nx];
        cplx acc{};
        for (int i = 0; i < nx; ++i) acc += std::conj(w[i]) * q[i];
        h[ja] = acc * dx;
    });
}

void frame_synthesize(const std::vector<cplx>& W, const std::vector<cplx>& e, int J, int ns, int nx,
                      std::vector<cplx>& V, Policy policy) {
    V.assign(static_cast<std::size_t>(ns) * nx, cplx{});
    for_rows(ns, policy, [&](int a) {
        cplx* v = &V[static_cast<std::size_t>(a) * nx];
        for (int j = 0; j <= J; ++j) {
            const cplx c = e[static_cast<std::size_t>(j) * ns + a];
            if (c == cplx{}) continue;
            const cplx* w = &W[(static_cast<std::size_t>(j) * ns + a) * nx];
            for (int i = 0; i < nx; ++i) v[i] += c * w[i];
        }
    });
}

void frame_synthesize_direct(const FrameNodes& fn, const std::vector<double>& energies, const std::vector<cplx>& e,
                             int J, const std::vector<double>& x, std::vector<cplx>& V, Policy policy) {
    const int ns = static_cast<int>(fn.s.size()), nx = static_cast<int>(x.size());
    V.assign(static_cast<std::size_t>(ns) * nx, cplx{});
    for_rows(ns, policy, [&](int a) {
        std::vector<double> phi(J + 1);
        std::vector<cplx> coef(J + 1);
        const double ea = std::exp(-fn.alpha[a]);
        for (int j = 0; j <= J; ++j)
            coef[j] = e[static_cast<std::size_t>(j) * ns + a] *
                      std::polar(std::sqrt(ea), -fn.s[a] * energies[j] - (0.5 + j) * fn.beta[a]);
        for (int i = 0; i < nx; ++i) {
            hermite_all(J, x[i] * ea, phi.data());
            cplx acc{};
            for (int j = 0; j <= J; ++j) acc += coef[j] * phi[j];
            V[static_cast<std::size_t>(a) * nx + i] = acc * std::polar(1.0, 0.5 * fn.alpha_dot[a] * x[i] * x[i]);
        }
    });
}

void strip_dr(const cplx* U, int ns, int nr, double dr, cplx* d1, cplx* d2, Policy policy) {
    const double i1 = 1.0 / dr, i2 = 1.0 / (dr * dr);
    for_rows(ns, policy, [&](int a) {
        const cplx* u = U + static_cast<std::size_t>(a) * nr;
        auto at = [&](int i) { return (i < 0 || i >= nr) ? cplx{} : u[i]; };
        for (int i = 0; i < nr; ++i) {
            cplx s1{}, s2 = kD2c * u[i];
            for (int k = 1; k <= 4; ++k) {
                const cplx p = at(i + k), m = at(i - k);
                s1 += kD1[k - 1] * (p - m);
                s2 += kD2[k - 1] * (p + m);
            }
            if (d1) d1[static_cast<std::size_t>(a) * nr + i] = s1 * i1;
            if (d2) d2[static_cast<std::size_t>(a) * nr + i] = s2 * i2;
        }
    });
}

void strip_laplacian(const LaplacianCoeffs& L, const std::vector<cplx>& U, std::vector<cplx>& out, Policy policy) {
    const int ns = L.ns, nr = L.nr;
    const std::size_t n = static_cast<std::size_t>(ns) * nr;
    std::vector<cplx> us(U), uss(n), ur(n), urr(n);
    fft_cols(us.data(), ns, nr, -1);
    const double w = kTwoPi / L.period;
    for_rows(ns, policy, [&](int a) {
        const int k = fft_freq(a, ns);
        // the unpaired Nyquist bin keeps only its even part
        const bool nyq = (ns % 2 == 0) && a == ns / 2;
        const double kc = L.carrier;
        const double kk = w * k + kc;
        const double k2 = -(w * k) * (w * k);
        for (int i = 0; i < nr; ++i) {
            const std::size_t idx = static_cast<std::size_t>(a) * nr + i;
            const cplx f = us[idx] / static_cast<double>(ns);
            if (nyq) {
                uss[idx] = f * (k2 - kc * kc);
                us[idx] = f * cplx(0.0, kc);
            } else {
                uss[idx] = -f * kk * kk;
                us[idx] = f * cplx(0.0, kk);
            }
        }
    });
    fft_cols(us.data(), ns, nr, +1);
    fft_cols(uss.data(), ns, nr, +1);
    strip_dr(U.data(), ns, nr, L.dr, ur.data(), urr.data(), policy);
    out.resize(n);
    for_rows(ns, policy, [&](int a) {
        for (int i = 0; i < nr; ++i) {
            const std::size_t idx = static_cast<std::size_t>(a) * nr + i;
            out[idx] = L.inv_a2[idx] * uss[idx] - L.as_a3[idx] * us[idx] + urr[idx] + L.ar_a[idx] * ur[idx];
        }
    });
    // Dirichlet node at r = -r0
    for (int a = 0; a < ns; ++a) out[static_cast<std::size_t>(a) * nr] = 0.0;
}

}  // namespace geobeam

#include "geobeam/hermite.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>
#include <string>

#include "geobeam/errors.hpp"

namespace geobeam {

void hermite_all(int J, double x, double* out) {
    out[0] = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
    if (J == 0) return;
    out[1] = std::sqrt(2.0) * x * out[0];
    for (int k = 1; k < J; ++k)
        out[k + 1] = std::sqrt(2.0 / (k + 1)) * x * out[k] - std::sqrt(static_cast<double>(k) / (k + 1)) * out[k - 1];
}

double eval_hermite(int k, double x) {
    std::vector<double> v(k + 1);
    hermite_all(k, x, v.data());
    return v[k];
}

std::vector<double> eval_hermite(int k, const std::vector<double>& x) {
    std::vector<double> out(x.size()), buf(k + 1);
    for (std::size_t i = 0; i < x.size(); ++i) {
        hermite_all(k, x[i], buf.data());
        out[i] = buf[k];
    }
    return out;
}

GaussHermite gauss_hermite(int n) {
    if (n < 1) throw std::invalid_argument("gauss_hermite needs at least one node");
    // Golub-Welsch for the nodes, then Newton polish on phi_n
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) T(k, k - 1) = T(k - 1, k) = std::sqrt(0.5 * k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T, Eigen::EigenvaluesOnly);
    GaussHermite g;
    g.nodes.resize(n);
    g.weights.resize(n);
    g.folded.resize(n);
    std::vector<double> phi(n + 1);
    for (int i = 0; i < n; ++i) {
        double x = es.eigenvalues()(i);
        for (int it = 0; it < 4; ++it) {
            hermite_all(n, x, phi.data());
            const double d = std::sqrt(2.0 * n) * phi[n - 1] - x * phi[n];
            if (d == 0.0) break;
            const double step = phi[n] / d;
            x -= step;
            if (std::abs(step) < 1e-16 * (1.0 + std::abs(x))) break;
        }
        hermite_all(n - 1, x, phi.data());
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += phi[k] * phi[k];
        g.nodes[i] = x;
        g.folded[i] = 1.0 / s;
        g.weights[i] = g.folded[i] * std::exp(-x * x);
    }
    return g;
}

ProductCoeffs cubic_self_coeffs(int k0, const HermiteBasisSpec& spec) {
    const int J = spec.J_max;
    if (k0 < 0 || k0 > J) throw std::invalid_argument("cubic_self_coeffs: k0 outside basis");
    const auto g = gauss_hermite(spec.nodes());
    ProductCoeffs out;
    out.p.assign(J + 1, 0.0);
    std::vector<double> phi(J + 1);
    // integrand phi_j phi_k0^3 carries exp(-2x^2): substitute x = y / sqrt(2)
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const double x = g.nodes[i] / std::sqrt(2.0);
        const double w = g.weights[i] * std::exp(g.nodes[i] * g.nodes[i]) / std::sqrt(2.0);
        hermite_all(J, x, phi.data());
        const double c = w * phi[k0] * phi[k0] * phi[k0];
        for (int j = 0; j <= J; ++j) out.p[j] += c * phi[j];
    }
    for (int j = 0; j <= J; ++j)
        if ((j - k0) % 2 != 0) out.p[j] = 0.0;
    // total mass of phi_k0^3 with exp(-3x^2): substitute x = y / sqrt(3)
    double total = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const double x = g.nodes[i] / std::sqrt(3.0);
        const double w = g.weights[i] * std::exp(g.nodes[i] * g.nodes[i]) / std::sqrt(3.0);
        const double f = eval_hermite(k0, x);
        total += w * std::pow(f, 6);
    }
    double kept = 0.0;
    for (double v : out.p) kept += v * v;
    out.tail_mass = std::max(0.0, total - kept);
    if (out.tail_mass > spec.tail_tol)
        throw Error(ErrorKind::TailTooLarge, "cubic expansion of phi_" + std::to_string(k0) + " discards mass " +
                                                 sci(out.tail_mass));
    return out;
}

std::vector<double> monomial_coeffs(int k0, int m) {
    std::vector<double> q(k0 + m + 1, 0.0);
    q[k0] = 1.0;
    const double r2 = 1.0 / std::sqrt(2.0);
    for (int step = 0; step < m; ++step) {
        std::vector<double> nq(q.size(), 0.0);
        for (int k = 0; k < static_cast<int>(q.size()); ++k) {
            if (q[k] == 0.0) continue;
            if (k > 0) nq[k - 1] += q[k] * std::sqrt(static_cast<double>(k)) * r2;
            if (k + 1 < static_cast<int>(q.size())) nq[k + 1] += q[k] * std::sqrt(static_cast<double>(k + 1)) * r2;
        }
        q = std::move(nq);
    }
    return q;
}

}  // namespace geobeam

#pragma once

#include <vector>

namespace geobeam {

// Orthonormal Hermite function phi_k(x) = (2^k k! sqrt(pi))^{-1/2} H_k(x) exp(-x^2/2).
double eval_hermite(int k, double x);
std::vector<double> eval_hermite(int k, const std::vector<double>& x);
// phi_0..phi_J at a single point
void hermite_all(int J, double x, double* out);

struct GaussHermite {
    std::vector<double> nodes;
    std::vector<double> weights;  // for weight exp(-x^2)
    std::vector<double> folded;   // weights * exp(x^2), for integrands given as Hermite-function products
};

GaussHermite gauss_hermite(int n);

struct HermiteBasisSpec {
    int J_max = 40;
    int quad_nodes = 0;  // 0 selects 2 J_max + 16
    double tail_tol = 1e-10;
    int nodes() const { return quad_nodes > 0 ? quad_nodes : 2 * J_max + 16; }
};

struct ProductCoeffs {
    std::vector<double> p;
    double tail_mass = 0.0;
};

// |phi_k0|^2 phi_k0 = sum_j p_j phi_j, truncated at J_max.
ProductCoeffs cubic_self_coeffs(int k0, const HermiteBasisSpec& spec = {});
// x^m phi_k0 = sum_j q_j phi_j, exact via ladder steps; length k0 + m + 1.
std::vector<double> monomial_coeffs(int k0, int m);

}  // namespace geobeam

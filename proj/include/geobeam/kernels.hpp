#pragma once

#include <vector>

#include "geobeam/floquet.hpp"
#include "geobeam/fourier.hpp"

// Data-parallel kernels. Each has a serial reference path and an OpenMP path;
// both traverse reductions in the same order, so results agree bit for bit.
namespace geobeam {

enum class Policy { Serial, Parallel };

int thread_count();

// W[(j * ns + a) * nx + i] = w_j(s_a, x_i) for j <= J
void frame_table(const FrameNodes& fn, const std::vector<double>& energies, const std::vector<double>& x, int J,
                 std::vector<cplx>& W, Policy policy = Policy::Parallel);

// h[j * ns + a] = dx sum_i conj(W_j(s_a, x_i)) Q(s_a, x_i)
void frame_project(const std::vector<cplx>& W, const std::vector<cplx>& Q, int J, int ns, int nx, double dx,
                   std::vector<cplx>& h, Policy policy = Policy::Parallel);

// V(s_a, x_i) = sum_j e[j * ns + a] W_j(s_a, x_i)
void frame_synthesize(const std::vector<cplx>& W, const std::vector<cplx>& e, int J, int ns, int nx,
                      std::vector<cplx>& V, Policy policy = Policy::Parallel);

// Same sum evaluated directly at x = r / sqrt(h) without a stored table.
void frame_synthesize_direct(const FrameNodes& fn, const std::vector<double>& energies, const std::vector<cplx>& e,
                             int J, const std::vector<double>& x, std::vector<cplx>& V,
                             Policy policy = Policy::Parallel);

// Coefficients of the Laplace-Beltrami operator on a strip field exp(i carrier s) U(s, r):
// a^{-2} d_s^2 - a_s a^{-3} d_s + d_r^2 + (a_r / a) d_r, homogeneous Dirichlet outside |r| < r0.
struct LaplacianCoeffs {
    int ns = 0, nr = 0, carrier = 0;
    double period = kTwoPi, dr = 0.0;
    std::vector<double> inv_a2, as_a3, ar_a;
};

void strip_laplacian(const LaplacianCoeffs& L, const std::vector<cplx>& U, std::vector<cplx>& out,
                     Policy policy = Policy::Parallel);

// eighth-order central differences in r with zero extension
void strip_dr(const cplx* U, int ns, int nr, double dr, cplx* d1, cplx* d2, Policy policy = Policy::Parallel);

}  // namespace geobeam

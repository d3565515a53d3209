#pragma once

#include <cstdint>
#include <vector>

#include "geobeam/hierarchy.hpp"
#include "geobeam/kernels.hpp"
#include "geobeam/surface.hpp"

namespace geobeam {

// Smooth even cutoff: 1 on |r| <= r0/2, 0 for |r| >= 0.9 r0.
double cutoff(double r, double r0, double inner = 0.5, double outer = 0.9);

struct Quasimode {
    double h = 0.0, kappa = 1.0, sigma = 0.0, delta = 1.0, epsilon = 1.0;
    int k0 = 0, p = 0;
    StripGrid grid;           // grid.carrier = 1/h
    std::vector<cplx> U;      // u_p = exp(i s / h) U(s, r)
    double lambda_p = 0.0;
    double l2_norm = 0.0;     // on M, with area element a ds dr
    std::vector<double> E;
    double frame_lambda = 0.0;
    std::uint64_t model_hash = 0;
    double cutoff_inner = 0.5, cutoff_outer = 0.9;
};

// Default strip grid for a model: carrier window in s, uniform r nodes.
StripGrid default_strip_grid(const CurvatureModel& model, int ns = 64, int nr = 512);

LaplacianCoeffs laplacian_coeffs(const MetricStrip& metric, int carrier);

double eigenvalue_expansion(const std::vector<double>& E, double h);

Quasimode assemble(const HierarchySolution& solution, const FloquetFrame& frame, const CurvatureModel& model, double h,
                   double kappa, double sigma, const MetricStrip& metric, Policy policy = Policy::Parallel);

// Area-weighted L2 norm on M; the doubled cover of a twisted strip counts once.
double l2_norm_on_M(const std::vector<cplx>& U, const MetricStrip& metric);

// Flat H^sigma norm on the covering rectangle: multiplier (1 + (k + carrier)^2 + xi^2)^{sigma/2}.
double sobolev_norm(const std::vector<cplx>& U, const StripGrid& grid, double sigma);

struct ResidualNorms {
    double L2 = 0.0, H1 = 0.0, H2 = 0.0;
};

struct ResidualField {
    std::vector<cplx> R;  // envelope of -Lap u - lambda u + eps |u|^2 u
    ResidualNorms norms;
};

ResidualField residual(const Quasimode& q, const MetricStrip& metric, Policy policy = Policy::Parallel);

struct SlopeFit {
    double slope = 0.0, intercept = 0.0, stderr_slope = 0.0, ci_low = 0.0, ci_high = 0.0;
};
SlopeFit fit_loglog(const std::vector<double>& h, const std::vector<double>& y);

struct ResidualRow {
    double h, L2, H1, H2, norm, lambda_p;
    double rayleigh;  // <-Lap u + eps |u|^2 u, u> / <u, u> measured on the grid
};

struct EigenvalueFit {
    double a = 0.0, b = 0.0, c = 0.0;  // (1/h^2 - lambda_p) h / 2 ~ a + b sqrt(h) + c h
    double E0 = 0.0, E1 = 0.0;
};

struct ResidualReport {
    std::vector<ResidualRow> rows;
    SlopeFit L2, H1, H2;
    double norm_ratio_min = 0.0, norm_ratio_max = 0.0;
    EigenvalueFit eigen;     // fitted to the expansion lambda_p
    EigenvalueFit rayleigh;  // fitted to the measured Rayleigh quotient
    double metric_a_min = 0.0, metric_a_max = 0.0;
};

struct ScanOptions {
    std::vector<double> h_list{1.0 / 8, 1.0 / 12, 1.0 / 16, 1.0 / 24, 1.0 / 32, 1.0 / 48, 1.0 / 64};
    double kappa = 1.0;
    double sigma = 0.0;
    int ns = 64;
    int nr = 512;
    Policy policy = Policy::Parallel;
};

// Re-solves the cascade per h when delta depends on h; problem.delta is ignored.
ResidualReport residual_scan(const ModeProblem& problem, const ScanOptions& opts);

}  // namespace geobeam

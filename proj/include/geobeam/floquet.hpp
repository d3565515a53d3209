#pragma once

#include <array>
#include <vector>

#include "geobeam/fourier.hpp"
#include "geobeam/surface.hpp"

namespace geobeam {

enum class Stability { Elliptic, Degenerate, Hyperbolic };
const char* to_string(Stability s);

// Period map of y'' + R(s) y = 0 in the basis (y, y'); m = [[m11, m12], [m21, m22]].
struct Monodromy {
    std::array<double, 4> m{};
    double trace() const { return m[0] + m[3]; }
    double det() const { return m[0] * m[3] - m[1] * m[2]; }
    Stability stability() const;
};

Monodromy compute_monodromy(const CurvatureModel& model, double ode_tol = 1e-12);

struct HillOptions {
    double ode_tol = 1e-12;
    int nodes = 256;
    // use the solution with a0(0) = 1, a0'(0) = i instead of the Floquet eigensolution
    bool unit_imaginary = false;
};

struct FloquetFrame {
    Monodromy monodromy;
    Stability stability = Stability::Elliptic;
    double lambda = 0.0;
    cplx multiplier;
    int omega = 1;
    bool eigen_normalized = true;
    int nodes = 0;
    std::vector<cplx> a0, a0_dot;  // at s_k = 2 pi k / nodes
    std::vector<double> alpha, alpha_dot, theta;
    double wronskian_defect = 0.0;
    double alpha_mismatch = 0.0;
    double theta_mismatch = 0.0;
    double branch_defect = 0.0;

    double node(int k) const { return kTwoPi * k / nodes; }
    double alpha_at(double s) const { return alpha_i_(s).real(); }
    double alpha_dot_at(double s) const { return alpha_dot_i_(s).real(); }
    double theta_at(double s) const { return theta_i_(s).real(); }
    double beta_at(double s) const { return theta_at(s) + lambda * s / kTwoPi; }
    void build_interpolants();

private:
    TrigInterpolant alpha_i_, alpha_dot_i_, theta_i_;
};

FloquetFrame solve_hill(const CurvatureModel& model, const HillOptions& opts = {});

enum class Verdict { Pass, Fail, Inconclusive };
const char* to_string(Verdict v);

struct DiophantineCert {
    double tau = 1.0;
    int N = 0;
    double ratio = 0.0;  // lambda / pi
    double mu_lower = 0.0;
    int p = 0, q = 0;    // worst pair
    double min_gap = 0.0;  // smallest |p - q ratio| in range
    double near_floor = 0.0;
    Verdict verdict = Verdict::Inconclusive;
};

// |p - q x| (|p| + |q|)^tau over 0 < |p| + |q| <= N, q >= 1.
DiophantineCert certify_ratio(double x, double tau, int N, double near_floor = 1e-6, double exact_tol = 1e-9);
DiophantineCert certify_diophantine(const FloquetFrame& frame, double tau, int N, double near_floor = 1e-6);

double mode_energy(const FloquetFrame& frame, const CurvatureModel& model, int k);

// Shift the mean of R so that lambda / pi equals target; returns the shifted model.
CurvatureModel tune_mean_curvature(const CurvatureModel& model, double target_ratio, const HillOptions& opts = {});

// Frame data at arbitrary s nodes.
struct FrameNodes {
    std::vector<double> s, alpha, alpha_dot, beta;
};
FrameNodes frame_nodes(const FloquetFrame& frame, const std::vector<double>& s);

// Samples of w_k(s, x), row-major with s slow.
std::vector<cplx> frame_w(const FloquetFrame& frame, int k, double E0, const std::vector<double>& s,
                          const std::vector<double>& x);

// Reference propagator for i psi_s = -psi_xx / 2 + R(s) x^2 psi / 2 (fourth-order split step).
std::vector<cplx> propagate_linear(const CurvatureModel& model, const std::vector<cplx>& psi0, const XGrid& grid,
                                   double s0, double s1, int steps, double boundary_tol = 1e-10);

}  // namespace geobeam

#pragma once

#include <optional>
#include <vector>

#include "geobeam/floquet.hpp"
#include "geobeam/frame.hpp"
#include "geobeam/surface.hpp"

namespace geobeam {

struct ModeProblem {
    FloquetFrame frame;
    CurvatureModel model;
    int k0 = 0;
    double epsilon = 1.0;
    double delta = 1.0;
    int order_max = 3;
    int J_max = 40;
    int L_max = 32;
    double divisor_floor = -1.0;  // negative: derived from the certificate
    double tail_tol = 1e-7;
    double coef_floor = 1e-12;    // coefficients below this (relative) are negligible for the divisor gate
    bool auto_refine = true;
    bool force = false;           // skip the certificate gate
    std::optional<DiophantineCert> certificate;
    int x_nodes = 0;              // 0 selects an automatic x-grid
    double x_extent = 0.0;
    Policy policy = Policy::Parallel;

    double resolved_divisor_floor() const;
};

// v_p(s, x) = sum_j e_j(s) w_j(s, x), e_j(s) = sum_b d[j * ns + b] exp(i f_b s)
struct ModeExpansion {
    int order = 0;
    int J = 0;
    int ns = 0;
    double period = kTwoPi;
    std::vector<cplx> d;
    double j_tail = 0.0, l_tail = 0.0;

    double frequency(int b) const { return kTwoPi / period * fft_freq(b, ns); }
    cplx at(int j, int l) const;
    std::vector<cplx> e_at(const std::vector<double>& s) const;  // [j * s.size() + a]
    ModeExpansion operator+(const ModeExpansion& o) const;
};

struct CascadeDiagnostics {
    double divisor_floor = 0.0;
    double smallest_divisor = 0.0;
    int smallest_j = 0, smallest_l = 0;
    std::vector<double> j_tails, l_tails, pde_residuals;
    int J_used = 0;
    SxGrid grid;
};

struct HierarchySolution {
    int k0 = 0;
    double epsilon = 1.0, delta = 1.0;
    std::vector<double> E;       // E_0 .. E_p
    std::vector<double> E_imag;  // imaginary parts left by the numerics
    std::vector<ModeExpansion> v;
    std::vector<double> energies;  // E_0(j)
    CascadeDiagnostics diagnostics;
    int order() const { return static_cast<int>(E.size()) - 1; }
};

HierarchySolution solve_cascade(const ModeProblem& problem);

double first_correction_constant(const ModeProblem& problem);

std::vector<cplx> evaluate_expansion(const ModeExpansion& v, const FloquetFrame& frame, const CurvatureModel& model,
                                     const std::vector<double>& s, const std::vector<double>& x,
                                     Policy policy = Policy::Parallel);

// Apply factor * coef(s) * x^p d_s^a d_x^b for every term of one operator slot on an (s, x) grid.
std::vector<cplx> apply_operator(const std::vector<OperatorTerm>& terms, const std::vector<cplx>& v, const SxGrid& grid);

}  // namespace geobeam

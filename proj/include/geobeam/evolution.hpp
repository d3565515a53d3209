#pragma once

#include <limits>
#include <vector>

#include "geobeam/assembler.hpp"

namespace geobeam {

struct EvolutionConfig {
    double t_end = 1.0;
    double dt = 0.0;            // 0 selects the stability bound times `safety`
    double safety = 0.9;
    int samples = 50;           // uniform sample intervals over [0, t_end]
    double sigma_track = 0.2;   // H^sigma order for deviation tracking
    double lambda_ref = std::numeric_limits<double>::quiet_NaN();  // rotating frame; NaN selects lambda_p
    double edge_tol = 1e-6;     // relative mass allowed within 10% of the strip boundary
    bool keep_snapshots = false;
    bool track_energy = true;
    Policy policy = Policy::Parallel;
};

struct EvolutionResult {
    std::vector<double> t, mass, dev_L2, dev_Hsigma, energy, edge_mass;
    double dt = 0.0;
    long steps = 0;
    double lambda_ref = 0.0;
    double ref_L2 = 0.0, ref_Hsigma = 0.0;  // norms of u_p
    double mass_drift = 0.0;                // max relative deviation of the mass
    std::vector<std::vector<cplx>> snapshots;  // rotating-frame envelopes at sample times
    std::vector<cplx> final_U;
};

// Largest stable RK4 step for the strip operator.
double stable_step(const MetricStrip& metric, int carrier, double lambda_ref);

// i u_t + Lap u = eps |u|^2 u from u(0) = u_p, compared with exp(-i lambda_p t) u_p.
EvolutionResult evolve_nls(const Quasimode& q, const MetricStrip& metric, const EvolutionConfig& cfg,
                           const std::vector<cplx>* initial = nullptr);

struct InstabilityResult {
    EvolutionResult run1, run2;
    std::vector<double> t, separation, v_separation, predicted, dev1, dev2;
    double delta_lambda = 0.0;
    double profile_norm = 0.0;  // H^sigma norm of u_p^1 / delta
    double first_extremum_t = 0.0;
    double ratio = 0.0;         // measured / predicted at the first extremum
    double initial_separation = 0.0, final_separation = 0.0;
    double triangle_margin = 0.0;  // min over samples of sep - (vsep - dev1 - dev2)
    bool extremum_found = false;
};

InstabilityResult instability_pair(const Quasimode& q1, const Quasimode& q2, const MetricStrip& metric,
                                   const EvolutionConfig& cfg);

struct GronwallDiagnostic {
    std::vector<double> t, F, dFdt;
    double alpha = 0.0;
    double c_forcing = 0.0, c_linear = 0.0, c_cubic = 0.0;
    double linear_coefficient = 0.0;  // c_linear h^{-1/2 + 2 sigma}
    double crossover_t = std::numeric_limits<double>::infinity();
    double window_end = 0.0;
    bool crossover = false;
};

GronwallDiagnostic gronwall_tracker(const EvolutionResult& result, const Quasimode& q, double window_tol = 0.1);

// Validity window length 0.5 h^{1/2 - 2 sigma} log(1/h).
double approximation_window(double h, double sigma);

}  // namespace geobeam

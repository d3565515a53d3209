#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "geobeam/surface.hpp"

namespace geobeam {

using json = nlohmann::ordered_json;

struct ModeBlock {
    int k0 = 0;
    int p = 3;
    double epsilon = 1.0;
    double kappa = 1.0;
    double sigma = 0.0;
    double h = 1.0 / 16;
};

struct NumericsBlock {
    double ode_tol = 1e-12;
    int hill_nodes = 256;
    double tau = 1.0;
    int N = 200;
    double near_floor = 1e-6;
    double divisor_floor = -1.0;
    int J_max = 40;
    int L_max = 32;
    double tail_tol = 1e-7;
    bool auto_refine = true;
    bool force = false;
    int ns = 64;
    int nr = 512;
    double dt = 0.0;
    double safety = 0.9;
    double edge_tol = 1e-6;
    int samples = 50;
};

struct ExperimentBlock {
    std::vector<double> h_list{1.0 / 8, 1.0 / 12, 1.0 / 16, 1.0 / 24, 1.0 / 32, 1.0 / 48, 1.0 / 64};
    double t_end = 0.0;  // 0 selects the subcommand default
    double kappa_prime = 1.2;
};

struct OutputBlock {
    std::string dir = ".";
    std::string prefix;  // empty: the subcommand name
    bool json = true;
    bool csv = true;
    bool binary = false;
};

struct RunConfig {
    json surface;  // normalized surface block
    CurvatureModel model;
    ModeBlock mode;
    NumericsBlock numerics;
    ExperimentBlock experiment;
    OutputBlock output;

    // Full configuration with every default filled in.
    json echo() const;
    std::string hash() const;
};

RunConfig parse_config(const json& doc);
RunConfig load_config(const std::string& path);

// Build the curvature model described by a surface block; pointers in errors are rooted at "/surface".
CurvatureModel build_model(const json& surface);

}  // namespace geobeam

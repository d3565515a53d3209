#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "geobeam/fourier.hpp"

namespace geobeam {

// Germ of the surface near the closed geodesic, in Fermi coordinates (s, r)
// with metric dr^2 + a(s,r)^2 ds^2 and a = 1 - R r^2/2 + sum_{j>=3} R_j r^j.
struct CurvatureModel {
    FourierSeries R;
    std::map<int, FourierSeries> higher;  // R_j, j >= 3
    int omega = 1;
    double r0 = 1.0;
    // When set, Taylor data of a beyond this order is treated as unknown.
    std::optional<int> taylor_order;
    // Optional explicit Gauss curvature K(s, r); replaces the polynomial closure.
    std::function<double(double, double)> curvature;
    std::function<double(double, double)> curvature_s;

    static CurvatureModel constant(double R, double r0, int omega = 1);
    // Build the R_j from a polynomial transverse curvature K = sum K_n(s) r^n.
    static CurvatureModel from_curvature(const std::vector<FourierSeries>& K, double r0, int omega = 1);

    void validate() const;
    int stored_order() const;
    // bookkeeping period: 2 pi, or 4 pi for a non-orientable strip
    double period() const { return omega == 1 ? kTwoPi : 2.0 * kTwoPi; }

    // Taylor coefficients A_0..A_jmax of a in r.
    std::vector<FourierSeries> a_taylor(int jmax) const;
    // Coefficients K_0..K_nmax of the curvature polynomial induced by the stored data.
    std::vector<FourierSeries> transverse_curvature(int nmax) const;
};

struct StripGrid {
    int ns = 64;
    int nr = 512;
    double r0 = 1.0;
    double period = kTwoPi;
    int carrier = 0;  // fields are stored as exp(i carrier s) U(s, r)

    double ds() const { return period / ns; }
    double dr() const { return 2.0 * r0 / nr; }
    double s(int k) const { return k * ds(); }
    double r(int i) const { return (2 * i - nr) * r0 / nr; }
    std::size_t size() const { return static_cast<std::size_t>(ns) * nr; }
};

struct MetricStrip {
    StripGrid grid;
    std::vector<double> a, a_r, a_s;  // row-major, s index slow
    double a_min = 0.0, a_max = 0.0;
};

MetricStrip synthesize_metric(const CurvatureModel& model, const StripGrid& grid);

// factor * coef(s) * x^x_power * d_s^ds_order d_x^dx_order
struct OperatorTerm {
    cplx factor;
    FourierSeries coef;
    int x_power = 0;
    int ds_order = 0;
    int dx_order = 0;
};

struct OperatorSeries {
    int max_halfpower = 0;
    std::map<int, std::vector<OperatorTerm>> terms;
    const std::vector<OperatorTerm>& at(int m) const;
};

OperatorSeries build_operator_series(const CurvatureModel& model, int max_halfpower);

}  // namespace geobeam

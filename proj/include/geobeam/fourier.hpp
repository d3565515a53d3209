#pragma once

#include <complex>
#include <utility>
#include <vector>

namespace geobeam {

using cplx = std::complex<double>;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Finite Fourier series f(s) = sum_k c_k exp(i k s / 2). Frequencies are kept in
// half units so that data declared on the doubled period 4*pi fits the same type.
class FourierSeries {
public:
    FourierSeries() = default;
    static FourierSeries constant(double c);
    // pairs[n] = (a_n, b_n) for a_0 + sum a_n cos(n nu s) + b_n sin(n nu s), nu = 1 or 1/2
    static FourierSeries from_cos_sin(const std::vector<std::pair<double, double>>& pairs, bool half_frequency = false);
    static FourierSeries from_half_modes(std::vector<cplx> c);

    int kmax() const { return c_.empty() ? -1 : static_cast<int>(c_.size() / 2); }
    cplx coeff(int k) const;
    double operator()(double s) const;
    cplx eval(double s) const;

    FourierSeries derivative() const;
    FourierSeries operator+(const FourierSeries& o) const;
    FourierSeries operator-(const FourierSeries& o) const;
    FourierSeries operator*(const FourierSeries& o) const;
    FourierSeries operator*(double a) const;
    FourierSeries& operator+=(const FourierSeries& o) { return *this = *this + o; }

    bool is_zero(double tol = 0.0) const;
    bool is_constant(double tol = 0.0) const;
    bool has_half_frequencies(double tol = 0.0) const;
    double abs_sum() const;
    double conjugate_asymmetry() const;
    const std::vector<cplx>& modes() const { return c_; }

private:
    void trim();
    std::vector<cplx> c_;
};

// In-place unnormalized DFT along contiguous rows (sign -1 forward, +1 backward).
void fft_rows(cplx* data, int rows, int n, int sign);
// In-place DFT along the slow index of a rows x cols row-major array.
void fft_cols(cplx* data, int rows, int cols, int sign);

// Signed integer frequency for DFT bin k of length n.
inline int fft_freq(int k, int n) { return k <= n / 2 ? k : k - n; }

// Trigonometric interpolant of uniform samples on [0, period).
class TrigInterpolant {
public:
    TrigInterpolant() = default;
    TrigInterpolant(const std::vector<cplx>& samples, double period);
    cplx operator()(double s) const;
    cplx derivative(double s) const;
    cplx mean() const { return c_.empty() ? cplx{} : c_[0]; }
    double period() const { return period_; }
    int size() const { return static_cast<int>(c_.size()); }
    // coefficient of exp(2 pi i m s / period), zero outside the resolved band
    cplx coeff(int m) const;

private:
    std::vector<cplx> c_;
    double period_ = kTwoPi;
};

// Uniform periodic grid x_i = -X + i dx on [-X, X).
struct XGrid {
    int n = 512;
    double X = 20.0;
    double dx() const { return 2.0 * X / n; }
    double x(int i) const { return (2 * i - n) * X / n; }
    std::vector<double> nodes() const;
};

// Spectral derivative of uniform periodic samples.
std::vector<cplx> spectral_derivative(const std::vector<cplx>& f, double period, int order = 1);

}  // namespace geobeam

#include "geobeam/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace geobeam {

FourierSeries FourierSeries::constant(double c) {
    FourierSeries f;
    f.c_ = {cplx(c, 0.0)};
    f.trim();
    return f;
}

FourierSeries FourierSeries::from_cos_sin(const std::vector<std::pair<double, double>>& pairs, bool half_frequency) {
    if (pairs.empty()) return {};
    const int step = half_frequency ? 1 : 2;
    const int n = static_cast<int>(pairs.size()) - 1;
    const int K = n * step;
    std::vector<cplx> c(2 * K + 1);
    c[K] = pairs[0].first;
    for (int m = 1; m <= n; ++m) {
        const auto [a, b] = pairs[m];
        // a cos + b sin = (a - ib)/2 e^{i.} + (a + ib)/2 e^{-i.}
        c[K + m * step] = cplx(a, -b) * 0.5;
        c[K - m * step] = cplx(a, b) * 0.5;
    }
    return from_half_modes(std::move(c));
}

FourierSeries FourierSeries::from_half_modes(std::vector<cplx> c) {
    if (c.size() % 2 == 0) throw std::invalid_argument("FourierSeries needs an odd number of modes");
    FourierSeries f;
    f.c_ = std::move(c);
    f.trim();
    return f;
}

void FourierSeries::trim() {
    while (c_.size() > 1 && c_.front() == cplx{} && c_.back() == cplx{}) {
        c_.erase(c_.begin());
        c_.pop_back();
    }
    if (c_.size() == 1 && c_[0] == cplx{}) c_.clear();
}

cplx FourierSeries::coeff(int k) const {
    const int K = kmax();
    if (K < 0 || k < -K || k > K) return {};
    return c_[k + K];
}

cplx FourierSeries::eval(double s) const {
    const int K = kmax();
    cplx acc{};
    for (int k = -K; k <= K; ++k) {
        const cplx c = c_[k + K];
        if (c == cplx{}) continue;
        acc += c * std::polar(1.0, 0.5 * k * s);
    }
    return acc;
}

double FourierSeries::operator()(double s) const { return eval(s).real(); }

FourierSeries FourierSeries::derivative() const {
    FourierSeries d = *this;
    const int K = kmax();
    for (int k = -K; k <= K; ++k) d.c_[k + K] *= cplx(0.0, 0.5 * k);
    d.trim();
    return d;
}

FourierSeries FourierSeries::operator+(const FourierSeries& o) const {
    const int K = std::max(kmax(), o.kmax());
    if (K < 0) return {};
    std::vector<cplx> c(2 * K + 1);
    for (int k = -K; k <= K; ++k) c[k + K] = coeff(k) + o.coeff(k);
    return from_half_modes(std::move(c));
}

FourierSeries FourierSeries::operator-(const FourierSeries& o) const { return *this + o * -1.0; }

FourierSeries FourierSeries::operator*(const FourierSeries& o) const {
    const int A = kmax(), B = o.kmax();
    if (A < 0 || B < 0) return {};
    const int K = A + B;
    std::vector<cplx> c(2 * K + 1);
    for (int i = -A; i <= A; ++i) {
        const cplx ci = c_[i + A];
        if (ci == cplx{}) continue;
        for (int j = -B; j <= B; ++j) c[i + j + K] += ci * o.c_[j + B];
    }
    return from_half_modes(std::move(c));
}

FourierSeries FourierSeries::operator*(double a) const {
    FourierSeries f = *this;
    for (auto& c : f.c_) c *= a;
    f.trim();
    return f;
}

bool FourierSeries::is_zero(double tol) const {
    for (const auto& c : c_)
        if (std::abs(c) > tol) return false;
    return true;
}

bool FourierSeries::is_constant(double tol) const {
    const int K = kmax();
    for (int k = -K; k <= K; ++k)
        if (k != 0 && std::abs(c_[k + K]) > tol) return false;
    return true;
}

bool FourierSeries::has_half_frequencies(double tol) const {
    const int K = kmax();
    for (int k = -K; k <= K; ++k)
        if ((k & 1) && std::abs(c_[k + K]) > tol) return true;
    return false;
}

double FourierSeries::abs_sum() const {
    double s = 0.0;
    for (const auto& c : c_) s += std::abs(c);
    return s;
}

double FourierSeries::conjugate_asymmetry() const {
    const int K = kmax();
    double worst = 0.0;
    for (int k = -K; k <= K; ++k) worst = std::max(worst, std::abs(c_[k + K] - std::conj(c_[-k + K])));
    return worst;
}

namespace {

std::mutex plan_mutex;
std::map<std::tuple<int, int, int, int, int>, fftw_plan> plan_cache;

// howmany transforms of length n, element stride, distance between transforms
fftw_plan get_plan(int n, int howmany, int stride, int dist, int sign) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    const auto key = std::make_tuple(n, howmany, stride, dist, sign);
    auto it = plan_cache.find(key);
    if (it != plan_cache.end()) return it->second;
    const std::size_t total = static_cast<std::size_t>((howmany - 1) * dist + (n - 1) * stride + 1);
    fftw_complex* buf = fftw_alloc_complex(total);
    fftw_plan p = fftw_plan_many_dft(1, &n, howmany, buf, nullptr, stride, dist, buf, nullptr, stride, dist, sign,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    if (!p) throw std::runtime_error("fftw planning failed");
    plan_cache.emplace(key, p);
    return p;
}

}  // namespace

void fft_rows(cplx* data, int rows, int n, int sign) {
    if (rows <= 0 || n <= 0) return;
    auto* d = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(get_plan(n, rows, 1, n, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD), d, d);
}

void fft_cols(cplx* data, int rows, int cols, int sign) {
    if (rows <= 0 || cols <= 0) return;
    auto* d = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(get_plan(rows, cols, cols, 1, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD), d, d);
}

TrigInterpolant::TrigInterpolant(const std::vector<cplx>& samples, double period) : c_(samples), period_(period) {
    const int n = static_cast<int>(c_.size());
    fft_rows(c_.data(), 1, n, -1);
    for (auto& c : c_) c /= static_cast<double>(n);
}

cplx TrigInterpolant::coeff(int m) const {
    const int n = size();
    if (n == 0) return {};
    if (n % 2 == 0 && std::abs(m) == n / 2) return 0.5 * c_[n / 2];
    if (std::abs(m) > n / 2) return {};
    return c_[(m + n) % n];
}

cplx TrigInterpolant::operator()(double s) const {
    const int n = size();
    const double w = kTwoPi / period_;
    cplx acc{};
    for (int m = -(n / 2); m <= n / 2; ++m) {
        const cplx c = coeff(m);
        if (c != cplx{}) acc += c * std::polar(1.0, w * m * s);
    }
    return acc;
}

cplx TrigInterpolant::derivative(double s) const {
    const int n = size();
    const double w = kTwoPi / period_;
    cplx acc{};
    for (int m = -(n / 2); m <= n / 2; ++m) {
        const cplx c = coeff(m);
        if (c != cplx{}) acc += c * cplx(0.0, w * m) * std::polar(1.0, w * m * s);
    }
    return acc;
}

std::vector<double> XGrid::nodes() const {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = x(i);
    return v;
}

std::vector<cplx> spectral_derivative(const std::vector<cplx>& f, double period, int order) {
    const int n = static_cast<int>(f.size());
    std::vector<cplx> g = f;
    fft_rows(g.data(), 1, n, -1);
    const double w = kTwoPi / period;
    for (int k = 0; k < n; ++k) {
        const int m = fft_freq(k, n);
        cplx mult = std::pow(cplx(0.0, w * m), order);
        if (n % 2 == 0 && k == n / 2 && (order % 2)) mult = 0.0;
        g[k] *= mult / static_cast<double>(n);
    }
    fft_rows(g.data(), 1, n, +1);
    return g;
}

}  // namespace geobeam

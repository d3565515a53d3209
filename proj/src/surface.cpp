#include "geobeam/surface.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "geobeam/errors.hpp"

namespace geobeam {

CurvatureModel CurvatureModel::constant(double R, double r0, int omega) {
    CurvatureModel m;
    m.R = FourierSeries::constant(R);
    m.r0 = r0;
    m.omega = omega;
    return m;
}

CurvatureModel CurvatureModel::from_curvature(const std::vector<FourierSeries>& K, double r0, int omega) {
    CurvatureModel m;
    m.r0 = r0;
    m.omega = omega;
    if (K.empty()) return m;
    m.R = K[0];
    const int N = static_cast<int>(K.size()) - 1;
    std::vector<FourierSeries> A{FourierSeries::constant(1.0), FourierSeries{}};
    for (int j = 2; j <= N + 2; ++j) {
        FourierSeries acc;
        for (int n = 0; n <= j - 2; ++n) acc += K[n] * A[j - 2 - n];
        A.push_back(acc * (-1.0 / (j * (j - 1))));
    }
    for (int j = 3; j <= N + 2; ++j) m.higher[j] = A[j];
    return m;
}

void CurvatureModel::validate() const {
    if (omega != 1 && omega != -1) throw ConfigInvalid("/surface/omega", "twist must be +1 or -1");
    if (!(r0 > 0.0) || !std::isfinite(r0)) throw ConfigInvalid("/surface/r0", "strip half-width must be positive");
    const double tol = 1e-12;
    if (R.conjugate_asymmetry() > tol * (1.0 + R.abs_sum())) throw ConfigInvalid("/surface/R", "R(s) must be real");
    if (R.has_half_frequencies(tol)) throw ConfigInvalid("/surface/R", "R(s) must be 2pi-periodic");
    for (const auto& [j, Rj] : higher) {
        const std::string ptr = "/surface/higher/" + std::to_string(j);
        if (j < 3) throw ConfigInvalid(ptr, "higher coefficients start at order 3");
        if (Rj.conjugate_asymmetry() > tol * (1.0 + Rj.abs_sum())) throw ConfigInvalid(ptr, "coefficient must be real");
        const bool odd_twist = omega == -1 && (j % 2 == 1);
        const int K = Rj.kmax();
        for (int k = -K; k <= K; ++k) {
            if (std::abs(Rj.coeff(k)) <= tol) continue;
            const bool half = (k % 2) != 0;
            if (half != odd_twist)
                throw ConfigInvalid(ptr, odd_twist ? "odd order with twist -1 needs half-integer frequencies"
                                                   : "coefficient must be 2pi-periodic");
        }
    }
    if (taylor_order && *taylor_order < 2) throw ConfigInvalid("/surface/taylor_order", "must be at least 2");
}

int CurvatureModel::stored_order() const {
    int j = 2;
    for (const auto& kv : higher) j = std::max(j, kv.first);
    return j;
}

std::vector<FourierSeries> CurvatureModel::transverse_curvature(int nmax) const {
    const int J = stored_order();
    std::vector<FourierSeries> A(J + 1);
    A[0] = FourierSeries::constant(1.0);
    A[2] = R * -0.5;
    for (const auto& [j, Rj] : higher) A[j] = Rj;
    // (n+2)(n+1) A_{n+2} = -sum_{i<=n} K_i A_{n-i}
    std::vector<FourierSeries> K(nmax + 1);
    for (int n = 0; n <= std::min(nmax, J - 2); ++n) {
        FourierSeries acc = A[n + 2] * static_cast<double>((n + 2) * (n + 1));
        for (int i = 0; i < n; ++i) acc += K[i] * A[n - i];
        K[n] = acc * -1.0;
    }
    return K;
}

std::vector<FourierSeries> CurvatureModel::a_taylor(int jmax) const {
    if (taylor_order && jmax > *taylor_order)
        throw Error(ErrorKind::InsufficientTaylorData,
                    "Taylor order " + std::to_string(jmax) + " requested, model declares " + std::to_string(*taylor_order));
    const int J = stored_order();
    std::vector<FourierSeries> A(std::max(jmax, 2) + 1);
    A[0] = FourierSeries::constant(1.0);
    A[2] = R * -0.5;
    for (const auto& [j, Rj] : higher)
        if (j <= jmax) A[j] = Rj;
    if (jmax > J) {
        const auto K = transverse_curvature(J - 2);
        for (int j = J + 1; j <= jmax; ++j) {
            FourierSeries acc;
            for (int n = 0; n <= std::min(j - 2, J - 2); ++n) acc += K[n] * A[j - 2 - n];
            A[j] = acc * (-1.0 / (j * (j - 1)));
        }
    }
    A.resize(jmax + 1);
    return A;
}

namespace {

using State = std::array<double, 4>;

struct RadialSystem {
    std::function<double(double)> K, Ks;
    void operator()(const State& y, State& dy, double r) const {
        const double k = K(r), ks = Ks(r);
        dy[0] = y[1];
        dy[1] = -k * y[0];
        dy[2] = y[3];
        dy[3] = -k * y[2] - ks * y[0];
    }
};

}  // namespace

MetricStrip synthesize_metric(const CurvatureModel& model, const StripGrid& grid) {
    namespace ode = boost::numeric::odeint;
    MetricStrip m;
    m.grid = grid;
    m.a.assign(grid.size(), 0.0);
    m.a_r.assign(grid.size(), 0.0);
    m.a_s.assign(grid.size(), 0.0);

    std::vector<FourierSeries> K, Ks;
    if (!model.curvature) {
        K = model.transverse_curvature(std::max(0, model.stored_order() - 2));
        for (const auto& k : K) Ks.push_back(k.derivative());
    }

    // r nodes split into the two half-lines, each ordered away from the geodesic
    std::vector<int> pos, neg;
    for (int i = 0; i < grid.nr; ++i) (grid.r(i) >= 0.0 ? pos : neg).push_back(i);
    std::reverse(neg.begin(), neg.end());

    for (int k = 0; k < grid.ns; ++k) {
        const double s = grid.s(k);
        RadialSystem sys;
        if (model.curvature) {
            sys.K = [&, s](double r) { return model.curvature(s, r); };
            if (model.curvature_s) {
                sys.Ks = [&, s](double r) { return model.curvature_s(s, r); };
            } else {
                sys.Ks = [&, s](double r) {
                    const double e = 1e-3;
                    return (8.0 * (model.curvature(s + e, r) - model.curvature(s - e, r)) -
                            (model.curvature(s + 2 * e, r) - model.curvature(s - 2 * e, r))) / (12.0 * e);
                };
            }
        } else {
            std::vector<double> kc(K.size()), ksc(K.size());
            for (std::size_t n = 0; n < K.size(); ++n) {
                kc[n] = K[n](s);
                ksc[n] = Ks[n](s);
            }
            auto horner = [](const std::vector<double>& c, double r) {
                double acc = 0.0;
                for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * r + *it;
                return acc;
            };
            sys.K = [kc, horner](double r) { return horner(kc, r); };
            sys.Ks = [ksc, horner](double r) { return horner(ksc, r); };
        }
        for (const auto* side : {&pos, &neg}) {
            if (side->empty()) continue;
            std::vector<double> times{0.0};
            for (int i : *side)
                if (grid.r(i) != 0.0) times.push_back(grid.r(i));
            std::vector<State> out;
            const State init{1.0, 0.0, 0.0, 0.0};
            if (times.size() > 1) {
                State y = init;
                auto stepper = ode::make_controlled(1e-13, 1e-13, ode::runge_kutta_fehlberg78<State>());
                const double dt0 = (times[1] - times[0]) * 0.5;
                ode::integrate_times(stepper, sys, y, times.begin(), times.end(), dt0,
                                     [&](const State& st, double) { out.push_back(st); });
            }
            std::size_t o = 0;
            for (int i : *side) {
                const State st = grid.r(i) == 0.0 ? init : out[++o];
                const std::size_t idx = static_cast<std::size_t>(k) * grid.nr + i;
                m.a[idx] = st[0];
                m.a_r[idx] = st[1];
                m.a_s[idx] = st[2];
            }
        }
    }
    m.a_min = *std::min_element(m.a.begin(), m.a.end());
    m.a_max = *std::max_element(m.a.begin(), m.a.end());
    if (!(m.a_min > 0.0))
        throw Error(ErrorKind::NonPositiveMetric,
                    "metric factor reaches " + sci(m.a_min) + " inside |r| <= " + sci(grid.r0));
    return m;
}

const std::vector<OperatorTerm>& OperatorSeries::at(int m) const {
    static const std::vector<OperatorTerm> empty;
    auto it = terms.find(m);
    return it == terms.end() ? empty : it->second;
}

OperatorSeries build_operator_series(const CurvatureModel& model, int max_halfpower) {
    const int M = max_halfpower;
    const int n = M + 2;
    const auto A = model.a_taylor(n);
    const FourierSeries one = FourierSeries::constant(1.0);

    // b = a^{-2}, c = a_r / a as power series in r
    std::vector<FourierSeries> sq(n + 1), b(n + 1), inv(n + 1), c(n);
    for (int k = 0; k <= n; ++k)
        for (int i = 0; i <= k; ++i) sq[k] += A[i] * A[k - i];
    b[0] = one;
    inv[0] = one;
    for (int k = 1; k <= n; ++k) {
        for (int i = 1; i <= k; ++i) {
            b[k] += sq[i] * b[k - i] * -1.0;
            inv[k] += A[i] * inv[k - i] * -1.0;
        }
    }
    for (int k = 0; k < n; ++k)
        for (int i = 0; i <= k; ++i) c[k] += A[i + 1] * static_cast<double>(i + 1) * inv[k - i];

    const cplx I(0.0, 1.0);
    OperatorSeries ops;
    ops.max_halfpower = M;
    ops.terms[0] = {OperatorTerm{I, one, 0, 1, 0}, OperatorTerm{0.5, one, 0, 0, 2},
                    OperatorTerm{-0.5, model.R, 2, 0, 0}};
    auto push = [&](int m, cplx f, const FourierSeries& coef, int xp, int ds, int dx) {
        if (coef.is_zero()) return;
        ops.terms[m].push_back(OperatorTerm{f, coef, xp, ds, dx});
    };
    for (int m = 1; m <= M; ++m) {
        ops.terms[m];
        push(m, I, b[m], m, 1, 0);
        push(m, -0.5, b[m + 2], m + 2, 0, 0);
        if (m >= 2) {
            push(m, 0.5, b[m - 2], m - 2, 2, 0);
            push(m, 0.25, b[m - 2].derivative(), m - 2, 1, 0);
        }
        push(m, 0.25 * I, b[m].derivative(), m, 0, 0);
        push(m, 0.5, c[m - 1], m - 1, 0, 1);
    }
    return ops;
}

}  // namespace geobeam

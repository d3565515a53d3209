#include <catch_amalgamated.hpp>

#include <cmath>

#include "geobeam/errors.hpp"
#include "geobeam/frame.hpp"
#include "geobeam/hermite.hpp"
#include "geobeam/hierarchy.hpp"

using namespace geobeam;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

CurvatureModel flared() {
    return CurvatureModel::from_curvature(
        {FourierSeries::from_cos_sin({{2.0, 0.0}, {0.3, 0.0}}), FourierSeries{}, FourierSeries::constant(-8.0)}, 2.0);
}

ModeProblem problem(const CurvatureModel& m, int order = 3, double eps = 1.0, double delta = 1.0, int k0 = 0) {
    ModeProblem P;
    P.model = m;
    P.frame = solve_hill(m);
    P.certificate = certify_diophantine(P.frame, 1.0, 200);
    P.order_max = order;
    P.epsilon = eps;
    P.delta = delta;
    P.k0 = k0;
    return P;
}

// Galerkin oracle: average over s of (1/2) int |w_k0|^4 dx by plain quadrature of sampled frame functions.
double galerkin_C0(const ModeProblem& P) {
    const XGrid xg{1024, 14.0};
    const auto x = xg.nodes();
    std::vector<double> s;
    const int ns = 128;
    for (int a = 0; a < ns; ++a) s.push_back(kTwoPi * a / ns);
    const auto w = frame_w(P.frame, P.k0, mode_energy(P.frame, P.model, P.k0), s, x);
    double acc = 0.0;
    for (const cplx& z : w) acc += std::pow(std::norm(z), 2);
    return 0.5 * acc * xg.dx() / ns;
}

double max_abs(const std::vector<cplx>& v) {
    double m = 0.0;
    for (const cplx& z : v) m = std::max(m, std::abs(z));
    return m;
}

}  // namespace

TEST_CASE("frame decomposition of a frame function") {
    const auto m = flared();
    const FloquetFrame f = solve_hill(m);
    const SxGrid grid = auto_frame_grid(f, m, 12, 16);
    const FrameBasis basis(f, m, 12, grid);
    const std::size_t block = grid.size();
    const std::vector<cplx> w5(basis.W.begin() + 5 * block, basis.W.begin() + 6 * block);
    HermiteBasisSpec spec;
    spec.tail_tol = 1e-8;
    const FrameCoefficients fc = frame_decompose(w5, basis, spec);
    for (int j = 0; j <= 12; ++j)
        for (int a = 0; a < grid.ns; ++a) CHECK_THAT(std::abs(fc.h[j * grid.ns + a] - (j == 5 ? 1.0 : 0.0)), WithinAbs(0.0, 1e-9));

    // the same profile without the frame phase has h_2 = exp(i s E0(2) + 5/2 i beta)
    const auto s = grid.s_nodes();
    const auto x = grid.x.nodes();
    const FrameNodes fn = frame_nodes(f, s);
    std::vector<cplx> Q(block);
    for (int a = 0; a < grid.ns; ++a) {
        const double ea = std::exp(-fn.alpha[a]);
        for (int i = 0; i < grid.x.n; ++i)
            Q[a * grid.x.n + i] = std::polar(std::sqrt(ea) * eval_hermite(2, x[i] * ea), 0.5 * fn.alpha_dot[a] * x[i] * x[i]);
    }
    const FrameCoefficients q2 = frame_decompose(Q, basis, spec);
    const double E2 = mode_energy(f, m, 2);
    for (int a = 0; a < grid.ns; ++a) {
        const cplx ref = std::polar(1.0, s[a] * E2 + 2.5 * fn.beta[a]);
        CHECK_THAT(std::abs(q2.h[2 * grid.ns + a] - ref), WithinAbs(0.0, 1e-9));
    }
}

TEST_CASE("Parseval and round trip") {
    const auto m = flared();
    const FloquetFrame f = solve_hill(m);
    const SxGrid grid = auto_frame_grid(f, m, 10, 16);
    const FrameBasis basis(f, m, 10, grid);
    const auto s = grid.s_nodes();
    const std::size_t block = grid.size();
    std::vector<cplx> Q(block);
    for (int a = 0; a < grid.ns; ++a)
        for (int i = 0; i < grid.x.n; ++i) {
            const std::size_t k = a * grid.x.n + i;
            Q[k] = std::polar(1.0 + 0.5 * std::cos(s[a]), 2.0 * s[a]) * basis.W[0 * block + k] +
                   cplx(0.3, -0.2) * std::sin(3.0 * s[a]) * basis.W[3 * block + k] + 0.1 * basis.W[7 * block + k];
        }
    const FrameCoefficients fc = frame_decompose(Q, basis, HermiteBasisSpec{});
    double lhs = 0.0;
    for (const cplx& c : fc.c) lhs += std::norm(c);
    double rhs = 0.0;
    for (const cplx& z : Q) rhs += std::norm(z);
    rhs *= grid.x.dx() / grid.ns;
    CHECK_THAT(lhs, WithinAbs(rhs, 1e-8));
    const auto back = frame_reconstruct(fc, basis);
    double err = 0.0;
    for (std::size_t k = 0; k < block; ++k) err = std::max(err, std::abs(back[k] - Q[k]));
    CHECK(err < 1e-8);
}

TEST_CASE("first correction constant for constant curvature") {
    const ModeProblem P = problem(CurvatureModel::constant(2.0, 1.0), 1);
    const double closed = std::pow(kTwoPi, -0.5) / (4.0 * kPi) * kTwoPi * std::pow(2.0, 0.25);
    CHECK_THAT(first_correction_constant(P), WithinAbs(closed, 1e-10));
    CHECK_THAT(closed, WithinAbs(0.2372, 1e-3));
    CHECK_THAT(galerkin_C0(P), WithinRel(closed, 1e-6));
    const HierarchySolution S = solve_cascade(P);
    CHECK_THAT(S.E[1], WithinRel(-closed, 1e-3));
}

TEST_CASE("first correction law on a periodic surface") {
    const auto m = flared();
    const ModeProblem P = problem(m, 1);
    const double C0 = first_correction_constant(P);
    CHECK(C0 > 0.0);
    CHECK_THAT(galerkin_C0(P), WithinRel(C0, 1e-3));
    const HierarchySolution a = solve_cascade(P);
    CHECK_THAT(a.E[1], WithinRel(-C0, 1e-3));
    const HierarchySolution b = solve_cascade(problem(m, 1, -1.0));
    CHECK_THAT(b.E[1], WithinRel(C0, 1e-3));
    const HierarchySolution c = solve_cascade(problem(m, 1, 1.0, 0.7));
    CHECK_THAT(c.E[1] / a.E[1], WithinRel(0.49, 1e-10));
    CHECK_THAT(c.E[0], WithinAbs(a.E[0], 1e-14));

    const ModeProblem P2 = problem(m, 1, 1.0, 1.0, 2);
    HermiteBasisSpec wide;
    wide.J_max = 80;
    const double ratio = cubic_self_coeffs(2, wide).p[2] / cubic_self_coeffs(0, wide).p[0];
    CHECK_THAT(first_correction_constant(P2) / C0, WithinRel(ratio, 1e-12));
}

TEST_CASE("energies are real and corrections are twist periodic") {
    const auto m = flared();
    const ModeProblem P = problem(m, 4);
    const HierarchySolution S = solve_cascade(P);
    REQUIRE(S.order() == 4);
    for (int p = 0; p <= 4; ++p) CHECK(std::abs(S.E_imag[p]) <= 1e-8 * (1.0 + std::abs(S.E[p])));
    const auto x = XGrid{64, 6.0}.nodes();
    for (int p = 0; p <= 4; ++p) {
        const auto v = evaluate_expansion(S.v[p], P.frame, m, {0.3, 0.3 + kTwoPi}, x);
        double defect = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) defect = std::max(defect, std::abs(v[x.size() + i] - v[i]));
        CHECK(defect < 1e-8 * std::max(1.0, max_abs(v)));
    }
}

TEST_CASE("expansion evaluation") {
    const auto m = flared();
    const ModeProblem P = problem(m, 2);
    const HierarchySolution S = solve_cascade(P);
    const std::vector<double> s{0.0, 1.0, 2.5};
    const auto x = XGrid{48, 5.0}.nodes();
    const auto v0 = evaluate_expansion(S.v[0], P.frame, m, s, x);
    const auto w0 = frame_w(P.frame, 0, mode_energy(P.frame, m, 0), s, x);
    for (std::size_t i = 0; i < v0.size(); ++i) CHECK_THAT(std::abs(v0[i] - w0[i]), WithinAbs(0.0, 1e-12));
    const auto v1 = evaluate_expansion(S.v[1], P.frame, m, s, x);
    const auto v2 = evaluate_expansion(S.v[2], P.frame, m, s, x);
    const auto sum = evaluate_expansion(S.v[1] + S.v[2], P.frame, m, s, x);
    for (std::size_t i = 0; i < sum.size(); ++i) CHECK_THAT(std::abs(sum[i] - v1[i] - v2[i]), WithinAbs(0.0, 1e-12));
}

TEST_CASE("parity structure of the first correction") {
    const ModeProblem P = problem(CurvatureModel::constant(2.0, 1.0), 1);
    const HierarchySolution S = solve_cascade(P);
    const ModeExpansion& v1 = S.v[1];
    double even_mass = 0.0;
    for (int j = 0; j <= v1.J; ++j)
        for (int b = 0; b < v1.ns; ++b) {
            const double a = std::abs(v1.d[j * v1.ns + b]);
            if (j % 2 == 1 || fft_freq(b, v1.ns) != 0) CHECK(a < 1e-12);
            else even_mass += a;
        }
    CHECK(even_mass > 1e-3);
    CHECK(std::abs(v1.at(0, 0)) < 1e-14);

    CurvatureModel cubic = CurvatureModel::constant(2.0, 1.0);
    cubic.higher[3] = FourierSeries::from_cos_sin({{0.0, 0.0}, {0.1, 0.0}});
    const HierarchySolution T = solve_cascade(problem(cubic, 1));
    double odd = 0.0;
    for (int j = 1; j <= T.v[1].J; j += 2)
        for (int b = 0; b < T.v[1].ns; ++b) odd = std::max(odd, std::abs(T.v[1].d[j * T.v[1].ns + b]));
    CHECK(odd > 1e-4);
    CHECK_THAT(T.E[1], WithinAbs(S.E[1], 1e-12));
}

TEST_CASE("rational ratio is refused and forcing hits the resonance") {
    CurvatureModel m;
    m.R = FourierSeries::from_cos_sin({{0.56, 0.0}, {0.3, 0.0}});
    m.r0 = 1.0;
    m = tune_mean_curvature(m, 1.5);
    ModeProblem P = problem(m, 3);
    CHECK(P.certificate->verdict == Verdict::Fail);
    try {
        solve_cascade(P);
        FAIL("certificate not enforced");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::CertificateRefused);
    }
    P.force = true;
    try {
        solve_cascade(P);
        FAIL("resonance not detected");
    } catch (const SmallDivisorBreach& e) {
        CHECK(e.j == 4);
        CHECK(e.l == -3);
        CHECK(std::abs(e.divisor) < 1e-8);
    }
}

TEST_CASE("twisted strip cascade") {
    CurvatureModel m = CurvatureModel::constant(2.0, 1.0, -1);
    m.higher[3] = FourierSeries::from_cos_sin({{0.0, 0.0}, {0.1, 0.0}}, true);
    ModeProblem P = problem(m, 2);
    P.tail_tol = 1e-6;
    const HierarchySolution S = solve_cascade(P);
    for (int p = 0; p <= 2; ++p) CHECK(std::abs(S.E_imag[p]) <= 1e-8 * (1.0 + std::abs(S.E[p])));
    // v(s + 2 pi, x) = v(s, -x)
    const auto x = XGrid{64, 6.0}.nodes();
    for (int p = 0; p <= 2; ++p) {
        const auto v = evaluate_expansion(S.v[p], P.frame, m, {0.4, 0.4 + kTwoPi}, x);
        double defect = 0.0;
        for (std::size_t i = 1; i < x.size(); ++i)
            defect = std::max(defect, std::abs(v[x.size() + i] - v[x.size() - i]));
        CHECK(defect < 1e-8 * std::max(1.0, max_abs(v)));
    }
}

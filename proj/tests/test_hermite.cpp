#include <catch_amalgamated.hpp>

#include <cmath>

#include "geobeam/errors.hpp"
#include "geobeam/fourier.hpp"
#include "geobeam/hermite.hpp"

using namespace geobeam;
using Catch::Matchers::WithinAbs;

TEST_CASE("Hermite functions at the origin") {
    CHECK_THAT(eval_hermite(0, 0.0), WithinAbs(std::pow(kPi, -0.25), 1e-15));
    CHECK_THAT(eval_hermite(1, 0.0), WithinAbs(0.0, 1e-15));
    CHECK_THAT(eval_hermite(2, 0.0), WithinAbs(-std::pow(kPi, -0.25) / std::sqrt(2.0), 1e-15));
}

TEST_CASE("Gauss-Hermite quadrature integrates Hermite products") {
    const GaussHermite q = gauss_hermite(64);
    double n0 = 0.0, n7 = 0.0, cross = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
        const double x = q.nodes[i];
        n0 += q.folded[i] * std::pow(eval_hermite(0, x), 2);
        n7 += q.folded[i] * std::pow(eval_hermite(7, x), 2);
        cross += q.folded[i] * eval_hermite(3, x) * eval_hermite(5, x);
    }
    CHECK_THAT(n0, WithinAbs(1.0, 1e-12));
    CHECK_THAT(n7, WithinAbs(1.0, 1e-12));
    CHECK_THAT(cross, WithinAbs(0.0, 1e-12));
    double wsum = 0.0;
    for (double w : q.weights) wsum += w;
    CHECK_THAT(wsum, WithinAbs(std::sqrt(kPi), 1e-12));
}

TEST_CASE("recurrence agrees with the scalar evaluator") {
    std::vector<double> all(31);
    for (double x : {-4.0, -0.3, 0.0, 1.7, 6.0}) {
        hermite_all(30, x, all.data());
        for (int k = 0; k <= 30; ++k) CHECK_THAT(all[k], WithinAbs(eval_hermite(k, x), 1e-13));
    }
}

TEST_CASE("cubic self-interaction coefficients") {
    const ProductCoeffs c0 = cubic_self_coeffs(0);
    CHECK_THAT(c0.p[0], WithinAbs(1.0 / std::sqrt(kTwoPi), 1e-12));
    CHECK_THAT(c0.p[1], WithinAbs(0.0, 1e-14));
    for (std::size_t j = 1; j < c0.p.size(); j += 2) CHECK_THAT(c0.p[j], WithinAbs(0.0, 1e-14));
    CHECK(c0.tail_mass < 1e-10);

    const ProductCoeffs c1 = cubic_self_coeffs(1);
    CHECK_THAT(c1.p[1], WithinAbs(3.0 / (4.0 * std::sqrt(kTwoPi)), 1e-12));
    // brute-force moment: integral of phi_1^4 on a fine uniform grid
    double brute = 0.0;
    const double dx = 1e-3;
    for (double x = -12.0; x <= 12.0; x += dx) brute += std::pow(eval_hermite(1, x), 4) * dx;
    CHECK_THAT(c1.p[1], WithinAbs(brute, 1e-10));
    CHECK_THAT(c1.p[0], WithinAbs(0.0, 1e-14));
}

TEST_CASE("truncating the cubic expansion too early is an error") {
    HermiteBasisSpec spec;
    spec.J_max = 2;
    try {
        cubic_self_coeffs(0, spec);
        FAIL("tail accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::TailTooLarge);
    }
}

TEST_CASE("monomial coefficients from ladder steps") {
    const auto q1 = monomial_coeffs(0, 1);
    CHECK_THAT(q1[1], WithinAbs(1.0 / std::sqrt(2.0), 1e-15));
    CHECK_THAT(q1[0], WithinAbs(0.0, 1e-15));
    const auto q2 = monomial_coeffs(0, 2);
    CHECK_THAT(q2[0], WithinAbs(0.5, 1e-15));
    CHECK_THAT(q2[2], WithinAbs(std::sqrt(2.0) / 2.0, 1e-15));
    CHECK_THAT(q2[1], WithinAbs(0.0, 1e-15));
    const auto q3 = monomial_coeffs(0, 3);
    CHECK_THAT(q3[1], WithinAbs(3.0 / (2.0 * std::sqrt(2.0)), 1e-14));
    CHECK_THAT(q3[3], WithinAbs(std::sqrt(3.0) / 2.0, 1e-14));
    CHECK_THAT(q3[0], WithinAbs(0.0, 1e-15));
    CHECK_THAT(q3[2], WithinAbs(0.0, 1e-15));
    // against quadrature for a higher state
    const GaussHermite g = gauss_hermite(60);
    const auto q = monomial_coeffs(3, 4);
    for (int j = 0; j < static_cast<int>(q.size()); ++j) {
        double ref = 0.0;
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
            const double x = g.nodes[i];
            ref += g.folded[i] * std::pow(x, 4) * eval_hermite(3, x) * eval_hermite(j, x);
        }
        CHECK_THAT(q[j], WithinAbs(ref, 1e-11));
    }
}

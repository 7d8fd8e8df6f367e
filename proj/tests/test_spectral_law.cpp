#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "facnum/panel.hpp"
#include "facnum/spectral_law.hpp"
#include "facnum/spectrum.hpp"
#include "oracles.hpp"

using facnum::AspectRatio;

TEST_CASE("lsd_edges closed form") {
    const auto [a05, b05] = facnum::lsd_edges(AspectRatio(0.5));
    CHECK(a05 == 0.0);
    CHECK(std::abs(b05 - 2.7725) < 5e-5);  // 4 d.p.
    CHECK(b05 == doctest::Approx(2.772542486).epsilon(1e-9));

    const auto [a2, b2] = facnum::lsd_edges(AspectRatio(2.0));
    CHECK(std::abs(b2 - 17.6366) < 5e-5);
    CHECK(a2 == doctest::Approx(0.113400546).epsilon(1e-7));

    // (1+8)^{3/2} = 27 = -1+20+8: exact cancellation at y = 1.
    const auto [a1, b1] = facnum::lsd_edges(AspectRatio(1.0));
    CHECK(a1 == 0.0);
    CHECK(b1 == doctest::Approx(6.75).epsilon(1e-12));

    CHECK_THROWS_AS(facnum::lsd_edges(AspectRatio(0.0)), std::domain_error);
    CHECK_THROWS_AS(facnum::lsd_edges(AspectRatio(-1.0)), std::domain_error);
}

TEST_CASE("z_of_t maps published (T(b+), b) pairs") {
    CHECK(std::abs(facnum::z_of_t(0.3076, AspectRatio(0.5)) - 2.7725) < 1e-3);
    CHECK(std::abs(facnum::z_of_t(0.7775, AspectRatio(2.0)) - 17.6366) < 1e-3);
    CHECK_THROWS_AS(facnum::z_of_t(0.0, AspectRatio(1.0)), std::domain_error);
    CHECK_THROWS_AS(facnum::z_of_t(-0.5, AspectRatio(1.0)), std::domain_error);
    // increasing for t beyond the critical point, diverging with t^2
    const double t_star = facnum::t_at_b_plus(AspectRatio(0.5));
    CHECK(facnum::z_of_t(2 * t_star, AspectRatio(0.5)) <
          facnum::z_of_t(4 * t_star, AspectRatio(0.5)));
}

TEST_CASE("t_at_b_plus is the argmin of z_of_t") {
    // Frozen from the golden-section oracle below; these disagree with the
    // two published table constants (0.3076, 0.7775) by more than their print
    // precision -- the closed-form identity b = z(t*) pins the exact values.
    CHECK(facnum::t_at_b_plus(AspectRatio(0.5)) == doctest::Approx(0.3090169944).epsilon(1e-9));
    CHECK(facnum::t_at_b_plus(AspectRatio(2.0)) == doctest::Approx(0.7807764064).epsilon(1e-9));

    for (double y : {0.1, 0.5, 1.0, 2.0, 5.0}) {
        const AspectRatio ar(y);
        const double t_star = facnum::t_at_b_plus(ar);
        const double oracle = oracles::golden_min(
            [&](double t) { return facnum::z_of_t(t, ar); }, 1e-6, 10.0 + y);
        CHECK(t_star == doctest::Approx(oracle).epsilon(1e-7));
        CHECK(std::abs(facnum::z_of_t(t_star, ar) - facnum::lsd_edges(ar).second) < 1e-8);
    }

    // strictly increasing in y
    double prev = 0.0;
    for (double y = 0.05; y < 10.0; y *= 1.5) {
        const double t = facnum::t_at_b_plus(AspectRatio(y));
        CHECK(t > prev);
        prev = t;
    }
}

TEST_CASE("stieltjes_m branch selection and transform relation") {
    const AspectRatio y(0.5);
    const auto [a, b] = facnum::lsd_edges(y);

    SUBCASE("asymptotic branch: z m(z) -> -1") {
        double prev_gap = 1.0;
        for (double z : {1e4, 1e6, 1e8}) {
            const double gap = std::abs(z * facnum::stieltjes_m(z, y) + 1.0);
            CHECK(gap < 1e-3);
            CHECK(gap < prev_gap);
            prev_gap = gap;
        }
    }
    SUBCASE("dual route at z = 2b: -1 - z m equals the bisection T-transform") {
        const double z = 2.0 * b;
        const double via_m = -1.0 - z * facnum::stieltjes_m(z, y);
        CHECK(std::abs(via_m - facnum::t_transform(z, y)) < 1e-8);
    }
    SUBCASE("Herglotz property inside the support") {
        for (double x : {0.1, 0.5, 1.0, 2.0, 2.7}) {
            const auto m = facnum::stieltjes_m(std::complex<double>(x, 1e-6), y);
            CHECK(m.imag() > 0.0);
        }
    }
    SUBCASE("real argument inside the support is rejected") {
        CHECK_THROWS_AS(facnum::stieltjes_m(0.5 * b, y), std::domain_error);
        CHECK_THROWS_AS(facnum::stieltjes_m(b, y), std::domain_error);
    }
}

TEST_CASE("t_transform against published points and boundary") {
    const AspectRatio y05(0.5);
    CHECK(std::abs(facnum::t_transform(21.2, y05) - 0.0125) < 2e-3);
    CHECK(std::abs(facnum::t_transform(5.48, y05) - 0.0607) < 2e-3);
    // boundary continuity: T(b + eps) -> T(b+)
    const auto [a, b] = facnum::lsd_edges(y05);
    CHECK(facnum::t_transform(b * (1.0 + 1e-12), y05) ==
          doctest::Approx(facnum::t_at_b_plus(y05)).epsilon(1e-4));
    CHECK_THROWS_AS(facnum::t_transform(b, y05), std::domain_error);
    CHECK_THROWS_AS(facnum::t_transform(0.5, y05), std::domain_error);
}

TEST_CASE("transform round trip and monotonicity on log grids") {
    std::vector<double> ys;
    for (int i = 0; i < 20; ++i) ys.push_back(0.1 * std::pow(50.0, i / 19.0));  // 0.1 .. 5
    for (double yv : ys) {
        const AspectRatio y(yv);
        const double b = facnum::lsd_edges(y).second;
        double prev_t = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 100; ++i) {
            const double z = 1.001 * b * std::pow(100.0 / 1.001, i / 99.0);
            const double t = facnum::t_transform(z, y);
            CHECK(t < prev_t);  // strictly decreasing
            prev_t = t;
            CHECK(std::abs(facnum::z_of_t(t, y) - z) < 1e-8);
            CHECK(std::abs(-1.0 - z * facnum::stieltjes_m(z, y) - t) < 1e-8);
        }
    }
}

TEST_CASE("edge consistency: b equals the minimum of z_of_t") {
    for (int i = 0; i < 20; ++i) {
        const AspectRatio y(0.05 * std::pow(200.0, i / 19.0));  // 0.05 .. 10
        const double b = facnum::lsd_edges(y).second;
        const double t_min = oracles::golden_min(
            [&](double t) { return facnum::z_of_t(t, y); }, 1e-7, 10.0 + y.y);
        CHECK(std::abs(facnum::z_of_t(t_min, y) - b) < 1e-8);
    }
}

TEST_CASE("lsd_density support, normalization and atom") {
    const AspectRatio y(0.5);
    const auto [a, b] = facnum::lsd_edges(y);
    CHECK(facnum::lsd_density(b + 1.0, y) == 0.0);
    CHECK(facnum::lsd_density(b, y) == 0.0);
    CHECK_THROWS_AS(facnum::lsd_density(0.0, y), std::domain_error);
    CHECK_THROWS_AS(facnum::lsd_density(-1.0, y), std::domain_error);
    CHECK(facnum::lsd_atom_mass(y) == doctest::Approx(0.5));
    CHECK(facnum::lsd_atom_mass(AspectRatio(2.0)) == 0.0);

    // continuous mass = 1 - atom, by adaptive quadrature: substitute
    // x = u^4 to tame the lower-edge singularity of the density for y < 1
    const double mass = oracles::integrate(
        [&](double u) {
            return u <= 0.0 ? 0.0 : 4.0 * u * u * u * facnum::lsd_density(u * u * u * u, y);
        },
        0.0, std::pow(b, 0.25), 1e-7);
    CHECK(std::abs(mass - 0.5) < 1e-3);

    const AspectRatio y2(2.0);
    const auto [a2, b2] = facnum::lsd_edges(y2);
    const double mass2 = oracles::integrate(
        [&](double x) { return facnum::lsd_density(x, y2); }, a2, b2, 1e-7);
    CHECK(std::abs(mass2 - 1.0) < 1e-3);
}

TEST_CASE("empirical noise spectrum matches the density") {
    // One seeded noise panel at p=400, T=800; the companion matrix carries
    // T eigenvalues: the min(p,T) values of the product matrix plus zeros.
    const int p = 400, T = 800;
    std::mt19937_64 rng(20240601);
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd noise(p, T + 1);
    for (Eigen::Index c = 0; c < noise.cols(); ++c)
        for (Eigen::Index r = 0; r < noise.rows(); ++r) noise(r, c) = gauss(rng);
    const auto spectrum = facnum::mhat_spectrum(facnum::make_panel(std::move(noise)));

    const AspectRatio y(0.5);
    const double b = facnum::lsd_edges(y).second;
    const int bins = 20;
    const double width = b / bins;
    for (int bin = 0; bin < bins; ++bin) {
        const double lo = bin * width, hi = lo + width;
        int count = 0;
        for (double ev : spectrum.eigenvalues)
            if (ev > lo && ev <= hi) ++count;
        const double empirical = static_cast<double>(count) / T / width;
        const double expected =
            oracles::integrate(
                [&](double u) {
                    return u <= 0.0 ? 0.0
                                    : 4.0 * u * u * u * facnum::lsd_density(u * u * u * u, y);
                },
                std::pow(lo, 0.25), std::pow(hi, 0.25), 1e-8) /
            width;
        CHECK(std::abs(empirical - expected) < 0.05);
    }
}

TEST_CASE("transform_point bundles (z, m, T) consistently") {
    const AspectRatio y(2.0);
    const double b = facnum::lsd_edges(y).second;
    const auto pt = facnum::transform_point(3.0 * b, y);
    CHECK(pt.z == 3.0 * b);
    CHECK(pt.t == doctest::Approx(facnum::t_transform(3.0 * b, y)).epsilon(1e-14));
    CHECK(pt.m == doctest::Approx(-(1.0 + pt.t) / pt.z).epsilon(1e-14));
    CHECK(pt.m < 0.0);
    CHECK(pt.t > 0.0);
    CHECK(pt.t < facnum::t_at_b_plus(y));

    const auto law = facnum::make_law(y);
    CHECK(law.b == b);
    CHECK(law.t_b_plus == facnum::t_at_b_plus(y));
    CHECK(law.a == facnum::lsd_edges(y).first);
}

TEST_CASE("stieltjes_m below the support and conjugate symmetry") {
    // y > 1: a gap (0, a) sits below the continuous support
    const AspectRatio y2(2.0);
    const auto [a2, b2] = facnum::lsd_edges(y2);
    for (double z : {0.02, 0.5 * a2, -1.0}) {
        if (z >= a2) continue;
        const double m = facnum::stieltjes_m(z, y2);
        CHECK(m > 0.0);
        CHECK(m > 1.0 / (b2 - z));
        // residual of the defining cubic
        const double res = ((z * z * m - 2.0 * z * (y2.y - 1.0)) * m +
                            (y2.y - 1.0) * (y2.y - 1.0) - z) *
                               m -
                           1.0;
        CHECK(std::abs(res) < 1e-10 * (1.0 + std::abs(m * m * m * z * z)));
    }
    CHECK(facnum::stieltjes_m(0.0, y2) ==
          doctest::Approx(1.0 / ((y2.y - 1) * (y2.y - 1))).epsilon(1e-14));

    // y < 1: z < 0 lies below the atom at the origin
    const AspectRatio y05(0.5);
    const double m_neg = facnum::stieltjes_m(-1.0, y05);
    CHECK(m_neg > 0.0);
    CHECK(m_neg < 1.0);  // bounded by 1/(0 - z) = 1
    CHECK_THROWS_AS(facnum::stieltjes_m(0.0, y05), std::domain_error);

    // lower half-plane via conjugation
    const std::complex<double> z(1.0, -1e-4);
    const auto m_low = facnum::stieltjes_m(z, y05);
    const auto m_up = facnum::stieltjes_m(std::conj(z), y05);
    CHECK(m_low.real() == m_up.real());
    CHECK(m_low.imag() == -m_up.imag());
    CHECK(m_low.imag() < 0.0);
}

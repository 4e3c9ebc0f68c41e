#include <cmath>
#include <random>

#include "doctest.h"
#include "tvflow/convex.hpp"

using namespace tvflow;

namespace {

double grad_at(Epsilon eps, double y0, double y1, int comp) {
    const double y[2] = {y0, y1};
    double out[2];
    gamma_grad(eps, std::span<const double>(y, 2), std::span<double>(out, 2));
    return out[comp];
}

}  // namespace

TEST_CASE("gamma values") {
    const double y34[2] = {3.0, 4.0};
    CHECK(gamma(Epsilon(0.0), y34) == doctest::Approx(5.0));
    const double y0[2] = {0.0, 0.0};
    CHECK(gamma(Epsilon(1.0), y0) == doctest::Approx(1.0));
    const double y40[2] = {4.0, 0.0};
    CHECK(gamma(Epsilon(3.0), y40) == doctest::Approx(5.0));
}

TEST_CASE("gamma_grad values and bound") {
    CHECK(grad_at(Epsilon(1.0), 0.0, 0.0, 0) == 0.0);
    CHECK(grad_at(Epsilon(1.0), 0.0, 0.0, 1) == 0.0);

    const double gx = grad_at(Epsilon(1e-8), 3.0, 4.0, 0);
    const double gy = grad_at(Epsilon(1e-8), 3.0, 4.0, 1);
    CHECK(gx == doctest::Approx(0.6).epsilon(1e-9));
    CHECK(gy == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(std::hypot(gx, gy) <= 1.0);

    CHECK(grad_at(Epsilon(std::sqrt(3.0)), 1.0, 0.0, 0) == doctest::Approx(0.5));

    std::mt19937_64 rng(5);
    std::normal_distribution<double> dist(0.0, 3.0);
    std::uniform_real_distribution<double> eps_dist(1e-4, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double gxr = grad_at(Epsilon(eps_dist(rng)), dist(rng), dist(rng), 0);
        const double gyr = grad_at(Epsilon(eps_dist(rng)), dist(rng), dist(rng), 1);
        CHECK(std::abs(gxr) <= 1.0);
        CHECK(std::abs(gyr) <= 1.0);
    }
}

TEST_CASE("gamma_grad rejects eps = 0") {
    const double y[2] = {1.0, 0.0};
    double out[2];
    CHECK_THROWS_AS(
        gamma_grad(Epsilon(0.0), std::span<const double>(y, 2), std::span<double>(out, 2)),
        std::invalid_argument);
    double h[2][2];
    CHECK_THROWS_AS(gamma_hess(Epsilon(0.0), std::span<const double>(y, 2), h),
                    std::invalid_argument);
}

TEST_CASE("gamma_hess at origin and entry bound") {
    const double y0[2] = {0.0, 0.0};
    double h[2][2];
    gamma_hess(Epsilon(2.0), y0, h);
    CHECK(h[0][0] == doctest::Approx(0.5));
    CHECK(h[1][1] == doctest::Approx(0.5));
    CHECK(h[0][1] == doctest::Approx(0.0));
    CHECK(h[1][0] == doctest::Approx(0.0));

    std::mt19937_64 rng(6);
    std::normal_distribution<double> dist(0.0, 5.0);
    std::uniform_real_distribution<double> eps_dist(1e-3, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double eps = eps_dist(rng);
        const double y[2] = {dist(rng), dist(rng)};
        gamma_hess(Epsilon(eps), y, h);
        CHECK(h[0][1] == doctest::Approx(h[1][0]));
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) CHECK(std::abs(h[i][j]) <= 1.0 / eps + 1e-15);

        // 2x2 symmetric eigenvalues in closed form: positive and <= 1/eps
        const double tr = h[0][0] + h[1][1];
        const double det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        const double disc = std::sqrt(std::max(tr * tr / 4.0 - det, 0.0));
        const double lam_min = tr / 2.0 - disc, lam_max = tr / 2.0 + disc;
        CHECK(lam_min > 0.0);
        CHECK(lam_max <= 1.0 / eps + 1e-12);
    }
}

TEST_CASE("gamma_hess matches finite differences of gamma_grad") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> dist(0.0, 2.0);
    std::uniform_real_distribution<double> eps_dist(0.05, 2.0);
    const double step = 1e-5;
    for (int trial = 0; trial < 50; ++trial) {
        const Epsilon eps(eps_dist(rng));
        double y[2] = {dist(rng), dist(rng)};
        double h[2][2];
        gamma_hess(eps, std::span<const double>(y, 2), h);
        for (int j = 0; j < 2; ++j) {
            double yp[2] = {y[0], y[1]}, ym[2] = {y[0], y[1]};
            yp[j] += step;
            ym[j] -= step;
            double gp[2], gm[2];
            gamma_grad(eps, std::span<const double>(yp, 2), std::span<double>(gp, 2));
            gamma_grad(eps, std::span<const double>(ym, 2), std::span<double>(gm, 2));
            for (int i = 0; i < 2; ++i)
                CHECK(h[i][j] == doctest::Approx((gp[i] - gm[i]) / (2.0 * step)).epsilon(1e-6));
        }
    }
}

TEST_CASE("subgradient inequality and monotonicity") {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> dist(0.0, 2.0);
    std::uniform_real_distribution<double> eps_dist(1e-3, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        const Epsilon eps(eps_dist(rng));
        const double y1[2] = {dist(rng), dist(rng)};
        const double y2[2] = {dist(rng), dist(rng)};
        double g1[2], g2[2];
        gamma_grad(eps, y1, g1);
        gamma_grad(eps, y2, g2);
        const double lower = gamma(eps, y1) + g1[0] * (y2[0] - y1[0]) + g1[1] * (y2[1] - y1[1]);
        CHECK(gamma(eps, y2) >= lower - 1e-12);
        const double mono =
            (g1[0] - g2[0]) * (y1[0] - y2[0]) + (g1[1] - g2[1]) * (y1[1] - y2[1]);
        CHECK(mono >= -1e-12);
    }
}

TEST_CASE("sgn_residual cases") {
    const double y[2] = {3.0, 4.0};
    const double w[2] = {0.6, 0.8};
    CHECK(sgn_residual(y, w) == doctest::Approx(0.0));

    const double zero[2] = {0.0, 0.0};
    const double inside[2] = {0.3, 0.4};
    CHECK(sgn_residual(zero, inside) == 0.0);
    const double outside[2] = {0.0, 2.0};
    CHECK(sgn_residual(zero, outside) == doctest::Approx(1.0));
}

TEST_CASE("quantitative selection: sgn_residual(y, gamma_grad) <= eps/|y|") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> dist(0.0, 2.0);
    std::uniform_real_distribution<double> eps_dist(1e-4, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const Epsilon eps(eps_dist(rng));
        double y[2] = {dist(rng), dist(rng)};
        const double ny = std::hypot(y[0], y[1]);
        if (ny < 1e-8) continue;
        double g[2];
        gamma_grad(eps, y, g);
        CHECK(sgn_residual(std::span<const double>(y, 2), std::span<const double>(g, 2)) <=
              eps.value / ny + 1e-12);
    }
}

TEST_CASE("phi values and the Mosco sandwich") {
    const Grid g = Grid::line(4, 1.0);
    const ScalarField alpha(g, 1.0);
    CHECK(phi(Epsilon(0.0), alpha, VectorField(g)) == 0.0);
    CHECK(phi(Epsilon(1.0), alpha, VectorField(g)) == doctest::Approx(1.0));

    VectorField w3(g);
    for (auto& x : w3.comp[0]) x = 3.0;
    CHECK(phi(Epsilon(4.0), alpha, w3) == doctest::Approx(5.0));

    std::mt19937_64 rng(23);
    std::normal_distribution<double> dist(0.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        VectorField w(g);
        for (auto& x : w.comp[0]) x = dist(rng);
        ScalarField a(g);
        for (auto& x : a.v) x = std::abs(dist(rng));
        double a_l1 = 0.0;
        for (double x : a.v) a_l1 += x * g.cell_measure();
        const double eps = std::abs(dist(rng)) + 1e-6;
        const double gap = phi(Epsilon(eps), a, w) - phi(Epsilon(0.0), a, w);
        CHECK(gap >= -1e-14);
        CHECK(gap <= eps * a_l1 + 1e-12);
    }
}

TEST_CASE("upsilon values") {
    const Grid g = Grid::line(4, 1.0);
    const CoefficientSet coeffs(ScalarField(g, 0.0), ScalarField(g, 1.0),
                                ScalarField(g, 1.0), ScalarField(g, 0.0));
    CHECK(upsilon(Epsilon(1.0), coeffs, ScalarField(g, 0.0)) == doctest::Approx(0.0));
    const double c = 1.7;
    CHECK(upsilon(Epsilon(1.0), coeffs, ScalarField(g, c)) == doctest::Approx(c * c / 2.0));
}

TEST_CASE("upsilon_kappa values") {
    const Grid g = Grid::line(3, 3.0);  // h = 1
    const CoefficientSet coeffs(ScalarField(g, 0.0), ScalarField(g, 1.0),
                                ScalarField(g, 1.0), ScalarField(g, 0.0));
    const ScalarField z(g, {0.0, 1.0, 2.0});
    const double base = upsilon(Epsilon(1.0), coeffs, z);
    CHECK(upsilon_kappa(2.0, Epsilon(1.0), coeffs, z) == doctest::Approx(base + 2.0));
    CHECK(upsilon_kappa(1e-12, Epsilon(1.0), coeffs, z) == doctest::Approx(base).epsilon(1e-9));
    // constants are in the kernel of the laplacian
    const ScalarField zc(g, 4.2);
    CHECK(upsilon_kappa(7.0, Epsilon(1.0), coeffs, zc) ==
          doctest::Approx(upsilon(Epsilon(1.0), coeffs, zc)));
    CHECK_THROWS_AS(upsilon_kappa(0.0, Epsilon(1.0), coeffs, z), std::invalid_argument);
}

TEST_CASE("upsilon gradient matches finite differences on a 5-cell grid") {
    const Grid g = Grid::line(5, 1.0);
    std::mt19937_64 rng(31);
    std::normal_distribution<double> dist(0.0, 1.0);
    ScalarField alpha(g), f_circ(g), z(g);
    for (auto& x : alpha.v) x = std::abs(dist(rng));
    for (auto& x : f_circ.v) x = dist(rng);
    for (auto& x : z.v) x = dist(rng);
    const CoefficientSet coeffs(alpha, ScalarField(g, 1.5), ScalarField(g, 2.0), f_circ);
    const Epsilon eps(0.7);

    // assembled gradient field reconstructed from the public calculus
    const VectorField grad_z = gradient(z);
    VectorField flux(g);
    for (std::size_t j = 0; j < g.cells(); ++j) {
        double y[1] = {grad_z.comp[0][j]};
        double gy[1];
        gamma_grad(eps, std::span<const double>(y, 1), std::span<double>(gy, 1));
        flux.comp[0][j] = coeffs.alpha[j] * gy[0] + coeffs.beta[j] * grad_z.comp[0][j];
    }
    ScalarField assembled = divergence(flux);
    for (std::size_t j = 0; j < g.cells(); ++j)
        assembled[j] = coeffs.alpha_circ[j] * z[j] - assembled[j] - coeffs.f_circ[j];

    const double step = 1e-6;
    for (std::size_t j = 0; j < g.cells(); ++j) {
        ScalarField zp = z, zm = z;
        zp[j] += step;
        zm[j] -= step;
        const double fd = (upsilon(eps, coeffs, zp) - upsilon(eps, coeffs, zm)) /
                          (2.0 * step * g.cell_measure());
        CHECK(assembled[j] == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("coefficient set validation") {
    const Grid g = Grid::line(4, 1.0);
    CHECK_THROWS_AS(CoefficientSet(ScalarField(g, -0.1), ScalarField(g, 1.0),
                                   ScalarField(g, 1.0), ScalarField(g, 0.0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(CoefficientSet(ScalarField(g, 1.0), ScalarField(g, 0.0),
                                   ScalarField(g, 1.0), ScalarField(g, 0.0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(CoefficientSet(ScalarField(g, 1.0), ScalarField(g, 1.0),
                                   ScalarField(g, 0.0), ScalarField(g, 0.0)),
                    std::invalid_argument);
    const CoefficientSet ok(ScalarField(g, 1.0), ScalarField(g, 0.5),
                            ScalarField(g, 2.0), ScalarField(g, 0.0));
    CHECK(ok.delta_star() == doctest::Approx(0.5));
    CHECK(ok.delta0() == doctest::Approx(0.5));
}

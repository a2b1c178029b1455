#include "doctest.h"
#include "oracles.hpp"

#include "rfct/analytic.hpp"
#include "rfct/errors.hpp"

#include <cmath>
#include <numbers>

using namespace rfct;

TEST_SUITE("analytic") {

TEST_CASE("steady solution on the boundaries") {
    const TracyProblem p;
    for (double x : {0.0, 1.3, 5.0, 8.7, 10.0}) {
        CHECK(steady_head(p, x, 0.0) == doctest::Approx(p.psi_r).epsilon(1e-14));
        CHECK(std::abs(steady_head(p, x, p.L) - p.top_head(x)) < 1e-12);
    }
    // top formula: hbar = hbar0 (1 - cos(2 pi x / a)) / 2
    const double x = 3.0;
    const double hbar = p.hbar0() * 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * x / p.a));
    CHECK(p.top_head(x) ==
          doctest::Approx(std::log(hbar + std::exp(p.alpha * p.psi_r)) / p.alpha).epsilon(1e-14));
}

TEST_CASE("steady solution satisfies the Kirchhoff equation") {
    const TracyProblem p;
    for (auto [x, z] : {std::pair{5.0, 5.0}, {2.0, 8.0}, {7.5, 1.5}, {4.0, 9.2}}) {
        const double norm = std::abs(steady_kirchhoff(p, x, z));
        const double coarse = std::abs(oracle::steady_pde_residual(p, x, z, 0.2));
        const double fine = std::abs(oracle::steady_pde_residual(p, x, z, 0.1));
        CAPTURE(x);
        CAPTURE(z);
        CHECK(fine < 1e-6 * norm);
        // fourth-order stencil: the residual is truncation error and drops ~16x
        const double rate = std::log2(coarse / fine);
        CHECK(rate > 3.5);
        CHECK(rate < 4.5);
    }
}

TEST_CASE("transient solution") {
    const TracyProblem p;
    SUBCASE("satisfies the transient equation") {
        for (double t : {0.05, 0.2}) {
            const double x = 3.0, z = 6.0;
            const double r = oracle::transient_pde_residual(p, x, z, t, 0.05, 1e-4);
            const double norm = std::abs(steady_kirchhoff(p, x, z) + transient_correction(p, x, z, t));
            CHECK(std::abs(r) < 1e-5 * norm);
        }
    }
    SUBCASE("matches the steady solution on the top and bottom") {
        for (double t : {1e-4, 5e-4, 0.1}) {
            for (double x : {0.5, 5.0, 9.0}) {
                CHECK(std::abs(transient_head(p, x, 0.0, t) - steady_head(p, x, 0.0)) < 1e-12);
                CHECK(std::abs(transient_head(p, x, p.L, t) - steady_head(p, x, p.L)) < 1e-10);
            }
        }
    }
    SUBCASE("starts at psi_r and decays to the steady state") {
        for (double z : {2.0, 5.0, 8.0}) {
            CHECK(transient_head(p, 4.0, z, 0.0) == doctest::Approx(p.psi_r).epsilon(1e-10));
        }
        const double t_long = 40.0 / p.gamma1(1);
        for (double x : {1.0, 5.0, 9.0}) {
            for (double z : {1.0, 5.0, 9.0}) {
                CHECK(std::abs(transient_head(p, x, z, t_long) - steady_head(p, x, z)) < 1e-8);
            }
        }
    }
    SUBCASE("decay rates of the two modes") {
        // Late enough that the k = 2 terms are negligible.
        const double t1 = 0.4, t2 = 0.6;
        for (double z : {3.0, 5.0, 7.0}) {
            CHECK(oracle::fitted_rate_mode1(p, z, t1, t2) == doctest::Approx(p.gamma1(1)).epsilon(0.05));
            CHECK(oracle::fitted_rate_mode2(p, z, t1, t2) == doctest::Approx(p.gamma2(1)).epsilon(0.05));
        }
        const double lambda = std::numbers::pi / p.L;
        CHECK(p.gamma2(1) == doctest::Approx((lambda * lambda + std::pow(2 * std::numbers::pi / p.a, 2) +
                                              p.alpha * p.alpha / 4) / p.c()));
    }
}

TEST_CASE("problem parameters") {
    const TracyProblem p;
    CHECK(p.c() == doctest::Approx(0.164 * 0.25 / 2.04));
    TracyProblem bad;
    bad.alpha = -1.0;
    CHECK_THROWS_AS(bad.validate(), InvalidParameter);
}

TEST_CASE("L2 error") {
    const auto mesh = generate_rect_triangulation(2, 1, 0.25, 0.25);
    std::vector<double> c(mesh.num_nodes(), 3.0);
    CHECK(l2_error(mesh, c, [](const Point&) { return 3.0; }) == 0.0);

    std::vector<double> lin(mesh.num_nodes());
    for (int i = 0; i < mesh.num_nodes(); ++i) lin[i] = mesh.coords[i][0] - 2 * mesh.coords[i][1];
    CHECK(l2_error(mesh, lin, [](const Point& x) { return x[0] - 2 * x[1]; }) < 1e-12);

    // Interpolation error of a smooth field is O(h^2) and not zero.
    auto f = [](const Point& x) { return std::sin(x[0]) * std::exp(x[1]); };
    std::vector<double> errors;
    for (double h : {0.25, 0.125, 0.0625}) {
        const auto m = generate_rect_triangulation(2, 1, h, h);
        std::vector<double> v(m.num_nodes());
        for (int i = 0; i < m.num_nodes(); ++i) v[i] = f(m.coords[i]);
        errors.push_back(l2_error(m, v, f));
    }
    CHECK(errors[0] > 0.0);
    CHECK(std::log2(errors[1] / errors[2]) == doctest::Approx(2.0).epsilon(0.05));

    const auto col = generate_interval_mesh(1.0, 8);
    std::vector<double> q(col.num_nodes());
    for (int i = 0; i < col.num_nodes(); ++i) q[i] = col.coords[i][0];
    CHECK(l2_error(col, q, [](const Point& x) { return x[0]; }) < 1e-14);
}

}  // TEST_SUITE

// Exterior field evaluation tests: potential and gradient values, decay at
// infinity, pole regularity, and the finite-difference harmonicity oracle
// with an injected-fault sensitivity check.
#include <catch2/catch_amalgamated.hpp>

#include <backus/coeffs.hpp>
#include <backus/field.hpp>
#include <backus/fixpoint.hpp>
#include <backus/special.hpp>
#include <backus/spectral.hpp>

#include <cmath>
#include <random>
#include <vector>

using namespace backus;

namespace {

constexpr double kPi = 3.14159265358979323846;

AxisymCoeffs random_coeffs(int L, std::mt19937& rng) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    AxisymCoeffs u(L);
    for (int l = 0; l <= L; ++l) u[l] = U(rng);
    return u;
}

}  // namespace

TEST_CASE("potential: dipole and monopole anchor values", "[field]") {
    const auto d = dipole_trace(4);
    // sin(theta)/r^2 at r = 2 over the pole.
    CHECK(field::eval_potential(d, {2.0, kPi / 2}) ==
          Catch::Approx(0.25).epsilon(1e-14));
    CHECK(field::eval_potential(d, {1.0, kPi / 2}) == Catch::Approx(1.0).epsilon(1e-14));

    AxisymCoeffs mono(0);
    mono[0] = std::sqrt(4.0 * kPi);
    CHECK(field::eval_potential(mono, {10.0, 0.37}) ==
          Catch::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("potential: interior points are rejected", "[field]") {
    const auto d = dipole_trace(2);
    CHECK_THROWS_AS(field::eval_potential(d, {0.999, 0.0}), std::domain_error);
    CHECK_THROWS_AS(field::eval_gradient(d, {0.5, 0.2}), std::domain_error);
    CHECK_NOTHROW(field::eval_potential(d, {1.0, 0.0}));
}

TEST_CASE("potential: decay bound at large radius", "[field]") {
    std::mt19937 rng(2021u);
    const auto u = random_coeffs(10, rng);
    const double C = field::decay_bound_constant(u);
    CHECK(C > 0.0);
    for (double r : {10.0, 100.0, 1000.0, 1e6}) {
        for (double th : {-1.2, -0.3, 0.0, 0.8, 1.5}) {
            CHECK(std::abs(field::eval_potential(u, {r, th})) <=
                  C / r * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("gradient: dipole intensity at pole and equator", "[field]") {
    const auto d = dipole_trace(4);
    const auto pole = field::eval_gradient(d, {1.0, kPi / 2});
    CHECK(pole.u_r == Catch::Approx(-2.0).epsilon(1e-14));
    CHECK(pole.intensity() == Catch::Approx(2.0).epsilon(1e-14));
    const auto equator = field::eval_gradient(d, {1.0, 0.0});
    CHECK(equator.u_r == 0.0);
    CHECK(equator.intensity() == Catch::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("gradient: finite-difference consistency of both components", "[field]") {
    std::mt19937 rng(2122u);
    const auto u = random_coeffs(12, rng);
    const double r = 1.5, th = 0.3, h = 1e-5;
    const auto g = field::eval_gradient(u, {r, th});
    const double fd_r = (field::eval_potential(u, {r + h, th}) -
                         field::eval_potential(u, {r - h, th})) /
                        (2.0 * h);
    const double fd_t = (field::eval_potential(u, {r, th + h}) -
                         field::eval_potential(u, {r, th - h})) /
                        (2.0 * h);
    CHECK(std::abs(g.u_r - fd_r) <= 1e-8 * std::max(1.0, std::abs(fd_r)));
    CHECK(std::abs(g.u_theta_over_r - fd_t / r) <= 1e-8 * std::max(1.0, std::abs(fd_t)));
}

TEST_CASE("gradient: finite at the poles", "[field]") {
    std::mt19937 rng(2223u);
    const auto u = random_coeffs(16, rng);
    for (double th : {kPi / 2, -kPi / 2}) {
        const auto g = field::eval_gradient(u, {1.0, th});
        CHECK(std::isfinite(g.u_r));
        CHECK(std::isfinite(g.u_theta_over_r));
        CHECK(g.intensity() >= 0.0);
    }
}

TEST_CASE("gradient: surface intensity squared matches the spectral dot product",
          "[field]") {
    std::mt19937 rng(2324u);
    const auto u = random_coeffs(12, rng);
    const auto g2 = spectral::grad_square_axisym(u, u);
    double scale = 0.0;
    std::vector<double> thetas;
    for (int i = 0; i < 101; ++i) thetas.push_back(-kPi / 2 + kPi * i / 100.0);
    for (double th : thetas) {
        const double spec = spectral::synth_axisym(g2, th);
        const double direct = field::eval_gradient(u, {1.0, th}).intensity();
        scale = std::max({scale, std::abs(spec), 1.0});
        CHECK(std::abs(spec - direct * direct) <= 1e-10 * scale);
    }
}

TEST_CASE("harmonicity: exact extensions pass, corrupted radial powers fail",
          "[field]") {
    const std::vector<double> rs = {1.2, 1.5, 2.2, 3.0};
    std::vector<double> thetas;
    for (int i = 0; i < 9; ++i) thetas.push_back(-1.4 + 2.8 * i / 8.0);

    const auto d = dipole_trace(4);
    CHECK(field::harmonicity_check(d, rs, thetas) <= 1e-6);

    std::mt19937 rng(2425u);
    const auto u = random_coeffs(16, rng);
    CHECK(field::harmonicity_check(u, rs, thetas) <= 1e-5);

    // Injected fault: radial power r^{-l} instead of r^{-l-1} is visibly
    // non-harmonic.
    const auto corrupted = [&u](double r, double th) {
        const double z = std::sin(th);
        double acc = 0.0;
        for (int l = 0; l <= u.degree(); ++l)
            acc += u.at(l) * sf::alpha_norm(l, 0) * sf::assoc_legendre(l, 0, z) *
                   std::pow(r, -l);
        return acc;
    };
    CHECK(field::harmonicity_check(corrupted, rs, thetas) >= 1e-2);

    // Probes hugging the sphere cannot center the finite-difference stencil.
    CHECK_THROWS_AS(field::harmonicity_check(d, {1.000001}, thetas), std::domain_error);
}

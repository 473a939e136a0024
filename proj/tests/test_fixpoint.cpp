// Nonlinear solver tests: dipole data, the quadratic map T, the fixed-point
// step, full solves (trivial, perturbed, coefficient-input), convergence
// diagnostics, and error contracts.  The perturbed-run numbers are frozen
// regression values from the first verified run of this deterministic
// configuration.
#include <catch2/catch_amalgamated.hpp>

#include <backus/coeffs.hpp>
#include <backus/field.hpp>
#include <backus/fixpoint.hpp>
#include <backus/oblique.hpp>
#include <backus/spectral.hpp>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

using namespace backus;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> perturbed_intensity(const spectral::SurfaceGrid& grid, double eps) {
    std::vector<double> g(grid.z.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double z = grid.z[i];
        g[i] = std::sqrt(1.0 + 3.0 * z * z + eps * (1.0 - z * z));
    }
    return g;
}

std::vector<double> dipole_intensity(const spectral::SurfaceGrid& grid) {
    return perturbed_intensity(grid, 0.0);
}

}  // namespace

TEST_CASE("dipole trace: single coefficient and surface values", "[fixpoint]") {
    const auto d = dipole_trace(4);
    CHECK(d[1] == Catch::Approx(std::sqrt(4.0 * kPi / 3.0)).epsilon(1e-15));
    CHECK(d[1] == Catch::Approx(2.0466534).margin(1e-7));
    for (int l : {0, 2, 3, 4}) CHECK(d[l] == 0.0);
    CHECK(spectral::synth_axisym(d, kPi / 2) == Catch::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(spectral::synth_axisym(d, 0.0)) <= 1e-16);
}

TEST_CASE("squared dipole gradient: coefficients and surface values", "[fixpoint]") {
    const auto g2 = grad_dipole_sq_coeffs(4);
    CHECK(g2[0] == Catch::Approx(2.0 * std::sqrt(4.0 * kPi)).epsilon(1e-15));
    CHECK(g2[2] == Catch::Approx(2.0 * std::sqrt(4.0 * kPi / 5.0)).epsilon(1e-15));
    CHECK(g2[0] == Catch::Approx(7.0898154).margin(1e-7));
    CHECK(g2[2] == Catch::Approx(3.1706618).margin(1e-7));
    for (int l : {1, 3, 4}) CHECK(g2[l] == 0.0);
    CHECK(spectral::synth_axisym(g2, kPi / 2) == Catch::Approx(4.0).epsilon(1e-13));
    CHECK(spectral::synth_axisym(g2, -kPi / 2) == Catch::Approx(4.0).epsilon(1e-13));
    CHECK(spectral::synth_axisym(g2, 0.0) == Catch::Approx(1.0).epsilon(1e-13));

    // Independent computation path: the gradient dot product of the trace.
    const auto cross = spectral::grad_square_axisym(dipole_trace(2), dipole_trace(2));
    for (int l = 0; l <= 2; ++l)
        CHECK(std::abs(cross[l] - g2.at(l)) <= 1e-12);
}

TEST_CASE("surface intensity: dipole profile and zero field", "[fixpoint]") {
    std::vector<double> thetas;
    for (int i = 0; i < 64; ++i) thetas.push_back(-kPi / 2 + kPi * i / 63.0);
    const auto vals = intensity_on_surface(dipole_trace(4), thetas);
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        const double st = std::sin(thetas[i]);
        CHECK(vals[i] == Catch::Approx(std::sqrt(1.0 + 3.0 * st * st)).epsilon(1e-13));
    }
    const auto zeros = intensity_on_surface(AxisymCoeffs(4), thetas);
    for (double v : zeros) CHECK(v == 0.0);
}

TEST_CASE("quadratic map: zero data, quadrature oracle, homogeneity", "[fixpoint]") {
    const auto z = apply_T(AxisymCoeffs(2), 0.0, 16);
    for (int l = 0; l <= 16; ++l) CHECK(z.T[l] == 0.0);
    CHECK(z.tail_norm == 0.0);

    // Pure-equator data: T must match quadrature analysis of the pointwise
    // squared gradient of the solved correction.
    const int L = 32;
    const auto app = apply_T(AxisymCoeffs(0), 1.0, L);
    const auto grid = spectral::SurfaceGrid::gauss(256);
    std::vector<double> samples(grid.theta.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto g = field::eval_gradient(app.v, {1.0, grid.theta[i]});
        samples[i] = g.intensity() * g.intensity();
    }
    const auto oracle = spectral::analyze_axisym(samples, grid, L);
    double maxc = 1.0;
    for (int l = 0; l <= L; ++l) maxc = std::max(maxc, std::abs(oracle[l]));
    for (int l = 0; l <= L; ++l)
        CHECK(std::abs(app.T[l] - oracle[l]) <= 1e-9 * maxc);

    // T is a quadratic form of a linear solve: scaling data by 2 scales T by 4.
    std::mt19937 rng(3031u);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    AxisymCoeffs f(8);
    for (int l = 0; l <= 8; ++l) f[l] = 0.1 * U(rng);
    const auto t1 = apply_T(f, 0.05, 24);
    const auto t2 = apply_T(2.0 * f, 0.10, 24);
    for (int l = 0; l <= 24; ++l)
        CHECK(std::abs(t2.T[l] - 4.0 * t1.T[l]) <=
              1e-12 * std::max(1.0, std::abs(t1.T[l])));
}

TEST_CASE("fixed-point step: cancellation and linear response", "[fixpoint]") {
    const int L = 16;
    const auto gd2 = grad_dipole_sq_coeffs(L);
    const auto zero = psi_step(AxisymCoeffs(L), gd2, 0.0, L);
    for (int l = 0; l <= L; ++l) CHECK(zero[l] == 0.0);

    // Raising the squared-intensity data by a constant shifts the step by
    // exactly that constant (the map applies no extra factor to the data).
    auto bumped = gd2;
    bumped[0] += 1e-3;
    const auto step = psi_step(AxisymCoeffs(L), bumped, 0.0, L);
    CHECK(step[0] == Catch::Approx(1e-3).epsilon(1e-12));
    for (int l = 1; l <= L; ++l) CHECK(std::abs(step[l]) <= 1e-18);
}

TEST_CASE("full solve: exact dipole data is a one-step fixed point", "[fixpoint]") {
    const int L = 8;
    const auto grid = spectral::SurfaceGrid::gauss(2 * L + 3);
    BackusConfig cfg;
    cfg.L = L;
    const auto res = solve_backus(dipole_intensity(grid), grid, cfg);
    CHECK(res.converged);
    CHECK(res.iterations == 1);
    CHECK(hs_norm(res.f_star, cfg.s) <= 1e-13);
    CHECK(hs_dist(res.u_surface, dipole_trace(L), cfg.s + 1.0) <= 1e-14);
    CHECK(res.residual_intensity_sup <= 1e-13);
    CHECK(res.delta <= 1e-13);
}

TEST_CASE("full solve: perturbed intensity converges to frozen diagnostics",
          "[fixpoint]") {
    const int L = 64;
    const auto grid = spectral::SurfaceGrid::gauss(2 * L + 3);
    BackusConfig cfg;
    cfg.L = L;
    cfg.h0 = 0.01;
    const auto res = solve_backus(perturbed_intensity(grid, 0.01), grid, cfg);

    CHECK(res.converged);
    CHECK(res.iterations == 8);
    CHECK(res.delta == Catch::Approx(0.043274407225881134).epsilon(1e-12));
    CHECK(res.residual_intensity_sup <= 5e-13);

    // Frozen iterate-distance trace (leading entries to full precision, the
    // rounding-dominated tail by generous envelope).
    REQUIRE(res.trace.size() == 8);
    const double frozen[4] = {0.058135292888495949, 0.0013790219031662642,
                              2.7486122034554134e-05, 5.483392300986281e-07};
    for (int i = 0; i < 4; ++i)
        CHECK(res.trace[static_cast<std::size_t>(i)] ==
              Catch::Approx(frozen[i]).epsilon(1e-9));
    const double envelope[4] = {1.0861e-08, 2.1014e-10, 4.0774e-12, 7.85e-14};
    for (int i = 4; i < 8; ++i) {
        CHECK(res.trace[static_cast<std::size_t>(i)] <= envelope[i - 4] * 1.5);
        CHECK(res.trace[static_cast<std::size_t>(i)] >= 0.0);
    }
    // Contraction-like decay of the trace after the opening steps.
    for (std::size_t k = 2; k + 1 < res.trace.size(); ++k)
        CHECK(res.trace[k + 1] <= 0.9 * res.trace[k]);

    // Structural identities of the result.
    for (int l = 0; l <= L; ++l)
        CHECK(res.u_surface[l] == dipole_trace(L).at(l) + res.v_star[l]);
    CHECK(spectral::synth_axisym(res.u_surface, 0.0) ==
          Catch::Approx(cfg.h0).margin(1e-10));
    CHECK(res.tail_norms.size() == res.trace.size());

    // The fixed point reproduces itself under one more map application.
    const auto g_sq = spectral::analyze_axisym(
        [&grid] {
            auto g = perturbed_intensity(grid, 0.01);
            for (double& x : g) x *= x;
            return g;
        }(),
        grid, 2 * L + 2);
    const auto again = psi_step(res.f_star, g_sq, cfg.h0, L);
    CHECK(hs_dist(again, res.f_star, cfg.s) <= 10.0 * cfg.tol);

    // Independent residual check on a fine grid.
    const auto fine = spectral::SurfaceGrid::gauss(512);
    const auto vals = intensity_on_surface(res.u_surface, fine.theta);
    const auto gref = perturbed_intensity(fine, 0.01);
    double sup = 0.0;
    for (std::size_t i = 0; i < vals.size(); ++i)
        sup = std::max(sup, std::abs(vals[i] - gref[i]));
    CHECK(sup <= 1e-6);
}

TEST_CASE("full solve: halving the data perturbation halves the response",
          "[fixpoint]") {
    const int L = 64;
    const auto grid = spectral::SurfaceGrid::gauss(2 * L + 3);
    BackusConfig cfg;
    cfg.L = L;

    cfg.h0 = 0.01;
    const auto full = solve_backus(perturbed_intensity(grid, 0.01), grid, cfg);
    cfg.h0 = 0.005;
    const auto half = solve_backus(perturbed_intensity(grid, 0.005), grid, cfg);

    const double nf = hs_norm(full.v_star, cfg.s + 1.0);
    const double nh = hs_norm(half.v_star, cfg.s + 1.0);
    CHECK(nf == Catch::Approx(0.17659231410692308).epsilon(1e-9));
    CHECK(nh == Catch::Approx(0.088477604920467606).epsilon(1e-9));
    const double ratio = nh / nf;
    CHECK(ratio >= 0.4);
    CHECK(ratio <= 0.6);
    CHECK(ratio == Catch::Approx(0.50102749583368733).epsilon(1e-9));
}

TEST_CASE("full solve: residual decreases when the working degree doubles",
          "[fixpoint]") {
    const auto fine = spectral::SurfaceGrid::gauss(512);
    const auto gref = perturbed_intensity(fine, 0.01);
    double sup[2];
    int idx = 0;
    for (int L : {16, 32}) {
        const auto grid = spectral::SurfaceGrid::gauss(2 * L + 3);
        BackusConfig cfg;
        cfg.L = L;
        cfg.h0 = 0.01;
        const auto res = solve_backus(perturbed_intensity(grid, 0.01), grid, cfg);
        const auto vals = intensity_on_surface(res.u_surface, fine.theta);
        double s = 0.0;
        for (std::size_t i = 0; i < vals.size(); ++i)
            s = std::max(s, std::abs(vals[i] - gref[i]));
        sup[idx++] = s;
    }
    CHECK(sup[1] < sup[0]);
}

TEST_CASE("full solve: coefficient input path matches the sample path", "[fixpoint]") {
    // Band-limited intensity coefficients: analyze the perturbed profile at a
    // modest degree, then treat those coefficients as the data.
    const auto agrid = spectral::SurfaceGrid::gauss(64);
    const auto g_c =
        spectral::analyze_axisym(perturbed_intensity(agrid, 0.01), agrid, 24);
    BackusConfig cfg;
    cfg.L = 20;
    cfg.h0 = 0.01;
    const auto from_coeffs = solve_backus(g_c, cfg);

    const int N = std::max(4 * cfg.L + 3, 2 * g_c.degree() + 3);
    const auto grid = spectral::SurfaceGrid::gauss(N);
    const auto from_samples =
        solve_backus(spectral::synth_axisym(g_c, grid.theta), grid, cfg);

    CHECK(from_coeffs.iterations == from_samples.iterations);
    for (int l = 0; l <= cfg.L; ++l)
        CHECK(std::abs(from_coeffs.u_surface[l] - from_samples.u_surface[l]) <= 1e-14);
}

TEST_CASE("full solve: error contracts", "[fixpoint]") {
    const int L = 8;
    const auto grid = spectral::SurfaceGrid::gauss(2 * L + 3);
    BackusConfig cfg;
    cfg.L = L;

    auto g = dipole_intensity(grid);
    g[3] = -0.1;
    CHECK_THROWS_AS(solve_backus(g, grid, cfg), positivity_error);

    auto g_nan = dipole_intensity(grid);
    g_nan[0] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(solve_backus(g_nan, grid, cfg), input_error);

    // Too few nodes to analyze the squared data exactly.
    const auto small = spectral::SurfaceGrid::gauss(2 * L + 2);
    CHECK_THROWS_AS(solve_backus(dipole_intensity(small), small, cfg), input_error);

    BackusConfig bad_s = cfg;
    bad_s.s = 1.0;
    CHECK_THROWS_AS(solve_backus(dipole_intensity(grid), grid, bad_s), input_error);

    BackusConfig bad_iter = cfg;
    bad_iter.max_iter = 0;
    CHECK_THROWS_AS(solve_backus(dipole_intensity(grid), grid, bad_iter), input_error);
}

TEST_CASE("full solve: non-convergence carries the partial result", "[fixpoint]") {
    const int L = 32;
    const auto grid = spectral::SurfaceGrid::gauss(2 * L + 3);
    BackusConfig cfg;
    cfg.L = L;
    cfg.h0 = 0.01;
    cfg.max_iter = 2;
    try {
        solve_backus(perturbed_intensity(grid, 0.01), grid, cfg);
        FAIL("expected the iteration cap to trigger");
    } catch (const nonconvergence_error& e) {
        CHECK_FALSE(e.partial.converged);
        CHECK(e.partial.iterations == 2);
        CHECK(e.partial.trace.size() == 2);
        CHECK(e.partial.trace[1] < e.partial.trace[0]);
        CHECK(e.partial.f_star.finite());
    }
}

// Coupling-coefficient tests.  The reference table below was generated with
// an independent computer-algebra system (exact rational arithmetic, values
// printed to 22 significant digits) and frozen here; the remaining checks are
// closed forms, orthogonality sums, and selection rules.
#include <catch2/catch_amalgamated.hpp>

#include <backus/wigner.hpp>

#include <cmath>
#include <random>

using namespace backus;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct W3jCase {
    int l1, l2, l3, m1, m2, m3;
    double value;
};

// Independent bignum oracle values.  Degrees <= 60 exercise the exact
// rational path; degrees 70..100 exercise the log-space floating path;
// the all-zero-order rows also pin the cancellation-free closed form.
constexpr W3jCase kOracle[] = {
    {42, 31, 28, -1, 2, -1, 0.01400359354899689441093},
    {54, 52, 59, -2, 24, -22, 0.01153320392673850603735},
    {15, 24, 26, -12, -6, 18, -0.01432107947151928603389},
    {60, 46, 17, -20, 17, 3, 0.02432921099324473801367},
    {40, 11, 44, 27, 2, -29, 0.02495483320734246999636},
    {28, 53, 45, -9, 29, -20, -0.01103594509990806238865},
    {2, 0, 2, 1, 0, -1, -0.4472135954999579392818},
    {12, 0, 12, -10, 0, 10, 0.2000000000000000000000},
    {26, 8, 33, -5, -2, 7, -0.01188381990854826435960},
    {29, 45, 36, 13, -22, 9, -0.01857953463550525718142},
    {37, 34, 11, 5, 5, -10, 0.04197326113241405091091},
    {19, 10, 15, -8, -5, 13, -0.03910459123538146911606},
    {54, 7, 51, 27, 6, -33, -0.003999738225939233384244},
    {11, 37, 47, -9, 22, -13, 0.00002911887934483461132543},
    {33, 44, 23, 9, 1, -10, -0.02197698624020092013544},
    {5, 32, 33, -5, 0, 5, 0.05936838071430307667855},
    {59, 47, 15, -19, 23, -4, -0.02097290901183937378762},
    {10, 0, 10, -4, 0, 4, 0.2182178902359923812661},
    {40, 19, 26, 28, -6, -22, -0.01888732836444681115671},
    {28, 14, 18, -27, 13, 14, 0.06890645587706940337270},
    {24, 13, 34, 19, 2, -21, 0.04562105143360909521443},
    {19, 40, 32, 7, -19, 12, 0.01168433543145880311646},
    {8, 20, 19, 6, 10, -16, 0.03144029270167816842385},
    {9, 31, 33, 6, 7, -13, -0.01859145859905832555850},
    {70, 70, 70, -2, -10, 12, 0.004693714125426962984761},
    {80, 65, 40, -5, -9, 14, 0.01037462263058214555831},
    {90, 88, 10, 9, -9, 0, -0.009427475835598338253485},
    {100, 60, 52, 5, 1, -6, 0.01040406700182764247812},
    {12, 14, 18, 0, 0, 0, 0.04192742887639184554147},
    {30, 30, 30, 0, 0, 0, -0.01987533918822201319355},
    {21, 21, 42, 0, 0, 0, 0.04505750695026990241531},
    {64, 64, 64, 0, 0, 0, 0.009399178242503595401184},
    {80, 80, 80, 0, 0, 0, 0.007531081585095738204764},
};

}  // namespace

TEST_CASE("coupling symbol: closed-form anchors", "[wigner]") {
    CHECK(sf::wigner_3j(0, 0, 0, 0, 0, 0) == Catch::Approx(1.0).epsilon(1e-15));
    CHECK(sf::wigner_3j(1, 1, 0, 0, 0, 0) ==
          Catch::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-15));
    CHECK(sf::wigner_3j(1, 1, 2, 0, 0, 0) ==
          Catch::Approx(std::sqrt(2.0 / 15.0)).epsilon(1e-15));
    CHECK(sf::wigner_3j(2, 1, 5, 0, 0, 0) == 0.0);  // triangle rule fails
    // Spot decimals.
    CHECK(sf::wigner_3j(1, 1, 0, 0, 0, 0) == Catch::Approx(-0.5773503).margin(1e-7));
    CHECK(sf::wigner_3j(1, 1, 2, 0, 0, 0) == Catch::Approx(0.3651484).margin(1e-7));
}

TEST_CASE("coupling symbol: agrees with the independent bignum table", "[wigner]") {
    for (const auto& c : kOracle) {
        const auto info = sf::wigner_3j_info(c.l1, c.l2, c.l3, c.m1, c.m2, c.m3);
        const int maxdeg = std::max({c.l1, c.l2, c.l3});
        CHECK(info.exact == (maxdeg <= sf::wigner_exact_max_degree));
        double tol;
        if (info.exact) {
            tol = 1e-13;  // exact rational path: only the final rounding
        } else {
            // Floating path: accuracy degrades with the cancellation factor of
            // the alternating sum.
            tol = std::max(1e-12, 1e-13 * info.cancellation);
        }
        CHECK(std::abs(info.value - c.value) <= tol * std::abs(c.value));
    }
}

TEST_CASE("all-zero-order closed form matches the table and the exact path",
          "[wigner]") {
    for (const auto& c : kOracle) {
        if (c.m1 != 0 || c.m2 != 0 || c.m3 != 0) continue;
        const double closed = sf::wigner_3j_000(c.l1, c.l2, c.l3);
        CHECK(std::abs(closed - c.value) <= 1e-13 * std::abs(c.value));
    }
    std::mt19937 rng(9190u);
    std::uniform_int_distribution<int> LD(0, 30);
    int tested = 0;
    while (tested < 150) {
        const int l1 = LD(rng), l2 = LD(rng);
        std::uniform_int_distribution<int> L3(std::abs(l1 - l2), l1 + l2);
        const int l3 = L3(rng);
        const double closed = sf::wigner_3j_000(l1, l2, l3);
        const double exact = sf::wigner_3j(l1, l2, l3, 0, 0, 0);
        if ((l1 + l2 + l3) % 2 == 1) {
            CHECK(closed == 0.0);
            CHECK(exact == 0.0);
        } else {
            CHECK(std::abs(closed - exact) <=
                  1e-13 * std::max(std::abs(exact), 1e-300));
        }
        ++tested;
    }
}

TEST_CASE("coupling symbol: selection-rule failures return exact zero", "[wigner]") {
    CHECK(sf::wigner_3j(3, 3, 3, 1, 1, -2) == 0.0);   // m-sum nonzero
    CHECK(sf::wigner_3j(1, 1, 3, 0, 0, 0) == 0.0);    // triangle rule fails
    CHECK(sf::wigner_3j(1, 1, 1, 0, 0, 0) == 0.0);    // odd parity at zero orders
    CHECK(sf::wigner_3j(2, 2, 2, 3, -3, 0) == 0.0);   // |m| exceeds l
    CHECK(sf::wigner_3j(5, 4, 2, 4, -3, -1) != 0.0);  // sanity: admissible symbol
}

TEST_CASE("orthogonality: degree-weighted square sum over the coupled degree",
          "[wigner]") {
    std::mt19937 rng(77123u);
    std::uniform_int_distribution<int> LD(0, 30);
    for (int trial = 0; trial < 200; ++trial) {
        const int l1 = LD(rng), l2 = LD(rng);
        std::uniform_int_distribution<int> M1(-l1, l1), M2(-l2, l2);
        const int m1 = M1(rng), m2 = M2(rng);
        const int m3 = -m1 - m2;
        long double sum = 0.0L;
        for (int l3 = std::abs(l1 - l2); l3 <= l1 + l2; ++l3) {
            if (std::abs(m3) > l3) continue;
            const double w = sf::wigner_3j(l1, l2, l3, m1, m2, m3);
            sum += static_cast<long double>(2 * l3 + 1) * w * w;
        }
        CHECK(std::abs(static_cast<double>(sum) - 1.0) <= 1e-12);
    }
}

TEST_CASE("coupling symbol: permutation and reflection symmetries", "[wigner]") {
    std::mt19937 rng(31415u);
    std::uniform_int_distribution<int> LD(0, 25);
    int tested = 0;
    while (tested < 100) {
        const int l1 = LD(rng), l2 = LD(rng);
        std::uniform_int_distribution<int> L3(std::abs(l1 - l2), l1 + l2);
        const int l3 = L3(rng);
        std::uniform_int_distribution<int> M1(-l1, l1), M2(-l2, l2);
        const int m1 = M1(rng), m2 = M2(rng), m3 = -m1 - m2;
        if (std::abs(m3) > l3) continue;
        const double base = sf::wigner_3j(l1, l2, l3, m1, m2, m3);
        const double cyc = sf::wigner_3j(l2, l3, l1, m2, m3, m1);
        const double swapped = sf::wigner_3j(l2, l1, l3, m2, m1, m3);
        const double reflected = sf::wigner_3j(l1, l2, l3, -m1, -m2, -m3);
        const double sign = ((l1 + l2 + l3) % 2 == 0) ? 1.0 : -1.0;
        const double scale = std::max(std::abs(base), 1e-300);
        CHECK(std::abs(cyc - base) <= 2e-15 * scale);
        CHECK(std::abs(swapped - sign * base) <= 2e-15 * scale);
        CHECK(std::abs(reflected - sign * base) <= 2e-15 * scale);
        ++tested;
    }
}

TEST_CASE("floating path agrees with the exact path within the cancellation budget",
          "[wigner]") {
    std::mt19937 rng(60601u);
    std::uniform_int_distribution<int> LD(0, 40);
    int tested = 0;
    while (tested < 300) {
        const int l1 = LD(rng), l2 = LD(rng);
        std::uniform_int_distribution<int> L3(std::abs(l1 - l2), l1 + l2);
        const int l3 = L3(rng);
        if (l3 > 40) continue;
        std::uniform_int_distribution<int> M1(-l1, l1), M2(-l2, l2);
        const int m1 = M1(rng), m2 = M2(rng), m3 = -m1 - m2;
        if (std::abs(m3) > l3) continue;
        const double exact = sf::wigner_3j(l1, l2, l3, m1, m2, m3);
        if (exact == 0.0) continue;  // exact zeros are pure noise on the float path
        const auto fs = sf::detail::wigner3j_float(l1, l2, l3, m1, m2, m3);
        // The alternating-sum cancellation factor bounds the achievable
        // floating accuracy; within that budget the two paths must agree.
        const double tol = std::max(1e-12, 1e-13 * fs.cancellation);
        CHECK(std::abs(fs.value - exact) <= tol * std::abs(exact));
        ++tested;
    }
}

TEST_CASE("product-kernel weights: anchors and zero pattern", "[wigner]") {
    const double inv_s4pi = 1.0 / std::sqrt(4.0 * kPi);
    CHECK(sf::gaunt_w(1, 1, 0, 0, 0, 0) ==
          Catch::Approx((1.0 / 3.0) * inv_s4pi).epsilon(1e-15));
    CHECK(sf::gaunt_w(1, 1, 2, 0, 0, 0) ==
          Catch::Approx((2.0 / 15.0) * inv_s4pi).epsilon(1e-15));
    CHECK(sf::gaunt_w(1, 1, 1, 0, 0, 0) == 0.0);  // odd-parity zero
    // Spot decimals.
    CHECK(sf::gaunt_w(1, 1, 0, 0, 0, 0) == Catch::Approx(0.0940316).margin(1e-7));
    CHECK(sf::gaunt_w(1, 1, 2, 0, 0, 0) == Catch::Approx(0.0376126).margin(1e-7));
    // Order bookkeeping: W is (-1)^m/sqrt(4 pi) * 3j(m1,m2,-m) * 3j(0,0,0).
    const double w = sf::gaunt_w(3, 2, 3, 1, 1, 2);
    const double ref = (1.0) * inv_s4pi * sf::wigner_3j(3, 2, 3, 1, 1, -2) *
                       sf::wigner_3j(3, 2, 3, 0, 0, 0);
    CHECK(w == Catch::Approx(ref).epsilon(1e-14));
}

#pragma once
// Gauss-Legendre rules on [-1, 1].
//
// Nodes are Newton-refined in long double and rounded to double at the end.
// This matters: analysis coefficients multiply P_l'(z) ~ l^2 into any node
// error, so rules computed directly in double precision lose ~two digits at
// L = 64 and would spoil the machine-precision round-trip tests.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "backus/special.hpp"

namespace backus::quad {

struct GaussLegendre {
    std::vector<double> z, w;  // ascending nodes, matching weights
    int size() const { return static_cast<int>(z.size()); }
};

inline GaussLegendre gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: need n >= 1");
    GaussLegendre rule;
    rule.z.assign(static_cast<std::size_t>(n), 0.0);
    rule.w.assign(static_cast<std::size_t>(n), 0.0);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // i-th root counted from the z = +1 end; standard asymptotic guess.
        long double x = std::cos(sf::pi_l * (i + 0.75L) / (n + 0.5L));
        long double pn = 0.0L, dp = 1.0L;
        for (int iter = 0; iter < 60; ++iter) {
            long double p1 = 1.0L, p2 = 0.0L;
            for (int j = 0; j < n; ++j) {
                const long double p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) * x * p2 - j * p3) / static_cast<long double>(j + 1);
            }
            pn = p1;
            dp = n * (x * p1 - p2) / (x * x - 1.0L);
            const long double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) <= 1e-19L * std::max(1.0L, std::abs(x))) break;
        }
        {  // refresh P_n' at the converged node for the weight
            long double p1 = 1.0L, p2 = 0.0L;
            for (int j = 0; j < n; ++j) {
                const long double p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) * x * p2 - j * p3) / static_cast<long double>(j + 1);
            }
            dp = n * (x * p1 - p2) / (x * x - 1.0L);
        }
        const double wt = static_cast<double>(2.0L / ((1.0L - x * x) * dp * dp));
        rule.z[static_cast<std::size_t>(i)] = static_cast<double>(-x);
        rule.w[static_cast<std::size_t>(i)] = wt;
        rule.z[static_cast<std::size_t>(n - 1 - i)] = static_cast<double>(x);
        rule.w[static_cast<std::size_t>(n - 1 - i)] = wt;
    }
    if (n % 2 == 1) rule.z[static_cast<std::size_t>(n / 2)] = 0.0;
    return rule;
}

}  // namespace backus::quad

#pragma once
// Pointwise evaluation of the exterior harmonic extension
//   u(r, theta) = sum_l u_l r^{-l-1} alpha_l P_l(sin theta),   r >= 1,
// its gradient in spherical components, and finite-difference checks that an
// evaluated field is harmonic and decays.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "backus/coeffs.hpp"
#include "backus/special.hpp"

namespace backus::field {

struct FieldPoint {
    double r = 1.0;
    double theta = 0.0;  // latitude in [-pi/2, pi/2]
};

inline void check_point(const FieldPoint& p) {
    if (!(p.r >= 1.0)) throw std::domain_error("field evaluation requires r >= 1");
}

inline double eval_potential(const AxisymCoeffs& u, const FieldPoint& p) {
    check_point(p);
    const int L = u.degree();
    const auto P = sf::assoc_legendre_seq(0, L, std::sin(p.theta));
    long double acc = 0.0L;
    long double rpow = 1.0L / static_cast<long double>(p.r);  // r^{-l-1} at l=0
    const long double rinv = 1.0L / static_cast<long double>(p.r);
    for (int l = 0; l <= L; ++l) {
        acc += static_cast<long double>(u[l]) * rpow * sf::alpha_norm(l, 0) *
               P[static_cast<std::size_t>(l)];
        rpow *= rinv;
    }
    return static_cast<double>(acc);
}

// Gradient in spherical components at latitude theta:
//   grad u = u_r e_r + (1/r) u_theta e_theta,
// reported as (u_r, u_theta / r) so that intensity() = |grad u|.
struct Gradient {
    double u_r = 0.0;
    double u_theta_over_r = 0.0;
    double intensity() const { return std::hypot(u_r, u_theta_over_r); }
};

inline Gradient eval_gradient(const AxisymCoeffs& u, const FieldPoint& p) {
    check_point(p);
    const int L = u.degree();
    const auto pd = sf::assoc_legendre_with_dtheta(0, L, p.theta);
    long double ar = 0.0L, at = 0.0L;
    const long double rinv = 1.0L / static_cast<long double>(p.r);
    long double rpow = rinv * rinv;  // r^{-l-2} at l=0
    for (int l = 0; l <= L; ++l) {
        const long double alpha = sf::alpha_norm(l, 0);
        ar += -static_cast<long double>(l + 1) * u[l] * rpow * alpha *
              pd.P[static_cast<std::size_t>(l)];
        at += static_cast<long double>(u[l]) * rpow * alpha * pd.D[static_cast<std::size_t>(l)];
        rpow *= rinv;
    }
    return {static_cast<double>(ar), static_cast<double>(at)};
}

// Decay constant C = sum_l |u_l| alpha_l, giving |u(r, .)| <= C / r for
// r >= 1 since |P_l(sin theta)| <= 1 and r^{-l-1} <= r^{-1}.
inline double decay_bound_constant(const AxisymCoeffs& u) {
    long double acc = 0.0L;
    for (int l = 0; l <= u.degree(); ++l)
        acc += std::abs(static_cast<long double>(u[l]) * sf::alpha_norm(l, 0));
    return static_cast<double>(acc);
}

// Max |Laplacian| of a scalar field given as f(r, theta), estimated by
// second-order central differences on a grid of probe points.  In latitude
// coordinates (theta measured from the equator),
//   Lap u = u_rr + (2/r) u_r + (1/r^2) (u_tt - tan(theta) u_t).
// Probe points must keep r - h_r above 1 (the field's domain boundary).
inline double harmonicity_check(const std::function<double(double, double)>& u,
                                const std::vector<double>& rs,
                                const std::vector<double>& thetas) {
    double worst = 0.0;
    for (double r : rs) {
        const double hr = 1e-5 * r;
        if (r - hr <= 1.0)
            throw std::domain_error("harmonicity_check: probe radius too close to the unit sphere");
        for (double th : thetas) {
            const double ht = 1e-5;
            const double u0 = u(r, th);
            const double urp = u(r + hr, th), urm = u(r - hr, th);
            const double utp = u(r, th + ht), utm = u(r, th - ht);
            const double u_rr = (urp - 2.0 * u0 + urm) / (hr * hr);
            const double u_r = (urp - urm) / (2.0 * hr);
            const double u_tt = (utp - 2.0 * u0 + utm) / (ht * ht);
            const double u_t = (utp - utm) / (2.0 * ht);
            const double lap = u_rr + 2.0 / r * u_r + (u_tt - std::tan(th) * u_t) / (r * r);
            worst = std::max(worst, std::abs(lap));
        }
    }
    return worst;
}

inline double harmonicity_check(const AxisymCoeffs& c, const std::vector<double>& rs,
                                const std::vector<double>& thetas) {
    return harmonicity_check(
        [&c](double r, double th) { return eval_potential(c, {r, th}); }, rs, thetas);
}

}  // namespace backus::field

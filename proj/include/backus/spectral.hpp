#pragma once
// Analysis/synthesis between surface samples and coefficients, and spectral
// products.
//
// Products use the spherical-harmonic coupling rule
//   (uv)_l^m = sum_{i,j} sqrt((2i+1)(2j+1)(2l+1)) W^{i,j,l}_{m1,m2,m} u_i v_j,
// and the surface-gradient product of exterior harmonic extensions
// (u = sum u_l r^{-l-1} Y_l) splits as grad u . grad v = u_r v_r + u_t v_t
// with the theta part given in closed form by
//   c_l = sum_{i,j} (i(i+1)+j(j+1)-l(l+1))/2
//         * sqrt((2i+1)(2j+1)(2l+1)) W^{i,j,l}_{0,0,0} u_i v_j.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "backus/coeffs.hpp"
#include "backus/parallel.hpp"
#include "backus/quadrature.hpp"
#include "backus/special.hpp"
#include "backus/wigner.hpp"

namespace backus::spectral {

// Gauss-Legendre surface grid in z = sin(theta): integrals over the sphere of
// axisymmetric integrands reduce to 2 pi * sum_i w_i f(z_i).
struct SurfaceGrid {
    std::vector<double> z, w, theta;

    int size() const { return static_cast<int>(z.size()); }

    static SurfaceGrid gauss(int n) {
        auto rule = quad::gauss_legendre(n);
        SurfaceGrid g;
        g.z = std::move(rule.z);
        g.w = std::move(rule.w);
        g.theta.resize(g.z.size());
        for (std::size_t i = 0; i < g.z.size(); ++i) g.theta[i] = std::asin(g.z[i]);
        return g;
    }
};

// c[l] = 2 pi alpha_l^0 sum_i w_i psi(z_i) P_l(z_i); exact for band-limited
// integrands resolved by the rule (N nodes integrate degree <= 2N-1).
inline AxisymCoeffs analyze_axisym(const std::vector<double>& samples, const SurfaceGrid& grid,
                                   int L) {
    const int N = grid.size();
    if (static_cast<int>(samples.size()) != N)
        throw input_error("analyze_axisym: sample/grid size mismatch");
    if (N < L + 1) throw input_error("analyze_axisym: need at least L+1 nodes");
    // P table: node-major, P[i] = {P_0..P_L at z_i}
    std::vector<std::vector<double>> P(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i)
        P[static_cast<std::size_t>(i)] =
            sf::assoc_legendre_seq(0, L, grid.z[static_cast<std::size_t>(i)]);
    AxisymCoeffs out(L);
    parallel_for(L + 1, [&](int l) {
        long double acc = 0.0L;
        for (int i = 0; i < N; ++i)
            acc += static_cast<long double>(grid.w[static_cast<std::size_t>(i)]) *
                   samples[static_cast<std::size_t>(i)] *
                   P[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)];
        out[l] = static_cast<double>(2.0L * sf::pi_l * sf::alpha_norm(l, 0) * acc);
    });
    return out;
}

inline double synth_axisym(const AxisymCoeffs& u, double theta) {
    const int L = u.degree();
    const auto P = sf::assoc_legendre_seq(0, L, std::sin(theta));
    long double acc = 0.0L;
    for (int l = 0; l <= L; ++l)
        acc += static_cast<long double>(u[l]) * sf::alpha_norm(l, 0) *
               P[static_cast<std::size_t>(l)];
    return static_cast<double>(acc);
}

inline std::vector<double> synth_axisym(const AxisymCoeffs& u, const std::vector<double>& thetas) {
    std::vector<double> out(thetas.size());
    parallel_for(static_cast<int>(thetas.size()), [&](int i) {
        out[static_cast<std::size_t>(i)] = synth_axisym(u, thetas[static_cast<std::size_t>(i)]);
    });
    return out;
}

// Precomputed axisymmetric coupling kernel
//   K(i,j,l) = sqrt((2i+1)(2j+1)(2l+1)/(4 pi)) * 3j(i,j,l;0,0,0)^2,
// nonzero only for |i-j| <= l <= i+j with i+j+l even.
struct ProductTables {
    int Lin = -1, Lout = -1;
    std::vector<double> k000;

    ProductTables() = default;
    ProductTables(int Lin_, int Lout_) : Lin(Lin_), Lout(Lout_) {
        if (Lin_ < 0 || Lout_ < 0) throw input_error("ProductTables: negative degree");
        k000.assign(static_cast<std::size_t>(Lin + 1) * (Lin + 1) * (Lout + 1), 0.0);
        const double inv_sqrt4pi = 1.0 / std::sqrt(4.0 * static_cast<double>(sf::pi_l));
        parallel_for(Lin + 1, [&](int i) {
            for (int j = 0; j <= Lin; ++j) {
                const int lo = std::abs(i - j);
                const int hi = std::min(i + j, Lout);
                for (int l = lo; l <= hi; ++l) {
                    if ((i + j + l) & 1) continue;
                    const double w = sf::wigner_3j_000(i, j, l);
                    k000[index(i, j, l)] =
                        std::sqrt(static_cast<double>(2 * i + 1) * (2 * j + 1) * (2 * l + 1)) *
                        inv_sqrt4pi * w * w;
                }
            }
        });
    }

    std::size_t index(int i, int j, int l) const {
        return (static_cast<std::size_t>(i) * (Lin + 1) + j) * (Lout + 1) + l;
    }
    double K(int i, int j, int l) const {
        if (i > Lin || j > Lin || l > Lout || l < 0) return 0.0;
        return k000[index(i, j, l)];
    }
};

namespace detail {

// Shared double-sum driver: weight(i, j, l) multiplies K(i,j,l) u_i v_j.
template <typename WeightFn>
AxisymCoeffs coupled_sum(const AxisymCoeffs& u, const AxisymCoeffs& v, const ProductTables& t,
                         int Lout, WeightFn&& weight) {
    if (u.degree() > t.Lin || v.degree() > t.Lin || Lout > t.Lout)
        throw input_error("spectral product: tables too small for operands");
    AxisymCoeffs out(Lout);
    parallel_for(Lout + 1, [&](int l) {
        long double acc = 0.0L;
        for (int i = 0; i <= u.degree(); ++i) {
            if (u[i] == 0.0) continue;
            // Triangle + parity: j >= |i-l|, i+j+l even; |i-l| always has the
            // right parity, so stride 2 enumerates exactly the valid terms.
            for (int j = std::abs(i - l); j <= v.degree(); j += 2) {
                const double k = t.K(i, j, l);
                if (k == 0.0) continue;
                acc += static_cast<long double>(weight(i, j, l)) * k * u[i] * v[j];
            }
        }
        out[l] = static_cast<double>(acc);
    });
    return out;
}

}  // namespace detail

inline AxisymCoeffs spectral_product_axisym(const AxisymCoeffs& u, const AxisymCoeffs& v,
                                            const ProductTables& t, int Lout) {
    return detail::coupled_sum(u, v, t, Lout, [](int, int, int) { return 1.0; });
}

// Product of band-limited functions is band-limited of degree L_u + L_v; the
// default keeps it exactly.
inline AxisymCoeffs spectral_product_axisym(const AxisymCoeffs& u, const AxisymCoeffs& v) {
    const int Lout = u.degree() + v.degree();
    ProductTables t(std::max(u.degree(), v.degree()), Lout);
    return spectral_product_axisym(u, v, t, Lout);
}

// Trace of the radial derivative at r = 1: coefficients scale by -(l+1).
inline AxisymCoeffs radial_deriv_coeffs(const AxisymCoeffs& u) {
    AxisymCoeffs out(u.degree());
    for (int l = 0; l <= u.degree(); ++l) out[l] = -static_cast<double>(l + 1) * u[l];
    return out;
}

inline AxisymCoeffs theta_grad_product_coeffs(const AxisymCoeffs& u, const AxisymCoeffs& v,
                                              const ProductTables& t, int Lout) {
    return detail::coupled_sum(u, v, t, Lout, [](int i, int j, int l) {
        return 0.5 * (static_cast<double>(i) * (i + 1) + static_cast<double>(j) * (j + 1) -
                      static_cast<double>(l) * (l + 1));
    });
}

inline AxisymCoeffs theta_grad_product_coeffs(const AxisymCoeffs& u, const AxisymCoeffs& v) {
    const int Lout = u.degree() + v.degree();
    ProductTables t(std::max(u.degree(), v.degree()), Lout);
    return theta_grad_product_coeffs(u, v, t, Lout);
}

// Coefficients of grad u . grad v restricted to the unit sphere, u and v
// being traces of exterior harmonic extensions.
inline AxisymCoeffs grad_square_axisym(const AxisymCoeffs& u, const AxisymCoeffs& v,
                                       const ProductTables& t, int Lout) {
    const AxisymCoeffs radial =
        spectral_product_axisym(radial_deriv_coeffs(u), radial_deriv_coeffs(v), t, Lout);
    const AxisymCoeffs angular = theta_grad_product_coeffs(u, v, t, Lout);
    return radial + angular;
}

inline AxisymCoeffs grad_square_axisym(const AxisymCoeffs& u, const AxisymCoeffs& v) {
    const int Lout = u.degree() + v.degree();
    ProductTables t(std::max(u.degree(), v.degree()), Lout);
    return grad_square_axisym(u, v, t, Lout);
}

// General-m product via the full coupling coefficients (exact 3j path; meant
// for moderate degrees).  Only m = m1 + m2 couples.
inline SphCoeffs spectral_product_general(const SphCoeffs& u, const SphCoeffs& v) {
    const int Lout = std::max(0, u.degree()) + std::max(0, v.degree());
    SphCoeffs out(Lout);
    const double inv_sqrt4pi = 1.0 / std::sqrt(4.0 * static_cast<double>(sf::pi_l));
    for (int l1 = 0; l1 <= u.degree(); ++l1)
        for (int m1 = -l1; m1 <= l1; ++m1) {
            const std::complex<double> uc = u.at(l1, m1);
            if (uc == std::complex<double>(0.0, 0.0)) continue;
            for (int l2 = 0; l2 <= v.degree(); ++l2) {
                const double scale12 = std::sqrt(static_cast<double>(2 * l1 + 1) * (2 * l2 + 1));
                for (int m2 = -l2; m2 <= l2; ++m2) {
                    const std::complex<double> vc = v.at(l2, m2);
                    if (vc == std::complex<double>(0.0, 0.0)) continue;
                    const int m = m1 + m2;
                    for (int l = std::max(std::abs(l1 - l2), std::abs(m)); l <= l1 + l2; ++l) {
                        const double w0 = sf::wigner_3j(l1, l2, l, 0, 0, 0);
                        if (w0 == 0.0) continue;
                        const double w = sf::wigner_3j(l1, l2, l, m1, m2, -m);
                        if (w == 0.0) continue;
                        const double sign = (m & 1) ? -1.0 : 1.0;
                        const double coupling = sign * inv_sqrt4pi * w * w0 * scale12 *
                                                std::sqrt(static_cast<double>(2 * l + 1));
                        out.ref(l, m) += coupling * uc * vc;
                    }
                }
            }
        }
    return out;
}

}  // namespace backus::spectral

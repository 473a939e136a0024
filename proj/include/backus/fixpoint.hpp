#pragma once
// Fixed-point reconstruction of the exterior potential from surface
// intensity data.  Writing u = d + v with d the dipole trace (sin theta at
// r = 1), the intensity condition |grad u| = g on the unit sphere becomes
//
//   f + T[f] = g^2 - |grad d|^2,      T[f] = P_L |grad v_f|^2,
//
// where v_f solves the linearized oblique-derivative problem with forcing f
// and equator value h0, and P_L truncates to degree L.  The map
//   Psi[f] = g^2 - |grad d|^2 - T[f]
// is a contraction near the dipole (small data g^2 - |grad d|^2 and small
// h0), and its fixed point f* yields u = d + v_{f*}.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "backus/coeffs.hpp"
#include "backus/field.hpp"
#include "backus/oblique.hpp"
#include "backus/parallel.hpp"
#include "backus/spectral.hpp"

namespace backus {

struct BackusConfig {
    double s = 1.5;        // Sobolev index of the iteration norm (> 1)
    int L = 64;            // truncation degree
    double tol = 1e-12;    // H^s distance between successive iterates
    int max_iter = 200;    // Psi applications before giving up
    double h0 = 0.0;       // prescribed equator value of the correction v
};

struct BackusResult {
    AxisymCoeffs f_star;      // fixed point of Psi
    AxisymCoeffs v_star;      // correction potential coefficients
    AxisymCoeffs u_surface;   // dipole + correction, surface coefficients
    int iterations = 0;       // number of Psi applications performed
    std::vector<double> trace;       // H^s distances between successive iterates
    std::vector<double> tail_norms;  // discarded |grad v|^2 tail per iteration
    double delta = 0.0;              // size of the data: ||g - |grad d||_{H^s} + |h0|
    double residual_intensity_sup = 0.0;  // sup | |grad u| - g | on the check grid
    bool converged = false;
};

struct positivity_error : input_error {
    using input_error::input_error;
};

struct nonconvergence_error : std::runtime_error {
    BackusResult partial;
    nonconvergence_error(const std::string& what_, BackusResult partial_)
        : std::runtime_error(what_), partial(std::move(partial_)) {}
};

// Surface coefficients of the dipole trace sin(theta).
inline AxisymCoeffs dipole_trace(int L) {
    if (L < 1) throw input_error("dipole_trace: degree must be at least 1");
    AxisymCoeffs c(L);
    c[1] = std::sqrt(4.0 * static_cast<double>(sf::pi_l) / 3.0);
    return c;
}

// Surface coefficients of |grad d|^2 = 1 + 3 sin^2(theta).
inline AxisymCoeffs grad_dipole_sq_coeffs(int L) {
    if (L < 2) throw input_error("grad_dipole_sq_coeffs: degree must be at least 2");
    AxisymCoeffs c(L);
    c[0] = 2.0 * std::sqrt(4.0 * static_cast<double>(sf::pi_l));
    c[2] = 2.0 * std::sqrt(4.0 * static_cast<double>(sf::pi_l) / 5.0);
    return c;
}

// |grad u| at r = 1 sampled at the given latitudes, u given by surface
// coefficients of its exterior harmonic extension.
inline std::vector<double> intensity_on_surface(const AxisymCoeffs& u,
                                                const std::vector<double>& thetas) {
    std::vector<double> out(thetas.size());
    parallel_for(static_cast<int>(thetas.size()), [&](int i) {
        out[static_cast<std::size_t>(i)] =
            field::eval_gradient(u, {1.0, thetas[static_cast<std::size_t>(i)]}).intensity();
    });
    return out;
}

struct TApplication {
    AxisymCoeffs T;        // P_L |grad v_f|^2
    AxisymCoeffs v;        // the correction potential for this f
    double tail_norm = 0.0;  // l2 norm of the discarded degrees (L+1 .. 2L)
};

// T[f] = P_L |grad v_f|^2 with v_f the oblique-problem solution for (f, h0).
// Tables must cover Lin >= L and Lout >= 2L.
inline TApplication apply_T(const AxisymCoeffs& f, double h0, int L,
                            const spectral::ProductTables& tables) {
    const auto sol = oblique::solve_oblique_axisym(f, h0, L);
    const AxisymCoeffs full = spectral::grad_square_axisym(sol.v, sol.v, tables, 2 * L);
    TApplication out;
    out.v = sol.v;
    out.T = truncated(full, L);
    long double sq = 0.0L;
    for (int l = L + 1; l <= full.degree(); ++l)
        sq += static_cast<long double>(full[l]) * full[l];
    out.tail_norm = static_cast<double>(std::sqrt(sq));
    return out;
}

inline TApplication apply_T(const AxisymCoeffs& f, double h0, int L) {
    spectral::ProductTables tables(L, 2 * L);
    return apply_T(f, h0, L, tables);
}

// One step of the fixed-point map: Psi[f] = P_L (g^2 - |grad d|^2) - T[f].
// g_sq holds the coefficients of the squared intensity data.
inline AxisymCoeffs psi_step(const AxisymCoeffs& f, const AxisymCoeffs& g_sq, double h0, int L,
                             const spectral::ProductTables& tables) {
    const AxisymCoeffs rhs = truncated(g_sq, L) - truncated(grad_dipole_sq_coeffs(L), L);
    return rhs - apply_T(f, h0, L, tables).T;
}

inline AxisymCoeffs psi_step(const AxisymCoeffs& f, const AxisymCoeffs& g_sq, double h0, int L) {
    spectral::ProductTables tables(L, 2 * L);
    return psi_step(f, g_sq, h0, L, tables);
}

// Full solve from intensity samples g on a Gauss surface grid.  Requires
// enough nodes to analyze g^2 exactly through degree 2L + 2 and strictly
// positive data.  Throws nonconvergence_error (carrying the partial result)
// if max_iter steps do not reach tol.
inline BackusResult solve_backus(const std::vector<double>& g, const spectral::SurfaceGrid& grid,
                                 const BackusConfig& cfg) {
    const int N = grid.size();
    if (static_cast<int>(g.size()) != N)
        throw input_error("solve_backus: sample/grid size mismatch");
    if (cfg.L < 2) throw input_error("solve_backus: degree must be at least 2");
    if (!(cfg.s > 1.0)) throw input_error("solve_backus: Sobolev index must exceed 1");
    if (cfg.max_iter < 1) throw input_error("solve_backus: max_iter must be positive");
    if (N < 2 * cfg.L + 3) throw input_error("solve_backus: need at least 2L+3 nodes");
    for (double gi : g) {
        if (!std::isfinite(gi)) throw input_error("solve_backus: non-finite intensity sample");
        if (!(gi > 0.0)) throw positivity_error("solve_backus: intensity data must be positive");
    }
    const int L = cfg.L;

    // Squared data and data-size measure delta.
    std::vector<double> g2(static_cast<std::size_t>(N)), dg(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) {
        const double gi = g[static_cast<std::size_t>(i)];
        const double z = grid.z[static_cast<std::size_t>(i)];
        g2[static_cast<std::size_t>(i)] = gi * gi;
        dg[static_cast<std::size_t>(i)] = gi - std::sqrt(1.0 + 3.0 * z * z);
    }
    const AxisymCoeffs g_sq = spectral::analyze_axisym(g2, grid, 2 * L + 2);

    BackusResult res;
    res.delta = hs_norm(spectral::analyze_axisym(dg, grid, L), cfg.s) + std::abs(cfg.h0);

    const spectral::ProductTables tables(L, 2 * L);
    const AxisymCoeffs rhs = truncated(g_sq, L) - grad_dipole_sq_coeffs(L);

    AxisymCoeffs f(L);
    for (int it = 1; it <= cfg.max_iter; ++it) {
        const TApplication t = apply_T(f, cfg.h0, L, tables);
        const AxisymCoeffs next = rhs - t.T;
        const double dist = hs_dist(next, f, cfg.s);
        res.trace.push_back(dist);
        res.tail_norms.push_back(t.tail_norm);
        res.iterations = it;
        f = next;
        if (!f.finite()) {
            res.f_star = f;
            throw nonconvergence_error("solve_backus: iteration diverged (non-finite iterate)",
                                       res);
        }
        if (dist <= cfg.tol) {
            res.converged = true;
            break;
        }
    }

    res.f_star = f;
    const auto sol = oblique::solve_oblique_axisym(f, cfg.h0, L);
    res.v_star = sol.v;
    res.u_surface = dipole_trace(L) + res.v_star;

    const std::vector<double> gu = intensity_on_surface(res.u_surface, grid.theta);
    double sup = 0.0;
    for (int i = 0; i < N; ++i)
        sup = std::max(sup,
                       std::abs(gu[static_cast<std::size_t>(i)] - g[static_cast<std::size_t>(i)]));
    res.residual_intensity_sup = sup;

    if (!res.converged)
        throw nonconvergence_error("solve_backus: no convergence within max_iter", res);
    return res;
}

// Coefficient-data variant: synthesizes g on an internal Gauss grid first.
inline BackusResult solve_backus(const AxisymCoeffs& g_coeffs, const BackusConfig& cfg) {
    const int N = std::max(4 * cfg.L + 3, 2 * g_coeffs.degree() + 3);
    const auto grid = spectral::SurfaceGrid::gauss(N);
    const std::vector<double> g = spectral::synth_axisym(g_coeffs, grid.theta);
    return solve_backus(g, grid, cfg);
}

}  // namespace backus

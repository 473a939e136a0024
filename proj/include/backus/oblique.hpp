#pragma once
// Series solution of the linearized oblique-derivative boundary problem for
// an exterior harmonic function v (v -> 0 at infinity):
//
//   -2 sin(theta) v_r + cos(theta) v_theta = f / 2   on the unit sphere,
//
// closed by prescribing the equatorial trace mean (axisymmetric case: the
// value h0 of v at theta = 0; general case: the Fourier coefficients of
// v restricted to the equator).
//
// In each azimuthal mode m the boundary condition couples degrees l-1 and
// l+1 through a three-term recurrence; its solution splits into a particular
// part b (driven by f) plus a homogeneous part c = Gamma_k * a_tilde fixed by
// the equator data.

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "backus/coeffs.hpp"
#include "backus/parallel.hpp"
#include "backus/special.hpp"
#include "backus/spectral.hpp"

namespace backus::oblique {

struct closure_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Recurrence weight beta_l^m = sqrt((l-|m|)(l+|m|) / ((2l-1)(2l+1))).
inline double beta_lm(int l, int m) {
    const int am = std::abs(m);
    if (l < am || l < 1) return 0.0;
    return std::sqrt(static_cast<double>(l - am) * (l + am) /
                     (static_cast<double>(2 * l - 1) * (2 * l + 1)));
}

// Homogeneous-solution ratio gamma_l^m linking degree l+1 to l-1 within a
// mode; vanishes at the mode floor l = |m|.
inline double gamma_lm(int l, int m) {
    const int am = std::abs(m);
    if (l < am || l < 1) return 0.0;
    if (l == am) return 0.0;
    const double num = static_cast<double>(2 * l + 3) * (l - am) * (l + am);
    const double den = static_cast<double>(2 * l - 1) * (l + 1 - am) * (l + 1 + am);
    return -(static_cast<double>(l + 1) / (3.0 * (l + 2))) * std::sqrt(num / den);
}

// Maximum number of closure terms before giving up on convergence.
inline constexpr int closure_max_terms = 200;

// Per-mode tables: beta[l], gamma[l] for l <= Lmax, and the cumulative
// products Gamma[k] = prod_{j=1..k} gamma_{|m| + 2j - 1} (Gamma[0] = 1).
struct ModeTables {
    int m = 0;
    int L = -1;
    int Lmax = -1;
    std::vector<double> beta;   // indexed by l, 0..Lmax
    std::vector<double> gamma;  // indexed by l, 0..Lmax
    std::vector<double> Gamma;  // indexed by k, 0..closure_max_terms
};

inline ModeTables mode_tables(int m, int L) {
    const int am = std::abs(m);
    ModeTables t;
    t.m = m;
    t.L = L;
    t.Lmax = std::max(L + 2, am + 2 * closure_max_terms + 2);
    t.beta.resize(static_cast<std::size_t>(t.Lmax) + 1);
    t.gamma.resize(static_cast<std::size_t>(t.Lmax) + 1);
    for (int l = 0; l <= t.Lmax; ++l) {
        t.beta[static_cast<std::size_t>(l)] = beta_lm(l, m);
        t.gamma[static_cast<std::size_t>(l)] = gamma_lm(l, m);
    }
    t.Gamma.resize(closure_max_terms + 1);
    t.Gamma[0] = 1.0;
    for (int k = 1; k <= closure_max_terms; ++k) {
        const int l = am + 2 * k - 1;
        t.Gamma[static_cast<std::size_t>(k)] =
            t.Gamma[static_cast<std::size_t>(k - 1)] * t.gamma[static_cast<std::size_t>(l)];
    }
    return t;
}

struct ClosureSum {
    double value = 0.0;
    int terms = 0;
};

// k-th term of the equator closure series for the mode of t:
//   Gamma_k^m * alpha_{|m|+2k}^m * P_{|m|+2k}^{|m|}(0).
inline double closure_term(const ModeTables& t, int k) {
    const int am = std::abs(t.m);
    const int l = am + 2 * k;
    return static_cast<double>(static_cast<long double>(t.Gamma[static_cast<std::size_t>(k)]) *
                               sf::alpha_norm(l, am) * sf::legendre_at_zero(l, am));
}

// Denominator of the equator closure for mode m:
//   D^m = sum_k Gamma_k^m * alpha_{|m|+2k}^m * P_{|m|+2k}^{|m|}(0).
// Terms decay geometrically; adaptive summation stops once two consecutive
// terms fall below 1e-16 of the partial sum, and fails if the overall term
// cap is reached first.  A nonnegative max_terms instead sums exactly that
// many leading terms (or fewer if the stop triggers earlier).
inline ClosureSum closure_denominator(const ModeTables& t, int max_terms = -1) {
    const bool capped = max_terms >= 0;
    const int limit = capped ? std::min(max_terms, closure_max_terms + 1) : closure_max_terms + 1;
    long double sum = 0.0L;
    int tiny_run = 0;
    for (int k = 0; k < limit; ++k) {
        const long double term = closure_term(t, k);
        sum += term;
        const long double scale = std::abs(sum) > 0.0L ? std::abs(sum) : 1.0L;
        if (std::abs(term) < 1e-16L * scale) {
            if (++tiny_run >= 2 && k >= 2) return {static_cast<double>(sum), k + 1};
        } else {
            tiny_run = 0;
        }
    }
    if (!capped) throw closure_error("closure series did not converge within term cap");
    return {static_cast<double>(sum), limit};
}

// Result of the axisymmetric solve.  v holds the surface coefficients; a and
// b expose the intermediate recurrence data, and tail_norm records the first
// discarded coefficient magnitude (degree L+1) as a truncation indicator.
struct ObliqueSolutionAx {
    AxisymCoeffs v;
    std::vector<double> a;  // a_l = f_l / (6 (l+2) beta_{l+1}), l = 1..L
    std::vector<double> b;  // particular part, b_l for l = 0..L+1
    double a_tilde = 0.0;
    double denom = 0.0;
    int closure_terms = 0;
    double tail_norm = 0.0;
};

namespace detail {

// Core per-mode recurrence over complex data; the axisymmetric solver uses it
// with imaginary parts zero.  Degrees run on the sub-lattice l = |m| + 2k.
// Returns b for l in [0, L+1] (zero off-lattice), with bext = b_{L+1} or
// b_{L+2} continuation used for the tail indicator.
struct ModeSolve {
    std::vector<std::complex<double>> a;  // indexed by l (0..L)
    std::vector<std::complex<double>> b;  // indexed by l (0..L+2)
    std::complex<double> a_tilde{0.0, 0.0};
    double denom = 0.0;
    int closure_terms = 0;
};

inline ModeSolve solve_mode(const ModeTables& t, int L,
                            const std::vector<std::complex<double>>& f_mode,  // f_l, l=0..Lf
                            std::complex<double> h_m) {
    const int am = std::abs(t.m);
    ModeSolve out;
    out.a.assign(static_cast<std::size_t>(L) + 1, {0.0, 0.0});
    out.b.assign(static_cast<std::size_t>(L) + 3, {0.0, 0.0});
    const int Lf = static_cast<int>(f_mode.size()) - 1;

    // Forcing-to-recurrence map: a_l = f_l / (6 (l+2) beta_{l+1}).  beta_{l+1}
    // vanishes only when l+1 < max(|m|,1); those degrees carry no forcing in
    // mode m, and f_l is required to vanish there.
    for (int l = 0; l <= L; ++l) {
        const std::complex<double> fl = (l <= Lf) ? f_mode[static_cast<std::size_t>(l)]
                                                  : std::complex<double>(0.0, 0.0);
        if (fl == std::complex<double>(0.0, 0.0)) continue;
        const double bl1 = t.beta[static_cast<std::size_t>(l + 1)];
        if (bl1 == 0.0)
            throw input_error("oblique solve: forcing at a degree the mode cannot carry");
        out.a[static_cast<std::size_t>(l)] = fl / (6.0 * (l + 2) * bl1);
    }

    // Particular solution: b_{l+1} = gamma_l b_{l-1} + a_l, with b = 0 at and
    // below the mode floor |m| (the floor coefficient is the homogeneous
    // degree of freedom, carried separately by a_tilde).
    for (int l = am; l <= L + 1; ++l) {
        const std::complex<double> prev =
            (l >= 1) ? out.b[static_cast<std::size_t>(l - 1)] : std::complex<double>(0.0, 0.0);
        const std::complex<double> al = (l <= L) ? out.a[static_cast<std::size_t>(l)]
                                                 : std::complex<double>(0.0, 0.0);
        out.b[static_cast<std::size_t>(l + 1)] =
            t.gamma[static_cast<std::size_t>(l)] * prev + al;
    }

    // Equator closure: match the mode-m equatorial trace.
    //   sum_k (b + Gamma_k a_tilde) alpha P(0) = h_m.
    const ClosureSum D = closure_denominator(t);
    out.denom = D.value;
    out.closure_terms = D.terms;

    // Numerator sum over the b-part.  Terms up to L+1 are included
    // unconditionally (they are data, not a convergent tail); beyond L+1 the
    // recurrence is continued homogeneously (a_l = 0) with a convergence stop.
    std::complex<long double> bsum{0.0L, 0.0L};
    std::complex<double> bprev2{0.0, 0.0};  // b_{l-2} on lattice (for continuation)
    std::complex<double> bcur{0.0, 0.0};
    int k = 0;
    int tiny_run = 0;
    bool converged = false;
    for (; k <= closure_max_terms; ++k) {
        const int l = am + 2 * k;
        std::complex<double> bl;
        if (l <= L + 1) {
            bl = out.b[static_cast<std::size_t>(l)];
        } else {
            // homogeneous continuation: b_{l} = gamma_{l-1} b_{l-2}
            bl = t.gamma[static_cast<std::size_t>(l - 1)] * bprev2;
        }
        const long double scale_af =
            sf::alpha_norm(l, am) * sf::legendre_at_zero(l, am);
        const std::complex<long double> term = {scale_af * bl.real(), scale_af * bl.imag()};
        bsum += term;
        bprev2 = bcur;
        bcur = bl;
        if (l > L + 1) {
            const long double tmag = std::abs(std::complex<long double>(term));
            const long double smag = std::abs(bsum) > 0.0L ? std::abs(bsum) : 1.0L;
            if (tmag < 1e-16L * smag) {
                if (++tiny_run >= 2) {
                    converged = true;
                    break;
                }
            } else {
                tiny_run = 0;
            }
        }
    }
    if (!converged && k > closure_max_terms)
        throw closure_error("equator trace series did not converge within term cap");

    const std::complex<double> num =
        h_m - std::complex<double>(static_cast<double>(bsum.real()),
                                   static_cast<double>(bsum.imag()));
    out.a_tilde = num / D.value;
    return out;
}

}  // namespace detail

inline ObliqueSolutionAx solve_oblique_axisym(const AxisymCoeffs& f, double h0, int L) {
    if (L < 2) throw input_error("solve_oblique_axisym: degree must be at least 2");
    if (!f.finite() || !std::isfinite(h0))
        throw input_error("solve_oblique_axisym: non-finite input");
    if (f.degree() > L) throw input_error("solve_oblique_axisym: forcing degree exceeds L");

    const ModeTables t = mode_tables(0, L);
    std::vector<std::complex<double>> fm(static_cast<std::size_t>(f.degree()) + 1);
    for (int l = 0; l <= f.degree(); ++l) fm[static_cast<std::size_t>(l)] = {f[l], 0.0};
    const auto ms = detail::solve_mode(t, L, fm, {h0, 0.0});

    ObliqueSolutionAx out;
    out.v = AxisymCoeffs(L);
    out.denom = ms.denom;
    out.closure_terms = ms.closure_terms;
    out.a_tilde = ms.a_tilde.real();
    out.a.resize(static_cast<std::size_t>(L) + 1);
    for (int l = 0; l <= L; ++l) out.a[static_cast<std::size_t>(l)] = ms.a[static_cast<std::size_t>(l)].real();
    out.b.resize(static_cast<std::size_t>(L) + 2);
    for (int l = 0; l <= L + 1; ++l) out.b[static_cast<std::size_t>(l)] = ms.b[static_cast<std::size_t>(l)].real();

    // v_l = b_l + Gamma_k a_tilde on the even lattice l = 2k.
    for (int l = 0; l <= L; ++l) {
        double c = 0.0;
        if (l % 2 == 0) c = t.Gamma[static_cast<std::size_t>(l / 2)] * out.a_tilde;
        out.v[l] = out.b[static_cast<std::size_t>(l)] + c;
    }
    // First discarded coefficient (degree L+1) as truncation indicator.
    double tail = out.b[static_cast<std::size_t>(L + 1)];
    if ((L + 1) % 2 == 0) tail += t.Gamma[static_cast<std::size_t>((L + 1) / 2)] * out.a_tilde;
    out.tail_norm = std::abs(tail);
    return out;
}

// General (non-axisymmetric) solve: per-mode recurrences with equatorial
// Fourier data h.  Modes |m| > L of h must vanish.
struct ObliqueSolutionGen {
    SphCoeffs v{0};
    std::vector<std::complex<double>> a_tilde;  // indexed by m + L
    double denom_m0 = 0.0;
    int closure_terms = 0;
    double tail_norm = 0.0;
};

inline ObliqueSolutionGen solve_oblique_general(const SphCoeffs& f, const EquatorCoeffs& h,
                                                int L) {
    if (L < 2) throw input_error("solve_oblique_general: degree must be at least 2");
    if (f.degree() > L) throw input_error("solve_oblique_general: forcing degree exceeds L");
    if (h.order() > L) throw input_error("solve_oblique_general: equator data order exceeds L");

    ObliqueSolutionGen out;
    out.v = SphCoeffs(L);
    out.a_tilde.assign(2 * static_cast<std::size_t>(L) + 1, {0.0, 0.0});

    std::vector<double> tails(2 * static_cast<std::size_t>(L) + 1, 0.0);
    std::vector<int> terms(2 * static_cast<std::size_t>(L) + 1, 0);
    parallel_for(2 * L + 1, [&](int mi) {
        const int m = mi - L;
        const int am = std::abs(m);
        const ModeTables t = mode_tables(m, L);
        std::vector<std::complex<double>> fm(static_cast<std::size_t>(L) + 1, {0.0, 0.0});
        for (int l = am; l <= f.degree(); ++l) fm[static_cast<std::size_t>(l)] = f.at(l, m);
        const std::complex<double> hm = (am <= h.order()) ? h.at(m) : std::complex<double>(0.0, 0.0);
        const auto ms = detail::solve_mode(t, L, fm, hm);
        out.a_tilde[static_cast<std::size_t>(mi)] = ms.a_tilde;
        terms[static_cast<std::size_t>(mi)] = ms.closure_terms;
        if (m == 0) out.denom_m0 = ms.denom;
        for (int l = am; l <= L; ++l) {
            std::complex<double> c{0.0, 0.0};
            if ((l - am) % 2 == 0)
                c = t.Gamma[static_cast<std::size_t>((l - am) / 2)] * ms.a_tilde;
            out.v.ref(l, m) = ms.b[static_cast<std::size_t>(l)] + c;
        }
        std::complex<double> tail = ms.b[static_cast<std::size_t>(L + 1)];
        if ((L + 1 - am) >= 0 && (L + 1 - am) % 2 == 0)
            tail += t.Gamma[static_cast<std::size_t>((L + 1 - am) / 2)] * ms.a_tilde;
        tails[static_cast<std::size_t>(mi)] = std::abs(tail);
    });
    double tn = 0.0;
    int ct = 0;
    for (std::size_t i = 0; i < tails.size(); ++i) {
        tn += tails[i] * tails[i];
        if (terms[i] > ct) ct = terms[i];
    }
    out.tail_norm = std::sqrt(tn);
    out.closure_terms = ct;
    return out;
}

struct ResidualReport {
    double sup = 0.0;
    double l2 = 0.0;
};

namespace detail {

// Boundary operator applied pointwise from surface coefficients:
//   B[v](theta) = -2 sin(theta) v_r + cos(theta) v_theta  at r = 1,
// with v_r = -(l+1) v_l and v_theta from the P-derivative.
inline double boundary_op_axisym(const AxisymCoeffs& v, double theta) {
    const int L = v.degree();
    const auto pd = sf::assoc_legendre_with_dtheta(0, L, theta);
    const double st = std::sin(theta), ct = std::cos(theta);
    long double acc = 0.0L;
    for (int l = 0; l <= L; ++l) {
        const long double alpha = sf::alpha_norm(l, 0);
        const long double vr = -static_cast<long double>(l + 1) * v[l] *
                               pd.P[static_cast<std::size_t>(l)];
        const long double vt =
            static_cast<long double>(v[l]) * pd.D[static_cast<std::size_t>(l)];
        acc += alpha * (-2.0L * st * vr + ct * vt);
    }
    return static_cast<double>(acc);
}

}  // namespace detail

// Boundary residual R(theta) = B[v](theta) - f(theta)/2 sampled on thetas;
// l2 is the root-mean-square over the sample set.
inline ResidualReport boundary_residual_axisym(const ObliqueSolutionAx& sol, const AxisymCoeffs& f,
                                               const std::vector<double>& thetas) {
    ResidualReport r;
    if (thetas.empty()) return r;
    std::vector<double> vals(thetas.size());
    parallel_for(static_cast<int>(thetas.size()), [&](int i) {
        const double th = thetas[static_cast<std::size_t>(i)];
        const double lhs = detail::boundary_op_axisym(sol.v, th);
        const double rhs = 0.5 * spectral::synth_axisym(f, th);
        vals[static_cast<std::size_t>(i)] = lhs - rhs;
    });
    long double sq = 0.0L;
    for (double x : vals) {
        r.sup = std::max(r.sup, std::abs(x));
        sq += static_cast<long double>(x) * x;
    }
    r.l2 = static_cast<double>(std::sqrt(sq / static_cast<long double>(vals.size())));
    return r;
}

// Quadrature variant: L2 norm over the sphere, sqrt(2 pi sum w_i R(z_i)^2).
inline ResidualReport boundary_residual_axisym(const ObliqueSolutionAx& sol, const AxisymCoeffs& f,
                                               const spectral::SurfaceGrid& grid) {
    ResidualReport r;
    const int N = grid.size();
    std::vector<double> vals(static_cast<std::size_t>(N));
    parallel_for(N, [&](int i) {
        const double th = grid.theta[static_cast<std::size_t>(i)];
        vals[static_cast<std::size_t>(i)] =
            detail::boundary_op_axisym(sol.v, th) - 0.5 * spectral::synth_axisym(f, th);
    });
    long double sq = 0.0L;
    for (int i = 0; i < N; ++i) {
        const double x = vals[static_cast<std::size_t>(i)];
        r.sup = std::max(r.sup, std::abs(x));
        sq += static_cast<long double>(grid.w[static_cast<std::size_t>(i)]) * x * x;
    }
    r.l2 = static_cast<double>(std::sqrt(2.0L * sf::pi_l * sq));
    return r;
}

// General-m residual on a theta x phi tensor grid.
inline ResidualReport boundary_residual_general(const ObliqueSolutionGen& sol, const SphCoeffs& f,
                                                const std::vector<double>& thetas,
                                                const std::vector<double>& phis) {
    ResidualReport r;
    const int L = sol.v.degree();
    const int nt = static_cast<int>(thetas.size());
    const int np = static_cast<int>(phis.size());
    if (nt == 0 || np == 0) return r;
    std::vector<double> sups(static_cast<std::size_t>(nt), 0.0);
    std::vector<long double> sqs(static_cast<std::size_t>(nt), 0.0L);
    parallel_for(nt, [&](int it) {
        const double th = thetas[static_cast<std::size_t>(it)];
        const double st = std::sin(th), ct = std::cos(th);
        // Per-mode angular sums at this latitude; the phi dependence is a
        // pure Fourier factor, so accumulate mode amplitudes once.
        std::vector<std::complex<long double>> modeB(2 * static_cast<std::size_t>(L) + 1),
            modeF(2 * static_cast<std::size_t>(L) + 1);
        for (int m = -L; m <= L; ++m) {
            const int am = std::abs(m);
            const auto pd = sf::assoc_legendre_with_dtheta(am, L, th);
            std::complex<long double> accB{0.0L, 0.0L}, accF{0.0L, 0.0L};
            for (int l = am; l <= L; ++l) {
                const long double alpha = sf::alpha_norm(l, m);
                const std::complex<double> vlm = sol.v.at(l, m);
                const std::complex<double> flm =
                    (l <= f.degree()) ? f.at(l, m) : std::complex<double>(0.0, 0.0);
                const long double P = pd.P[static_cast<std::size_t>(l)];
                const long double D = pd.D[static_cast<std::size_t>(l)];
                const long double bterm = -2.0L * st * (-(l + 1.0L) * P) + ct * D;
                accB += std::complex<long double>(vlm.real(), vlm.imag()) * (alpha * bterm);
                accF += std::complex<long double>(flm.real(), flm.imag()) * (alpha * P);
            }
            modeB[static_cast<std::size_t>(m + L)] = accB;
            modeF[static_cast<std::size_t>(m + L)] = accF;
        }
        for (int ip = 0; ip < np; ++ip) {
            const double ph = phis[static_cast<std::size_t>(ip)];
            std::complex<long double> lhs{0.0L, 0.0L}, rhs{0.0L, 0.0L};
            for (int m = -L; m <= L; ++m) {
                const std::complex<long double> eim{std::cos(m * ph), std::sin(m * ph)};
                lhs += modeB[static_cast<std::size_t>(m + L)] * eim;
                rhs += modeF[static_cast<std::size_t>(m + L)] * eim;
            }
            const double res = static_cast<double>(std::abs(lhs - 0.5L * rhs));
            sups[static_cast<std::size_t>(it)] = std::max(sups[static_cast<std::size_t>(it)], res);
            sqs[static_cast<std::size_t>(it)] += static_cast<long double>(res) * res;
        }
    });
    long double sq = 0.0L;
    for (int it = 0; it < nt; ++it) {
        r.sup = std::max(r.sup, sups[static_cast<std::size_t>(it)]);
        sq += sqs[static_cast<std::size_t>(it)];
    }
    r.l2 = static_cast<double>(
        std::sqrt(sq / (static_cast<long double>(nt) * static_cast<long double>(np))));
    return r;
}

}  // namespace backus::oblique

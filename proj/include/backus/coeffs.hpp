#pragma once
// Coefficient containers and fractional Sobolev norms.
//
// AxisymCoeffs holds the real Fourier-Legendre coefficients c[l] of an
// axially symmetric surface function psi(theta) = sum_l c[l] Y_l^0, and
// SphCoeffs the complex table u_l^m over the full basis.  The H^s norm is the
// spectral one, sqrt(sum (l+1)^{2s} |u_l^m|^2); on the equatorial circle the
// Fourier analogue uses weights (|m|+1)^{2s}.

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace backus {

struct input_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct AxisymCoeffs {
    std::vector<double> c;

    AxisymCoeffs() = default;
    explicit AxisymCoeffs(int L) {
        if (L < 0) throw input_error("AxisymCoeffs: negative degree");
        c.assign(static_cast<std::size_t>(L) + 1, 0.0);
    }

    int degree() const { return static_cast<int>(c.size()) - 1; }
    double at(int l) const {
        return (l >= 0 && l < static_cast<int>(c.size())) ? c[static_cast<std::size_t>(l)] : 0.0;
    }
    double& operator[](int l) { return c[static_cast<std::size_t>(l)]; }
    double operator[](int l) const { return c[static_cast<std::size_t>(l)]; }

    bool finite() const {
        for (double v : c)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

inline AxisymCoeffs truncated(const AxisymCoeffs& u, int L) {
    AxisymCoeffs out(L);
    for (int l = 0; l <= L; ++l) out[l] = u.at(l);
    return out;
}

inline AxisymCoeffs operator+(const AxisymCoeffs& a, const AxisymCoeffs& b) {
    AxisymCoeffs out(std::max(a.degree(), b.degree()));
    for (int l = 0; l <= out.degree(); ++l) out[l] = a.at(l) + b.at(l);
    return out;
}

inline AxisymCoeffs operator-(const AxisymCoeffs& a, const AxisymCoeffs& b) {
    AxisymCoeffs out(std::max(a.degree(), b.degree()));
    for (int l = 0; l <= out.degree(); ++l) out[l] = a.at(l) - b.at(l);
    return out;
}

inline AxisymCoeffs operator*(double s, const AxisymCoeffs& a) {
    AxisymCoeffs out = a;
    for (double& v : out.c) v *= s;
    return out;
}

inline double hs_norm(const AxisymCoeffs& u, double s) {
    long double acc = 0.0L;
    for (int l = 0; l <= u.degree(); ++l) {
        const long double w = std::pow(static_cast<long double>(l + 1), 2.0L * s);
        acc += w * static_cast<long double>(u[l]) * u[l];
    }
    return static_cast<double>(std::sqrt(acc));
}

inline double hs_dist(const AxisymCoeffs& a, const AxisymCoeffs& b, double s) {
    return hs_norm(a - b, s);
}

struct SphCoeffs {
    int L = -1;
    std::vector<std::complex<double>> a;  // index l*l + l + m; l = 0..L, m = -l..l

    SphCoeffs() = default;
    explicit SphCoeffs(int L_) : L(L_) {
        if (L_ < 0) throw input_error("SphCoeffs: negative degree");
        a.assign(static_cast<std::size_t>(L_ + 1) * static_cast<std::size_t>(L_ + 1), {0.0, 0.0});
    }

    int degree() const { return L; }
    static std::size_t index(int l, int m) {
        return static_cast<std::size_t>(l) * l + static_cast<std::size_t>(l + m);
    }
    std::complex<double> at(int l, int m) const {
        if (l < 0 || l > L || std::abs(m) > l) return {0.0, 0.0};
        return a[index(l, m)];
    }
    std::complex<double>& ref(int l, int m) {
        if (l < 0 || l > L || std::abs(m) > l) throw input_error("SphCoeffs: index out of range");
        return a[index(l, m)];
    }
};

inline double hs_norm(const SphCoeffs& u, double s) {
    long double acc = 0.0L;
    for (int l = 0; l <= u.degree(); ++l) {
        const long double w = std::pow(static_cast<long double>(l + 1), 2.0L * s);
        for (int m = -l; m <= l; ++m) acc += w * static_cast<long double>(std::norm(u.at(l, m)));
    }
    return static_cast<double>(std::sqrt(acc));
}

// Embed an axisymmetric table into the general container (m = 0 column).
inline SphCoeffs to_general(const AxisymCoeffs& u) {
    SphCoeffs out(u.degree());
    for (int l = 0; l <= u.degree(); ++l) out.ref(l, 0) = u[l];
    return out;
}

inline SphCoeffs truncated(const SphCoeffs& u, int L) {
    SphCoeffs out(L);
    for (int l = 0; l <= std::min(L, u.degree()); ++l)
        for (int m = -l; m <= l; ++m) out.ref(l, m) = u.at(l, m);
    return out;
}

inline AxisymCoeffs axisym_part(const SphCoeffs& u) {
    AxisymCoeffs out(std::max(0, u.degree()));
    for (int l = 0; l <= u.degree(); ++l) out[l] = u.at(l, 0).real();
    return out;
}

inline double max_nonaxisym(const SphCoeffs& u) {
    double worst = 0.0;
    for (int l = 0; l <= u.degree(); ++l)
        for (int m = -l; m <= l; ++m)
            if (m != 0) worst = std::max(worst, std::abs(u.at(l, m)));
    return worst;
}

// Fourier coefficients h_m, m = -M..M, of a function on the equator circle,
// in the plain basis h(phi) = sum_m h_m e^{i m phi} (which matches the
// spherical basis restricted to theta = 0).
struct EquatorCoeffs {
    std::vector<std::complex<double>> h;  // index m + M

    EquatorCoeffs() : h(1, {0.0, 0.0}) {}
    explicit EquatorCoeffs(int M) {
        if (M < 0) throw input_error("EquatorCoeffs: negative order");
        h.assign(2 * static_cast<std::size_t>(M) + 1, {0.0, 0.0});
    }
    static EquatorCoeffs constant(double h0) {
        EquatorCoeffs e(0);
        e.h[0] = h0;
        return e;
    }

    int order() const { return (static_cast<int>(h.size()) - 1) / 2; }
    std::complex<double> at(int m) const {
        const int M = order();
        if (std::abs(m) > M) return {0.0, 0.0};
        return h[static_cast<std::size_t>(m + M)];
    }
    std::complex<double>& ref(int m) {
        const int M = order();
        if (std::abs(m) > M) throw input_error("EquatorCoeffs: order out of range");
        return h[static_cast<std::size_t>(m + M)];
    }
};

inline double equator_hs_norm(const EquatorCoeffs& h, double s) {
    long double acc = 0.0L;
    const int M = h.order();
    for (int m = -M; m <= M; ++m) {
        const long double w = std::pow(static_cast<long double>(std::abs(m) + 1), 2.0L * s);
        acc += w * static_cast<long double>(std::norm(h.at(m)));
    }
    return static_cast<double>(std::sqrt(acc));
}

}  // namespace backus

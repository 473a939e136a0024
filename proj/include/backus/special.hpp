#pragma once
// Factorial combinatorics, associated Legendre functions, and normalization
// constants for the orthonormal spherical-harmonic basis
//
//     Y_l^m(theta, phi) = alpha_l^m P_l^{|m|}(sin theta) e^{i m phi},
//
// with theta the latitude (z = sin theta in [-1, 1]) and P_l^m carrying the
// Condon-Shortley phase, pinned by the zero-value formula
//
//     P_{|m|+2k}^{|m|}(0) = (-1)^{|m|+k} (2|m|+2k-1)!! / (2k)!!.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace backus::sf {

inline constexpr long double pi_l = 3.141592653589793238462643383279502884L;
inline constexpr long double ln2_l = 0.693147180559945309417232121458176568L;

// log(n!) in long double, tabulated for accuracy of downstream ratios.
inline long double log_factorial(int n) {
    static const std::vector<long double> table = [] {
        std::vector<long double> t(20001);
        t[0] = 0.0L;
        for (std::size_t i = 1; i < t.size(); ++i)
            t[i] = t[i - 1] + std::log(static_cast<long double>(i));
        return t;
    }();
    if (n < 0) throw std::domain_error("log_factorial: negative argument");
    if (n < static_cast<int>(table.size())) return table[static_cast<std::size_t>(n)];
    return std::lgamma(static_cast<long double>(n) + 1.0L);
}

// n!! as an exact integer; fits in 64 bits for n <= 33.  (-1)!! = 0!! = 1.
inline std::uint64_t double_factorial_u64(int n) {
    if (n < -1 || n > 33) throw std::domain_error("double_factorial_u64: out of range");
    std::uint64_t r = 1;
    for (int k = n; k > 1; k -= 2) r *= static_cast<std::uint64_t>(k);
    return r;
}

// log(n!!); exact-integer route for small n, factorial identities beyond:
// (2k)!! = 2^k k!,  (2k+1)!! = (2k+1)! / (2^k k!).
inline double log_double_factorial(int n) {
    if (n < -1) throw std::domain_error("log_double_factorial: argument below -1");
    if (n <= 33)
        return static_cast<double>(
            std::log(static_cast<long double>(double_factorial_u64(n))));
    if (n % 2 == 0) {
        const int k = n / 2;
        return static_cast<double>(k * ln2_l + log_factorial(k));
    }
    const int k = (n - 1) / 2;
    return static_cast<double>(log_factorial(2 * k + 1) - k * ln2_l - log_factorial(k));
}

// alpha_l^m = (-1)^{(m+|m|)/2} sqrt((2l+1)(l-|m|)! / (4 pi (l+|m|)!)),
// evaluated in log space with the sign tracked separately.
inline double alpha_norm(int l, int m) {
    const int am = std::abs(m);
    if (am > l) throw std::domain_error("alpha_norm: |m| > l");
    const long double lg =
        0.5L * (std::log(static_cast<long double>(2 * l + 1)) + log_factorial(l - am) -
                std::log(4.0L * pi_l) - log_factorial(l + am));
    const double sign = (m > 0 && (m & 1)) ? -1.0 : 1.0;
    return sign * static_cast<double>(std::exp(lg));
}

// P_l^m(0) by the double-factorial formula: zero when l-m is odd, else
// (-1)^{m+k} (2m+2k-1)!!/(2k)!! with k = (l-m)/2.  The running product keeps
// dyadic-rational values exact in binary.
inline double legendre_at_zero(int l, int m) {
    if (m < 0 || m > l) throw std::domain_error("legendre_at_zero: need 0 <= m <= l");
    if ((l - m) % 2 != 0) return 0.0;
    const int k = (l - m) / 2;
    long double v = 1.0L;
    for (int j = 1; j <= m; ++j) v *= static_cast<long double>(2 * j - 1);  // (2m-1)!!
    for (int j = 1; j <= k; ++j)
        v *= static_cast<long double>(2 * m + 2 * j - 1) / static_cast<long double>(2 * j);
    const double sign = ((m + k) & 1) ? -1.0 : 1.0;
    return sign * static_cast<double>(v);
}

// P_l^m(z) for l = 0..L (entries below l = m are zero), by the stable upward
// recurrence (l-m+1) P_{l+1} = (2l+1) z P_l - (l+m) P_{l-1} seeded with
// P_m^m = (-1)^m (2m-1)!! (1-z^2)^{m/2}.
inline std::vector<double> assoc_legendre_seq(int m, int L, double z) {
    if (m < 0) throw std::domain_error("assoc_legendre_seq: need m >= 0");
    if (m > L) throw std::domain_error("assoc_legendre_seq: need m <= L");
    if (!(z >= -1.0 && z <= 1.0)) throw std::domain_error("assoc_legendre_seq: |z| > 1");
    std::vector<double> P(static_cast<std::size_t>(L) + 1, 0.0);
    const long double zl = z;
    const long double cs = std::sqrt(std::max(0.0L, 1.0L - zl * zl));
    long double pmm = 1.0L;
    for (int j = 1; j <= m; ++j) pmm *= static_cast<long double>(2 * j - 1) * cs;
    if (m & 1) pmm = -pmm;
    long double pl = pmm, plm1 = 0.0L;
    P[static_cast<std::size_t>(m)] = static_cast<double>(pl);
    for (int l = m; l < L; ++l) {
        const long double pnext =
            ((2 * l + 1) * zl * pl - (l + m) * plm1) / static_cast<long double>(l - m + 1);
        plm1 = pl;
        pl = pnext;
        P[static_cast<std::size_t>(l) + 1] = static_cast<double>(pl);
    }
    return P;
}

inline double assoc_legendre(int l, int m, double z) {
    if (m < 0 || m > l) throw std::domain_error("assoc_legendre: need 0 <= m <= l");
    return assoc_legendre_seq(m, l, z)[static_cast<std::size_t>(l)];
}

// P_l^m(sin theta) together with D_l^m(theta) = d/dtheta P_l^m(sin theta).
// The derivative satisfies the theta-differentiated recurrence
//   (l-m+1) D_{l+1} = (2l+1)(cos theta P_l + sin theta D_l) - (l+m) D_{l-1},
// seeded with D_m^m = -m sin theta cos^{m-1} theta (-1)^m (2m-1)!!.  This is
// division-free in cos theta, hence finite at the poles.
struct LegendrePair {
    std::vector<double> P, D;  // indexed by l = 0..L; zero below l = m
};

inline LegendrePair assoc_legendre_with_dtheta(int m, int L, double theta) {
    if (m < 0) throw std::domain_error("assoc_legendre_with_dtheta: need m >= 0");
    if (m > L) throw std::domain_error("assoc_legendre_with_dtheta: need m <= L");
    LegendrePair out;
    out.P.assign(static_cast<std::size_t>(L) + 1, 0.0);
    out.D.assign(static_cast<std::size_t>(L) + 1, 0.0);
    const long double z = std::sin(static_cast<long double>(theta));
    const long double cs = std::cos(static_cast<long double>(theta));
    long double dfac = 1.0L;  // (2m-1)!!
    for (int j = 1; j <= m; ++j) dfac *= static_cast<long double>(2 * j - 1);
    const long double phase = (m & 1) ? -1.0L : 1.0L;
    long double pl, dl;
    if (m == 0) {
        pl = 1.0L;
        dl = 0.0L;
    } else {
        long double csm1 = 1.0L;  // cos^{m-1}
        for (int j = 1; j < m; ++j) csm1 *= cs;
        pl = phase * dfac * csm1 * cs;
        dl = -static_cast<long double>(m) * z * phase * dfac * csm1;
    }
    long double plm1 = 0.0L, dlm1 = 0.0L;
    out.P[static_cast<std::size_t>(m)] = static_cast<double>(pl);
    out.D[static_cast<std::size_t>(m)] = static_cast<double>(dl);
    for (int l = m; l < L; ++l) {
        const long double denom = static_cast<long double>(l - m + 1);
        const long double pnext = ((2 * l + 1) * z * pl - (l + m) * plm1) / denom;
        const long double dnext = ((2 * l + 1) * (cs * pl + z * dl) - (l + m) * dlm1) / denom;
        plm1 = pl;
        dlm1 = dl;
        pl = pnext;
        dl = dnext;
        out.P[static_cast<std::size_t>(l) + 1] = static_cast<double>(pl);
        out.D[static_cast<std::size_t>(l) + 1] = static_cast<double>(dl);
    }
    return out;
}

inline double assoc_legendre_dtheta(int l, int m, double theta) {
    if (m < 0 || m > l) throw std::domain_error("assoc_legendre_dtheta: need 0 <= m <= l");
    return assoc_legendre_with_dtheta(m, l, theta).D[static_cast<std::size_t>(l)];
}

}  // namespace backus::sf

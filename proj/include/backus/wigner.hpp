#pragma once
// Wigner 3j symbols and the product-formula coupling coefficients
//
//   W^{l1,l2,l}_{m1,m2,m} = (-1)^m / sqrt(4 pi) * 3j(l1,l2,l; m1,m2,-m)
//                                              * 3j(l1,l2,l; 0,0,0).
//
// The 3j symbol is evaluated from the explicit factorial sum
//
//   3j = sqrt(R) * sum_k (-1)^{k+phi} (A-k)! (B+k)! / [k! (C-k)! (D-k)! (E+k)!]
//
// with A = l2+l3+m1, B = l1-m1, C = -l1+l2+l3, D = l3-m3, E = l1-l2+m3,
// phi = l1+m2-m3, and R the ratio of triangle and projection factorials.
// The alternating k-sum cancels catastrophically in floating point, so
// degrees <= 64 run in exact integer-rational arithmetic (value correctly
// rounded to ~1e-16); beyond that a log-space signed sum is used and a
// cancellation estimate (sum of |terms| over |sum|) is reported alongside.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "backus/special.hpp"

namespace backus::sf {

using boost::multiprecision::cpp_int;

inline constexpr int wigner_exact_max_degree = 64;

inline bool wigner_selection_ok(int l1, int l2, int l3, int m1, int m2, int m3) {
    if (l1 < 0 || l2 < 0 || l3 < 0) return false;
    if (m1 + m2 + m3 != 0) return false;
    if (std::abs(m1) > l1 || std::abs(m2) > l2 || std::abs(m3) > l3) return false;
    if (l3 < std::abs(l1 - l2) || l3 > l1 + l2) return false;
    return true;
}

namespace detail {

inline const std::vector<cpp_int>& factorials_int() {
    static const std::vector<cpp_int> table = [] {
        std::vector<cpp_int> t(257);
        t[0] = 1;
        for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] * static_cast<unsigned>(i);
        return t;
    }();
    return table;
}

// Unreduced big rational: gcd normalization is skipped on purpose (the chain
// of Horner updates stays a few kilobits at most, and gcd would dominate).
struct BigRat {
    cpp_int num, den;  // den > 0
};

inline double ratio_to_double(cpp_int num, const cpp_int& den) {
    if (num == 0) return 0.0;
    const bool neg = num < 0;
    if (neg) num = -num;
    const long nb = static_cast<long>(boost::multiprecision::msb(num));
    const long db = static_cast<long>(boost::multiprecision::msb(den));
    const long sn = std::max(0L, nb - 128);
    const long sd = std::max(0L, db - 128);
    const double n = (num >> sn).convert_to<double>();
    const double d = (den >> sd).convert_to<double>();
    const double v = std::ldexp(n / d, static_cast<int>(sn - sd));
    return neg ? -v : v;
}

inline double wigner3j_exact(int l1, int l2, int l3, int m1, int m2, int m3) {
    const auto& F = factorials_int();
    const int A = l2 + l3 + m1, B = l1 - m1, C = -l1 + l2 + l3;
    const int D = l3 - m3, E = l1 - l2 + m3, phi = l1 + m2 - m3;
    const int klo = std::max(0, -E);
    const int khi = std::min({A, C, D});
    if (khi < klo) return 0.0;  // empty k-sum
    // Backward Horner on the exact term ratios
    //   t_k / t_{k-1} = -(B+k)(C-k+1)(D-k+1) / ((A-k+1) k (E+k)).
    BigRat f{1, 1};
    for (int k = khi; k > klo; --k) {
        const long long rn = -static_cast<long long>(B + k) * (C - k + 1) * (D - k + 1);
        const long long rd = static_cast<long long>(A - k + 1) * k * (E + k);
        // f <- 1 + (rn/rd) * f
        f.num = f.den * rd + f.num * rn;
        f.den = f.den * rd;
    }
    // Leading term t_klo, sign (-1)^{klo+phi}.
    BigRat s;
    s.num = F[static_cast<std::size_t>(A - klo)] * F[static_cast<std::size_t>(B + klo)];
    s.den = F[static_cast<std::size_t>(klo)] * F[static_cast<std::size_t>(C - klo)] *
            F[static_cast<std::size_t>(D - klo)] * F[static_cast<std::size_t>(E + klo)];
    s.num *= f.num;
    s.den *= f.den;
    if ((klo + phi) & 1) s.num = -s.num;
    if (s.num == 0) return 0.0;
    // (3j)^2 = R * S^2 exactly; recover the sign from S.
    cpp_int rn = F[static_cast<std::size_t>(C)] * F[static_cast<std::size_t>(l1 - l2 + l3)] *
                 F[static_cast<std::size_t>(l1 + l2 - l3)] * F[static_cast<std::size_t>(D)] *
                 F[static_cast<std::size_t>(l3 + m3)];
    cpp_int rd = F[static_cast<std::size_t>(l1 + l2 + l3 + 1)] *
                 F[static_cast<std::size_t>(B)] * F[static_cast<std::size_t>(l1 + m1)] *
                 F[static_cast<std::size_t>(l2 - m2)] * F[static_cast<std::size_t>(l2 + m2)];
    const double sq = ratio_to_double(rn * s.num * s.num, rd * s.den * s.den);
    const double v = std::sqrt(sq);
    return s.num < 0 ? -v : v;
}

struct FloatSum {
    double value;
    double cancellation;
};

inline FloatSum wigner3j_float(int l1, int l2, int l3, int m1, int m2, int m3) {
    const int A = l2 + l3 + m1, B = l1 - m1, C = -l1 + l2 + l3;
    const int D = l3 - m3, E = l1 - l2 + m3, phi = l1 + m2 - m3;
    const int klo = std::max(0, -E);
    const int khi = std::min({A, C, D});
    if (khi < klo) return {0.0, 0.0};
    const long double half_log_r =
        0.5L * (log_factorial(C) + log_factorial(l1 - l2 + l3) + log_factorial(l1 + l2 - l3) +
                log_factorial(D) + log_factorial(l3 + m3) - log_factorial(l1 + l2 + l3 + 1) -
                log_factorial(B) - log_factorial(l1 + m1) - log_factorial(l2 - m2) -
                log_factorial(l2 + m2));
    long double sum = 0.0L, abs_sum = 0.0L;
    for (int k = klo; k <= khi; ++k) {
        const long double lt = log_factorial(A - k) + log_factorial(B + k) - log_factorial(k) -
                               log_factorial(C - k) - log_factorial(D - k) - log_factorial(E + k);
        long double t = std::exp(lt + half_log_r);
        if ((k + phi) & 1) t = -t;
        sum += t;
        abs_sum += std::abs(t);
    }
    const double cancel = (sum == 0.0L) ? std::numeric_limits<double>::infinity()
                                        : static_cast<double>(abs_sum / std::abs(sum));
    return {static_cast<double>(sum), cancel};
}

}  // namespace detail

struct Wigner3jInfo {
    double value = 0.0;
    double cancellation = 0.0;  // sum|t_k| / |sum t_k| of the float path; 1 on the exact path
    bool exact = false;
};

inline Wigner3jInfo wigner_3j_info(int l1, int l2, int l3, int m1, int m2, int m3) {
    if (!wigner_selection_ok(l1, l2, l3, m1, m2, m3)) return {0.0, 0.0, true};
    if (std::max({l1, l2, l3}) <= wigner_exact_max_degree)
        return {detail::wigner3j_exact(l1, l2, l3, m1, m2, m3), 1.0, true};
    const auto fs = detail::wigner3j_float(l1, l2, l3, m1, m2, m3);
    return {fs.value, fs.cancellation, false};
}

inline double wigner_3j(int l1, int l2, int l3, int m1, int m2, int m3) {
    return wigner_3j_info(l1, l2, l3, m1, m2, m3).value;
}

// Cancellation-free closed form for the all-zero projection: with
// J = l1+l2+l3 even and g = J/2,
//   3j(l1,l2,l3;0,0,0) = (-1)^g sqrt((J-2l1)!(J-2l2)!(J-2l3)!/(J+1)!)
//                        * g! / ((g-l1)!(g-l2)!(g-l3)!).
inline double wigner_3j_000(int l1, int l2, int l3) {
    if (!wigner_selection_ok(l1, l2, l3, 0, 0, 0)) return 0.0;
    const int J = l1 + l2 + l3;
    if (J & 1) return 0.0;
    const int g = J / 2;
    const long double lg =
        0.5L * (log_factorial(J - 2 * l1) + log_factorial(J - 2 * l2) +
                log_factorial(J - 2 * l3) - log_factorial(J + 1)) +
        log_factorial(g) - log_factorial(g - l1) - log_factorial(g - l2) - log_factorial(g - l3);
    const double v = static_cast<double>(std::exp(lg));
    return (g & 1) ? -v : v;
}

// Product-formula coefficient W^{l1,l2,l}_{m1,m2,m}.
inline double gaunt_w(int l1, int l2, int l, int m1, int m2, int m) {
    const double sym = wigner_3j(l1, l2, l, m1, m2, -m);
    if (sym == 0.0) return 0.0;
    const double sym0 = (std::max({l1, l2, l}) <= wigner_exact_max_degree)
                            ? wigner_3j(l1, l2, l, 0, 0, 0)
                            : wigner_3j_000(l1, l2, l);
    const double sign = (m & 1) ? -1.0 : 1.0;
    return sign / std::sqrt(4.0 * static_cast<double>(pi_l)) * sym * sym0;
}

}  // namespace backus::sf

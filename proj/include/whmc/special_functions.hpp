#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace whmc {

// Thrown when a special function or exponent is evaluated at (or numerically
// on top of) a singularity.
class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace special {

template <class T> struct real_type { using type = T; };
template <class T> struct real_type<std::complex<T>> { using type = T; };
template <class Z> using real_t = typename real_type<Z>::type;

template <class T> inline T re(T x) { return x; }
template <class T> inline T re(const std::complex<T>& z) { return z.real(); }
template <class T> inline T im(T) { return T(0); }
template <class T> inline T im(const std::complex<T>& z) { return z.imag(); }

template <class Z> inline Z with_real_shift(const Z& z, real_t<Z> shift) {
    if constexpr (std::is_floating_point_v<Z>) {
        return z + shift;
    } else {
        return Z(z.real() + shift, z.imag());
    }
}

// sin(pi z) and cos(pi z) with the real part reduced to [-1/2, 1/2] first,
// so arguments close to an integer keep full relative accuracy.
template <class Z> Z sin_pi(const Z& z) {
    using T = real_t<Z>;
    const T pi = std::numbers::pi_v<T>;
    const T m = std::nearbyint(re(z));
    const T f = re(z) - m;
    const T sign = (std::fmod(std::fabs(m), T(2)) == T(1)) ? T(-1) : T(1);
    if constexpr (std::is_floating_point_v<Z>) {
        return sign * std::sin(pi * f);
    } else {
        const T y = pi * z.imag();
        return sign * Z(std::sin(pi * f) * std::cosh(y), std::cos(pi * f) * std::sinh(y));
    }
}

template <class Z> Z cos_pi(const Z& z) {
    using T = real_t<Z>;
    const T pi = std::numbers::pi_v<T>;
    const T m = std::nearbyint(re(z));
    const T f = re(z) - m;
    const T sign = (std::fmod(std::fabs(m), T(2)) == T(1)) ? T(-1) : T(1);
    if constexpr (std::is_floating_point_v<Z>) {
        return sign * std::cos(pi * f);
    } else {
        const T y = pi * z.imag();
        return sign * Z(std::cos(pi * f) * std::cosh(y), -std::sin(pi * f) * std::sinh(y));
    }
}

namespace detail {

// B_{2k} / (2k (2k-1)) for k = 1..12
template <class T> constexpr T stirling_coeff[12] = {
    T(1) / T(12),
    T(-1) / T(360),
    T(1) / T(1260),
    T(-1) / T(1680),
    T(1) / T(1188),
    T(-691) / T(360360),
    T(1) / T(156),
    T(-3617) / T(122400),
    T(43867) / T(244188),
    T(-174611) / T(125400),
    T(77683) / T(5796),
    T(-236364091) / T(1506960),
};

// B_{2k} / (2k) for k = 1..12
template <class T> constexpr T digamma_coeff[12] = {
    T(1) / T(12),
    T(-1) / T(120),
    T(1) / T(252),
    T(-1) / T(240),
    T(1) / T(132),
    T(-691) / T(32760),
    T(1) / T(12),
    T(-3617) / T(8160),
    T(43867) / T(14364),
    T(-174611) / T(6600),
    T(77683) / T(276),
    T(-236364091) / T(65520),
};

template <class T> constexpr T asymptotic_radius = T(18);

template <class Z> real_t<Z> magnitude(const Z& z) {
    if constexpr (std::is_floating_point_v<Z>) {
        return std::fabs(z);
    } else {
        return std::abs(z);
    }
}

}  // namespace detail

// log Gamma(z) for Re z >= 1/2. For complex z the imaginary part is only
// correct modulo 2 pi; callers exponentiate differences.
template <class Z> Z log_gamma_right(Z z) {
    using T = real_t<Z>;
    Z prod(1);
    bool shifted = false;
    while (detail::magnitude(z) < detail::asymptotic_radius<T>) {
        prod *= z;
        z = with_real_shift(z, T(1));
        shifted = true;
    }
    const Z inv = Z(1) / z;
    const Z inv2 = inv * inv;
    Z series(0);
    Z p = inv;
    for (int k = 0; k < 12; ++k) {
        series += detail::stirling_coeff<T>[k] * p;
        p *= inv2;
    }
    const T half_log_2pi = T(0.5) * std::log(T(2) * std::numbers::pi_v<T>);
    Z out = (z - T(0.5)) * std::log(z) - z + half_log_2pi + series;
    if (shifted) {
        out -= std::log(prod);
    }
    return out;
}

// Stirling's series (after upward shifting) stays accurate away from the
// negative real axis; reflection is only required inside the sector around it.
template <class Z> bool needs_reflection(const Z& z) {
    using T = real_t<Z>;
    return re(z) < T(0.5) && std::fabs(im(z)) <= std::fabs(re(z));
}

template <class T> bool near_nonpositive_integer(T x, T y, T tol) {
    if (x > T(0.5)) {
        return false;
    }
    const T m = std::nearbyint(x);
    return std::fabs(x - m) < tol && std::fabs(y) < tol;
}

// sin(pi z) grows like exp(pi |Im z|) and overflows double near |Im z| = 225.
template <class Z> bool large_imag(const Z& z) { return std::fabs(im(z)) > 30; }

// log sin(pi z) for complex z with large |Im z|, modulo 2 pi i.
template <class T> std::complex<T> log_sin_pi(const std::complex<T>& z) {
    const T pi = std::numbers::pi_v<T>;
    const std::complex<T> i(T(0), T(1));
    // the dominant exponential is factored out: sin(pi z) = e^{-i pi z s} (1 - e^{2 i pi z s}) / (-2 i s), s = sign Im z
    const T s = z.imag() > T(0) ? T(1) : T(-1);
    const std::complex<T> w = i * pi * z * s;
    return -w + std::log(T(1) - std::exp(T(2) * w)) - std::log(T(-2) * i * s);
}
template <class T> T log_sin_pi(T) { throw std::logic_error("log_sin_pi: real argument"); }

// Gamma(a) / Gamma(b). Poles of Gamma(b) give 0; poles of Gamma(a) throw.
template <class Z> Z gamma_ratio(const Z& a, const Z& b) {
    using T = real_t<Z>;
    const T pi = std::numbers::pi_v<T>;
    const T tol = T(1e-12);
    if (near_nonpositive_integer(re(a), im(a), tol)) {
        throw EvaluationError("Gamma pole at argument " + std::to_string(static_cast<double>(re(a))));
    }
    if (near_nonpositive_integer(re(b), im(b), tol)) {
        return Z(0);
    }
    Z factor(1);
    Z log_part(0);
    if (needs_reflection(a)) {
        if (large_imag(a)) {
            log_part += std::log(pi) - log_sin_pi(a);
        } else {
            factor *= pi / sin_pi(a);
        }
        log_part -= log_gamma_right(Z(T(1) - a));
    } else {
        log_part += log_gamma_right(a);
    }
    if (needs_reflection(b)) {
        if (large_imag(b)) {
            log_part += log_sin_pi(b) - std::log(pi);
        } else {
            factor *= sin_pi(b) / pi;
        }
        log_part += log_gamma_right(Z(T(1) - b));
    } else {
        log_part -= log_gamma_right(b);
    }
    return factor * std::exp(log_part);
}

template <class Z> Z gamma(const Z& z) { return gamma_ratio(z, Z(1)); }

// Euler Beta function B(x, y) = Gamma(x) Gamma(y) / Gamma(x + y), using the
// reflection formula whenever an argument lies left of Re = 1/2.
template <class Z> Z beta(const Z& x, const Z& y) { return gamma(y) * gamma_ratio(x, Z(x + y)); }

template <class Z> Z cot_pi(const Z& z) {
    using T = real_t<Z>;
    if constexpr (std::is_floating_point_v<Z>) {
        return cos_pi(z) / sin_pi(z);
    } else {
        if (!large_imag(z)) {
            return cos_pi(z) / sin_pi(z);
        }
        const T s = z.imag() > T(0) ? T(1) : T(-1);
        const Z q = std::exp(Z(T(0), T(2) * std::numbers::pi_v<T> * s) * z);
        return Z(T(0), -s) * (T(1) + q) / (T(1) - q);
    }
}

template <class Z> Z digamma(Z z) {
    using T = real_t<Z>;
    const T pi = std::numbers::pi_v<T>;
    if (near_nonpositive_integer(re(z), im(z), T(1e-12))) {
        throw EvaluationError("digamma pole at argument " + std::to_string(static_cast<double>(re(z))));
    }
    Z reflection(0);
    if (needs_reflection(z)) {
        reflection = -pi * cot_pi(z);
        z = Z(T(1) - z);
    }
    Z acc(0);
    while (detail::magnitude(z) < detail::asymptotic_radius<T>) {
        acc -= Z(1) / z;
        z = with_real_shift(z, T(1));
    }
    const Z inv = Z(1) / z;
    const Z inv2 = inv * inv;
    Z series(0);
    Z p = inv2;
    for (int k = 0; k < 12; ++k) {
        series += detail::digamma_coeff<T>[k] * p;
        p *= inv2;
    }
    return reflection + acc + std::log(z) - T(0.5) * inv - series;
}

// Partial derivative of B(x, y) in its first argument.
template <class Z> Z beta_dx(const Z& x, const Z& y) {
    const Z b = beta(x, y);
    if (b == Z(0)) {
        return Z(0);
    }
    return b * (digamma(x) - digamma(Z(x + y)));
}

// Gauss hypergeometric 2F1(a, b; c; w) by its power series, 0 <= w < 1.
inline double hyp2f1_series(double a, double b, double c, double w, double rel_tol = 1e-14,
                            std::size_t max_terms = 100000) {
    if (c <= 0.0 && std::fabs(c - std::nearbyint(c)) < 1e-14) {
        throw EvaluationError("2F1: c is a nonpositive integer");
    }
    if (!(w >= 0.0 && w < 1.0)) {
        throw EvaluationError("2F1: series argument outside [0, 1)");
    }
    double term = 1.0;
    double sum = 1.0;
    for (std::size_t n = 0; n < max_terms; ++n) {
        const double dn = static_cast<double>(n);
        term *= (a + dn) * (b + dn) / ((c + dn) * (dn + 1.0)) * w;
        sum += term;
        if (std::fabs(term) <= rel_tol * std::fabs(sum) && n > 2) {
            // remaining terms are bounded by a geometric tail once the ratio settles below 1
            const double ratio = std::fabs((a + dn + 1.0) * (b + dn + 1.0) / ((c + dn + 1.0) * (dn + 2.0)) * w);
            if (ratio < 1.0 && std::fabs(term) * ratio / (1.0 - ratio) <= rel_tol * std::fabs(sum)) {
                return sum;
            }
        }
    }
    throw EvaluationError("2F1: series did not converge within " + std::to_string(max_terms) + " terms");
}

// 2F1(a, b; c; w) for 0 <= w < 1. Close to w = 1 the series in w converges
// too slowly, so the two-term connection formula in 1 - w is used when
// c - a - b is not an integer.
inline double hyp2f1(double a, double b, double c, double w) {
    const double s = c - a - b;
    if (w <= 0.9 || std::fabs(s - std::nearbyint(s)) < 1e-6) {
        return hyp2f1_series(a, b, c, w);
    }
    using ld = long double;
    const ld one_minus = static_cast<ld>(1.0) - static_cast<ld>(w);
    const ld rg_ca = gamma_ratio<ld>(1.0L, static_cast<ld>(c) - a);
    const ld rg_cb = gamma_ratio<ld>(1.0L, static_cast<ld>(c) - b);
    const ld rg_a = gamma_ratio<ld>(1.0L, a);
    const ld rg_b = gamma_ratio<ld>(1.0L, b);
    const ld gc = gamma<ld>(c);
    const ld coef1 = gc * gamma<ld>(s) * rg_ca * rg_cb;
    const ld coef2 = gc * gamma<ld>(-s) * rg_a * rg_b;
    ld out = 0.0L;
    if (coef1 != 0.0L) {
        out += coef1 * hyp2f1_series(a, b, 1.0 - s, static_cast<double>(one_minus));
    }
    if (coef2 != 0.0L) {
        out += coef2 * std::pow(one_minus, static_cast<ld>(s)) *
               hyp2f1_series(c - a, c - b, 1.0 + s, static_cast<double>(one_minus));
    }
    return static_cast<double>(out);
}

}  // namespace special
}  // namespace whmc

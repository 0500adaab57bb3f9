#pragma once

// Scalar helpers shared by the real evaluator and the Taylor arithmetic so both
// produce bitwise-identical order-0 values.

namespace fk::real_ops {

// Divisors at or below this magnitude are treated as singular.
inline constexpr double kSingularDivisor = 1e-300;

// Binary exponentiation; valid for any base when k >= 0.
template <typename T>
T int_pow_positive(T base, long k, T one) {
    T result = one;
    while (k > 0) {
        if (k & 1) result = result * base;
        k >>= 1;
        if (k > 0) base = base * base;
    }
    return result;
}

inline double int_pow(double base, long k) {
    if (k >= 0) return int_pow_positive(base, k, 1.0);
    return 1.0 / int_pow_positive(base, -k, 1.0);
}

}  // namespace fk::real_ops

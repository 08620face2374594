#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace kscert {

namespace detail {

inline std::int64_t checked_add(std::int64_t x, std::int64_t y) {
    std::int64_t r;
    if (__builtin_add_overflow(x, y, &r))
        throw std::overflow_error("Eisenstein arithmetic overflow in addition");
    return r;
}

inline std::int64_t checked_sub(std::int64_t x, std::int64_t y) {
    std::int64_t r;
    if (__builtin_sub_overflow(x, y, &r))
        throw std::overflow_error("Eisenstein arithmetic overflow in subtraction");
    return r;
}

inline std::int64_t checked_mul(std::int64_t x, std::int64_t y) {
    std::int64_t r;
    if (__builtin_mul_overflow(x, y, &r))
        throw std::overflow_error("Eisenstein arithmetic overflow in multiplication");
    return r;
}

}  // namespace detail

/// Eisenstein integer a + b*omega with omega = exp(2*pi*i/3), stored exactly.
/// omega satisfies omega^2 = -1 - omega, so the ring Z[omega] is closed under
/// multiplication with integer coordinates. All arithmetic is overflow-checked.
struct EisensteinInt {
    std::int64_t a = 0;  ///< rational-integer coordinate
    std::int64_t b = 0;  ///< coefficient of omega

    bool is_zero() const { return a == 0 && b == 0; }

    friend bool operator==(const EisensteinInt&, const EisensteinInt&) = default;
};

inline EisensteinInt operator+(const EisensteinInt& u, const EisensteinInt& v) {
    return {detail::checked_add(u.a, v.a), detail::checked_add(u.b, v.b)};
}

inline EisensteinInt operator-(const EisensteinInt& u, const EisensteinInt& v) {
    return {detail::checked_sub(u.a, v.a), detail::checked_sub(u.b, v.b)};
}

inline EisensteinInt operator-(const EisensteinInt& u) {
    return {detail::checked_sub(0, u.a), detail::checked_sub(0, u.b)};
}

/// Product in Z[omega], reduced with omega^2 = -1 - omega:
///   (a1 + b1 w)(a2 + b2 w) = (a1 a2 - b1 b2) + (a1 b2 + a2 b1 - b1 b2) w.
inline EisensteinInt eisenstein_mul(const EisensteinInt& u, const EisensteinInt& v) {
    using detail::checked_add;
    using detail::checked_mul;
    using detail::checked_sub;
    const std::int64_t aa = checked_mul(u.a, v.a);
    const std::int64_t bb = checked_mul(u.b, v.b);
    const std::int64_t ab = checked_mul(u.a, v.b);
    const std::int64_t ba = checked_mul(u.b, v.a);
    return {checked_sub(aa, bb), checked_sub(checked_add(ab, ba), bb)};
}

inline EisensteinInt operator*(const EisensteinInt& u, const EisensteinInt& v) {
    return eisenstein_mul(u, v);
}

/// Complex conjugate: conj(omega) = omega^2 = -1 - omega, hence
/// conj(a + b w) = (a - b) - b w.
inline EisensteinInt eisenstein_conj(const EisensteinInt& u) {
    return {detail::checked_sub(u.a, u.b), detail::checked_sub(0, u.b)};
}

/// Squared modulus |a + b w|^2 = a^2 - a b + b^2, a nonnegative integer.
inline std::int64_t eisenstein_norm(const EisensteinInt& u) {
    using detail::checked_add;
    using detail::checked_mul;
    using detail::checked_sub;
    return checked_add(checked_sub(checked_mul(u.a, u.a), checked_mul(u.a, u.b)),
                       checked_mul(u.b, u.b));
}

/// Numeric embedding with omega = -1/2 + i*sqrt(3)/2.
inline std::complex<double> to_complex(const EisensteinInt& u) {
    constexpr double half_sqrt3 = 0.86602540378443864676;
    return {static_cast<double>(u.a) - 0.5 * static_cast<double>(u.b),
            half_sqrt3 * static_cast<double>(u.b)};
}

/// Rendering such as "1", "-1+2w", "w", used in diagnostics.
inline std::string to_string(const EisensteinInt& u) {
    if (u.b == 0) return std::to_string(u.a);
    std::string s;
    if (u.a != 0) s += std::to_string(u.a);
    if (u.b > 0 && u.a != 0) s += "+";
    if (u.b == -1) s += "-";
    else if (u.b != 1) s += std::to_string(u.b);
    s += "w";
    return s;
}

}  // namespace kscert

#pragma once

#include <compare>
#include <cstdlib>
#include <string>

#include "escat/errors.hpp"

namespace escat {

// Angular momentum value stored as twice its value, so integer and
// half-integer momenta share one exact representation.  Everything in the
// para-H2 problem is integer, but the coupling routines accept half-integers.
class HalfInt {
public:
    constexpr HalfInt() = default;
    constexpr HalfInt(int integer_value) : twice_(2 * integer_value) {}  // NOLINT: implicit by design

    static constexpr HalfInt from_twice(int twice_value) {
        HalfInt h;
        h.twice_ = twice_value;
        return h;
    }

    constexpr int twice() const { return twice_; }
    constexpr bool is_integer() const { return twice_ % 2 == 0; }

    // Exact integer value; only valid for integer momenta.
    int as_int() const {
        if (!is_integer()) throw input_error("HalfInt: " + str() + " is not an integer");
        return twice_ / 2;
    }

    constexpr double value() const { return 0.5 * twice_; }

    std::string str() const {
        if (twice_ % 2 == 0) return std::to_string(twice_ / 2);
        return std::to_string(twice_) + "/2";
    }

    friend constexpr HalfInt operator+(HalfInt a, HalfInt b) { return from_twice(a.twice_ + b.twice_); }
    friend constexpr HalfInt operator-(HalfInt a, HalfInt b) { return from_twice(a.twice_ - b.twice_); }
    friend constexpr HalfInt operator-(HalfInt a) { return from_twice(-a.twice_); }
    constexpr auto operator<=>(const HalfInt&) const = default;

private:
    int twice_ = 0;
};

constexpr HalfInt abs(HalfInt a) { return HalfInt::from_twice(a.twice() < 0 ? -a.twice() : a.twice()); }

// |a-b| <= c <= a+b with matching integer/half-integer character.
constexpr bool triangle_ok(HalfInt a, HalfInt b, HalfInt c) {
    if ((a.twice() + b.twice() + c.twice()) % 2 != 0) return false;
    return abs(a - b) <= c && c <= a + b;
}

// A projection m is valid for magnitude j when |m| <= j and m has the same
// integer/half-integer character as j.
constexpr bool projection_ok(HalfInt j, HalfInt m) {
    if ((j.twice() - m.twice()) % 2 != 0) return false;
    return abs(m) <= j;
}

// Throws input_error on a malformed (j, m) pair: negative magnitude or
// projection parity/range violation.
inline void require_valid_jm(HalfInt j, HalfInt m, const char* what) {
    if (j.twice() < 0)
        throw input_error(std::string(what) + ": negative angular momentum magnitude " + j.str());
    if ((j.twice() - m.twice()) % 2 != 0)
        throw input_error(std::string(what) + ": projection " + m.str() +
                          " has wrong parity for magnitude " + j.str());
    if (abs(m) > j)
        throw input_error(std::string(what) + ": |projection| " + m.str() +
                          " exceeds magnitude " + j.str());
}

// (-1)^n for a HalfInt exponent that must be integer-valued.
inline int phase(HalfInt n) {
    if (!n.is_integer()) throw input_error("phase: (-1)^(" + n.str() + ") is not defined");
    return (n.twice() / 2) % 2 == 0 ? 1 : -1;
}

inline int phase(int n) { return n % 2 == 0 ? 1 : -1; }

}  // namespace escat

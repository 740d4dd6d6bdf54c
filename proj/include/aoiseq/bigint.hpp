#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>

namespace aoiseq {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

BigInt factorial(std::int64_t n);

/// C(n, k); zero when k < 0 or k > n.
BigInt binomial(std::int64_t n, std::int64_t k);

BigInt ipow(const BigInt& base, std::int64_t exponent);

double to_double(const Rational& value);
double to_double(const BigInt& value);

/// Parses "a/b", an integer, or a plain decimal ("0.14") into an exact rational.
Rational parse_rational(const std::string& text);

std::string to_string(const Rational& value);

/// Lifts an exact integer into the scalar type used by a templated sum.
template <class V>
V from_bigint(const BigInt& value)
{
    if constexpr (std::is_same_v<V, BigInt> || std::is_same_v<V, Rational>)
        return V(value);
    else
        return static_cast<V>(to_double(value));
}

} // namespace aoiseq

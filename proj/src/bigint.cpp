#include "aoiseq/bigint.hpp"
#include "aoiseq/error.hpp"

#include <string>

namespace aoiseq {

BigInt factorial(std::int64_t n)
{
    if (n < 0)
        throw Error(ErrorCode::InvalidArgument, "factorial of negative number");
    BigInt result = 1;
    for (std::int64_t i = 2; i <= n; ++i)
        result *= i;
    return result;
}

BigInt binomial(std::int64_t n, std::int64_t k)
{
    if (n < 0 || k < 0 || k > n)
        return 0;
    k = std::min(k, n - k);
    BigInt result = 1;
    for (std::int64_t i = 1; i <= k; ++i) {
        result *= n - k + i;
        result /= i;
    }
    return result;
}

BigInt ipow(const BigInt& base, std::int64_t exponent)
{
    if (exponent < 0)
        throw Error(ErrorCode::InvalidArgument, "negative exponent");
    BigInt result = 1;
    BigInt b = base;
    while (exponent > 0) {
        if (exponent & 1)
            result *= b;
        b *= b;
        exponent >>= 1;
    }
    return result;
}

double to_double(const Rational& value)
{
    return value.convert_to<double>();
}

double to_double(const BigInt& value)
{
    return value.convert_to<double>();
}

Rational parse_rational(const std::string& text)
{
    try {
        if (auto slash = text.find('/'); slash != std::string::npos) {
            BigInt num(text.substr(0, slash));
            BigInt den(text.substr(slash + 1));
            if (den == 0)
                throw Error(ErrorCode::ParseError, "zero denominator in '" + text + "'");
            return Rational(num, den);
        }
        if (auto dot = text.find('.'); dot != std::string::npos) {
            std::string digits = text.substr(0, dot) + text.substr(dot + 1);
            if (digits.empty() || digits == "-")
                throw Error(ErrorCode::ParseError, "bad number '" + text + "'");
            BigInt num(digits);
            BigInt den = ipow(BigInt(10), static_cast<std::int64_t>(text.size() - dot - 1));
            return Rational(num, den);
        }
        return Rational(BigInt(text));
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError, "bad number '" + text + "'");
    }
}

std::string to_string(const Rational& value)
{
    if (denominator(value) == 1)
        return numerator(value).str();
    return numerator(value).str() + "/" + denominator(value).str();
}

} // namespace aoiseq

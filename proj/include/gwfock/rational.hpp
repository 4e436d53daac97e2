#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gwfock {

// Exact arithmetic over Q. GMP-backed; values are always stored in canonical
// form (denominator > 0, gcd(|num|, den) = 1), which mpq maintains for all
// arithmetic results.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;

using MatQ = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;
using VecQ = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;

// Parses "num" or "num/den". mpq_set_str does not canonicalize, so we go
// through integer division, which does.
inline Rational parse_rational(std::string_view text)
{
    auto bad = [&] {
        return std::invalid_argument("not a rational: '" + std::string(text) + "'");
    };
    if (text.empty())
        throw bad();
    auto slash = text.find('/');
    try {
        if (slash == std::string_view::npos)
            return Rational(Integer(std::string(text)));
        Integer num{std::string(text.substr(0, slash))};
        Integer den{std::string(text.substr(slash + 1))};
        if (den == 0)
            throw bad();
        return Rational(num) / Rational(den);
    } catch (const std::runtime_error&) {
        throw bad();
    }
}

// "num" when integral, "num/den" otherwise (mpq's native format).
inline std::string to_string(const Rational& q) { return q.str(); }

inline bool is_integer(const Rational& q) { return denominator(q) == 1; }

inline Rational binomial(int n, int r)
{
    if (r < 0 || r > n)
        return Rational(0);
    Rational acc(1);
    for (int i = 0; i < r; ++i)
        acc *= Rational(n - i, i + 1);
    return acc;
}

inline Rational factorial(int n)
{
    Rational acc(1);
    for (int i = 2; i <= n; ++i)
        acc *= i;
    return acc;
}

// (2n-1)!! with the usual convention (-1)!! = 1.
inline Rational odd_double_factorial(int n)
{
    Rational acc(1);
    for (int i = 1; i <= n; ++i)
        acc *= 2 * i - 1;
    return acc;
}

} // namespace gwfock

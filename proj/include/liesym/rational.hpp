#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>

namespace liesym {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Int rat_num(const Rational &q) { return numerator(q); }
inline Int rat_den(const Rational &q) { return denominator(q); }

inline bool is_integer(const Rational &q) { return denominator(q) == 1; }

inline int sign_of(const Rational &q)
{
	return q < 0 ? -1 : (q > 0 ? 1 : 0);
}

/// Integer n-th root when exact; nullopt otherwise. Requires a >= 0, n >= 1.
std::optional<Int> exact_nth_root(const Int &a, unsigned n);

/// Floor of the n-th root of a non-negative integer.
Int nth_root_floor(const Int &a, unsigned n);

double to_double(const Rational &q);

std::string rational_to_string(const Rational &q);

} // namespace liesym

#include "liesym/rational.hpp"

#include <sstream>

namespace liesym {

Int nth_root_floor(const Int &a, unsigned n)
{
	if (a <= 0 || n == 0)
		return 0;
	if (n == 1 || a == 1)
		return a;
	// Newton iteration from an upper bound.
	Int x = a, y = (a + 1) / 2;
	while (y < x) {
		x = y;
		Int p = 1;
		for (unsigned i = 0; i + 1 < n; ++i)
			p *= x;
		y = ((n - 1) * x + a / p) / n;
	}
	return x;
}

std::optional<Int> exact_nth_root(const Int &a, unsigned n)
{
	if (a < 0)
		return std::nullopt;
	if (a == 0)
		return Int(0);
	Int r = nth_root_floor(a, n);
	Int p = 1;
	for (unsigned i = 0; i < n; ++i)
		p *= r;
	if (p == a)
		return r;
	return std::nullopt;
}

double to_double(const Rational &q)
{
	return q.convert_to<double>();
}

std::string rational_to_string(const Rational &q)
{
	std::ostringstream os;
	if (is_integer(q))
		os << numerator(q);
	else
		os << numerator(q) << "/" << denominator(q);
	return os.str();
}

} // namespace liesym

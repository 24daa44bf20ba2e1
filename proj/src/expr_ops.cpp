#include "expr_internal.hpp"

#include "liesym/error.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace liesym {

using detail::RatFun;
using detail::to_ratfun;

// ---- differentiation --------------------------------------------------------

Expr differentiate(const Expr &e, const Symbol &s)
{
	switch (e.kind()) {
	case Expr::Kind::Number:
		return Expr::number(0);
	case Expr::Kind::Symbol:
		return same_symbol(e.sym(), s) ? Expr::number(1) : Expr::number(0);
	case Expr::Kind::Add: {
		Expr acc = Expr::number(0);
		for (const Expr &k : e.children())
			acc = acc + differentiate(k, s);
		return acc;
	}
	case Expr::Kind::Mul: {
		Expr acc = Expr::number(0);
		const auto &kids = e.children();
		for (std::size_t i = 0; i < kids.size(); ++i) {
			Expr d = differentiate(kids[i], s);
			if (d.is_zero_literal())
				continue;
			Expr rest = d;
			for (std::size_t j = 0; j < kids.size(); ++j)
				if (j != i)
					rest = rest * kids[j];
			acc = acc + rest;
		}
		return acc;
	}
	case Expr::Kind::Pow: {
		Expr db = differentiate(e.arg(), s);
		if (db.is_zero_literal())
			return db;
		return Expr::number(e.exponent()) * Expr::pow(e.arg(), e.exponent() - 1) * db;
	}
	case Expr::Kind::Call: {
		Expr da = differentiate(e.arg(), s);
		if (da.is_zero_literal())
			return da;
		switch (e.func()) {
		case Func::Exp: return e * da;
		case Func::Log: return da / e.arg();
		case Func::Sin: return Expr::call(Func::Cos, e.arg()) * da;
		case Func::Cos: return -(Expr::call(Func::Sin, e.arg()) * da);
		}
	}
	}
	throw Error("internal: bad node in differentiate");
}

// ---- substitution -------------------------------------------------------------

static Expr subst_rec(const Expr &e, const SubstitutionMap &b)
{
	switch (e.kind()) {
	case Expr::Kind::Number:
		return e;
	case Expr::Kind::Symbol:
		for (const auto &[key, val] : b)
			if (same_symbol(key, e.sym()))
				return val;
		return e;
	case Expr::Kind::Add: {
		Expr acc = Expr::number(0);
		for (const Expr &k : e.children())
			acc = acc + subst_rec(k, b);
		return acc;
	}
	case Expr::Kind::Mul: {
		Expr acc = Expr::number(1);
		for (const Expr &k : e.children())
			acc = acc * subst_rec(k, b);
		return acc;
	}
	case Expr::Kind::Pow:
		return Expr::pow(subst_rec(e.arg(), b), e.exponent());
	case Expr::Kind::Call:
		return Expr::call(e.func(), subst_rec(e.arg(), b));
	}
	throw Error("internal: bad node in substitute");
}

Expr substitute(const Expr &e, const SubstitutionMap &bindings)
{
	if (bindings.empty())
		return e;
	return subst_rec(e, bindings);
}

Expr substitute(const Expr &e, const Symbol &s, const Expr &value)
{
	return substitute(e, SubstitutionMap{{s, value}});
}

// ---- collect on a basis ---------------------------------------------------------

static bool atom_involves(const detail::Atom &a, const Symbol &var)
{
	switch (a.kind) {
	case detail::Atom::Kind::Sym:
		return same_symbol(a.sym, var);
	case detail::Atom::Kind::Call:
	case detail::Atom::Kind::Root:
		return a.payload.contains(var);
	}
	return false;
}

static bool poly_involves(const detail::Poly &p, const Symbol &var)
{
	for (const detail::Atom &a : p.support())
		if (atom_involves(a, var))
			return true;
	return false;
}

CollectResult collect_on_basis(const Expr &e, const Symbol &var,
                               const std::vector<Expr> &basis)
{
	using namespace detail;
	CollectResult res;
	res.remainder = Expr::number(0);
	RatFun r = to_ratfun(e);
	if (poly_involves(r.den, var)) {
		res.remainder = e;
		return res;
	}
	std::vector<Poly> coeffs(basis.size());
	Poly rem;
	for (const Term &t : r.num.terms()) {
		Monomial var_part, free_part;
		for (const Factor &f : t.mono.factors)
			(atom_involves(f.atom, var) ? var_part : free_part).factors.push_back(f);
		Expr key = from_ratfun(
		    RatFun{Poly::from_terms({Term{var_part, Rational(1)}}), Poly::constant(1)});
		bool matched = false;
		for (std::size_t i = 0; i < basis.size(); ++i) {
			if (basis[i] == key) {
				coeffs[i] = coeffs[i] + Poly::from_terms({Term{free_part, t.coeff}});
				matched = true;
				break;
			}
		}
		if (!matched)
			rem = rem + Poly::from_terms({Term{t.mono, t.coeff}});
	}
	for (std::size_t i = 0; i < basis.size(); ++i) {
		if (coeffs[i].is_zero())
			continue;
		res.parts.emplace_back(basis[i],
		                       from_ratfun(normalize_ratfun(coeffs[i], r.den)));
	}
	res.remainder = from_ratfun(normalize_ratfun(rem, r.den));
	return res;
}

Expr numerator_of(const Expr &e)
{
	RatFun r = to_ratfun(e);
	return detail::from_ratfun(RatFun{r.num, detail::Poly::constant(1)});
}

Expr denominator_of(const Expr &e)
{
	RatFun r = to_ratfun(e);
	return detail::from_ratfun(RatFun{r.den, detail::Poly::constant(1)});
}

// ---- numeric evaluation -----------------------------------------------------------

NumericValue eval_numeric(const Expr &e, const Assignment &assign)
{
	switch (e.kind()) {
	case Expr::Kind::Number: {
		double v = to_double(e.value());
		return {v, std::fabs(v)};
	}
	case Expr::Kind::Symbol: {
		double v = assign(e.sym());
		return {v, std::fabs(v)};
	}
	case Expr::Kind::Add: {
		NumericValue acc{0.0, 0.0};
		for (const Expr &k : e.children()) {
			NumericValue kv = eval_numeric(k, assign);
			acc.value += kv.value;
			acc.scale += std::max(kv.scale, std::fabs(kv.value));
		}
		return acc;
	}
	case Expr::Kind::Mul: {
		NumericValue acc{1.0, 1.0};
		for (const Expr &k : e.children()) {
			NumericValue kv = eval_numeric(k, assign);
			acc.value *= kv.value;
			acc.scale *= std::max(kv.scale, std::fabs(kv.value));
		}
		return acc;
	}
	case Expr::Kind::Pow: {
		NumericValue base = eval_numeric(e.arg(), assign);
		double q = to_double(e.exponent());
		double v = std::pow(base.value, q);
		return {v, std::fabs(v)};
	}
	case Expr::Kind::Call: {
		NumericValue a = eval_numeric(e.arg(), assign);
		double v = 0;
		switch (e.func()) {
		case Func::Exp: v = std::exp(a.value); break;
		case Func::Log: v = a.value > 0 ? std::log(a.value)
		                                : std::numeric_limits<double>::quiet_NaN();
			break;
		case Func::Sin: v = std::sin(a.value); break;
		case Func::Cos: v = std::cos(a.value); break;
		}
		return {v, std::max(1.0, std::fabs(v))};
	}
	}
	throw Error("internal: bad node in eval");
}

namespace {
std::mt19937 &probe_rng()
{
	// fixed seed: verdicts must be reproducible run to run
	thread_local std::mt19937 rng(0x5eed1e5u);
	return rng;
}
} // namespace

std::optional<bool> numeric_zero_probe(const Expr &e, int points)
{
	auto &rng = probe_rng();
	std::uniform_int_distribution<int> num(2, 9), den(2, 9), sgn(0, 1);
	int valid = 0;
	bool all_zero = true;
	for (int attempt = 0; attempt < 40 && valid < points; ++attempt) {
		std::map<const SymbolData *, double> vals;
		Assignment assign = [&](const Symbol &s) {
			auto it = vals.find(s.get());
			if (it != vals.end())
				return it->second;
			double v = (sgn(rng) ? 1.0 : -1.0) * double(num(rng)) / double(den(rng));
			vals.emplace(s.get(), v);
			return v;
		};
		NumericValue nv = eval_numeric(e, assign);
		if (!std::isfinite(nv.value) || !std::isfinite(nv.scale))
			continue; // pole: resample, never decide from a pole
		++valid;
		if (std::fabs(nv.value) > 1e-8 * std::max(1.0, nv.scale))
			all_zero = false;
	}
	if (valid < points)
		return std::nullopt;
	return all_zero;
}

bool is_zero(const Expr &e)
{
	if (e.is_zero_literal())
		return true;
	if (e.kind() == Expr::Kind::Number)
		return false;
	std::optional<bool> probe = numeric_zero_probe(e);
	if (probe && *probe) {
		// The canonical form is nonzero yet the expression vanished at every
		// sample point: a kernel identity outside the supported rewrites
		// (e.g. sin^2 + cos^2 - 1). Surface it rather than guess.
		throw NumericDisagreementError(
		    "normalize() reports nonzero but the expression vanishes numerically: " +
		    e.str());
	}
	return false;
}

// ---- printing -----------------------------------------------------------------

namespace {

// precedence: 0 sum, 1 product, 2 power operand
void print_rec(std::ostringstream &os, const Expr &e, int prec);

bool negative_head(const Expr &t)
{
	if (t.kind() == Expr::Kind::Number)
		return t.value() < 0;
	if (t.kind() == Expr::Kind::Mul &&
	    t.children().front().kind() == Expr::Kind::Number)
		return t.children().front().value() < 0;
	return false;
}

Expr negated(const Expr &t) { return -t; }

void print_exponent(std::ostringstream &os, const Rational &q)
{
	if (is_integer(q) && q > 0) {
		os << "^" << rational_to_string(q);
	} else {
		os << "^(" << rational_to_string(q) << ")";
	}
}

void print_product(std::ostringstream &os, const Expr &e, int prec)
{
	std::vector<Expr> numf, denf;
	Rational coeff = 1;
	auto classify = [&](const Expr &k) {
		if (k.kind() == Expr::Kind::Number) {
			coeff *= k.value();
		} else if (k.kind() == Expr::Kind::Pow && k.exponent() < 0) {
			denf.push_back(Expr::pow(k.arg(), -k.exponent()));
		} else {
			numf.push_back(k);
		}
	};
	if (e.kind() == Expr::Kind::Mul) {
		for (const Expr &k : e.children())
			classify(k);
	} else {
		classify(e);
	}
	Int cn = rat_num(coeff), cd = rat_den(coeff);
	std::ostringstream num, den;
	bool first = true;
	if (cn != 1 && cn != -1) {
		num << (cn < 0 ? -cn : cn);
		first = false;
	} else if (numf.empty()) {
		num << 1;
		first = false;
	}
	for (const Expr &k : numf) {
		if (!first)
			num << "*";
		print_rec(num, k, 1);
		first = false;
	}
	int den_items = static_cast<int>(denf.size()) + (cd != 1 ? 1 : 0);
	if (cd != 1)
		den << cd;
	bool dfirst = cd == 1;
	for (const Expr &k : denf) {
		if (!dfirst)
			den << "*";
		print_rec(den, k, 1);
		dfirst = false;
	}
	bool neg = cn < 0;
	std::string body = num.str();
	if (den_items > 0)
		body += "/" + (den_items > 1 ? "(" + den.str() + ")" : den.str());
	bool needs_parens = prec >= 2 || (neg && prec >= 1);
	if (neg)
		body = "-" + body;
	if (needs_parens)
		os << "(" << body << ")";
	else
		os << body;
}

void print_rec(std::ostringstream &os, const Expr &e, int prec)
{
	switch (e.kind()) {
	case Expr::Kind::Number: {
		const Rational &q = e.value();
		bool wrap = (q < 0 && prec >= 1) || (!is_integer(q) && prec >= 1);
		if (wrap)
			os << "(" << rational_to_string(q) << ")";
		else
			os << rational_to_string(q);
		return;
	}
	case Expr::Kind::Symbol:
		os << e.sym()->name;
		return;
	case Expr::Kind::Call:
		os << func_name(e.func()) << "(";
		print_rec(os, e.arg(), 0);
		os << ")";
		return;
	case Expr::Kind::Pow: {
		if (e.exponent() < 0) {
			print_product(os, e, prec); // renders as 1/...
			return;
		}
		std::ostringstream base;
		print_rec(base, e.arg(), 2);
		os << base.str();
		print_exponent(os, e.exponent());
		return;
	}
	case Expr::Kind::Mul:
		print_product(os, e, prec);
		return;
	case Expr::Kind::Add: {
		bool wrap = prec >= 1;
		if (wrap)
			os << "(";
		bool first = true;
		for (const Expr &t : e.children()) {
			if (first) {
				print_rec(os, t, 0);
				first = false;
				continue;
			}
			if (negative_head(t)) {
				os << " - ";
				print_rec(os, negated(t), 1);
			} else {
				os << " + ";
				print_rec(os, t, 1);
			}
		}
		if (wrap)
			os << ")";
		return;
	}
	}
}

} // namespace

std::string Expr::str() const
{
	std::ostringstream os;
	print_rec(os, *this, 0);
	return os.str();
}

} // namespace liesym

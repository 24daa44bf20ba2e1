#pragma once

#include "liesym/expr.hpp"

#include <map>
#include <vector>

namespace liesym {

struct Expr::Node {
	Kind kind = Kind::Number;
	Rational num;            // Number
	Symbol symb;             // Symbol
	Func fn = Func::Exp;     // Call
	Rational expo;           // Pow exponent
	std::vector<Expr> kids;  // Call:1, Pow:1 (base), Mul/Add: >=2
};

namespace detail {

// ---- atoms ---------------------------------------------------------------
//
// The normal form treats an expression as a rational function over "atoms":
// plain symbols, kernel applications with canonical arguments, and
// fractional powers base^(1/den) of a canonical polynomial base. Kernels
// with distinct arguments are algebraically independent by design.

struct Atom {
	enum class Kind { Sym, Call, Root };
	Kind kind = Kind::Sym;
	Symbol sym;
	Func fn = Func::Exp;
	Expr payload; // Call argument, or Root base
	unsigned root_den = 1;
};

int compare_atoms(const Atom &a, const Atom &b);

struct Factor {
	Atom atom;
	long exp = 1; // > 0 in polynomials; Root factors keep 0 < exp < root_den
};

struct Monomial {
	std::vector<Factor> factors; // sorted ascending by atom
	bool empty() const { return factors.empty(); }
	Rational degree() const;
};

int compare_monomials(const Monomial &a, const Monomial &b);

struct Term {
	Monomial mono;
	Rational coeff;
};

class Poly {
  public:
	Poly() = default;
	static Poly constant(const Rational &c);
	static Poly from_terms(std::vector<Term> terms); // combines + sorts

	bool is_zero() const { return terms_.empty(); }
	bool is_constant() const;
	const Rational &constant_value() const; // requires is_constant and nonzero handled by caller
	const std::vector<Term> &terms() const { return terms_; }
	const Term &leading() const { return terms_.front(); }

	friend Poly operator+(const Poly &a, const Poly &b);
	friend Poly operator-(const Poly &a, const Poly &b);
	friend Poly operator*(const Poly &a, const Poly &b);
	Poly negate() const;
	Poly scaled(const Rational &c) const;
	Poly pow(unsigned n) const;

	/// poly == scale * primitive, primitive has coprime integer coefficients
	/// and positive leading coefficient.
	std::pair<Rational, Poly> integer_primitive() const;

	std::vector<Atom> support() const;

  private:
	std::vector<Term> terms_; // sorted descending by monomial order
};

Poly poly_gcd(const Poly &a, const Poly &b);
/// Quotient when b divides a exactly; otherwise (or past max_steps) nullopt.
std::optional<Poly> divide_exact(const Poly &a, const Poly &b,
                                 long max_steps = 50000);

struct RatFun {
	Poly num;
	Poly den = Poly::constant(1);
};

RatFun normalize_ratfun(Poly num, Poly den);
RatFun rf_add(const RatFun &a, const RatFun &b);
RatFun rf_mul(const RatFun &a, const RatFun &b);
RatFun rf_neg(const RatFun &a);
RatFun rf_pow(const RatFun &a, const Rational &q);

RatFun to_ratfun(const Expr &e);
Expr from_ratfun(const RatFun &r);

Expr atom_expr(const Atom &a);

/// -1, 0, +1 from the leading numerator coefficient.
int canonical_sign(const Expr &e);

/// Strict conversion for expressions known to be polynomial (den == 1).
Poly to_poly_strict(const Expr &e);

} // namespace detail
} // namespace liesym

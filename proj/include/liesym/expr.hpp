#pragma once

#include "liesym/rational.hpp"
#include "liesym/symbols.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace liesym {

enum class Func { Exp, Log, Sin, Cos };

const char *func_name(Func f);

/// Immutable symbolic expression in canonical form.
///
/// Every Expr produced by the public builders is already normalized: the
/// value is a single rational function numerator/denominator pair over the
/// "atoms" (symbols, transcendental kernels with canonical arguments, and
/// fractional powers), with rational constants in lowest terms, sums and
/// products flattened and sorted under the total atom order, and the kernel
/// rewrites exp(a+b) -> exp(a)*exp(b), exp(0) = 1, log(1) = 0 applied.
/// Two expressions representing the same rational-transcendental function
/// (kernels with distinct arguments counted as independent) compare equal.
class Expr {
  public:
	enum class Kind { Number, Symbol, Call, Pow, Mul, Add };

	Expr(); // zero

	static Expr number(const Rational &q);
	static Expr number(long n) { return number(Rational(n)); }
	static Expr symbol(const Symbol &s);
	static Expr call(Func f, const Expr &arg);
	static Expr pow(const Expr &base, const Rational &exponent);

	Kind kind() const;
	const Rational &value() const;   // Number
	const Symbol &sym() const;       // Symbol
	Func func() const;               // Call
	const Expr &arg() const;         // Call argument / Pow base
	const Rational &exponent() const; // Pow
	const std::vector<Expr> &children() const; // Mul / Add

	bool is_number() const { return kind() == Kind::Number; }
	bool is_zero_literal() const;
	bool is_one_literal() const;
	bool contains(const Symbol &s) const;
	/// All distinct symbols occurring anywhere in the tree (kernel arguments
	/// and fractional-power bases included), in canonical order.
	std::vector<Symbol> symbols() const;
	unsigned max_jet_order() const;

	static int compare(const Expr &a, const Expr &b);
	bool operator==(const Expr &o) const { return compare(*this, o) == 0; }
	bool operator!=(const Expr &o) const { return !(*this == o); }

	std::string str() const;

	friend Expr operator+(const Expr &a, const Expr &b);
	friend Expr operator-(const Expr &a, const Expr &b);
	friend Expr operator*(const Expr &a, const Expr &b);
	friend Expr operator/(const Expr &a, const Expr &b);
	friend Expr operator-(const Expr &a);

	struct Node;
	explicit Expr(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
	const Node &node() const { return *n_; }

  private:
	std::shared_ptr<const Node> n_;
};

inline Expr operator+(const Expr &a, long b) { return a + Expr::number(b); }
inline Expr operator-(const Expr &a, long b) { return a - Expr::number(b); }
inline Expr operator*(long a, const Expr &b) { return Expr::number(a) * b; }

/// Re-run canonicalization. Idempotent: normalize(e) == e for every Expr
/// built through the public interface.
Expr normalize(const Expr &e);

/// Partial derivative with respect to an explicit symbol; all other symbols
/// (including jet coordinates) are treated as independent.
Expr differentiate(const Expr &e, const Symbol &s);

/// Ordered so results are reproducible.
using SubstitutionMap = std::vector<std::pair<Symbol, Expr>>;

/// Simultaneous substitution (applied once, no re-scanning of the inserted
/// values) followed by normalization.
Expr substitute(const Expr &e, const SubstitutionMap &bindings);
Expr substitute(const Expr &e, const Symbol &s, const Expr &value);

/// True iff the canonical form is the zero constant. The verdict is
/// cross-checked by random rational evaluation at >= 5 points, which must
/// agree; a pole at a sample point triggers a resample.
bool is_zero(const Expr &e);

struct CollectResult {
	/// (basis element, coefficient) pairs with nonzero coefficients, each
	/// coefficient free of the collection variable.
	std::vector<std::pair<Expr, Expr>> parts;
	Expr remainder;
};

/// Decompose e = sum_r basis_r * coeff_r + remainder where each coeff_r does
/// not involve `var`. Anything not expressible that way goes to remainder.
CollectResult collect_on_basis(const Expr &e, const Symbol &var,
                               const std::vector<Expr> &basis);

/// Canonical numerator / denominator of the single-fraction normal form.
Expr numerator_of(const Expr &e);
Expr denominator_of(const Expr &e);

// ---- numeric evaluation -------------------------------------------------

struct NumericValue {
	double value = 0.0;
	/// Magnitude of the largest cancellation that produced `value`; used for
	/// relative zero tests.
	double scale = 0.0;
};

using Assignment = std::function<double(const Symbol &)>;

/// Evaluates with doubles; NaN marks a pole / domain violation.
NumericValue eval_numeric(const Expr &e, const Assignment &assign);

/// Checks |e| ~ 0 at `points` random rational points (resampling poles).
/// Returns nullopt when too few valid samples could be drawn.
std::optional<bool> numeric_zero_probe(const Expr &e, int points = 5);

} // namespace liesym

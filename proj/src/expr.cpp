#include "expr_internal.hpp"

#include "liesym/error.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>

namespace liesym {

const char *func_name(Func f)
{
	switch (f) {
	case Func::Exp: return "exp";
	case Func::Log: return "log";
	case Func::Sin: return "sin";
	case Func::Cos: return "cos";
	}
	return "?";
}

// ---- Expr basics ----------------------------------------------------------

static Expr make_node(Expr::Node n)
{
	return Expr(std::make_shared<const Expr::Node>(std::move(n)));
}

static const Expr &zero_expr()
{
	static const Expr z = [] {
		Expr::Node n;
		n.kind = Expr::Kind::Number;
		n.num = 0;
		return make_node(std::move(n));
	}();
	return z;
}

Expr::Expr() : n_(zero_expr().n_) {}

Expr Expr::number(const Rational &q)
{
	Node n;
	n.kind = Kind::Number;
	n.num = q;
	return make_node(std::move(n));
}

Expr Expr::symbol(const Symbol &s)
{
	if (!s)
		throw MalformedExpressionError("null symbol");
	Node n;
	n.kind = Kind::Symbol;
	n.symb = s;
	return make_node(std::move(n));
}

Expr::Kind Expr::kind() const { return n_->kind; }
const Rational &Expr::value() const { return n_->num; }
const Symbol &Expr::sym() const { return n_->symb; }
Func Expr::func() const { return n_->fn; }
const Expr &Expr::arg() const { return n_->kids.front(); }
const Rational &Expr::exponent() const { return n_->expo; }
const std::vector<Expr> &Expr::children() const { return n_->kids; }

bool Expr::is_zero_literal() const
{
	return n_->kind == Kind::Number && n_->num == 0;
}

bool Expr::is_one_literal() const
{
	return n_->kind == Kind::Number && n_->num == 1;
}

int Expr::compare(const Expr &a, const Expr &b)
{
	if (a.n_ == b.n_)
		return 0;
	auto rank = [](Kind k) {
		switch (k) {
		case Kind::Number: return 0;
		case Kind::Symbol: return 1;
		case Kind::Call: return 2;
		case Kind::Pow: return 3;
		case Kind::Mul: return 4;
		case Kind::Add: return 5;
		}
		return 6;
	};
	int ra = rank(a.kind()), rb = rank(b.kind());
	if (ra != rb)
		return ra < rb ? -1 : 1;
	switch (a.kind()) {
	case Kind::Number:
		return a.value() < b.value() ? -1 : (a.value() > b.value() ? 1 : 0);
	case Kind::Symbol:
		return compare_symbols(a.sym(), b.sym());
	case Kind::Call: {
		int fa = static_cast<int>(a.func()), fb = static_cast<int>(b.func());
		if (fa != fb)
			return fa < fb ? -1 : 1;
		return compare(a.arg(), b.arg());
	}
	case Kind::Pow: {
		if (int c = compare(a.arg(), b.arg()))
			return c;
		const Rational &ea = a.exponent(), &eb = b.exponent();
		return ea < eb ? -1 : (ea > eb ? 1 : 0);
	}
	case Kind::Mul:
	case Kind::Add: {
		const auto &ka = a.children(), &kb = b.children();
		std::size_t n = std::min(ka.size(), kb.size());
		for (std::size_t i = 0; i < n; ++i)
			if (int c = compare(ka[i], kb[i]))
				return c;
		if (ka.size() != kb.size())
			return ka.size() < kb.size() ? -1 : 1;
		return 0;
	}
	}
	return 0;
}

bool Expr::contains(const Symbol &s) const
{
	switch (kind()) {
	case Kind::Number: return false;
	case Kind::Symbol: return same_symbol(sym(), s);
	default:
		for (const Expr &k : children())
			if (k.contains(s))
				return true;
		return false;
	}
}

static void collect_symbols(const Expr &e, std::vector<Symbol> &out)
{
	switch (e.kind()) {
	case Expr::Kind::Number: return;
	case Expr::Kind::Symbol: out.push_back(e.sym()); return;
	default:
		for (const Expr &k : e.children())
			collect_symbols(k, out);
	}
}

std::vector<Symbol> Expr::symbols() const
{
	std::vector<Symbol> out;
	collect_symbols(*this, out);
	std::sort(out.begin(), out.end(),
	          [](const Symbol &a, const Symbol &b) { return compare_symbols(a, b) < 0; });
	out.erase(std::unique(out.begin(), out.end(),
	                      [](const Symbol &a, const Symbol &b) { return same_symbol(a, b); }),
	          out.end());
	return out;
}

unsigned Expr::max_jet_order() const
{
	unsigned m = 0;
	for (const Symbol &s : symbols())
		if (s->role == SymbolRole::Jet || s->role == SymbolRole::Dependent)
			m = std::max(m, s->index.order());
	return m;
}

namespace detail {

// ---- atom / monomial order ------------------------------------------------

int compare_atoms(const Atom &a, const Atom &b)
{
	auto rank = [](Atom::Kind k) {
		switch (k) {
		case Atom::Kind::Sym: return 0;
		case Atom::Kind::Call: return 1;
		case Atom::Kind::Root: return 2;
		}
		return 3;
	};
	int ra = rank(a.kind), rb = rank(b.kind);
	if (ra != rb)
		return ra < rb ? -1 : 1;
	switch (a.kind) {
	case Atom::Kind::Sym:
		return compare_symbols(a.sym, b.sym);
	case Atom::Kind::Call: {
		int fa = static_cast<int>(a.fn), fb = static_cast<int>(b.fn);
		if (fa != fb)
			return fa < fb ? -1 : 1;
		return Expr::compare(a.payload, b.payload);
	}
	case Atom::Kind::Root: {
		if (int c = Expr::compare(a.payload, b.payload))
			return c;
		if (a.root_den != b.root_den)
			return a.root_den < b.root_den ? -1 : 1;
		return 0;
	}
	}
	return 0;
}

Rational Monomial::degree() const
{
	Rational d = 0;
	for (const Factor &f : factors) {
		if (f.atom.kind == Atom::Kind::Root)
			d += Rational(f.exp, f.atom.root_den);
		else
			d += f.exp;
	}
	return d;
}

int compare_monomials(const Monomial &a, const Monomial &b)
{
	Rational da = a.degree(), db = b.degree();
	if (da != db)
		return da < db ? -1 : 1;
	// lex with the greatest atom most significant
	auto ia = a.factors.rbegin(), ib = b.factors.rbegin();
	while (ia != a.factors.rend() && ib != b.factors.rend()) {
		int c = compare_atoms(ia->atom, ib->atom);
		if (c != 0)
			return c; // greater atom present -> greater monomial
		Rational ea = ia->atom.kind == Atom::Kind::Root
		                  ? Rational(ia->exp, ia->atom.root_den)
		                  : Rational(ia->exp);
		Rational eb = ib->atom.kind == Atom::Kind::Root
		                  ? Rational(ib->exp, ib->atom.root_den)
		                  : Rational(ib->exp);
		if (ea != eb)
			return ea < eb ? -1 : 1;
		++ia;
		++ib;
	}
	if (ia != a.factors.rend())
		return 1;
	if (ib != b.factors.rend())
		return -1;
	return 0;
}

// ---- Poly ------------------------------------------------------------------

Poly Poly::constant(const Rational &c)
{
	Poly p;
	if (c != 0)
		p.terms_.push_back(Term{Monomial{}, c});
	return p;
}

Poly Poly::from_terms(std::vector<Term> terms)
{
	std::sort(terms.begin(), terms.end(), [](const Term &x, const Term &y) {
		return compare_monomials(x.mono, y.mono) > 0;
	});
	Poly p;
	for (auto &t : terms) {
		if (t.coeff == 0)
			continue;
		if (!p.terms_.empty() && compare_monomials(p.terms_.back().mono, t.mono) == 0) {
			p.terms_.back().coeff += t.coeff;
			if (p.terms_.back().coeff == 0)
				p.terms_.pop_back();
		} else {
			p.terms_.push_back(std::move(t));
		}
	}
	return p;
}

bool Poly::is_constant() const
{
	return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.empty());
}

const Rational &Poly::constant_value() const
{
	static const Rational zero(0);
	return terms_.empty() ? zero : terms_[0].coeff;
}

Poly operator+(const Poly &a, const Poly &b)
{
	std::vector<Term> merged;
	merged.reserve(a.terms_.size() + b.terms_.size());
	auto ia = a.terms_.begin(), ib = b.terms_.begin();
	while (ia != a.terms_.end() && ib != b.terms_.end()) {
		int c = compare_monomials(ia->mono, ib->mono);
		if (c > 0) {
			merged.push_back(*ia++);
		} else if (c < 0) {
			merged.push_back(*ib++);
		} else {
			Rational s = ia->coeff + ib->coeff;
			if (s != 0)
				merged.push_back(Term{ia->mono, s});
			++ia;
			++ib;
		}
	}
	merged.insert(merged.end(), ia, a.terms_.end());
	merged.insert(merged.end(), ib, b.terms_.end());
	Poly p;
	p.terms_ = std::move(merged);
	return p;
}

Poly Poly::negate() const
{
	Poly p = *this;
	for (auto &t : p.terms_)
		t.coeff = -t.coeff;
	return p;
}

Poly Poly::scaled(const Rational &c) const
{
	if (c == 0)
		return Poly();
	Poly p = *this;
	for (auto &t : p.terms_)
		t.coeff *= c;
	return p;
}

Poly operator-(const Poly &a, const Poly &b) { return a + b.negate(); }

// Product of two monomials. Usually a plain exponent merge; fractional
// powers of the same base are combined over a common root denominator and
// any integer part carries out as an extra polynomial factor.
static Poly expand_carry(const Expr &base, long power); // fwd

static Poly monomial_product(const Monomial &a, const Monomial &b, const Rational &coeff)
{
	std::vector<Factor> out;
	std::vector<std::pair<Expr, long>> carries;
	auto ia = a.factors.begin(), ib = b.factors.begin();
	auto push = [&](const Factor &f) { out.push_back(f); };
	auto combine = [&](const Factor &fa, const Factor &fb) {
		if (fa.atom.kind != Atom::Kind::Root) {
			Factor f = fa;
			f.exp += fb.exp;
			if (f.exp != 0)
				push(f);
			return;
		}
		// same base, possibly different root denominators
		long da = fa.atom.root_den, db = fb.atom.root_den;
		long l = std::lcm(da, db);
		long e = fa.exp * (l / da) + fb.exp * (l / db);
		long g = std::gcd(e < 0 ? -e : e, l);
		e /= g;
		l /= g;
		long whole = e / l;
		long rem = e % l;
		if (rem < 0) { // keep fractional part positive
			rem += l;
			whole -= 1;
		}
		if (whole != 0)
			carries.emplace_back(fa.atom.payload, whole);
		if (rem != 0 && l > 1) {
			Factor f;
			f.atom = fa.atom;
			f.atom.root_den = static_cast<unsigned>(l);
			f.exp = rem;
			push(f);
		} else if (rem != 0) {
			carries.emplace_back(fa.atom.payload, rem);
		}
	};
	auto same_root_base = [](const Atom &x, const Atom &y) {
		return x.kind == Atom::Kind::Root && y.kind == Atom::Kind::Root &&
		       Expr::compare(x.payload, y.payload) == 0;
	};
	while (ia != a.factors.end() && ib != b.factors.end()) {
		int c = compare_atoms(ia->atom, ib->atom);
		if (c == 0 || same_root_base(ia->atom, ib->atom)) {
			combine(*ia, *ib);
			++ia;
			++ib;
		} else if (c < 0) {
			push(*ia++);
		} else {
			push(*ib++);
		}
	}
	out.insert(out.end(), ia, a.factors.end());
	out.insert(out.end(), ib, b.factors.end());
	std::sort(out.begin(), out.end(), [](const Factor &x, const Factor &y) {
		return compare_atoms(x.atom, y.atom) < 0;
	});
	Poly r = Poly::from_terms({Term{Monomial{std::move(out)}, coeff}});
	for (const auto &[base, power] : carries)
		r = r * expand_carry(base, power);
	return r;
}

Poly operator*(const Poly &a, const Poly &b)
{
	Poly acc;
	for (const Term &ta : a.terms_)
		for (const Term &tb : b.terms_)
			acc = acc + monomial_product(ta.mono, tb.mono, ta.coeff * tb.coeff);
	return acc;
}

Poly Poly::pow(unsigned n) const
{
	Poly r = Poly::constant(1);
	Poly base = *this;
	while (n) {
		if (n & 1)
			r = r * base;
		base = base * base;
		n >>= 1;
	}
	return r;
}

static Poly expand_carry(const Expr &base, long power)
{
	// base is a canonical polynomial expression (Root payloads never carry a
	// denominator); negative powers cannot arise from carries because stored
	// root exponents are positive.
	if (power < 0)
		throw Error("internal: negative carry while folding fractional powers");
	return to_poly_strict(base).pow(static_cast<unsigned>(power));
}

std::pair<Rational, Poly> Poly::integer_primitive() const
{
	if (terms_.empty())
		return {Rational(1), Poly()};
	Int l = 1, g = 0;
	for (const Term &t : terms_)
		l = lcm(l, rat_den(t.coeff));
	for (const Term &t : terms_)
		g = gcd(g, Int(rat_num(t.coeff) * (l / rat_den(t.coeff))));
	Rational scale(g, l);
	if (terms_[0].coeff < 0)
		scale = -scale;
	Poly prim = scaled(Rational(1) / scale);
	return {scale, prim};
}

std::vector<Atom> Poly::support() const
{
	std::vector<Atom> atoms;
	for (const Term &t : terms_)
		for (const Factor &f : t.mono.factors)
			atoms.push_back(f.atom);
	std::sort(atoms.begin(), atoms.end(),
	          [](const Atom &x, const Atom &y) { return compare_atoms(x, y) < 0; });
	atoms.erase(std::unique(atoms.begin(), atoms.end(),
	                        [](const Atom &x, const Atom &y) {
		                        return compare_atoms(x, y) == 0;
	                        }),
	            atoms.end());
	return atoms;
}

// ---- recursive multivariate gcd --------------------------------------------

static long deg_wrt(const Poly &p, const Atom &x)
{
	long d = 0;
	for (const Term &t : p.terms())
		for (const Factor &f : t.mono.factors)
			if (compare_atoms(f.atom, x) == 0)
				d = std::max(d, f.exp);
	return d;
}

/// Coefficient of x^k in p, as a polynomial in the remaining atoms.
static Poly coeff_wrt(const Poly &p, const Atom &x, long k)
{
	std::vector<Term> terms;
	for (const Term &t : p.terms()) {
		long e = 0;
		Monomial rest;
		for (const Factor &f : t.mono.factors) {
			if (compare_atoms(f.atom, x) == 0)
				e = f.exp;
			else
				rest.factors.push_back(f);
		}
		if (e == k)
			terms.push_back(Term{std::move(rest), t.coeff});
	}
	return Poly::from_terms(std::move(terms));
}

static Poly mul_by_pow(const Poly &p, const Atom &x, long k)
{
	if (k == 0)
		return p;
	Monomial m;
	m.factors.push_back(Factor{x, k});
	Poly factor = Poly::from_terms({Term{m, Rational(1)}});
	return p * factor;
}

static Poly content_wrt(const Poly &p, const Atom &x)
{
	Poly c;
	long d = deg_wrt(p, x);
	for (long k = 0; k <= d; ++k) {
		Poly ck = coeff_wrt(p, x, k);
		if (ck.is_zero())
			continue;
		c = poly_gcd(c, ck);
		if (c.is_constant())
			return Poly::constant(1);
	}
	return c;
}

static Poly exact_or_throw(const Poly &a, const Poly &b)
{
	auto q = divide_exact(a, b);
	if (!q)
		throw Error("internal: expected exact polynomial division");
	return *q;
}

/// Pseudo-remainder of u by v with respect to the atom x.
static Poly prem(Poly u, const Poly &v, const Atom &x)
{
	long dv = deg_wrt(v, x);
	Poly lcv = coeff_wrt(v, x, dv);
	long guard = deg_wrt(u, x) - dv + 2;
	while (!u.is_zero()) {
		long du = deg_wrt(u, x);
		if (du < dv)
			break;
		Poly lcu = coeff_wrt(u, x, du);
		u = lcv * u - mul_by_pow(lcu * v, x, du - dv);
		if (--guard < 0)
			throw Error("internal: pseudo-division failed to terminate");
	}
	return u;
}

static Poly normalize_gcd_sign(Poly g)
{
	if (g.is_zero())
		return g;
	auto [scale, prim] = g.integer_primitive();
	(void)scale;
	return prim;
}

static bool monomial_divides(const Monomial &den, const Monomial &num, Monomial &quot);

/// Per-atom minimum exponents across all terms (the largest monomial dividing p).
static Monomial monomial_content(const Poly &p)
{
	Monomial m = p.terms().front().mono;
	for (const Term &t : p.terms()) {
		if (m.factors.empty())
			break;
		std::vector<Factor> kept;
		for (const Factor &f : m.factors) {
			for (const Factor &g : t.mono.factors) {
				if (compare_atoms(f.atom, g.atom) == 0) {
					kept.push_back(Factor{f.atom, std::min(f.exp, g.exp)});
					break;
				}
			}
		}
		m.factors = std::move(kept);
	}
	return m;
}

static Monomial monomial_gcd(const Monomial &a, const Monomial &b)
{
	Monomial m;
	for (const Factor &f : a.factors)
		for (const Factor &g : b.factors)
			if (compare_atoms(f.atom, g.atom) == 0)
				m.factors.push_back(Factor{f.atom, std::min(f.exp, g.exp)});
	return m;
}

static Poly divide_by_monomial(const Poly &p, const Monomial &m)
{
	if (m.factors.empty())
		return p;
	std::vector<Term> terms;
	for (const Term &t : p.terms()) {
		Monomial q;
		bool ok = monomial_divides(m, t.mono, q);
		if (!ok)
			throw Error("internal: monomial content division failed");
		terms.push_back(Term{std::move(q), t.coeff});
	}
	return Poly::from_terms(std::move(terms));
}

/// Dense Euclid over the rationals when both operands live in one atom.
static std::optional<Poly> univariate_gcd(const Poly &a, const Poly &b, const Atom &x)
{
	auto densify = [&](const Poly &p, std::vector<Rational> &out) {
		out.assign(static_cast<std::size_t>(deg_wrt(p, x)) + 1, Rational(0));
		for (const Term &t : p.terms()) {
			if (t.mono.factors.size() > 1)
				return false;
			long e = 0;
			if (!t.mono.factors.empty()) {
				if (compare_atoms(t.mono.factors[0].atom, x) != 0)
					return false;
				e = t.mono.factors[0].exp;
			}
			out[static_cast<std::size_t>(e)] = t.coeff;
		}
		return true;
	};
	std::vector<Rational> u, v;
	if (!densify(a, u) || !densify(b, v))
		return std::nullopt;
	auto deg = [](const std::vector<Rational> &p) {
		for (std::size_t i = p.size(); i-- > 0;)
			if (p[i] != 0)
				return static_cast<long>(i);
		return -1L;
	};
	while (deg(v) >= 0) {
		long du = deg(u), dv = deg(v);
		if (du < dv) {
			std::swap(u, v);
			continue;
		}
		Rational f = u[du] / v[dv];
		for (long i = 0; i <= dv; ++i)
			u[du - dv + i] -= f * v[i];
		// continue reducing u until deg(u) < deg(v)
		if (deg(u) >= dv)
			continue;
		std::swap(u, v);
	}
	long d = deg(u);
	std::vector<Term> terms;
	for (long i = 0; i <= d; ++i) {
		if (u[i] == 0)
			continue;
		Monomial m;
		if (i > 0)
			m.factors.push_back(Factor{x, i});
		terms.push_back(Term{std::move(m), u[i]});
	}
	return normalize_gcd_sign(Poly::from_terms(std::move(terms)));
}

Poly poly_gcd(const Poly &a, const Poly &b)
{
	if (a.is_zero())
		return normalize_gcd_sign(b);
	if (b.is_zero())
		return normalize_gcd_sign(a);
	if (a.is_constant() || b.is_constant())
		return Poly::constant(1);

	// strip monomial contents first; they are cheap and very common
	Monomial ma = monomial_content(a), mb = monomial_content(b);
	Monomial mg = monomial_gcd(ma, mb);
	Poly ra = divide_by_monomial(a, ma);
	Poly rb = divide_by_monomial(b, mb);
	Poly gm = Poly::from_terms({Term{mg, Rational(1)}});
	if (ra.is_constant() || rb.is_constant())
		return normalize_gcd_sign(gm);

	std::vector<Atom> sup = ra.support();
	std::vector<Atom> supb = rb.support();
	sup.insert(sup.end(), supb.begin(), supb.end());
	std::sort(sup.begin(), sup.end(),
	          [](const Atom &x, const Atom &y) { return compare_atoms(x, y) < 0; });
	sup.erase(std::unique(sup.begin(), sup.end(),
	                      [](const Atom &x, const Atom &y) {
		                      return compare_atoms(x, y) == 0;
	                      }),
	          sup.end());
	Atom main = sup.back();
	if (sup.size() == 1)
		if (auto g = univariate_gcd(ra, rb, main))
			return normalize_gcd_sign(gm * *g);

	long da = deg_wrt(ra, main), db = deg_wrt(rb, main);
	if (da == 0)
		return normalize_gcd_sign(gm * poly_gcd(ra, content_wrt(rb, main)));
	if (db == 0)
		return normalize_gcd_sign(gm * poly_gcd(content_wrt(ra, main), rb));

	Poly ca = content_wrt(ra, main), cb = content_wrt(rb, main);
	Poly u = exact_or_throw(ra, ca);
	Poly v = exact_or_throw(rb, cb);
	if (da < db)
		std::swap(u, v);
	// primitive PRS
	while (!v.is_zero()) {
		Poly r = prem(u, v, main);
		u = v;
		if (r.is_zero()) {
			v = Poly();
		} else {
			Poly cr = content_wrt(r, main);
			v = exact_or_throw(r, cr);
		}
	}
	Poly g_main = deg_wrt(u, main) > 0 ? exact_or_throw(u, content_wrt(u, main))
	                                   : Poly::constant(1);
	return normalize_gcd_sign(gm * poly_gcd(ca, cb) * g_main);
}

static bool monomial_divides(const Monomial &den, const Monomial &num, Monomial &quot)
{
	quot.factors.clear();
	auto in_ = num.factors.begin();
	for (const Factor &fd : den.factors) {
		while (in_ != num.factors.end() && compare_atoms(in_->atom, fd.atom) < 0)
			quot.factors.push_back(*in_++);
		if (in_ == num.factors.end() || compare_atoms(in_->atom, fd.atom) != 0)
			return false;
		if (in_->exp < fd.exp)
			return false;
		if (in_->exp > fd.exp)
			quot.factors.push_back(Factor{in_->atom, in_->exp - fd.exp});
		++in_;
	}
	quot.factors.insert(quot.factors.end(), in_, num.factors.end());
	return true;
}

std::optional<Poly> divide_exact(const Poly &a, const Poly &b, long max_steps)
{
	if (b.is_zero())
		return std::nullopt;
	if (b.is_constant())
		return a.scaled(Rational(1) / b.constant_value());
	Poly rem = a;
	Poly quot;
	long guard = max_steps;
	while (!rem.is_zero()) {
		Monomial q;
		if (!monomial_divides(b.leading().mono, rem.leading().mono, q))
			return std::nullopt;
		Rational c = rem.leading().coeff / b.leading().coeff;
		Poly qt = Poly::from_terms({Term{q, c}});
		quot = quot + qt;
		rem = rem - qt * b;
		if (--guard < 0)
			return std::nullopt;
	}
	return quot;
}

// ---- rational functions -----------------------------------------------------

RatFun normalize_ratfun(Poly num, Poly den)
{
	if (den.is_zero())
		throw DivisionByZeroError("division by an identically zero expression");
	if (num.is_zero())
		return RatFun{Poly(), Poly::constant(1)};
	if (!den.is_constant()) {
		Poly g = poly_gcd(num, den);
		if (!g.is_constant() || g.constant_value() != 1) {
			num = exact_or_throw(num, g);
			den = exact_or_throw(den, g);
		}
	}
	auto [scale, prim] = den.integer_primitive();
	return RatFun{num.scaled(Rational(1) / scale), prim};
}

RatFun rf_add(const RatFun &a, const RatFun &b)
{
	return normalize_ratfun(a.num * b.den + b.num * a.den, a.den * b.den);
}

RatFun rf_mul(const RatFun &a, const RatFun &b)
{
	return normalize_ratfun(a.num * b.num, a.den * b.den);
}

RatFun rf_neg(const RatFun &a) { return RatFun{a.num.negate(), a.den}; }

static RatFun rf_one() { return RatFun{Poly::constant(1), Poly::constant(1)}; }

static RatFun atom_ratfun(Atom a, long exp = 1);

// fractional power of a single polynomial; q = p/d in lowest terms, d >= 2
static RatFun poly_fracpow(const Poly &P, const Rational &q);

RatFun rf_pow(const RatFun &a, const Rational &q)
{
	if (q == 0)
		return rf_one();
	if (q == 1)
		return a;
	if (is_integer(q)) {
		Int n = rat_num(q);
		bool neg = n < 0;
		unsigned k = static_cast<unsigned>(neg ? -n : n);
		Poly pn = a.num.pow(k), pd = a.den.pow(k);
		if (neg)
			return normalize_ratfun(std::move(pd), std::move(pn));
		return normalize_ratfun(std::move(pn), std::move(pd));
	}
	RatFun rn = poly_fracpow(a.num, q);
	RatFun rd = poly_fracpow(a.den, q);
	return rf_mul(rn, rf_pow(rd, Rational(-1)));
}

Expr atom_expr(const Atom &a)
{
	switch (a.kind) {
	case Atom::Kind::Sym:
		return Expr::symbol(a.sym);
	case Atom::Kind::Call: {
		Expr::Node n;
		n.kind = Expr::Kind::Call;
		n.fn = a.fn;
		n.kids = {a.payload};
		return Expr(std::make_shared<const Expr::Node>(std::move(n)));
	}
	case Atom::Kind::Root: {
		Expr::Node n;
		n.kind = Expr::Kind::Pow;
		n.expo = Rational(1, a.root_den);
		n.kids = {a.payload};
		return Expr(std::make_shared<const Expr::Node>(std::move(n)));
	}
	}
	throw Error("internal: bad atom");
}

// c^(p/d) for rational c with partial exact-root extraction
static RatFun rational_fracpow(const Rational &c, long p, unsigned d)
{
	if (c == 0)
		return RatFun{Poly(), Poly::constant(1)};
	bool negbase = c < 0;
	Rational abs = negbase ? -c : c;
	if (negbase && d % 2 == 1) {
		RatFun r = rational_fracpow(abs, p, d);
		if (p % 2 != 0)
			r.num = r.num.negate();
		return r;
	}
	// exact roots of numerator and denominator?
	auto rn = exact_nth_root(rat_num(abs), d);
	auto rd = exact_nth_root(rat_den(abs), d);
	if (rn && rd && !negbase) {
		Rational root(*rn, *rd);
		Rational pw = 1;
		for (long i = 0; i < (p < 0 ? -p : p); ++i)
			pw *= root;
		if (p < 0)
			pw = Rational(1) / pw;
		return RatFun{Poly::constant(pw), Poly::constant(1)};
	}
	long whole = p / static_cast<long>(d);
	long rem = p % static_cast<long>(d);
	if (rem < 0) {
		rem += d;
		whole -= 1;
	}
	Rational base_pow = 1;
	for (long i = 0; i < (whole < 0 ? -whole : whole); ++i)
		base_pow *= c;
	if (whole < 0)
		base_pow = Rational(1) / base_pow;
	RatFun r{Poly::constant(base_pow), Poly::constant(1)};
	if (rem != 0) {
		Atom at;
		at.kind = Atom::Kind::Root;
		at.payload = Expr::number(c);
		at.root_den = d;
		Monomial m;
		m.factors.push_back(Factor{at, rem});
		r = rf_mul(r, RatFun{Poly::from_terms({Term{m, Rational(1)}}), Poly::constant(1)});
	}
	return r;
}

/// base^q for a non-product base (Symbol, Call, Number, or polynomial sum),
/// built directly so the fractional-power path cannot recurse into itself.
static RatFun base_pow(const Expr &base, const Rational &q)
{
	if (q == 0)
		return rf_one();
	if (base.kind() == Expr::Kind::Number)
		return is_integer(q)
		           ? rf_pow(RatFun{Poly::constant(base.value()), Poly::constant(1)}, q)
		           : rational_fracpow(base.value(),
		                              rat_num(q).convert_to<long>(),
		                              static_cast<unsigned>(rat_den(q)));
	if (is_integer(q)) {
		if (base.kind() == Expr::Kind::Symbol || base.kind() == Expr::Kind::Call) {
			Atom at;
			if (base.kind() == Expr::Kind::Symbol) {
				at.kind = Atom::Kind::Sym;
				at.sym = base.sym();
			} else {
				at.kind = Atom::Kind::Call;
				at.fn = base.func();
				at.payload = base.arg();
			}
			Int n = rat_num(q);
			long e = n.convert_to<long>();
			RatFun r = atom_ratfun(at, e < 0 ? -e : e);
			return e < 0 ? normalize_ratfun(r.den, r.num) : r;
		}
		return rf_pow(RatFun{to_poly_strict(base), Poly::constant(1)}, q);
	}
	long p = rat_num(q).convert_to<long>();
	long d = rat_den(q).convert_to<long>();
	long whole = p / d;
	long rem = p % d;
	if (rem < 0) {
		rem += d;
		whole -= 1;
	}
	RatFun r = base_pow(base, Rational(whole));
	Atom at;
	at.kind = Atom::Kind::Root;
	at.payload = base;
	at.root_den = static_cast<unsigned>(d);
	Monomial m;
	m.factors.push_back(Factor{at, rem});
	return rf_mul(r, RatFun{Poly::from_terms({Term{m, Rational(1)}}), Poly::constant(1)});
}

static RatFun factor_fracpow(const Factor &f, const Rational &q)
{
	// (atom^exp)^q: combine semantic exponents
	Rational sem = f.atom.kind == Atom::Kind::Root
	                   ? Rational(f.exp, f.atom.root_den)
	                   : Rational(f.exp);
	Rational total = sem * q;
	Expr base = f.atom.kind == Atom::Kind::Root ? f.atom.payload : atom_expr(f.atom);
	return base_pow(base, total);
}

static RatFun poly_fracpow(const Poly &P, const Rational &q)
{
	Int pn = rat_num(q);
	unsigned d = static_cast<unsigned>(rat_den(q));
	long p = pn.convert_to<long>();
	if (P.is_zero()) {
		if (p < 0)
			throw DivisionByZeroError("zero raised to a negative power");
		return RatFun{Poly(), Poly::constant(1)};
	}
	if (P.is_constant())
		return rational_fracpow(P.constant_value(), p, d);
	if (P.terms().size() == 1) {
		const Term &t = P.terms()[0];
		RatFun r = rational_fracpow(t.coeff, p, d);
		for (const Factor &f : t.mono.factors)
			r = rf_mul(r, factor_fracpow(f, q));
		return r;
	}
	// sum base: pull out integer content, keep primitive part under the root
	auto [scale, prim] = P.integer_primitive();
	RatFun r = rational_fracpow(scale, p, d);
	long whole = p / static_cast<long>(d);
	long rem = p % static_cast<long>(d);
	if (rem < 0) {
		rem += d;
		whole -= 1;
	}
	if (whole != 0)
		r = rf_mul(r, rf_pow(RatFun{prim, Poly::constant(1)}, Rational(whole)));
	if (rem != 0) {
		Atom at;
		at.kind = Atom::Kind::Root;
		at.payload = from_ratfun(RatFun{prim, Poly::constant(1)});
		at.root_den = d;
		Monomial m;
		m.factors.push_back(Factor{at, rem});
		r = rf_mul(r, RatFun{Poly::from_terms({Term{m, Rational(1)}}), Poly::constant(1)});
	}
	return r;
}

// ---- kernel applications ----------------------------------------------------

int canonical_sign(const Expr &e)
{
	RatFun r = to_ratfun(e);
	if (r.num.is_zero())
		return 0;
	return r.num.leading().coeff < 0 ? -1 : 1;
}

static RatFun atom_ratfun(Atom a, long exp)
{
	Monomial m;
	m.factors.push_back(Factor{std::move(a), exp});
	return RatFun{Poly::from_terms({Term{m, Rational(1)}}), Poly::constant(1)};
}

static RatFun make_call(Func fn, const Expr &arg);

/// exp of a single-term-over-denominator piece.
static RatFun exp_piece(const Term &t, const Poly &den)
{
	// rational coefficient n/d is pulled out so exp arguments carry content
	// 1/d; the numerator becomes the power of the atom.
	Rational c = t.coeff;
	Int nn = rat_num(c);
	Int dd = rat_den(c);
	long n = nn.convert_to<long>();
	// exp(q * log Y) -> Y^q
	if (den.is_constant() && den.constant_value() == 1 &&
	    t.mono.factors.size() == 1 && t.mono.factors[0].exp == 1 &&
	    t.mono.factors[0].atom.kind == Atom::Kind::Call &&
	    t.mono.factors[0].atom.fn == Func::Log) {
		return to_ratfun(Expr::pow(t.mono.factors[0].atom.payload, c));
	}
	Term unit{t.mono, Rational(Int(1), dd)};
	RatFun payload_rf = normalize_ratfun(Poly::from_terms({unit}), den);
	Expr payload = from_ratfun(payload_rf);
	Atom at;
	at.kind = Atom::Kind::Call;
	at.fn = Func::Exp;
	at.payload = payload;
	bool neg = n < 0;
	RatFun r = atom_ratfun(at, neg ? -n : n);
	if (neg)
		return normalize_ratfun(r.den, r.num);
	return r;
}

static RatFun make_call(Func fn, const Expr &arg)
{
	RatFun a = to_ratfun(arg);
	switch (fn) {
	case Func::Exp: {
		if (a.num.is_zero())
			return rf_one();
		RatFun r = rf_one();
		for (const Term &t : a.num.terms())
			r = rf_mul(r, exp_piece(t, a.den));
		return r;
	}
	case Func::Log: {
		Expr ac = from_ratfun(a);
		if (ac.is_one_literal())
			return RatFun{Poly(), Poly::constant(1)};
		if (ac.kind() == Expr::Kind::Call && ac.func() == Func::Exp)
			return to_ratfun(ac.arg()); // log(exp(b)) = b
		Atom at;
		at.kind = Atom::Kind::Call;
		at.fn = Func::Log;
		at.payload = ac;
		return atom_ratfun(at);
	}
	case Func::Sin:
	case Func::Cos: {
		Expr ac = from_ratfun(a);
		if (ac.is_zero_literal())
			return fn == Func::Sin ? RatFun{Poly(), Poly::constant(1)} : rf_one();
		bool flip = canonical_sign(ac) < 0;
		if (flip)
			ac = from_ratfun(rf_neg(to_ratfun(ac)));
		Atom at;
		at.kind = Atom::Kind::Call;
		at.fn = fn;
		at.payload = ac;
		RatFun r = atom_ratfun(at);
		if (fn == Func::Sin && flip)
			return rf_neg(r);
		return r;
	}
	}
	throw Error("internal: bad function");
}

// ---- tree <-> rational function ---------------------------------------------

RatFun to_ratfun(const Expr &e)
{
	switch (e.kind()) {
	case Expr::Kind::Number:
		return RatFun{Poly::constant(e.value()), Poly::constant(1)};
	case Expr::Kind::Symbol: {
		Atom a;
		a.kind = Atom::Kind::Sym;
		a.sym = e.sym();
		return atom_ratfun(a);
	}
	case Expr::Kind::Call:
		return make_call(e.func(), e.arg());
	case Expr::Kind::Pow:
		return rf_pow(to_ratfun(e.arg()), e.exponent());
	case Expr::Kind::Mul: {
		RatFun r = rf_one();
		for (const Expr &k : e.children())
			r = rf_mul(r, to_ratfun(k));
		return r;
	}
	case Expr::Kind::Add: {
		RatFun r{Poly(), Poly::constant(1)};
		for (const Expr &k : e.children())
			r = rf_add(r, to_ratfun(k));
		return r;
	}
	}
	throw Error("internal: bad node");
}

static Expr pow_node(const Expr &base, const Rational &q)
{
	if (q == 1)
		return base;
	Expr::Node n;
	n.kind = Expr::Kind::Pow;
	n.expo = q;
	n.kids = {base};
	return Expr(std::make_shared<const Expr::Node>(std::move(n)));
}

static Expr factor_expr(const Factor &f, bool negate_exp)
{
	if (f.atom.kind == Atom::Kind::Root) {
		Rational q(f.exp, f.atom.root_den);
		return pow_node(f.atom.payload, negate_exp ? -q : q);
	}
	Rational q(f.exp);
	return pow_node(atom_expr(f.atom), negate_exp ? -q : q);
}

static Expr poly_expr(const Poly &p); // fwd

static Expr term_expr(const Term &t, const std::vector<Factor> &den_factors,
                      const Expr *den_sum)
{
	std::vector<Expr> kids;
	Rational c = t.coeff;
	std::size_t nf = t.mono.factors.size() + den_factors.size() + (den_sum ? 1 : 0);
	if (c != 1 || nf == 0)
		kids.push_back(Expr::number(c));
	// merge numerator and denominator factors by atom order
	auto in_ = t.mono.factors.begin();
	auto id = den_factors.begin();
	while (in_ != t.mono.factors.end() || id != den_factors.end()) {
		if (id == den_factors.end() ||
		    (in_ != t.mono.factors.end() && compare_atoms(in_->atom, id->atom) < 0))
			kids.push_back(factor_expr(*in_++, false));
		else
			kids.push_back(factor_expr(*id++, true));
	}
	if (den_sum)
		kids.push_back(pow_node(*den_sum, Rational(-1)));
	if (kids.size() == 1)
		return kids[0];
	Expr::Node n;
	n.kind = Expr::Kind::Mul;
	n.kids = std::move(kids);
	return Expr(std::make_shared<const Expr::Node>(std::move(n)));
}

static Expr poly_expr(const Poly &p)
{
	if (p.is_zero())
		return Expr::number(0);
	std::vector<Expr> terms;
	for (const Term &t : p.terms())
		terms.push_back(term_expr(t, {}, nullptr));
	if (terms.size() == 1)
		return terms[0];
	Expr::Node n;
	n.kind = Expr::Kind::Add;
	n.kids = std::move(terms);
	return Expr(std::make_shared<const Expr::Node>(std::move(n)));
}

Expr from_ratfun(const RatFun &r)
{
	if (r.num.is_zero())
		return Expr::number(0);
	bool den_one = r.den.is_constant() && r.den.constant_value() == 1;
	if (den_one)
		return poly_expr(r.num);

	if (r.den.terms().size() == 1) {
		// monomial denominator: negative-exponent factors
		const Term &dt = r.den.terms()[0];
		// an integer-primitive single term has coefficient 1
		if (r.num.terms().size() == 1)
			return term_expr(r.num.terms()[0], dt.mono.factors, nullptr);
		std::vector<Expr> kids;
		kids.push_back(poly_expr(r.num));
		for (const Factor &f : dt.mono.factors)
			kids.push_back(factor_expr(f, true));
		Expr::Node n;
		n.kind = Expr::Kind::Mul;
		n.kids = std::move(kids);
		return Expr(std::make_shared<const Expr::Node>(std::move(n)));
	}
	Expr den_sum = poly_expr(r.den);
	if (r.num.terms().size() == 1)
		return term_expr(r.num.terms()[0], {}, &den_sum);
	std::vector<Expr> kids;
	kids.push_back(poly_expr(r.num));
	kids.push_back(pow_node(den_sum, Rational(-1)));
	Expr::Node n;
	n.kind = Expr::Kind::Mul;
	n.kids = std::move(kids);
	return Expr(std::make_shared<const Expr::Node>(std::move(n)));
}

Poly to_poly_strict(const Expr &e)
{
	RatFun r = to_ratfun(e);
	if (!(r.den.is_constant() && r.den.constant_value() == 1))
		throw Error("internal: expected a polynomial expression");
	return r.num;
}

} // namespace detail

// ---- public builders --------------------------------------------------------

using detail::from_ratfun;
using detail::rf_add;
using detail::rf_mul;
using detail::rf_neg;
using detail::rf_pow;
using detail::to_ratfun;

Expr operator+(const Expr &a, const Expr &b)
{
	return from_ratfun(rf_add(to_ratfun(a), to_ratfun(b)));
}

Expr operator-(const Expr &a, const Expr &b)
{
	return from_ratfun(rf_add(to_ratfun(a), rf_neg(to_ratfun(b))));
}

Expr operator*(const Expr &a, const Expr &b)
{
	return from_ratfun(rf_mul(to_ratfun(a), to_ratfun(b)));
}

Expr operator/(const Expr &a, const Expr &b)
{
	return from_ratfun(rf_mul(to_ratfun(a), rf_pow(to_ratfun(b), Rational(-1))));
}

Expr operator-(const Expr &a) { return from_ratfun(rf_neg(to_ratfun(a))); }

Expr Expr::pow(const Expr &base, const Rational &exponent)
{
	return from_ratfun(rf_pow(to_ratfun(base), exponent));
}

Expr Expr::call(Func f, const Expr &arg)
{
	return from_ratfun(detail::make_call(f, arg));
}

Expr normalize(const Expr &e) { return from_ratfun(to_ratfun(e)); }

} // namespace liesym

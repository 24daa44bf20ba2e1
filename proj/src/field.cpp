#include "liesym/field.hpp"

#include "liesym/error.hpp"

namespace liesym {

VectorField::VectorField(const JetContext &ctx, std::vector<Expr> xis,
                         std::vector<Expr> phis)
    : ctx_(ctx), xis_(std::move(xis)), phis_(std::move(phis))
{
	if (xis_.size() != ctx.independents().size() ||
	    phis_.size() != ctx.dependents().size())
		throw MalformedExpressionError("vector field component count mismatch");
	auto check_point_function = [](const Expr &e, const char *what) {
		for (const Symbol &s : e.symbols())
			if (s->role == SymbolRole::Jet && s->index.order() >= 1)
				throw MalformedExpressionError(
				    std::string(what) +
				    " may not contain jet symbols of order >= 1 (got " +
				    s->name + ")");
	};
	for (const Expr &e : xis_) {
		check_point_function(e, "xi");
		for (const Symbol &s : e.symbols())
			if (s->role == SymbolRole::Dependent)
				projectable_ = false;
	}
	for (const Expr &e : phis_)
		check_point_function(e, "phi");
}

Expr VectorField::apply_point(const Expr &f) const
{
	Expr acc = Expr::number(0);
	for (std::size_t i = 0; i < xis_.size(); ++i)
		acc = acc + xis_[i] * differentiate(f, ctx_.independents()[i]);
	for (std::size_t a = 0; a < phis_.size(); ++a)
		acc = acc + phis_[a] * differentiate(f, ctx_.dependents()[a]);
	return acc;
}

Characteristic evolutionary_characteristic(const VectorField &X, const JetContext &ctx)
{
	Characteristic q;
	for (std::size_t a = 0; a < ctx.dependents().size(); ++a) {
		Expr c = X.phi(a);
		for (std::size_t i = 0; i < ctx.independents().size(); ++i)
			c = c - X.xi(i) * Expr::symbol(ctx.jet(a, MultiIndex(ctx.independents().size()).plus(i)));
		q.components.push_back(c);
	}
	return q;
}

ProlongedField::ProlongedField(const VectorField &X, unsigned order)
    : X_(X), order_(0)
{
	const JetContext &ctx = X_.context();
	for (std::size_t a = 0; a < ctx.dependents().size(); ++a)
		coeff_.emplace(ctx.dependents()[a]->name, X_.phi(a));
	extend_to(order);
}

void ProlongedField::extend_to(unsigned order) const
{
	const JetContext &ctx = X_.context();
	std::size_t p = ctx.independents().size();
	// D_i xi_k, shared across coefficients
	std::vector<std::vector<Expr>> dxi(p, std::vector<Expr>(p));
	for (std::size_t i = 0; i < p; ++i)
		for (std::size_t k = 0; k < p; ++k)
			dxi[i][k] = total_derivative(X_.xi(k), i, ctx);
	for (unsigned o = order_ + 1; o <= order; ++o) {
		for (std::size_t a = 0; a < ctx.dependents().size(); ++a) {
			for (const Symbol &s : ctx.jet_symbols(o)) {
				if (s->index.order() != o ||
				    s->dep_index != static_cast<int>(a))
					continue;
				// walk down along the first nonzero direction
				std::size_t i = 0;
				while (s->index[i] == 0)
					++i;
				MultiIndex J = s->index;
				MultiIndex Jm(J.counts());
				{
					auto counts = J.counts();
					counts[i] -= 1;
					Jm = MultiIndex(counts);
				}
				Symbol prev = ctx.jet(a, Jm);
				Expr c = total_derivative(coeff_.at(prev->name), i, ctx);
				for (std::size_t k = 0; k < p; ++k) {
					if (dxi[i][k].is_zero_literal())
						continue;
					c = c - dxi[i][k] * Expr::symbol(ctx.jet(a, Jm.plus(k)));
				}
				coeff_.emplace(s->name, c);
			}
		}
	}
	order_ = std::max(order_, order);
}

Expr ProlongedField::coefficient(std::size_t dep_index, const MultiIndex &J) const
{
	if (J.order() > order_)
		extend_to(J.order());
	return coeff_.at(X_.context().jet(dep_index, J)->name);
}

ProlongedField prolong(const VectorField &X, unsigned order, const JetContext &ctx)
{
	(void)ctx;
	if (order < 1)
		throw MalformedExpressionError("prolongation order must be >= 1");
	return ProlongedField(X, order);
}

Expr apply_prolonged(const ProlongedField &Xstar, const Expr &e)
{
	const VectorField &X = Xstar.base();
	const JetContext &ctx = X.context();
	Expr acc = Expr::number(0);
	for (std::size_t i = 0; i < ctx.independents().size(); ++i) {
		Expr d = differentiate(e, ctx.independents()[i]);
		if (!d.is_zero_literal())
			acc = acc + X.xi(i) * d;
	}
	for (const Symbol &s : e.symbols()) {
		if (s->role != SymbolRole::Dependent && s->role != SymbolRole::Jet)
			continue;
		if (s->dep_index < 0)
			continue;
		Expr d = differentiate(e, s);
		if (d.is_zero_literal())
			continue;
		acc = acc + Xstar.coefficient(static_cast<std::size_t>(s->dep_index), s->index) * d;
	}
	return acc;
}

Expr apply_prolonged(const VectorField &X, const Expr &e)
{
	ProlongedField pf(X, std::max(1u, e.max_jet_order()));
	return apply_prolonged(pf, e);
}

} // namespace liesym

#include "liesym/classify.hpp"

#include "liesym/error.hpp"

namespace liesym {

PdeProblem::PdeProblem(const JetContext &ctx, std::vector<NamedEquation> equations,
                       unsigned depth)
    : ctx_(ctx), equations_(std::move(equations)), depth_(depth), order_(0)
{
	if (equations_.empty())
		throw MalformedExpressionError("a problem needs at least one equation");
	for (const auto &eq : equations_) {
		if (eq.expr.is_zero_literal())
			throw MalformedExpressionError("equation '" + eq.name +
			                               "' normalizes to zero");
		order_ = std::max(order_, eq.expr.max_jet_order());
	}
}

PdeProblem PdeProblem::with_depth(unsigned depth) const
{
	PdeProblem p = *this;
	p.depth_ = depth;
	return p;
}

const char *verdict_name(Verdict v)
{
	switch (v) {
	case Verdict::Invariance: return "invariance";
	case Verdict::Exact: return "exact";
	case Verdict::StandardCS: return "standard-cs";
	case Verdict::WeakCSCandidate: return "weak-cs-candidate";
	case Verdict::WeakCSCertified: return "weak-cs-certified";
	case Verdict::PartialSymmetryCandidate: return "partial-symmetry-candidate";
	case Verdict::PartialSymmetryCertified: return "partial-symmetry-certified";
	case Verdict::Undetermined: return "undetermined";
	}
	return "?";
}

bool check_invariance(const VectorField &X, const PdeProblem &P)
{
	for (const auto &eq : P.equations())
		if (!is_zero(apply_prolonged(X, eq.expr)))
			return false;
	return true;
}

// ---- manifold assembly -----------------------------------------------------

static ManifoldBuilder equations_manifold(const PdeProblem &P)
{
	ManifoldBuilder mb(P.context(), P.depth());
	for (const auto &eq : P.equations())
		mb.add_equation(eq.expr, eq.leading);
	return mb;
}

static std::vector<Expr> characteristic_equations(const VectorField &X,
                                                  const PdeProblem &P)
{
	Characteristic q = evolutionary_characteristic(X, P.context());
	bool all_zero = true;
	for (const Expr &c : q.components)
		if (!is_zero(c))
			all_zero = false;
	if (all_zero)
		throw DegenerateFieldError(
		    "invariant surface condition is trivial: the field vanishes");
	return q.components;
}

ManifoldRules invariant_surface_rules(const VectorField &X, const PdeProblem &P)
{
	ManifoldBuilder mb(P.context(), P.depth());
	for (const Expr &q : characteristic_equations(X, P))
		if (!is_zero(q))
			mb.add_equation(q);
	return mb.freeze();
}

// ---- multiplier extraction ----------------------------------------------------

/// Recover G_ab with X*(Delta)_a = G_ab Delta_b by substituting each solved
/// leading derivative L_b -> R_b + slack_b / c_b, which maps Delta_b to the
/// fresh symbol slack_b, then reading off the linear part.
static std::optional<MultiplierMatrix> collect_multiplier(
    const std::vector<Expr> &xdeltas, const PdeProblem &P)
{
	const auto &eqs = P.equations();
	SymbolTable slack_table;
	std::vector<Symbol> slacks;
	SubstitutionMap subs;
	for (std::size_t b = 0; b < eqs.size(); ++b) {
		std::optional<Symbol> lead = eqs[b].leading;
		if (!lead)
			lead = pick_leading(eqs[b].expr);
		if (!lead)
			return std::nullopt;
		Expr coeff = differentiate(eqs[b].expr, *lead);
		if (coeff.is_zero_literal() || coeff.contains(*lead) || is_zero(coeff))
			return std::nullopt;
		Rule rule = solve_for_leading(eqs[b].expr, *lead);
		Symbol slack = slack_table.declare(SymbolRole::Parameter,
		                                   "@slack" + std::to_string(b));
		slacks.push_back(slack);
		subs.emplace_back(*lead, rule.rhs + Expr::symbol(slack) / coeff);
	}
	MultiplierMatrix G(xdeltas.size());
	SubstitutionMap zero_slacks;
	for (const Symbol &s : slacks)
		zero_slacks.emplace_back(s, Expr::number(0));
	for (std::size_t a = 0; a < xdeltas.size(); ++a) {
		Expr e = substitute(xdeltas[a], subs);
		Expr base = substitute(e, zero_slacks);
		if (!is_zero(base))
			return std::nullopt; // restriction needed differential consequences
		Expr residual = e - base;
		for (std::size_t b = 0; b < slacks.size(); ++b) {
			Expr g = substitute(differentiate(e, slacks[b]), zero_slacks);
			G[a].push_back(g);
			residual = residual - g * Expr::symbol(slacks[b]);
		}
		if (!is_zero(residual))
			return std::nullopt; // not linear in the equations
	}
	return G;
}

ExactResult check_exact(const VectorField &X, const PdeProblem &P)
{
	ExactResult res;
	std::vector<Expr> xdeltas;
	for (const auto &eq : P.equations())
		xdeltas.push_back(apply_prolonged(X, eq.expr));
	ManifoldBuilder mb = equations_manifold(P);
	for (const Expr &xd : xdeltas)
		if (!mb.reduces_to_zero(xd))
			return res;
	res.symmetric = true;
	res.multiplier = collect_multiplier(xdeltas, P);
	if (!res.multiplier && P.equations().size() == 1) {
		// single equation: try the rational quotient
		Expr g = xdeltas[0] / P.equations()[0].expr;
		Expr den = denominator_of(g);
		if (!mb.reduces_to_zero(den))
			res.multiplier = MultiplierMatrix{{g}};
	}
	return res;
}

// ---- chains ------------------------------------------------------------------

static DeltaChain run_chain(const VectorField &X, const PdeProblem &P,
                            unsigned sigma_max, bool with_isc)
{
	DeltaChain chain;
	ManifoldBuilder mb(P.context(), P.depth());
	if (with_isc)
		for (const Expr &q : characteristic_equations(X, P))
			if (!is_zero(q))
				mb.add_equation(q);
	std::vector<Expr> level;
	for (const auto &eq : P.equations()) {
		level.push_back(eq.expr);
		mb.add_equation(eq.expr, eq.leading);
	}
	chain.levels.push_back(level);
	for (unsigned k = 1; k <= sigma_max; ++k) {
		std::vector<Expr> next;
		for (const Expr &prev : chain.levels.back())
			next.push_back(apply_prolonged(X, prev));
		bool all_zero = true;
		for (const Expr &e : next)
			if (!mb.reduces_to_zero(e))
				all_zero = false;
		if (all_zero) {
			chain.stabilized = true;
			break;
		}
		if (k == sigma_max)
			break;
		chain.levels.push_back(next);
		for (const Expr &e : next)
			mb.add_equation(e);
	}
	chain.inconsistent = mb.inconsistent();
	return chain;
}

DeltaChain delta_chain(const VectorField &X, const PdeProblem &P, unsigned sigma_max)
{
	if (sigma_max < 1)
		throw MalformedExpressionError("sigma_max must be >= 1");
	return run_chain(X, P, sigma_max, false);
}

std::optional<PartialSymmetry> check_partial(const VectorField &X, const PdeProblem &P,
                                             unsigned sigma_max)
{
	if (sigma_max < 2)
		throw MalformedExpressionError("check_partial needs sigma_max >= 2");
	DeltaChain chain = run_chain(X, P, sigma_max, false);
	if (!chain.stabilized)
		return std::nullopt;
	PartialSymmetry ps;
	ps.sigma = chain.sigma();
	ps.chain = std::move(chain);
	return ps;
}

ClassificationReport classify(const VectorField &X, const PdeProblem &P,
                              unsigned sigma_max)
{
	if (sigma_max < 1)
		throw MalformedExpressionError("sigma_max must be >= 1");
	ClassificationReport rep;
	rep.depth = P.depth();
	rep.sigma_max = sigma_max;

	bool invariant = check_invariance(X, P);
	ExactResult exact = invariant ? ExactResult{} : check_exact(X, P);
	if (invariant) {
		rep.verdict = Verdict::Invariance;
		rep.sigma = 1;
		std::size_t nu = P.equations().size();
		rep.multiplier = MultiplierMatrix(
		    nu, std::vector<Expr>(nu, Expr::number(0)));
	} else if (exact.symmetric) {
		rep.verdict = Verdict::Exact;
		rep.sigma = 1;
		rep.multiplier = exact.multiplier;
		rep.multiplier_missing = !exact.multiplier.has_value();
	}

	rep.chain = run_chain(X, P, sigma_max, true);
	if (rep.chain.inconsistent)
		rep.notes.push_back("augmented system is inconsistent: the reduced "
		                    "system has no solutions at this depth");
	if (rep.verdict == Verdict::Undetermined) {
		if (rep.chain.stabilized) {
			rep.sigma = rep.chain.sigma();
			rep.verdict = rep.sigma == 1 ? Verdict::StandardCS
			                             : Verdict::WeakCSCandidate;
		} else {
			rep.notes.push_back("chain did not stabilize within sigma_max = " +
			                    std::to_string(sigma_max));
		}
	}

	if (sigma_max >= 2)
		if (auto ps = check_partial(X, P, sigma_max))
			rep.partial = std::move(ps);
	return rep;
}

} // namespace liesym

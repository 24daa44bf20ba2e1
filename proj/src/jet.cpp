#include "liesym/jet.hpp"

#include "expr_internal.hpp"
#include "liesym/error.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <mutex>

namespace liesym {

struct JetContext::Impl {
	std::vector<Symbol> independents;
	std::vector<Symbol> dependents;
	unsigned order = 1;
	mutable SymbolTable table;
	mutable std::mutex mtx;
};

JetContext JetContext::make(const std::vector<std::string> &independents,
                            const std::vector<std::string> &dependents,
                            unsigned order)
{
	if (independents.empty() || dependents.empty() || order < 1)
		throw MalformedExpressionError(
		    "a jet context needs p >= 1, q >= 1 and order >= 1");
	auto impl = std::make_shared<Impl>();
	impl->order = order;
	for (const auto &n : independents)
		impl->independents.push_back(impl->table.declare(SymbolRole::Independent, n));
	int di = 0;
	for (const auto &n : dependents) {
		impl->dependents.push_back(impl->table.declare_jet(
		    n, n, di++, MultiIndex(independents.size())));
	}
	JetContext ctx;
	ctx.impl_ = impl;
	// materialize jets up to the working order so the table is complete
	ctx.jet_symbols(order);
	return ctx;
}

const std::vector<Symbol> &JetContext::independents() const { return impl_->independents; }
const std::vector<Symbol> &JetContext::dependents() const { return impl_->dependents; }
unsigned JetContext::order() const { return impl_->order; }
SymbolTable &JetContext::table() const { return impl_->table; }

int JetContext::independent_index(const Symbol &s) const
{
	for (std::size_t i = 0; i < impl_->independents.size(); ++i)
		if (same_symbol(impl_->independents[i], s))
			return static_cast<int>(i);
	return -1;
}

Symbol JetContext::jet(std::size_t dep_index, const MultiIndex &J) const
{
	if (dep_index >= impl_->dependents.size())
		throw MalformedExpressionError("dependent index out of range");
	const Symbol &dep = impl_->dependents[dep_index];
	if (J.order() == 0)
		return dep;
	std::string name = dep->name + "_";
	for (std::size_t i = 0; i < impl_->independents.size(); ++i)
		for (unsigned k = 0; k < (i < J.size() ? J[i] : 0); ++k)
			name += impl_->independents[i]->name;
	std::lock_guard<std::mutex> lock(impl_->mtx);
	MultiIndex full(impl_->independents.size());
	for (std::size_t i = 0; i < impl_->independents.size() && i < J.size(); ++i)
		full = full.plus(i, J[i]);
	return impl_->table.declare_jet(name, dep->name, static_cast<int>(dep_index), full);
}

Symbol JetContext::parameter(const std::string &name) const
{
	std::lock_guard<std::mutex> lock(impl_->mtx);
	return impl_->table.declare(SymbolRole::Parameter, name);
}

static void enumerate_indices(std::size_t nvars, unsigned order,
                              std::vector<MultiIndex> &out)
{
	// all multi-indices with |J| == order
	std::vector<unsigned> counts(nvars, 0);
	std::function<void(std::size_t, unsigned)> rec = [&](std::size_t i, unsigned left) {
		if (i + 1 == nvars) {
			counts[i] = left;
			out.emplace_back(counts);
			return;
		}
		for (unsigned k = 0; k <= left; ++k) {
			counts[i] = k;
			rec(i + 1, left - k);
		}
	};
	rec(0, order);
}

std::vector<Symbol> JetContext::jet_symbols(unsigned max_order) const
{
	std::vector<Symbol> out;
	for (std::size_t d = 0; d < impl_->dependents.size(); ++d) {
		for (unsigned o = 0; o <= max_order; ++o) {
			std::vector<MultiIndex> idx;
			enumerate_indices(impl_->independents.size(), o, idx);
			for (const MultiIndex &J : idx)
				out.push_back(jet(d, J));
		}
	}
	return out;
}

JetContext JetContext::extended(unsigned new_order) const
{
	if (new_order <= impl_->order)
		return *this;
	JetContext ctx = *this;
	ctx.impl_ = std::make_shared<Impl>();
	ctx.impl_->independents = impl_->independents;
	ctx.impl_->dependents = impl_->dependents;
	ctx.impl_->order = new_order;
	ctx.impl_->table = impl_->table;
	ctx.jet_symbols(new_order);
	return ctx;
}

// ---- total derivatives -------------------------------------------------------

Expr total_derivative(const Expr &e, std::size_t ind_index, const JetContext &ctx)
{
	if (ind_index >= ctx.independents().size())
		throw MalformedExpressionError("independent index out of range");
	Expr acc = differentiate(e, ctx.independents()[ind_index]);
	for (const Symbol &s : e.symbols()) {
		if (s->role != SymbolRole::Dependent && s->role != SymbolRole::Jet)
			continue;
		if (s->dep_index < 0)
			continue;
		Expr partial = differentiate(e, s);
		if (partial.is_zero_literal())
			continue;
		Symbol shifted = ctx.jet(static_cast<std::size_t>(s->dep_index),
		                         s->index.plus(ind_index));
		acc = acc + Expr::symbol(shifted) * partial;
	}
	return acc;
}

Expr total_derivative_multi(const Expr &e, const MultiIndex &K, const JetContext &ctx)
{
	Expr r = e;
	for (std::size_t i = 0; i < K.size(); ++i)
		for (unsigned k = 0; k < K[i]; ++k)
			r = total_derivative(r, i, ctx);
	return r;
}

// ---- solving -------------------------------------------------------------------

Rule solve_for_leading(const Expr &eq, const Symbol &leading)
{
	Expr num = numerator_of(eq);
	Expr coeff = differentiate(num, leading);
	if (coeff.is_zero_literal())
		throw NotSolvableError("equation does not contain " + leading->name);
	if (coeff.contains(leading))
		throw NotSolvableError("equation is not affine in " + leading->name);
	if (is_zero(coeff))
		throw NotSolvableError("coefficient of " + leading->name +
		                       " is identically zero");
	Expr rest = substitute(num, leading, Expr::number(0));
	return Rule{leading, -(rest / coeff)};
}

std::optional<Symbol> pick_leading(const Expr &eq)
{
	Expr num = numerator_of(eq);
	std::optional<Symbol> best;
	for (const Symbol &s : num.symbols()) {
		if (s->role != SymbolRole::Dependent && s->role != SymbolRole::Jet)
			continue;
		Expr coeff = differentiate(num, s);
		if (coeff.is_zero_literal() || coeff.contains(s))
			continue;
		if (is_zero(coeff))
			continue;
		if (!best) {
			best = s;
			continue;
		}
		unsigned so = s->index.order(), bo = (*best)->index.order();
		if (so > bo || (so == bo && compare_symbols(s, *best) < 0))
			best = s;
	}
	return best;
}

// ---- manifold rules --------------------------------------------------------------

namespace {

bool rule_applies(const Rule &r, const Symbol &s)
{
	if (s->role != SymbolRole::Dependent && s->role != SymbolRole::Jet)
		return false;
	if (r.lhs->dep_index != s->dep_index)
		return false;
	return s->index.extends(r.lhs->index);
}

/// Among applicable rules pick the closest ancestor: maximal |J_L|, ties by
/// canonical-least left-hand side.
const Rule *best_rule(const std::vector<Rule> &rules, const Symbol &s)
{
	const Rule *best = nullptr;
	for (const Rule &r : rules) {
		if (!rule_applies(r, s))
			continue;
		if (!best) {
			best = &r;
			continue;
		}
		unsigned ro = r.lhs->index.order(), bo = best->lhs->index.order();
		if (ro > bo || (ro == bo && compare_symbols(r.lhs, best->lhs) < 0))
			best = &r;
	}
	return best;
}

Expr reduce_with(const Expr &e, const std::vector<Rule> &rules, const JetContext &ctx)
{
	Expr cur = e;
	for (int pass = 0; pass < 200; ++pass) {
		SubstitutionMap subs;
		for (const Symbol &s : cur.symbols()) {
			const Rule *r = best_rule(rules, s);
			if (!r)
				continue;
			MultiIndex K = s->index.minus(r->lhs->index);
			Expr rhs = K.order() == 0 ? r->rhs
			                          : total_derivative_multi(r->rhs, K, ctx);
			subs.emplace_back(s, rhs);
		}
		if (subs.empty())
			return cur;
		cur = substitute(cur, subs);
	}
	throw Error("manifold reduction did not terminate (cyclic rules?)");
}

void sort_rules(std::vector<Rule> &rules)
{
	std::sort(rules.begin(), rules.end(), [](const Rule &a, const Rule &b) {
		return compare_symbols(a.lhs, b.lhs) < 0;
	});
}

} // namespace

ManifoldRules::ManifoldRules(std::vector<Rule> base, const JetContext &ctx,
                             unsigned depth)
    : base_(std::move(base)), ctx_(ctx), depth_(depth)
{
	sort_rules(base_);
	materialized_ = base_;
}

Expr ManifoldRules::reduce(const Expr &e) const
{
	if (base_.empty())
		return normalize(e);
	return reduce_with(e, base_, ctx_);
}

Expr restrict_to(const Expr &e, const ManifoldRules &rules)
{
	return rules.reduce(e);
}

ManifoldRules close_rules(const std::vector<Rule> &rules, const JetContext &ctx,
                          unsigned depth)
{
	// validate base rules: distinct left-hand sides (agreeing duplicates merge)
	std::vector<Rule> base;
	for (const Rule &r : rules) {
		bool dup = false;
		for (const Rule &b : base) {
			if (same_symbol(b.lhs, r.lhs)) {
				Expr diff = reduce_with(b.rhs - r.rhs, rules, ctx);
				if (!is_zero(diff))
					throw InconsistencyError(
					    "conflicting rules for " + r.lhs->name + ": " +
					    b.rhs.str() + " vs " + r.rhs.str());
				dup = true;
				break;
			}
		}
		if (!dup)
			base.push_back(r);
	}
	ManifoldRules out(base, ctx, depth);

	// materialize derivative consequences up to the requested depth and check
	// overlapping extensions for agreement
	std::map<std::string, Rule> derived;
	for (const Rule &r : base)
		derived.emplace(r.lhs->name, r);
	std::vector<MultiIndex> shifts;
	{
		std::vector<unsigned> counts(ctx.independents().size(), 0);
		std::function<void(std::size_t, unsigned)> rec = [&](std::size_t i, unsigned left) {
			if (i + 1 == counts.size()) {
				counts[i] = left;
				shifts.emplace_back(counts);
				return;
			}
			for (unsigned k = 0; k <= left; ++k) {
				counts[i] = k;
				rec(i + 1, left - k);
			}
		};
		for (unsigned o = 1; o <= depth; ++o)
			rec(0, o);
	}
	for (const Rule &r : base) {
		for (const MultiIndex &K : shifts) {
			MultiIndex j = r.lhs->index;
			for (std::size_t i = 0; i < K.size(); ++i)
				j = j.plus(i, K[i]);
			Symbol lhs = ctx.jet(static_cast<std::size_t>(r.lhs->dep_index), j);
			Expr rhs = out.reduce(total_derivative_multi(r.rhs, K, ctx));
			auto it = derived.find(lhs->name);
			if (it != derived.end()) {
				Expr diff = out.reduce(it->second.rhs - rhs);
				if (!is_zero(diff))
					throw InconsistencyError(
					    "conflicting rules for " + lhs->name +
					    " after closure: right-hand sides differ on the manifold");
			} else {
				derived.emplace(lhs->name, Rule{lhs, rhs});
			}
		}
	}
	std::vector<Rule> mat;
	mat.reserve(derived.size());
	for (auto &[name, r] : derived)
		mat.push_back(Rule{r.lhs, out.reduce(r.rhs)});
	sort_rules(mat);
	out.materialized_ = std::move(mat);
	return out;
}

// ---- incremental manifold construction ----------------------------------------------

ManifoldBuilder::ManifoldBuilder(const JetContext &ctx, unsigned depth)
    : ctx_(ctx), depth_(depth)
{}

Expr ManifoldBuilder::reduce(const Expr &e) const
{
	if (rules_.empty())
		return normalize(e);
	return reduce_with(e, rules_, ctx_);
}

bool ManifoldBuilder::vanishes_on_constraints(const Expr &reduced) const
{
	if (constraints_.empty())
		return false;
	detail::Poly num = detail::to_poly_strict(numerator_of(reduced));
	for (const Expr &c : constraints_) {
		detail::Poly cn = detail::to_poly_strict(numerator_of(c));
		// treat a blown division budget as "not divisible" (conservative)
		if (detail::divide_exact(num, cn, 512))
			return true;
	}
	return false;
}

bool ManifoldBuilder::reduces_to_zero(const Expr &e) const
{
	if (inconsistent_)
		return true; // vacuous on an empty manifold
	Expr r = reduce(e);
	if (is_zero(r))
		return true;
	// unresolved constraints are valid equations on the manifold: anything
	// their numerator divides vanishes there as well
	return vanishes_on_constraints(r);
}

void ManifoldBuilder::add_rule(const Rule &r)
{
	install(Rule{r.lhs, reduce(r.rhs)});
}

/// Matches c * S^k * F with S the only jet atom, occurring as a plain power,
/// and F jet-free: such an equation forces S = 0 on smooth solutions.
static std::optional<Symbol> lone_jet_power(const Expr &num)
{
	if (num.kind() == Expr::Kind::Add || num.kind() == Expr::Kind::Number)
		return std::nullopt;
	std::vector<Expr> factors;
	if (num.kind() == Expr::Kind::Mul)
		factors = num.children();
	else
		factors = {num};
	std::optional<Symbol> lone;
	for (const Expr &f : factors) {
		const Expr *base = &f;
		if (f.kind() == Expr::Kind::Pow)
			base = &f.arg();
		bool plain_jet =
		    base->kind() == Expr::Kind::Symbol &&
		    (base->sym()->role == SymbolRole::Dependent ||
		     base->sym()->role == SymbolRole::Jet);
		if (plain_jet) {
			if (lone && !same_symbol(*lone, base->sym()))
				return std::nullopt;
			lone = base->sym();
		} else {
			for (const Symbol &s : f.symbols())
				if (s->role == SymbolRole::Dependent || s->role == SymbolRole::Jet)
					return std::nullopt;
		}
	}
	return lone;
}

ManifoldBuilder::Added ManifoldBuilder::add_equation(const Expr &eq,
                                                     std::optional<Symbol> designated)
{
	if (inconsistent_)
		return Added::Redundant;
	Expr r = reduce(eq);
	if (is_zero(r) || vanishes_on_constraints(r))
		return Added::Redundant;
	Expr num = numerator_of(r);
	if (num.kind() == Expr::Kind::Number) {
		inconsistent_ = true;
		return Added::Contradiction;
	}
	std::optional<Symbol> lead;
	if (designated) {
		Expr coeff = differentiate(num, *designated);
		if (!coeff.is_zero_literal() && !coeff.contains(*designated) && !is_zero(coeff))
			lead = designated;
	}
	if (!lead)
		lead = pick_leading(num);
	if (!lead) {
		if (std::optional<Symbol> lone = lone_jet_power(num))
			return install(Rule{*lone, Expr::number(0)});
		if (!vanishes_on_constraints(r))
			constraints_.push_back(r);
		return Added::Unresolved;
	}
	return install(solve_for_leading(num, *lead));
}

ManifoldBuilder::Added ManifoldBuilder::install(const Rule &r)
{
	// collect existing rules whose left-hand side the new rule now reduces
	std::vector<Rule> demoted;
	std::vector<Rule> kept;
	for (const Rule &old : rules_) {
		if (rule_applies(r, old.lhs) || same_symbol(old.lhs, r.lhs))
			demoted.push_back(old);
		else
			kept.push_back(old);
	}
	rules_ = std::move(kept);
	rules_.push_back(r);
	sort_rules(rules_);
	for (const Rule &old : demoted)
		add_equation(Expr::symbol(old.lhs) - old.rhs);
	return Added::NewRule;
}

ManifoldRules ManifoldBuilder::freeze() const
{
	std::vector<Rule> base;
	base.reserve(rules_.size());
	for (const Rule &r : rules_)
		base.push_back(Rule{r.lhs, reduce(r.rhs)});
	return ManifoldRules(base, ctx_, depth_);
}

} // namespace liesym

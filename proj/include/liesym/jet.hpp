#pragma once

#include "liesym/expr.hpp"

#include <memory>
#include <optional>

namespace liesym {

/// Jet-coordinate bookkeeping: independent variables x_1..x_p, dependent
/// variables u_1..u_q, and derivative coordinates u_{a,J} up to a working
/// order. Contexts are value types; extension returns a new context sharing
/// the symbol pool, so previously built expressions stay valid.
class JetContext {
  public:
	JetContext() = default;
	static JetContext make(const std::vector<std::string> &independents,
	                       const std::vector<std::string> &dependents,
	                       unsigned order);

	const std::vector<Symbol> &independents() const;
	const std::vector<Symbol> &dependents() const;
	unsigned order() const;

	/// Jet symbol u_{dep,J}; created (and registered) on first use, any order.
	Symbol jet(std::size_t dep_index, const MultiIndex &J) const;

	Symbol parameter(const std::string &name) const;

	/// All jet symbols of every dependent with |J| <= max_order.
	std::vector<Symbol> jet_symbols(unsigned max_order) const;

	JetContext extended(unsigned new_order) const;

	SymbolTable &table() const;

	int independent_index(const Symbol &s) const; // -1 if not one
	bool valid() const { return impl_ != nullptr; }

  private:
	struct Impl;
	std::shared_ptr<Impl> impl_;
};

/// Total derivative D_i e = de/dx_i + sum u_{a,J+e_i} * de/du_{a,J}.
Expr total_derivative(const Expr &e, std::size_t ind_index, const JetContext &ctx);

/// D^K e, applying total derivatives per the multi-index K.
Expr total_derivative_multi(const Expr &e, const MultiIndex &K, const JetContext &ctx);

/// One solved equation: lhs (a jet symbol or dependent) -> rhs.
struct Rule {
	Symbol lhs;
	Expr rhs;
};

/// Solve eq = 0 for `leading`, which must occur affinely with a coefficient
/// that is not identically zero. Denominators are cleared first, so the
/// equation may be rational.
Rule solve_for_leading(const Expr &eq, const Symbol &leading);

/// Triangular substitution rules closed under total-derivative consequences.
/// Reduction applies materialized rules and (equivalently) derivative
/// extensions of them: a jet symbol that extends a rule's left-hand side by K
/// rewrites to D^K of its right-hand side.
class ManifoldRules {
  public:
	ManifoldRules() = default;
	ManifoldRules(std::vector<Rule> base, const JetContext &ctx, unsigned depth);

	const std::vector<Rule> &rules() const { return materialized_; }
	const std::vector<Rule> &base_rules() const { return base_; }
	unsigned depth() const { return depth_; }
	bool empty() const { return base_.empty(); }

	/// Repeated substitution until no left-hand side (or derivative
	/// extension of one) occurs; result normalized.
	Expr reduce(const Expr &e) const;

  private:
	std::vector<Rule> base_;
	std::vector<Rule> materialized_;
	JetContext ctx_;
	unsigned depth_ = 0;
	friend class ManifoldBuilder;
	friend ManifoldRules close_rules(const std::vector<Rule> &, const JetContext &,
	                                 unsigned);
};

/// close_rules: derivative consequences to the given depth, triangularized.
/// Two rules for the same jet symbol whose right-hand sides differ on the
/// manifold raise InconsistencyError.
ManifoldRules close_rules(const std::vector<Rule> &rules, const JetContext &ctx,
                          unsigned depth);

Expr restrict_to(const Expr &e, const ManifoldRules &rules);

/// Incremental construction of a solution manifold from a list of equations:
/// each equation is reduced by the rules collected so far, solved for a
/// leading derivative, and installed; rules whose left-hand side becomes
/// reducible are re-solved. Disagreements between derivative extensions of
/// different rules are deliberately NOT promoted to new equations: the
/// restriction semantics is plain triangular substitution.
class ManifoldBuilder {
  public:
	explicit ManifoldBuilder(const JetContext &ctx, unsigned depth);

	enum class Added { Redundant, NewRule, Contradiction, Unresolved };

	Added add_equation(const Expr &eq, std::optional<Symbol> designated = std::nullopt);
	void add_rule(const Rule &r); // pre-solved (e.g. invariant surface rules)

	bool inconsistent() const { return inconsistent_; }
	const std::vector<Expr> &constraints() const { return constraints_; }

	Expr reduce(const Expr &e) const;
	bool reduces_to_zero(const Expr &e) const;

	ManifoldRules freeze() const;

  private:
	Added install(const Rule &r);
	bool vanishes_on_constraints(const Expr &reduced) const;
	JetContext ctx_;
	unsigned depth_;
	std::vector<Rule> rules_;
	std::vector<Expr> constraints_;
	bool inconsistent_ = false;
};

/// Default leading-derivative heuristic: the highest-order jet symbol in
/// which the (denominator-cleared) equation is affine with a coefficient not
/// identically zero; ties broken by taking the least in the canonical symbol
/// order.
std::optional<Symbol> pick_leading(const Expr &eq);

} // namespace liesym

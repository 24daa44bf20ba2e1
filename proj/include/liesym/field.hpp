#pragma once

#include "liesym/jet.hpp"

#include <map>

namespace liesym {

/// Lie-point generator X = xi_i d/dx_i + phi_a d/du_a. Components are
/// expressions in the independent and dependent variables only; jet symbols
/// of order >= 1 are rejected at construction (no generalized symmetries).
class VectorField {
  public:
	VectorField(const JetContext &ctx, std::vector<Expr> xis, std::vector<Expr> phis);

	const JetContext &context() const { return ctx_; }
	const Expr &xi(std::size_t i) const { return xis_[i]; }
	const Expr &phi(std::size_t a) const { return phis_[a]; }
	const std::vector<Expr> &xis() const { return xis_; }
	const std::vector<Expr> &phis() const { return phis_; }

	/// True iff no xi_i involves a dependent variable.
	bool projectable() const { return projectable_; }

	/// X applied to a function of (x, u) only — no prolongation.
	Expr apply_point(const Expr &f) const;

  private:
	JetContext ctx_;
	std::vector<Expr> xis_;
	std::vector<Expr> phis_;
	bool projectable_ = true;
};

/// Evolutionary characteristic Q_a = phi_a - xi_i u_{a,i}. The invariant
/// surface condition X_Q u = 0 is Q = 0.
struct Characteristic {
	std::vector<Expr> components;
};

Characteristic evolutionary_characteristic(const VectorField &X, const JetContext &ctx);

/// Prolongation of X: coefficient phi^J_a per jet coordinate, computed by the
/// recursion phi^{J+e_i} = D_i phi^J - (D_i xi_k) u_{a,J+e_k} and cached per
/// order on demand.
class ProlongedField {
  public:
	ProlongedField(const VectorField &X, unsigned order);

	const VectorField &base() const { return X_; }
	unsigned order() const { return order_; }

	/// phi^J_a; extends the cache if |J| exceeds the current order.
	Expr coefficient(std::size_t dep_index, const MultiIndex &J) const;

  private:
	void extend_to(unsigned order) const;
	VectorField X_;
	mutable unsigned order_;
	mutable std::map<std::string, Expr> coeff_; // keyed by jet symbol name
};

ProlongedField prolong(const VectorField &X, unsigned order, const JetContext &ctx);

/// X* e = xi_i de/dx_i + sum phi^J_a de/du_{a,J}; the field re-prolongs
/// itself if e needs a higher order.
Expr apply_prolonged(const ProlongedField &Xstar, const Expr &e);

Expr apply_prolonged(const VectorField &X, const Expr &e);

} // namespace liesym

#pragma once

#include "liesym/field.hpp"

#include <optional>
#include <string>

namespace liesym {

struct NamedEquation {
	std::string name;
	Expr expr;
	std::optional<Symbol> leading; // designated; heuristic when absent
};

/// One or more equations Delta_a = 0 over a jet context, with the consequence
/// depth used when restricting to the solution manifold.
class PdeProblem {
  public:
	PdeProblem(const JetContext &ctx, std::vector<NamedEquation> equations,
	           unsigned depth);

	const JetContext &context() const { return ctx_; }
	const std::vector<NamedEquation> &equations() const { return equations_; }
	unsigned depth() const { return depth_; }
	unsigned order() const { return order_; }

	PdeProblem with_depth(unsigned depth) const;

  private:
	JetContext ctx_;
	std::vector<NamedEquation> equations_;
	unsigned depth_;
	unsigned order_;
};

/// The sequence Delta, Delta^(1) = X*(Delta), Delta^(2) = X*(Delta^(1)), ...
/// Entries are stored exactly as computed, unsimplified by manifold
/// relations; each level holds one expression per equation.
struct DeltaChain {
	std::vector<std::vector<Expr>> levels;
	bool stabilized = false;
	bool inconsistent = false; // augmented system reduced to a contradiction
	unsigned sigma() const { return static_cast<unsigned>(levels.size()); }
};

enum class Verdict {
	Invariance,
	Exact,
	StandardCS,
	WeakCSCandidate,
	WeakCSCertified,
	PartialSymmetryCandidate,
	PartialSymmetryCertified,
	Undetermined,
};

const char *verdict_name(Verdict v);

using MultiplierMatrix = std::vector<std::vector<Expr>>;

struct PartialSymmetry {
	unsigned sigma = 0;
	DeltaChain chain; // without the invariant surface condition
	bool certified = false;
	std::vector<std::string> witnesses;
};

struct WitnessRecord {
	std::string name;
	bool passes_system = false;
	bool passes_invariance = false;
};

struct ClassificationReport {
	Verdict verdict = Verdict::Undetermined;
	unsigned sigma = 0; // chain length for conditional verdicts
	std::optional<MultiplierMatrix> multiplier;
	/// restriction vanished but no multiplier matrix could be collected
	bool multiplier_missing = false;
	DeltaChain chain; // with the invariant surface condition
	unsigned depth = 0;
	unsigned sigma_max = 0;
	std::optional<PartialSymmetry> partial;
	std::vector<WitnessRecord> witnesses;
	std::vector<std::string> notes;
};

/// X*(Delta_a) == 0 identically for every equation (Def. of invariance).
bool check_invariance(const VectorField &X, const PdeProblem &P);

/// Exact symmetry test: X*(Delta) restricted to the solution manifold (with
/// consequences to the problem depth) vanishes; on success the multiplier
/// matrix G with X*(Delta)_a = G_ab Delta_b is recovered when possible.
struct ExactResult {
	bool symmetric = false;
	std::optional<MultiplierMatrix> multiplier;
};
ExactResult check_exact(const VectorField &X, const PdeProblem &P);

/// Chain on the manifold of the accumulated {Delta, ..., Delta^(k-1)} only
/// (no invariant surface condition).
DeltaChain delta_chain(const VectorField &X, const PdeProblem &P, unsigned sigma_max);

/// Rules solving X_Q u = 0 (plus consequences to the problem depth).
ManifoldRules invariant_surface_rules(const VectorField &X, const PdeProblem &P);

ClassificationReport classify(const VectorField &X, const PdeProblem &P,
                              unsigned sigma_max = 5);

/// Partial symmetry: the chain stabilizes on the manifold without the
/// invariant surface condition; returns the order and the augmented system.
std::optional<PartialSymmetry> check_partial(const VectorField &X, const PdeProblem &P,
                                             unsigned sigma_max);

} // namespace liesym

#pragma once

#include "liesym/error.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace liesym {

enum class SymbolRole {
	Independent,
	Dependent,
	Jet,
	Parameter,
	Adapted,
};

/// Derivative multi-index: one count per independent variable of a context.
class MultiIndex {
  public:
	MultiIndex() = default;
	explicit MultiIndex(std::size_t nvars) : counts_(nvars, 0) {}
	explicit MultiIndex(std::vector<unsigned> counts) : counts_(std::move(counts)) {}

	std::size_t size() const { return counts_.size(); }
	unsigned operator[](std::size_t i) const { return counts_[i]; }
	unsigned order() const;

	MultiIndex plus(std::size_t i, unsigned k = 1) const;
	/// Componentwise >=; true also for equality.
	bool extends(const MultiIndex &other) const;
	/// Componentwise difference; requires this->extends(other).
	MultiIndex minus(const MultiIndex &other) const;

	static int compare(const MultiIndex &a, const MultiIndex &b);
	bool operator==(const MultiIndex &o) const { return counts_ == o.counts_; }

	const std::vector<unsigned> &counts() const { return counts_; }

  private:
	std::vector<unsigned> counts_;
};

struct SymbolData {
	SymbolRole role = SymbolRole::Parameter;
	std::string name;
	// Jet coordinates (and order-0 dependents) carry the dependent name and
	// a derivative multi-index relative to the owning context.
	std::string dep_name;
	int dep_index = -1;
	MultiIndex index;
};

using Symbol = std::shared_ptr<const SymbolData>;

/// Total order on symbols: (role, dependent, derivative order, multi-index, name).
int compare_symbols(const Symbol &a, const Symbol &b);

inline bool same_symbol(const Symbol &a, const Symbol &b)
{
	return a == b || compare_symbols(a, b) == 0;
}

/// Name -> Symbol registry. Every symbol appearing in an Expression should
/// come from a table (directly or through a JetContext).
class SymbolTable {
  public:
	Symbol declare(SymbolRole role, const std::string &name);
	Symbol declare_jet(const std::string &name, const std::string &dep_name,
	                   int dep_index, const MultiIndex &index);

	Symbol lookup(const std::string &name) const; // throws MalformedExpressionError
	Symbol find(const std::string &name) const;   // nullptr if absent
	bool contains(const std::string &name) const;

	std::vector<Symbol> all() const;

  private:
	std::map<std::string, Symbol> by_name_;
};

} // namespace liesym

#include "liesym/symbols.hpp"

#include <algorithm>

namespace liesym {

unsigned MultiIndex::order() const
{
	unsigned s = 0;
	for (unsigned c : counts_)
		s += c;
	return s;
}

MultiIndex MultiIndex::plus(std::size_t i, unsigned k) const
{
	MultiIndex r = *this;
	if (i >= r.counts_.size())
		r.counts_.resize(i + 1, 0);
	r.counts_[i] += k;
	return r;
}

bool MultiIndex::extends(const MultiIndex &other) const
{
	for (std::size_t i = 0; i < other.counts_.size(); ++i) {
		unsigned mine = i < counts_.size() ? counts_[i] : 0;
		if (mine < other.counts_[i])
			return false;
	}
	return true;
}

MultiIndex MultiIndex::minus(const MultiIndex &other) const
{
	MultiIndex r = *this;
	for (std::size_t i = 0; i < other.counts_.size(); ++i)
		r.counts_[i] -= other.counts_[i];
	return r;
}

int MultiIndex::compare(const MultiIndex &a, const MultiIndex &b)
{
	std::size_t n = std::max(a.counts_.size(), b.counts_.size());
	for (std::size_t i = 0; i < n; ++i) {
		unsigned ca = i < a.counts_.size() ? a.counts_[i] : 0;
		unsigned cb = i < b.counts_.size() ? b.counts_[i] : 0;
		if (ca != cb)
			return ca < cb ? -1 : 1;
	}
	return 0;
}

static int role_rank(SymbolRole r)
{
	switch (r) {
	case SymbolRole::Independent: return 0;
	case SymbolRole::Dependent: return 1;
	case SymbolRole::Jet: return 2;
	case SymbolRole::Parameter: return 3;
	case SymbolRole::Adapted: return 4;
	}
	return 5;
}

int compare_symbols(const Symbol &a, const Symbol &b)
{
	if (a.get() == b.get())
		return 0;
	// Dependents are order-0 jets for ordering purposes so that u < u_x < u_xx.
	auto bucket = [](SymbolRole r) {
		int k = role_rank(r);
		return k == 2 ? 1 : k; // merge Jet into the Dependent bucket
	};
	int ra = bucket(a->role), rb = bucket(b->role);
	if (ra != rb)
		return ra < rb ? -1 : 1;
	if (ra == 1) {
		const std::string &da = a->role == SymbolRole::Jet ? a->dep_name : a->name;
		const std::string &db = b->role == SymbolRole::Jet ? b->dep_name : b->name;
		if (int c = da.compare(db))
			return c < 0 ? -1 : 1;
		unsigned oa = a->index.order(), ob = b->index.order();
		if (oa != ob)
			return oa < ob ? -1 : 1;
		if (int c = MultiIndex::compare(a->index, b->index))
			return c;
	}
	int c = a->name.compare(b->name);
	return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

Symbol SymbolTable::declare(SymbolRole role, const std::string &name)
{
	auto it = by_name_.find(name);
	if (it != by_name_.end()) {
		if (it->second->role != role)
			throw MalformedExpressionError("symbol '" + name +
			                               "' already declared with a different role");
		return it->second;
	}
	auto data = std::make_shared<SymbolData>();
	data->role = role;
	data->name = name;
	by_name_.emplace(name, data);
	return data;
}

Symbol SymbolTable::declare_jet(const std::string &name, const std::string &dep_name,
                                int dep_index, const MultiIndex &index)
{
	auto it = by_name_.find(name);
	if (it != by_name_.end())
		return it->second;
	auto data = std::make_shared<SymbolData>();
	data->role = index.order() == 0 ? SymbolRole::Dependent : SymbolRole::Jet;
	data->name = name;
	data->dep_name = dep_name;
	data->dep_index = dep_index;
	data->index = index;
	by_name_.emplace(name, data);
	return data;
}

Symbol SymbolTable::lookup(const std::string &name) const
{
	Symbol s = find(name);
	if (!s)
		throw MalformedExpressionError("unregistered symbol '" + name + "'");
	return s;
}

Symbol SymbolTable::find(const std::string &name) const
{
	auto it = by_name_.find(name);
	return it == by_name_.end() ? nullptr : it->second;
}

bool SymbolTable::contains(const std::string &name) const
{
	return by_name_.count(name) != 0;
}

std::vector<Symbol> SymbolTable::all() const
{
	std::vector<Symbol> out;
	out.reserve(by_name_.size());
	for (const auto &[k, v] : by_name_)
		out.push_back(v);
	std::sort(out.begin(), out.end(),
	          [](const Symbol &a, const Symbol &b) { return compare_symbols(a, b) < 0; });
	return out;
}

} // namespace liesym

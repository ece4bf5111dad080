#include "liftpdb/logic/decompose.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

#include "liftpdb/errors.hpp"
#include "liftpdb/logic/canonical.hpp"

namespace liftpdb::logic {

namespace {

constexpr std::size_t kMaxConjuncts = 4096;

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) x = parent[x] = parent[parent[x]];
  return x;
}

}  // namespace

std::vector<CQ> connected_components(const CQ& cq) {
  const std::size_t n = cq.atoms.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::unordered_map<std::string, std::size_t> first_seen;
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& t : cq.atoms[i].args) {
      if (!t.is_variable()) continue;
      auto [it, fresh] = first_seen.emplace(t.name(), i);
      if (!fresh) parent[find_root(parent, i)] = find_root(parent, it->second);
    }
  std::vector<CQ> out;
  std::unordered_map<std::size_t, std::size_t> slot;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = find_root(parent, i);
    auto [it, fresh] = slot.emplace(r, out.size());
    if (fresh) out.emplace_back();
    out[it->second].atoms.push_back(cq.atoms[i]);
  }
  return out;
}

std::vector<UCQ> rewrite_as_conjunction(const UCQ& q) {
  UCQ base = normalize(q);
  if (base.disjuncts.empty() || base.disjuncts.front().atoms.empty()) return {base};

  std::vector<std::vector<CQ>> parts;
  std::size_t total = 1;
  bool splits = false;
  for (const auto& cq : base.disjuncts) {
    parts.push_back(connected_components(cq));
    splits = splits || parts.back().size() > 1;
    total *= parts.back().size();
    if (total > kMaxConjuncts)
      throw QueryError("query too large: more than " + std::to_string(kMaxConjuncts) +
                       " conjuncts after distribution");
  }
  if (!splits) return {base};

  std::vector<UCQ> conjuncts;
  std::set<std::string> seen;
  std::vector<std::size_t> choice(parts.size(), 0);
  for (std::size_t k = 0; k < total; ++k) {
    UCQ c;
    for (std::size_t d = 0; d < parts.size(); ++d) c.disjuncts.push_back(parts[d][choice[d]]);
    c = normalize(c);
    if (seen.insert(key_of(c)).second) conjuncts.push_back(std::move(c));
    for (std::size_t d = parts.size(); d-- > 0;) {
      if (++choice[d] < parts[d].size()) break;
      choice[d] = 0;
    }
  }

  // Qi ∧ Qj ≡ Qi whenever Qi ⇒ Qj.
  std::vector<bool> keep(conjuncts.size(), true);
  for (std::size_t i = 0; i < conjuncts.size(); ++i)
    for (std::size_t j = 0; j < conjuncts.size(); ++j) {
      if (i == j || !keep[j]) continue;
      if (implies(conjuncts[j], conjuncts[i]) && (j < i || !implies(conjuncts[i], conjuncts[j]))) {
        keep[i] = false;
        break;
      }
    }
  std::vector<UCQ> out;
  for (std::size_t i = 0; i < conjuncts.size(); ++i)
    if (keep[i]) out.push_back(std::move(conjuncts[i]));
  return out;
}

bool may_unify(const Atom& a, const Atom& b) {
  if (a.predicate != b.predicate || a.arity() != b.arity()) return false;
  for (std::size_t k = 0; k < a.arity(); ++k) {
    const Term& x = a.args[k];
    const Term& y = b.args[k];
    if (x.is_constant() && y.is_constant() && x.name() != y.name()) return false;
  }
  return true;
}

bool symbolically_independent(const UCQ& a, const UCQ& b) {
  for (const auto& ca : a.disjuncts)
    for (const auto& x : ca.atoms)
      for (const auto& cb : b.disjuncts)
        for (const auto& y : cb.atoms)
          if (may_unify(x, y)) return false;
  return true;
}

namespace {

std::vector<std::size_t> positions_of(const Atom& a, const std::string& var) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < a.arity(); ++k)
    if (a.args[k].is_variable() && a.args[k].name() == var) out.push_back(k);
  return out;
}

std::vector<std::string> root_variables(const CQ& cq) {
  std::vector<std::string> out;
  if (cq.atoms.empty()) return out;
  for (const auto& v : cq.variables())
    if (std::all_of(cq.atoms.begin(), cq.atoms.end(), [&](const Atom& a) { return a.mentions(v); }))
      out.push_back(v);
  return out;
}

bool assign(const UCQ& q, const std::vector<std::vector<std::string>>& roots, std::size_t d,
            std::map<std::string, std::vector<std::size_t>>& layout, std::vector<std::string>& chosen) {
  if (d == q.disjuncts.size()) return true;
  for (const auto& v : roots[d]) {
    std::vector<std::string> added;
    bool ok = true;
    for (const auto& a : q.disjuncts[d].atoms) {
      auto pos = positions_of(a, v);
      auto it = layout.find(a.predicate);
      if (it == layout.end()) {
        layout.emplace(a.predicate, std::move(pos));
        added.push_back(a.predicate);
      } else if (it->second != pos) {
        ok = false;
        break;
      }
    }
    if (ok) {
      chosen.push_back(v);
      if (assign(q, roots, d + 1, layout, chosen)) return true;
      chosen.pop_back();
    }
    for (const auto& p : added) layout.erase(p);
  }
  return false;
}

}  // namespace

std::optional<Separator> find_separator(const UCQ& q) {
  if (q.disjuncts.empty()) return std::nullopt;
  std::vector<std::vector<std::string>> roots;
  for (const auto& cq : q.disjuncts) {
    roots.push_back(root_variables(cq));
    if (roots.back().empty()) return std::nullopt;
  }
  std::map<std::string, std::vector<std::size_t>> layout;
  Separator sep;
  if (!assign(q, roots, 0, layout, sep.variables)) return std::nullopt;
  return sep;
}

UCQ substitute(const UCQ& q, const Separator& sep, const std::string& constant) {
  if (sep.variables.size() != q.disjuncts.size())
    throw QueryError("separator does not match the query's disjuncts");
  UCQ out;
  for (std::size_t d = 0; d < q.disjuncts.size(); ++d)
    out.disjuncts.push_back(substitute(q.disjuncts[d], sep.variables[d], constant));
  return out;
}

}  // namespace liftpdb::logic

#include "liftpdb/logic/canonical.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "liftpdb/logic/decompose.hpp"

namespace liftpdb::logic {

namespace {

// Atom order used by canonical forms: arity first, then predicate, then args.
bool atom_less(const Atom& a, const Atom& b) {
  if (a.arity() != b.arity()) return a.arity() < b.arity();
  if (a.predicate != b.predicate) return a.predicate < b.predicate;
  return a.args < b.args;
}

bool cq_less(const CQ& a, const CQ& b) {
  return std::lexicographical_compare(a.atoms.begin(), a.atoms.end(), b.atoms.begin(),
                                      b.atoms.end(), atom_less);
}

void sort_atoms(std::vector<Atom>& atoms) { std::sort(atoms.begin(), atoms.end(), atom_less); }

// Keeps the first occurrence of each atom, in order.
void dedupe_atoms(std::vector<Atom>& atoms) {
  std::vector<Atom> out;
  std::unordered_set<Atom> seen;
  for (auto& a : atoms)
    if (seen.insert(a).second) out.push_back(std::move(a));
  atoms = std::move(out);
}

std::vector<Atom> rename(const std::vector<Atom>& atoms,
                         const std::unordered_map<std::string, std::string>& names) {
  std::vector<Atom> out = atoms;
  for (auto& a : out)
    for (auto& t : a.args)
      if (t.is_variable()) t = Term::var(names.at(t.name()));
  return out;
}

// Renames variables by order of first occurrence in the current atom order.
std::vector<Atom> renumber_by_occurrence(const std::vector<Atom>& atoms, std::size_t offset = 0) {
  std::unordered_map<std::string, std::string> names;
  for (const auto& a : atoms)
    for (const auto& t : a.args)
      if (t.is_variable() && !names.count(t.name()))
        names.emplace(t.name(), "v" + std::to_string(offset + names.size()));
  return rename(atoms, names);
}

// Canonical labeling of one connected component by colour refinement plus
// individualization. The canonical form is the smallest sorted atom list over
// all leaves of the search tree.
class Labeler {
 public:
  static constexpr std::size_t kLeafBudget = 20000;

  explicit Labeler(const std::vector<Atom>& atoms) : atoms_(atoms) {
    for (std::size_t ai = 0; ai < atoms_.size(); ++ai)
      for (const auto& t : atoms_[ai].args)
        if (t.is_variable()) {
          auto [it, fresh] = index_.emplace(t.name(), static_cast<int>(vars_.size()));
          if (fresh) {
            vars_.push_back(t.name());
            occurrences_.emplace_back();
          }
          auto& occ = occurrences_[it->second];
          if (occ.empty() || occ.back() != ai) occ.push_back(ai);
        }
  }

  std::vector<Atom> run() {
    if (vars_.empty()) {
      auto out = atoms_;
      sort_atoms(out);
      return out;
    }
    search(std::vector<int>(vars_.size(), 0));
    return best_;
  }

 private:
  std::vector<int> refine(std::vector<int> colour) const {
    const std::size_t n = vars_.size();
    std::size_t classes = std::set<int>(colour.begin(), colour.end()).size();
    while (true) {
      std::vector<std::string> sig(n);
      for (std::size_t v = 0; v < n; ++v) {
        std::vector<std::string> parts;
        for (std::size_t ai : occurrences_[v]) {
          const Atom& a = atoms_[ai];
          std::string o = a.predicate + '\x1f' + std::to_string(a.arity()) + ':';
          for (const auto& t : a.args) {
            if (t.is_constant()) {
              o += 'c' + t.name();
            } else if (t.name() == vars_[v]) {
              o += '*';
            } else {
              o += 'v' + std::to_string(colour[index_.at(t.name())]);
            }
            o += '\x1e';
          }
          parts.push_back(std::move(o));
        }
        std::sort(parts.begin(), parts.end());
        std::string s = std::to_string(colour[v]) + '|';
        for (auto& p : parts) s += p + '\x1d';
        sig[v] = std::move(s);
      }
      std::vector<std::string> distinct = sig;
      std::sort(distinct.begin(), distinct.end());
      distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
      std::vector<int> next(n);
      for (std::size_t v = 0; v < n; ++v)
        next[v] = static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), sig[v]) -
                                   distinct.begin());
      colour = std::move(next);
      if (distinct.size() == classes) return colour;
      classes = distinct.size();
    }
  }

  void search(std::vector<int> colour) {
    if (leaves_ >= kLeafBudget) return;
    colour = refine(std::move(colour));
    std::map<int, std::vector<int>> cells;
    for (std::size_t v = 0; v < colour.size(); ++v) cells[colour[v]].push_back(static_cast<int>(v));
    auto target = std::find_if(cells.begin(), cells.end(),
                               [](const auto& kv) { return kv.second.size() > 1; });
    if (target == cells.end()) {
      ++leaves_;
      std::unordered_map<std::string, std::string> names;
      for (std::size_t v = 0; v < vars_.size(); ++v) names.emplace(vars_[v], "v" + std::to_string(colour[v]));
      auto candidate = rename(atoms_, names);
      sort_atoms(candidate);
      if (best_.empty() || std::lexicographical_compare(candidate.begin(), candidate.end(),
                                                        best_.begin(), best_.end(), atom_less))
        best_ = std::move(candidate);
      return;
    }
    const int c = target->first;
    for (int chosen : target->second) {
      std::vector<int> split(colour.size());
      for (std::size_t u = 0; u < colour.size(); ++u)
        split[u] = 2 * colour[u] + ((colour[u] == c && static_cast<int>(u) != chosen) ? 1 : 0);
      search(std::move(split));
    }
  }

  const std::vector<Atom>& atoms_;
  std::vector<std::string> vars_;
  std::unordered_map<std::string, int> index_;
  std::vector<std::vector<std::size_t>> occurrences_;
  std::vector<Atom> best_;
  std::size_t leaves_ = 0;
};

std::size_t count_variables(const std::vector<Atom>& atoms) {
  std::set<std::string> vars;
  for (const auto& a : atoms)
    for (const auto& t : a.args)
      if (t.is_variable()) vars.insert(t.name());
  return vars.size();
}

class Matcher {
 public:
  Matcher(const CQ& from, const CQ& to) : from_(from.atoms) {
    for (const auto& a : to.atoms) by_predicate_[a.predicate].push_back(&a);
  }

  bool run() {
    used_.assign(from_.size(), false);
    return step(0);
  }

 private:
  std::size_t bound_count(const Atom& a) const {
    std::size_t n = 0;
    for (const auto& t : a.args)
      if (t.is_constant() || binding_.count(t.name())) ++n;
    return n;
  }

  bool step(std::size_t done) {
    if (done == from_.size()) return true;
    // Most-bound atom first keeps the search narrow.
    std::size_t pick = from_.size();
    std::size_t best = 0;
    for (std::size_t i = 0; i < from_.size(); ++i) {
      if (used_[i]) continue;
      std::size_t b = bound_count(from_[i]);
      if (pick == from_.size() || b > best) {
        pick = i;
        best = b;
      }
    }
    const Atom& src = from_[pick];
    auto it = by_predicate_.find(src.predicate);
    if (it == by_predicate_.end()) return false;
    used_[pick] = true;
    for (const Atom* dst : it->second) {
      if (dst->arity() != src.arity()) continue;
      std::vector<std::string> added;
      bool ok = true;
      for (std::size_t k = 0; k < src.arity() && ok; ++k) {
        const Term& s = src.args[k];
        const Term& d = dst->args[k];
        if (s.is_constant()) {
          ok = d.is_constant() && d.name() == s.name();
        } else if (auto b = binding_.find(s.name()); b != binding_.end()) {
          ok = b->second == d;
        } else {
          binding_.emplace(s.name(), d);
          added.push_back(s.name());
        }
      }
      if (ok && step(done + 1)) return true;
      for (const auto& v : added) binding_.erase(v);
    }
    used_[pick] = false;
    return false;
  }

  const std::vector<Atom>& from_;
  std::unordered_map<std::string, std::vector<const Atom*>> by_predicate_;
  std::unordered_map<std::string, Term> binding_;
  std::vector<bool> used_;
};

CQ core_of(const CQ& cq) {
  CQ cur = cq;
  dedupe_atoms(cur.atoms);
  for (std::size_t i = 0; i < cur.atoms.size();) {
    CQ smaller = cur;
    smaller.atoms.erase(smaller.atoms.begin() + static_cast<std::ptrdiff_t>(i));
    if (has_homomorphism(cur, smaller)) {
      cur = std::move(smaller);
    } else {
      ++i;
    }
  }
  return cur;
}

}  // namespace

CQ canonicalize(const CQ& cq) {
  CQ input = cq;
  dedupe_atoms(input.atoms);
  if (input.atoms.empty()) return input;

  std::vector<std::vector<Atom>> forms;
  for (const auto& comp : connected_components(input)) forms.push_back(Labeler(comp.atoms).run());
  std::sort(forms.begin(), forms.end(), [](const auto& a, const auto& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), atom_less);
  });
  forms.erase(std::unique(forms.begin(), forms.end()), forms.end());

  std::vector<Atom> combined;
  std::size_t offset = 0;
  for (const auto& form : forms) {
    std::unordered_map<std::string, std::string> names;
    for (const auto& a : form)
      for (const auto& t : a.args)
        if (t.is_variable() && !names.count(t.name()))
          names.emplace(t.name(), "u" + std::to_string(offset + std::stoul(t.name().substr(1))));
    auto renamed = rename(form, names);
    combined.insert(combined.end(), renamed.begin(), renamed.end());
    offset += count_variables(form);
  }
  sort_atoms(combined);
  combined = renumber_by_occurrence(combined);
  sort_atoms(combined);
  return CQ{std::move(combined)};
}

UCQ canonicalize(const UCQ& q) {
  UCQ out;
  out.disjuncts.reserve(q.disjuncts.size());
  for (const auto& cq : q.disjuncts) out.disjuncts.push_back(canonicalize(cq));
  std::sort(out.disjuncts.begin(), out.disjuncts.end(), cq_less);
  out.disjuncts.erase(std::unique(out.disjuncts.begin(), out.disjuncts.end()), out.disjuncts.end());
  return out;
}

bool has_homomorphism(const CQ& from, const CQ& to) { return Matcher(from, to).run(); }

bool implies(const CQ& a, const CQ& b) { return has_homomorphism(b, a); }

bool implies(const UCQ& a, const UCQ& b) {
  return std::all_of(a.disjuncts.begin(), a.disjuncts.end(), [&](const CQ& da) {
    return std::any_of(b.disjuncts.begin(), b.disjuncts.end(),
                       [&](const CQ& db) { return implies(da, db); });
  });
}

UCQ minimize(const UCQ& q) {
  std::vector<CQ> cores;
  cores.reserve(q.disjuncts.size());
  for (const auto& cq : q.disjuncts) {
    if (cq.atoms.empty()) return UCQ(CQ{});
    cores.push_back(core_of(cq));
  }
  std::vector<bool> keep(cores.size(), true);
  for (std::size_t i = 0; i < cores.size(); ++i) {
    for (std::size_t j = 0; j < cores.size(); ++j) {
      if (i == j || !keep[j]) continue;
      if (implies(cores[i], cores[j]) && (j < i || !implies(cores[j], cores[i]))) {
        keep[i] = false;
        break;
      }
    }
  }
  UCQ out;
  for (std::size_t i = 0; i < cores.size(); ++i)
    if (keep[i]) out.disjuncts.push_back(std::move(cores[i]));
  return out;
}

UCQ normalize(const UCQ& q) { return canonicalize(minimize(q)); }

std::string key_of(const UCQ& q) {
  std::string out;
  for (const auto& cq : q.disjuncts) {
    for (const auto& a : cq.atoms) {
      out += a.predicate;
      for (const auto& t : a.args) {
        out += t.is_variable() ? '\x01' : '\x02';
        out += t.name();
      }
      out += '\x1e';
    }
    out += '\x1d';
  }
  return out;
}

}  // namespace liftpdb::logic

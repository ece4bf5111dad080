#include "liftpdb/pdb/oracle.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>
#include <vector>

#include "liftpdb/errors.hpp"

namespace liftpdb::pdb {

namespace {

using Mask = unsigned long long;

// Enumerates every homomorphism of a CQ into the support and records the set
// of support tuples it uses. The query holds in a world iff one of those
// sets is contained in it.
class Lineage {
 public:
  explicit Lineage(const std::vector<logic::Atom>& support) {
    for (std::size_t i = 0; i < support.size(); ++i) by_pred_[support[i].predicate].push_back(i);
    support_ = &support;
  }

  void add(const logic::CQ& cq, std::vector<Mask>& out) {
    atoms_ = &cq.atoms;
    binding_.clear();
    walk(0, 0, out);
  }

 private:
  void walk(std::size_t k, Mask used, std::vector<Mask>& out) {
    if (k == atoms_->size()) {
      out.push_back(used);
      return;
    }
    const logic::Atom& a = (*atoms_)[k];
    auto it = by_pred_.find(a.predicate);
    if (it == by_pred_.end()) return;
    for (std::size_t idx : it->second) {
      const logic::Atom& t = (*support_)[idx];
      if (t.arity() != a.arity()) continue;
      std::vector<std::string> bound_here;
      bool ok = true;
      for (std::size_t j = 0; j < a.arity() && ok; ++j) {
        const auto& term = a.args[j];
        const auto& value = t.args[j].name();
        if (term.is_constant()) {
          ok = term.name() == value;
        } else if (auto b = binding_.find(term.name()); b != binding_.end()) {
          ok = b->second == value;
        } else {
          binding_.emplace(term.name(), value);
          bound_here.push_back(term.name());
        }
      }
      if (ok) walk(k + 1, used | (Mask{1} << idx), out);
      for (const auto& v : bound_here) binding_.erase(v);
    }
  }

  const std::vector<logic::Atom>* support_ = nullptr;
  const std::vector<logic::Atom>* atoms_ = nullptr;
  std::map<std::string, std::vector<std::size_t>> by_pred_;
  std::unordered_map<std::string, std::string> binding_;
};

// Drops masks that contain another mask.
void prune(std::vector<Mask>& masks) {
  std::sort(masks.begin(), masks.end(), [](Mask a, Mask b) {
    int pa = __builtin_popcountll(a), pb = __builtin_popcountll(b);
    return pa != pb ? pa < pb : a < b;
  });
  masks.erase(std::unique(masks.begin(), masks.end()), masks.end());
  std::vector<Mask> kept;
  for (Mask m : masks)
    if (std::none_of(kept.begin(), kept.end(), [m](Mask k) { return (k & m) == k; })) kept.push_back(m);
  masks = std::move(kept);
}

}  // namespace

double oracle_query_prob(const ProbDatabase& db, const logic::UCQ& q, std::size_t cap) {
  std::vector<logic::Atom> support;
  std::vector<double> probs;
  for (const auto& [atom, p] : db.tuples())
    if (p != 0.0) {
      support.push_back(atom);
      probs.push_back(p);
    }
  if (support.size() > cap || support.size() >= 63)
    throw DataError("oracle refuses " + std::to_string(support.size()) + " uncertain tuples (cap " +
                    std::to_string(cap) + ")");

  std::vector<Mask> lineage;
  Lineage walker(support);
  for (const auto& cq : q.disjuncts) {
    walker.add(cq, lineage);
    if (!lineage.empty() && lineage.back() == 0) return 1.0;  // holds in every world
  }
  prune(lineage);
  if (lineage.empty()) return 0.0;

  // Doubling: after step i, weight covers the first i+1 tuples.
  const std::size_t n = support.size();
  const Mask worlds = Mask{1} << n;
  std::vector<double> weight(worlds);
  weight[0] = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Mask half = Mask{1} << i;
    for (Mask w = 0; w < half; ++w) {
      weight[w | half] = weight[w] * probs[i];
      weight[w] *= 1.0 - probs[i];
    }
  }

  double total = 0.0;
  for (Mask w = 0; w < worlds; ++w)
    if (std::any_of(lineage.begin(), lineage.end(), [w](Mask m) { return (m & w) == m; })) total += weight[w];
  return total;
}

}  // namespace liftpdb::pdb

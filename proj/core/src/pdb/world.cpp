#include "liftpdb/pdb/world.hpp"

#include <algorithm>

#include "liftpdb/errors.hpp"
#include "liftpdb/logic/canonical.hpp"

namespace liftpdb::pdb {

void World::set(const logic::Atom& ground, bool value) {
  if (!ground.is_ground()) throw DataError("world assignment to non-ground atom " + logic::to_string(ground));
  truth_[ground] = value;
}

bool World::holds(const logic::Atom& ground) const {
  auto it = truth_.find(ground);
  return it != truth_.end() && it->second;
}

std::optional<bool> World::assignment(const logic::Atom& ground) const {
  auto it = truth_.find(ground);
  if (it == truth_.end()) return std::nullopt;
  return it->second;
}

std::vector<logic::Atom> World::true_atoms() const {
  std::vector<logic::Atom> out;
  for (const auto& [a, v] : truth_)
    if (v) out.push_back(a);
  std::sort(out.begin(), out.end());
  return out;
}

World world_from_mask(const ProbDatabase& db, unsigned long long mask) {
  World w;
  const auto& tuples = db.tuples();
  for (std::size_t i = 0; i < tuples.size(); ++i) w.set(tuples[i].first, (mask >> i) & 1ULL);
  return w;
}

double world_prob(const ProbDatabase& db, const World& w) {
  double p = 1.0;
  for (const auto& [atom, q] : db.tuples()) {
    auto v = w.assignment(atom);
    if (!v) throw DataError("world does not assign tuple " + logic::to_string(atom));
    p *= *v ? q : 1.0 - q;
  }
  for (const auto& a : w.true_atoms())
    if (!db.contains(a)) return 0.0;
  return p;
}

bool models(const World& w, const logic::UCQ& q) {
  logic::CQ facts{w.true_atoms()};
  return std::any_of(q.disjuncts.begin(), q.disjuncts.end(),
                     [&](const logic::CQ& cq) { return logic::has_homomorphism(cq, facts); });
}

bool models(const World& w, const logic::QueryTemplate& q) {
  if (!q.is_boolean())
    throw QueryError("query has free variable '" + q.free_var + "'; bind it before model checking");
  return models(w, q.body);
}

}  // namespace liftpdb::pdb

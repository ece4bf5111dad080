#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "liftpdb/logic/ast.hpp"
#include "liftpdb/pdb/database.hpp"

namespace liftpdb::pdb {

// A deterministic database instance. Atoms without an explicit assignment
// are false (closed world).
class World {
 public:
  World() = default;

  void set(const logic::Atom& ground, bool value);
  bool holds(const logic::Atom& ground) const;
  std::optional<bool> assignment(const logic::Atom& ground) const;
  std::vector<logic::Atom> true_atoms() const;

 private:
  std::unordered_map<logic::Atom, bool> truth_;
};

// Every tuple of db, in insertion order, assigned by the bits of `mask`.
World world_from_mask(const ProbDatabase& db, unsigned long long mask);

// Product of p over true tuples and (1 - p) over false ones. Throws
// DataError if w leaves a tuple of db unassigned. Zero if w asserts an atom
// that db does not hold.
double world_prob(const ProbDatabase& db, const World& w);

// w ⊨ q: some disjunct has a grounding whose atoms are all true in w.
bool models(const World& w, const logic::UCQ& q);
// Throws QueryError unless the template is Boolean.
bool models(const World& w, const logic::QueryTemplate& q);

}  // namespace liftpdb::pdb

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "liftpdb/logic/ast.hpp"

namespace liftpdb::logic {

// A slice of an original predicate: positions holding a fixed constant are
// dropped from the arity; the remaining positions range over values that are
// not specialised at that position.
struct ShatterCell {
  std::string predicate;
  std::vector<std::optional<std::string>> pattern;

  friend bool operator==(const ShatterCell&, const ShatterCell&) = default;
};

class ShatterTable {
 public:
  ShatterTable() = default;

  // Per original predicate, per position: the constants split off there.
  const std::map<std::string, std::vector<std::set<std::string>>>& splits() const { return splits_; }
  // Specialised predicate name -> slice of the original predicate.
  const std::map<std::string, ShatterCell>& cells() const { return cells_; }
  const std::set<std::string>& query_predicates() const { return query_predicates_; }

  // Moves a ground tuple of an original predicate into its slice. Returns
  // nullopt for predicates the query does not mention and for slices the
  // shattered query never uses.
  std::optional<Atom> relocate(const Atom& tuple) const;

  // Maps a ground atom over specialised predicates back to the original
  // tuple. Returns nullopt when an argument is excluded from the slice (such
  // an atom has probability 0). Names that are not slices are returned as is.
  std::optional<Atom> restore(const Atom& atom) const;

 private:
  friend struct ShatterBuilder;

  std::map<std::string, std::vector<std::set<std::string>>> splits_;
  std::map<std::string, ShatterCell> cells_;
  std::map<std::pair<std::string, std::vector<std::optional<std::string>>>, std::string> names_;
  std::set<std::string> query_predicates_;
};

struct Shattered {
  UCQ query;
  ShatterTable table;
};

// Removes constants from q. Every atom with a constant at position i becomes
// an atom of a lower-arity predicate specialised on that constant, e.g.
// R(A,x) becomes R_A(x). Variables that meet a specialised position are
// case-split on the specialised constants, so slices of one predicate stay
// disjoint and the result is equivalent to q over the relocated tuples.
// A fully constant atom becomes a 0-ary predicate.
Shattered shatter(const UCQ& q);

}  // namespace liftpdb::logic

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "liftpdb/logic/ast.hpp"

namespace liftpdb::logic {

// Groups atoms that are linked, transitively, by shared variables. Ground atoms
// form singleton components. Components appear in order of their first atom.
std::vector<CQ> connected_components(const CQ& cq);

// Rewrites q as Q1 ∧ ... ∧ Qm by splitting each disjunct into connected
// components and distributing ∨ over ∧. Returned conjuncts are normalized,
// deduplicated, and conjuncts implied by another conjunct are dropped.
// Returns {normalize(q)} when nothing splits.
std::vector<UCQ> rewrite_as_conjunction(const UCQ& q);

// Two atoms may denote the same tuple iff they have the same predicate and
// no position holds two different constants.
bool may_unify(const Atom& a, const Atom& b);

// True iff no atom of a may denote the same tuple as an atom of b. For
// constant-free queries this is disjointness of the predicate symbols.
bool symbolically_independent(const UCQ& a, const UCQ& b);

// One variable per disjunct (same order as q.disjuncts).
struct Separator {
  std::vector<std::string> variables;
};

// Finds a separator: per disjunct a variable occurring in every atom of that
// disjunct such that, for every predicate, all its atoms hold their chosen
// variable at the same set of positions. Candidates are tried in
// lexicographic order of variable name, disjunct by disjunct; the first
// complete assignment wins.
std::optional<Separator> find_separator(const UCQ& q);

// Replaces each disjunct's separator variable by `constant`.
UCQ substitute(const UCQ& q, const Separator& sep, const std::string& constant);

}  // namespace liftpdb::logic

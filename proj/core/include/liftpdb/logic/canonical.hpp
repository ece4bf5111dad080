#pragma once

#include <string>

#include "liftpdb/logic/ast.hpp"

namespace liftpdb::logic {

// Renames variables to v0, v1, ... so that alpha-equivalent CQs map to the
// same form. Duplicate atoms and isomorphic connected components are merged.
// Atoms are ordered by (arity, predicate, arguments).
CQ canonicalize(const CQ& cq);

// Canonicalizes every disjunct, sorts them and removes duplicates.
// Idempotent; preserves logical equivalence.
UCQ canonicalize(const UCQ& q);

// True iff there is a mapping of `from`'s variables to terms of `to` that
// sends every atom of `from` onto an atom of `to` (constants fixed).
bool has_homomorphism(const CQ& from, const CQ& to);

// a ⇒ b, decided by homomorphism from b into a.
bool implies(const CQ& a, const CQ& b);
// a ⇒ b for UCQs: every disjunct of a implies some disjunct of b.
bool implies(const UCQ& a, const UCQ& b);

// Removes redundant atoms (core of each CQ) and disjuncts implied by another.
UCQ minimize(const UCQ& q);

// minimize followed by canonicalize: a canonical representative of the
// equivalence class of q.
UCQ normalize(const UCQ& q);

// Compact unambiguous serialization, suitable as a map key.
std::string key_of(const UCQ& q);

}  // namespace liftpdb::logic

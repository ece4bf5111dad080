#pragma once

#include <optional>
#include <string>

#include "liftpdb/errors.hpp"
#include "liftpdb/lift/plan.hpp"
#include "liftpdb/logic/ast.hpp"
#include "liftpdb/pdb/database.hpp"

namespace liftpdb::lift {

// The query is #P-hard: the algorithm reached a subquery where no rule applies.
class UnsafeQueryError : public QueryError {
 public:
  explicit UnsafeQueryError(logic::UCQ blocking);
  const logic::UCQ& blocking() const noexcept { return blocking_; }

 private:
  logic::UCQ blocking_;
};

// Runs the lifted algorithm symbolically and records the rules it applies.
// The input must be shattered: constant-free, or at least every atom of a
// predicate carries the same constants at the same positions. Throws
// UnsafeQueryError on failure and QueryError for malformed input (unshattered
// constants, misaligned repeated predicates, oversized queries).
Plan compile(const logic::UCQ& q);

// Evaluates a compiled plan. Separators range over source.domain().
double evaluate(const Plan& plan, const pdb::TupleSource& source);

struct LiftResult {
  double probability = 0.0;
  Plan plan;
};

// Exact probability of a shattered Boolean UCQ.
LiftResult lift(const logic::UCQ& q, const pdb::TupleSource& source);

// Shatters q, then lifts it against the original tuples.
LiftResult lift_shattered(const logic::UCQ& q, const pdb::TupleSource& source);

struct SafetyVerdict {
  bool safe = false;
  std::optional<Plan> plan;           // when safe
  std::optional<logic::UCQ> blocking; // when unsafe
};

// Safe iff compile never fails. No probabilities are read. When the blocking
// subquery is the input itself it is reported with the input's own names.
SafetyVerdict classify(const logic::UCQ& q);
// Additionally checks that every predicate of q is in the vocabulary with the
// same arity.
SafetyVerdict classify(const logic::UCQ& q, const pdb::Vocabulary& vocab);

}  // namespace liftpdb::lift

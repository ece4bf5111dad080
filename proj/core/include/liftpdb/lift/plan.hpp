#pragma once

#include <memory>
#include <string>
#include <vector>

#include "liftpdb/logic/ast.hpp"

namespace liftpdb::lift {

enum class Step {
  Constant,            // empty query: false (0) or true (1)
  Lookup,              // Step 0: a single ground atom
  Product,             // Step 2: independent conjuncts
  InclusionExclusion,  // Step 3
  IndependentUnion,    // Step 4: independent disjuncts
  Quantifier,          // Step 5: separator variable
};

struct PlanNode;
using PlanPtr = std::shared_ptr<const PlanNode>;

// Argument of a lookup: a fixed constant or the value bound to a separator slot.
struct LookupArg {
  int slot = -1;  // -1: fixed constant
  std::string constant;
};

// One node of a lifted plan. Plans are DAGs: identical subqueries share a node.
// Queries inside a plan may mention placeholder constants `$k`, which stand
// for the value of the k-th enclosing separator.
struct PlanNode {
  Step step = Step::Constant;
  logic::UCQ query;

  double value = 0.0;                   // Constant
  std::string predicate;                // Lookup
  std::vector<LookupArg> args;          // Lookup
  std::vector<PlanPtr> children;        // Product, InclusionExclusion, IndependentUnion, Quantifier
  std::vector<long long> coefficients;  // InclusionExclusion, one per child
  int slot = -1;                        // Quantifier
  std::vector<std::string> separator;   // Quantifier, one variable per disjunct
};

struct Plan {
  PlanPtr root;
  int slots = 0;  // environment size needed to evaluate
};

const char* step_name(Step s);

// Indented text, one step per line.
std::string explain(const Plan& plan);

}  // namespace liftpdb::lift

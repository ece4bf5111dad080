#pragma once

#include <cstddef>

#include "liftpdb/logic/ast.hpp"
#include "liftpdb/pdb/database.hpp"

namespace liftpdb::pdb {

inline constexpr std::size_t kDefaultOracleCap = 20;

// Exact P(q) by summing world_prob over every world that satisfies q.
// Only tuples with nonzero probability span the world space; all other atoms
// are false in every world of positive weight. Throws DataError if that
// support exceeds `cap` tuples.
double oracle_query_prob(const ProbDatabase& db, const logic::UCQ& q,
                         std::size_t cap = kDefaultOracleCap);

}  // namespace liftpdb::pdb

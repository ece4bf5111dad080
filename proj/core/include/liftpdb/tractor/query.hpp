#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "liftpdb/logic/ast.hpp"
#include "liftpdb/logic/shatter.hpp"
#include "liftpdb/pdb/database.hpp"
#include "liftpdb/tractor/model.hpp"

namespace liftpdb::tractor {

// Predicate names used by rewritten queries: E(x) for entities and the 0-ary
// T_<relation>() per relation.
inline constexpr const char* kEntityPredicate = "E";
std::string relation_predicate(const std::string& relation);

// E_i(h) * T_i(R) * E_i(t), component i in [0, d).
double component_triple_prob(const TractorModel& m, std::size_t i, const std::string& h, const std::string& r,
                             const std::string& t);

// Mean over components, then noisy-or with the relation's bias.
double triple_prob(const TractorModel& m, const std::string& h, const std::string& r, const std::string& t);

// Σ_i a[i] * b[i] * c[i]. Throws DataError on length mismatch.
double distmult_score(std::span<const double> h, std::span<const double> r, std::span<const double> t);

// Replaces every binary atom R(s,t) by E(s) ∧ T_R() ∧ E(t) and merges
// duplicate atoms. With a shatter table, slices of a model relation (R_A(x),
// R_A_B()) are rewritten through their original atom. Other atoms are kept.
// Throws QueryError for binary atoms of unknown relations and for kept atoms
// that clash with the reserved names.
logic::UCQ rewrite_unary(const logic::UCQ& q, const TractorModel& m,
                         const logic::ShatterTable* table = nullptr);

// Component i of m as a tuple-independent database over E and T_R.
class ComponentSource final : public pdb::TupleSource {
 public:
  ComponentSource(const TractorModel& m, std::size_t component) : m_(m), i_(component) {}
  double tuple_prob(const logic::Atom& ground) const override;
  std::span<const std::string> domain() const override { return m_.entities(); }

 private:
  const TractorModel& m_;
  std::size_t i_;
};

// Boolean UCQ over model relations. Rewritten, shattered and compiled once,
// then evaluated per component and averaged. The bias does not enter query
// evaluation. Throws DataError/QueryError for unknown names and
// InvariantViolation if the lifted algorithm fails (never expected).
double query_prob(const TractorModel& m, const logic::UCQ& q);

struct MappingFn {
  std::string name;
  std::function<double(double)> fn;
};
MappingFn sigmoid();
double score_to_prob(const MappingFn& g, double s);

// Scores every candidate by query_prob of the instantiated template; sorted
// by descending score, ties by entity order in the model.
std::vector<std::pair<std::string, double>> answer_template(const TractorModel& m, const logic::QueryTemplate& tpl,
                                                            const std::vector<std::string>& candidates);

}  // namespace liftpdb::tractor

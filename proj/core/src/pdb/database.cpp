#include "liftpdb/pdb/database.hpp"

#include <cmath>

#include "liftpdb/errors.hpp"

namespace liftpdb::pdb {

void Vocabulary::add_predicate(const std::string& name, std::size_t arity) {
  auto [it, fresh] = predicates_.emplace(name, arity);
  if (!fresh && it->second != arity)
    throw DataError("predicate " + name + " used with arity " + std::to_string(arity) +
                    " and " + std::to_string(it->second));
}

void Vocabulary::add_constant(const std::string& name) {
  if (constants_.insert(name).second) domain_.push_back(name);
}

void ProbDatabase::insert(const logic::Atom& tuple, double p) {
  if (!tuple.is_ground()) throw DataError("tuple " + logic::to_string(tuple) + " is not ground");
  if (!std::isfinite(p)) throw DataError("probability of " + logic::to_string(tuple) + " is not finite");
  if (!formal_ && (p < 0.0 || p > 1.0))
    throw DataError("probability " + std::to_string(p) + " of " + logic::to_string(tuple) +
                    " outside [0,1]");
  if (index_.count(tuple)) throw DataError("tuple " + logic::to_string(tuple) + " appears twice");
  vocabulary_.add_predicate(tuple.predicate, tuple.arity());
  for (const auto& t : tuple.args) vocabulary_.add_constant(t.name());
  index_.emplace(tuple, tuples_.size());
  tuples_.emplace_back(tuple, p);
}

void ProbDatabase::declare_constant(const std::string& name) {
  if (!vocabulary_.has_constant(name)) declared_.push_back(name);
  vocabulary_.add_constant(name);
}

double ProbDatabase::tuple_prob(const logic::Atom& ground) const {
  if (!ground.is_ground()) throw DataError("lookup of non-ground atom " + logic::to_string(ground));
  auto it = index_.find(ground);
  return it == index_.end() ? 0.0 : tuples_[it->second].second;
}

bool operator==(const ProbDatabase& a, const ProbDatabase& b) {
  if (a.formal_ != b.formal_ || a.tuples_.size() != b.tuples_.size()) return false;
  if (!(a.vocabulary_ == b.vocabulary_)) return false;
  for (const auto& [atom, p] : a.tuples_) {
    auto it = b.index_.find(atom);
    if (it == b.index_.end() || b.tuples_[it->second].second != p) return false;
  }
  return true;
}

double ShatteredSource::tuple_prob(const logic::Atom& ground) const {
  auto original = table_.restore(ground);
  return original ? base_.tuple_prob(*original) : 0.0;
}

ProbDatabase relocate(const ProbDatabase& db, const logic::ShatterTable& table) {
  ProbDatabase out(db.formal());
  for (const auto& c : db.domain()) out.declare_constant(c);
  for (const auto& [atom, p] : db.tuples())
    if (auto moved = table.relocate(atom)) out.insert(*moved, p);
  return out;
}

}  // namespace liftpdb::pdb

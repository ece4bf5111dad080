#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "liftpdb/logic/ast.hpp"
#include "liftpdb/logic/shatter.hpp"

namespace liftpdb::pdb {

// Predicates with fixed arities over an untyped domain of constants.
class Vocabulary {
 public:
  void add_predicate(const std::string& name, std::size_t arity);
  void add_constant(const std::string& name);

  const std::map<std::string, std::size_t>& predicates() const { return predicates_; }
  // Constants in first-seen order.
  const std::vector<std::string>& domain() const { return domain_; }
  bool has_constant(const std::string& name) const { return constants_.count(name) > 0; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.predicates_ == b.predicates_ && a.constants_ == b.constants_;
  }

 private:
  std::map<std::string, std::size_t> predicates_;
  std::vector<std::string> domain_;
  std::set<std::string> constants_;
};

// Anything that assigns probabilities to ground atoms over a finite domain.
// Atoms it does not know have probability 0.
class TupleSource {
 public:
  virtual ~TupleSource() = default;
  virtual double tuple_prob(const logic::Atom& ground) const = 0;
  virtual std::span<const std::string> domain() const = 0;
};

// Tuple-independent probabilistic database: each ground atom appears at most
// once with a probability in [0,1]. In formal mode any real is accepted.
class ProbDatabase final : public TupleSource {
 public:
  explicit ProbDatabase(bool formal = false) : formal_(formal) {}

  // Throws DataError for non-ground atoms, repeated atoms, arity clashes and
  // probabilities outside [0,1] (unless formal).
  void insert(const logic::Atom& tuple, double p);
  // Adds a constant to the domain without any tuple mentioning it.
  void declare_constant(const std::string& name);

  double tuple_prob(const logic::Atom& ground) const override;
  std::span<const std::string> domain() const override { return vocabulary_.domain(); }

  bool contains(const logic::Atom& tuple) const { return index_.count(tuple) > 0; }
  const Vocabulary& vocabulary() const { return vocabulary_; }
  // Tuples in insertion order.
  const std::vector<std::pair<logic::Atom, double>>& tuples() const { return tuples_; }
  const std::vector<std::string>& declared_constants() const { return declared_; }
  std::size_t size() const { return tuples_.size(); }
  bool formal() const { return formal_; }

  friend bool operator==(const ProbDatabase& a, const ProbDatabase& b);

 private:
  bool formal_;
  Vocabulary vocabulary_;
  std::vector<std::pair<logic::Atom, double>> tuples_;
  std::unordered_map<logic::Atom, std::size_t> index_;
  std::vector<std::string> declared_;
};

// Read-only view of a source through a shatter table: lookups on specialised
// predicates are answered by the original tuples.
class ShatteredSource final : public TupleSource {
 public:
  ShatteredSource(const TupleSource& base, const logic::ShatterTable& table)
      : base_(base), table_(table) {}

  double tuple_prob(const logic::Atom& ground) const override;
  std::span<const std::string> domain() const override { return base_.domain(); }

 private:
  const TupleSource& base_;
  const logic::ShatterTable& table_;
};

// Materialises the shattered database: tuples move to their slices; tuples of
// predicates or slices the shattered query does not use are dropped.
ProbDatabase relocate(const ProbDatabase& db, const logic::ShatterTable& table);

}  // namespace liftpdb::pdb

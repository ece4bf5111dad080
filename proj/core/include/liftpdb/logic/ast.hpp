#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace liftpdb::logic {

enum class TermKind : unsigned char { Variable, Constant };

// A variable or a constant. The two live in disjoint namespaces: the parser
// decides by the first character of the identifier.
class Term {
 public:
  Term() = default;

  static Term var(std::string name);
  static Term constant(std::string name);

  TermKind kind() const noexcept { return kind_; }
  bool is_variable() const noexcept { return kind_ == TermKind::Variable; }
  bool is_constant() const noexcept { return kind_ == TermKind::Constant; }
  const std::string& name() const noexcept { return name_; }

  friend auto operator<=>(const Term&, const Term&) = default;
  friend bool operator==(const Term&, const Term&) = default;

 private:
  Term(TermKind kind, std::string name) : kind_(kind), name_(std::move(name)) {}

  TermKind kind_ = TermKind::Variable;
  std::string name_;
};

struct Atom {
  std::string predicate;
  std::vector<Term> args;

  std::size_t arity() const noexcept { return args.size(); }
  bool is_ground() const noexcept;
  bool mentions(std::string_view variable) const noexcept;

  friend auto operator<=>(const Atom&, const Atom&) = default;
  friend bool operator==(const Atom&, const Atom&) = default;
};

Atom make_atom(std::string predicate, std::initializer_list<Term> args);
// Convenience for ground atoms: every argument is a constant.
Atom ground_atom(std::string predicate, const std::vector<std::string>& constants);

// Conjunction of atoms; every variable is existentially quantified.
// An empty atom list denotes `true`.
struct CQ {
  std::vector<Atom> atoms;

  std::set<std::string> variables() const;
  std::set<std::string> constants() const;
  bool is_ground() const noexcept;

  friend auto operator<=>(const CQ&, const CQ&) = default;
  friend bool operator==(const CQ&, const CQ&) = default;
};

// Disjunction of conjunctive queries. An empty disjunct list denotes `false`.
struct UCQ {
  std::vector<CQ> disjuncts;

  UCQ() = default;
  explicit UCQ(std::vector<CQ> ds) : disjuncts(std::move(ds)) {}
  explicit UCQ(CQ cq) : disjuncts{std::move(cq)} {}

  std::set<std::string> predicates() const;
  std::set<std::string> constants() const;
  std::size_t atom_count() const noexcept;

  friend auto operator<=>(const UCQ&, const UCQ&) = default;
  friend bool operator==(const UCQ&, const UCQ&) = default;
};

// A UCQ with one answer variable, e.g. `Q3(t) = EXISTS x. R(A,x) AND S(x,t)`.
// A template without an answer variable (free_var empty) is Boolean.
struct QueryTemplate {
  std::string name;
  std::string free_var;
  UCQ body;

  bool is_boolean() const noexcept { return free_var.empty(); }
  // Binds the answer variable to `entity` in every disjunct.
  UCQ instantiate(const std::string& entity) const;

  friend bool operator==(const QueryTemplate&, const QueryTemplate&) = default;
};

// Replaces every occurrence of `variable` by the constant `constant`.
// Absent variables leave the query unchanged.
Atom substitute(const Atom& atom, std::string_view variable, const std::string& constant);
CQ substitute(const CQ& cq, std::string_view variable, const std::string& constant);
UCQ substitute(const UCQ& q, std::string_view variable, const std::string& constant);

UCQ disjunction(const UCQ& a, const UCQ& b);

// Grammar form: re-parses to an equal AST.
std::string to_string(const Term& term);
std::string to_string(const Atom& atom);
std::string to_string(const CQ& cq);
std::string to_string(const UCQ& q);
std::string to_string(const QueryTemplate& tpl);

// Compact mathematical form, e.g. `R_A(x) ∧ S(x,y) ∧ T_B(y)`.
std::string to_display(const Atom& atom);
std::string to_display(const CQ& cq);
std::string to_display(const UCQ& q);

}  // namespace liftpdb::logic

template <>
struct std::hash<liftpdb::logic::Atom> {
  std::size_t operator()(const liftpdb::logic::Atom& atom) const noexcept;
};

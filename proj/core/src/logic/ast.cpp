#include "liftpdb/logic/ast.hpp"

#include <algorithm>
#include <cctype>

#include "liftpdb/errors.hpp"

namespace liftpdb::logic {

namespace {

bool is_keyword(std::string_view s) { return s == "EXISTS" || s == "AND" || s == "OR"; }

bool is_plain_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto first = static_cast<unsigned char>(s.front());
  if (!std::isalpha(first) && first != '_') return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || u == '_';
  });
}

std::string quoted(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

std::string predicate_text(const std::string& p) {
  return is_plain_identifier(p) && !is_keyword(p) ? p : quoted(p);
}

std::string join_args(const Atom& atom) {
  std::string out;
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    if (i) out += ',';
    out += to_string(atom.args[i]);
  }
  return out;
}

// Variables in order of first occurrence, optionally skipping one.
std::vector<std::string> ordered_variables(const CQ& cq, std::string_view skip = {}) {
  std::vector<std::string> vars;
  for (const auto& atom : cq.atoms)
    for (const auto& t : atom.args)
      if (t.is_variable() && t.name() != skip &&
          std::find(vars.begin(), vars.end(), t.name()) == vars.end())
        vars.push_back(t.name());
  return vars;
}

std::string cq_text(const CQ& cq, std::string_view free_var) {
  if (cq.atoms.empty()) throw QueryError("cannot print the empty conjunction");
  std::string out;
  auto vars = ordered_variables(cq, free_var);
  if (!vars.empty()) {
    out += "EXISTS ";
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (i) out += ',';
      out += vars[i];
    }
    out += ". ";
  }
  for (std::size_t i = 0; i < cq.atoms.size(); ++i) {
    if (i) out += " AND ";
    out += to_string(cq.atoms[i]);
  }
  return out;
}

std::string ucq_text(const UCQ& q, std::string_view free_var) {
  if (q.disjuncts.empty()) throw QueryError("cannot print the empty disjunction");
  std::string out;
  for (std::size_t i = 0; i < q.disjuncts.size(); ++i) {
    if (i) out += " OR ";
    out += cq_text(q.disjuncts[i], free_var);
  }
  return out;
}

}  // namespace

Term Term::var(std::string name) {
  if (name.empty()) throw QueryError("empty variable name");
  return Term(TermKind::Variable, std::move(name));
}

Term Term::constant(std::string name) {
  if (name.empty()) throw QueryError("empty constant name");
  return Term(TermKind::Constant, std::move(name));
}

bool Atom::is_ground() const noexcept {
  return std::all_of(args.begin(), args.end(), [](const Term& t) { return t.is_constant(); });
}

bool Atom::mentions(std::string_view variable) const noexcept {
  return std::any_of(args.begin(), args.end(), [&](const Term& t) {
    return t.is_variable() && t.name() == variable;
  });
}

Atom make_atom(std::string predicate, std::initializer_list<Term> args) {
  return Atom{std::move(predicate), std::vector<Term>(args)};
}

Atom ground_atom(std::string predicate, const std::vector<std::string>& constants) {
  Atom atom{std::move(predicate), {}};
  atom.args.reserve(constants.size());
  for (const auto& c : constants) atom.args.push_back(Term::constant(c));
  return atom;
}

std::set<std::string> CQ::variables() const {
  std::set<std::string> out;
  for (const auto& a : atoms)
    for (const auto& t : a.args)
      if (t.is_variable()) out.insert(t.name());
  return out;
}

std::set<std::string> CQ::constants() const {
  std::set<std::string> out;
  for (const auto& a : atoms)
    for (const auto& t : a.args)
      if (t.is_constant()) out.insert(t.name());
  return out;
}

bool CQ::is_ground() const noexcept {
  return std::all_of(atoms.begin(), atoms.end(), [](const Atom& a) { return a.is_ground(); });
}

std::set<std::string> UCQ::predicates() const {
  std::set<std::string> out;
  for (const auto& cq : disjuncts)
    for (const auto& a : cq.atoms) out.insert(a.predicate);
  return out;
}

std::set<std::string> UCQ::constants() const {
  std::set<std::string> out;
  for (const auto& cq : disjuncts) out.merge(cq.constants());
  return out;
}

std::size_t UCQ::atom_count() const noexcept {
  std::size_t n = 0;
  for (const auto& cq : disjuncts) n += cq.atoms.size();
  return n;
}

UCQ QueryTemplate::instantiate(const std::string& entity) const {
  if (is_boolean()) return body;
  return substitute(body, free_var, entity);
}

Atom substitute(const Atom& atom, std::string_view variable, const std::string& constant) {
  Atom out = atom;
  for (auto& t : out.args)
    if (t.is_variable() && t.name() == variable) t = Term::constant(constant);
  return out;
}

CQ substitute(const CQ& cq, std::string_view variable, const std::string& constant) {
  CQ out;
  out.atoms.reserve(cq.atoms.size());
  for (const auto& a : cq.atoms) out.atoms.push_back(substitute(a, variable, constant));
  return out;
}

UCQ substitute(const UCQ& q, std::string_view variable, const std::string& constant) {
  UCQ out;
  out.disjuncts.reserve(q.disjuncts.size());
  for (const auto& cq : q.disjuncts) out.disjuncts.push_back(substitute(cq, variable, constant));
  return out;
}

UCQ disjunction(const UCQ& a, const UCQ& b) {
  UCQ out = a;
  out.disjuncts.insert(out.disjuncts.end(), b.disjuncts.begin(), b.disjuncts.end());
  return out;
}

std::string to_string(const Term& term) {
  if (term.is_variable()) return term.name();
  const auto& n = term.name();
  bool bare = is_plain_identifier(n) && std::isupper(static_cast<unsigned char>(n.front())) &&
              !is_keyword(n);
  return bare ? n : quoted(n);
}

std::string to_string(const Atom& atom) {
  return predicate_text(atom.predicate) + "(" + join_args(atom) + ")";
}

std::string to_string(const CQ& cq) { return cq_text(cq, {}); }

std::string to_string(const UCQ& q) { return ucq_text(q, {}); }

std::string to_string(const QueryTemplate& tpl) {
  if (tpl.is_boolean()) return ucq_text(tpl.body, {});
  return tpl.name + "(" + tpl.free_var + ") = " + ucq_text(tpl.body, tpl.free_var);
}

std::string to_display(const Atom& atom) {
  if (atom.args.empty()) return atom.predicate;
  std::string out = atom.predicate + "(";
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    if (i) out += ',';
    out += atom.args[i].name();
  }
  return out + ")";
}

std::string to_display(const CQ& cq) {
  if (cq.atoms.empty()) return "true";
  std::string out;
  for (std::size_t i = 0; i < cq.atoms.size(); ++i) {
    if (i) out += " ∧ ";
    out += to_display(cq.atoms[i]);
  }
  return out;
}

std::string to_display(const UCQ& q) {
  if (q.disjuncts.empty()) return "false";
  if (q.disjuncts.size() == 1) return to_display(q.disjuncts.front());
  std::string out;
  for (std::size_t i = 0; i < q.disjuncts.size(); ++i) {
    if (i) out += " ∨ ";
    out += "(" + to_display(q.disjuncts[i]) + ")";
  }
  return out;
}

}  // namespace liftpdb::logic

std::size_t std::hash<liftpdb::logic::Atom>::operator()(
    const liftpdb::logic::Atom& atom) const noexcept {
  std::size_t h = std::hash<std::string>{}(atom.predicate);
  for (const auto& t : atom.args) {
    std::size_t th = std::hash<std::string>{}(t.name()) ^ (t.is_variable() ? 0x9e3779b9u : 0u);
    h ^= th + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

#include "liftpdb/tractor/query.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "liftpdb/errors.hpp"
#include "liftpdb/lift/lift.hpp"
#include "liftpdb/logic/canonical.hpp"

namespace liftpdb::tractor {

using logic::Atom;
using logic::CQ;
using logic::Term;
using logic::UCQ;

std::string relation_predicate(const std::string& relation) { return "T_" + relation; }

double component_triple_prob(const TractorModel& m, std::size_t i, const std::string& h, const std::string& r,
                             const std::string& t) {
  if (i >= m.d()) throw DataError("component " + std::to_string(i) + " out of range");
  return m.E(i, m.entity_index(h)) * m.T(i, m.relation_index(r)) * m.E(i, m.entity_index(t));
}

double triple_prob(const TractorModel& m, const std::string& h, const std::string& r, const std::string& t) {
  const std::size_t hi = m.entity_index(h), ri = m.relation_index(r), ti = m.entity_index(t);
  double sum = 0.0;
  for (std::size_t i = 0; i < m.d(); ++i) sum += m.E(i, hi) * m.T(i, ri) * m.E(i, ti);
  const double p = sum / static_cast<double>(m.d());
  const double b = m.bias(ri);
  return b == 0.0 ? p : 1.0 - (1.0 - p) * (1.0 - b);
}

double distmult_score(std::span<const double> h, std::span<const double> r, std::span<const double> t) {
  if (h.size() != r.size() || r.size() != t.size()) throw DataError("embedding lengths differ");
  double s = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) s += h[i] * r[i] * t[i];
  return s;
}

namespace {

void append_relation(CQ& out, const TractorModel& m, const std::string& relation, const Term& s, const Term& t) {
  if (!m.has_relation(relation)) throw QueryError("relation " + relation + " is not in the model");
  for (const auto& term : {s, t})
    if (term.is_constant() && !m.has_entity(term.name())) throw DataError("unknown entity " + term.name());
  out.atoms.push_back(Atom{kEntityPredicate, {s}});
  out.atoms.push_back(Atom{relation_predicate(relation), {}});
  out.atoms.push_back(Atom{kEntityPredicate, {t}});
}

}  // namespace

UCQ rewrite_unary(const UCQ& q, const TractorModel& m, const logic::ShatterTable* table) {
  UCQ out;
  for (const auto& cq : q.disjuncts) {
    CQ next;
    for (const auto& a : cq.atoms) {
      std::optional<Atom> original;
      if (a.arity() == 2) {
        original = a;
      } else if (table) {
        if (auto cell = table->cells().find(a.predicate); cell != table->cells().end()) {
          Atom full{cell->second.predicate, {}};
          std::size_t next_arg = 0;
          for (const auto& slot : cell->second.pattern)
            full.args.push_back(slot ? Term::constant(*slot) : a.args.at(next_arg++));
          if (full.arity() == 2) original = full;
        }
      }
      if (original) {
        append_relation(next, m, original->predicate, original->args[0], original->args[1]);
        continue;
      }
      if ((a.predicate == kEntityPredicate && a.arity() == 1) ||
          (a.arity() == 0 && a.predicate.rfind("T_", 0) == 0))
        throw QueryError("predicate " + a.predicate + " is reserved for rewritten queries");
      next.atoms.push_back(a);
    }
    std::vector<Atom> unique;
    for (auto& a : next.atoms)
      if (std::find(unique.begin(), unique.end(), a) == unique.end()) unique.push_back(std::move(a));
    out.disjuncts.push_back(CQ{std::move(unique)});
  }
  return out;
}

double ComponentSource::tuple_prob(const Atom& ground) const {
  if (ground.predicate == kEntityPredicate && ground.arity() == 1) {
    const auto& name = ground.args[0].name();
    return m_.has_entity(name) ? m_.E(i_, m_.entity_index(name)) : 0.0;
  }
  if (ground.arity() == 0 && ground.predicate.rfind("T_", 0) == 0) {
    const auto rel = ground.predicate.substr(2);
    return m_.has_relation(rel) ? m_.T(i_, m_.relation_index(rel)) : 0.0;
  }
  return 0.0;
}

double query_prob(const TractorModel& m, const UCQ& q) {
  for (const auto& cq : q.disjuncts)
    for (const auto& a : cq.atoms)
      if (a.arity() != 2) throw QueryError("TractOR queries use binary model relations only; got " + logic::to_display(a));
  const UCQ rewritten = logic::minimize(rewrite_unary(q, m));
  const auto sh = logic::shatter(rewritten);
  lift::Plan plan;
  try {
    plan = lift::compile(sh.query);
  } catch (const lift::UnsafeQueryError& e) {
    throw InvariantViolation("lifted inference failed on a unary query: " + logic::to_display(e.blocking()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < m.d(); ++i) {
    ComponentSource component(m, i);
    pdb::ShatteredSource view(component, sh.table);
    sum += lift::evaluate(plan, view);
  }
  return sum / static_cast<double>(m.d());
}

MappingFn sigmoid() {
  return {"sigmoid", [](double s) { return 1.0 / (1.0 + std::exp(-s)); }};
}

double score_to_prob(const MappingFn& g, double s) { return g.fn(s); }

std::vector<std::pair<std::string, double>> answer_template(const TractorModel& m, const logic::QueryTemplate& tpl,
                                                            const std::vector<std::string>& candidates) {
  if (candidates.empty()) throw DataError("no candidates to rank");
  struct Scored {
    std::size_t index;
    std::string name;
    double score;
  };
  std::vector<Scored> scored;
  scored.reserve(candidates.size());
  for (const auto& c : candidates) {
    const std::size_t idx = m.entity_index(c);
    const UCQ q = tpl.is_boolean() ? tpl.body : tpl.instantiate(c);
    scored.push_back({idx, c, query_prob(m, q)});
  }
  std::stable_sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    return a.score != b.score ? a.score > b.score : a.index < b.index;
  });
  std::vector<std::pair<std::string, double>> out;
  out.reserve(scored.size());
  for (auto& s : scored) out.emplace_back(std::move(s.name), s.score);
  return out;
}

}  // namespace liftpdb::tractor

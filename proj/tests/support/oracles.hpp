#pragma once

// Brute-force reference implementations used by the tests. They share no code
// with the library beyond the AST types.

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "liftpdb/logic/ast.hpp"
#include "liftpdb/pdb/database.hpp"
#include "liftpdb/tractor/model.hpp"

namespace oracle {

using liftpdb::logic::Atom;
using liftpdb::logic::CQ;
using liftpdb::logic::UCQ;

using Facts = std::set<std::pair<std::string, std::vector<std::string>>>;

inline std::pair<std::string, std::vector<std::string>> key(const Atom& a,
                                                             const std::map<std::string, std::string>& env) {
  std::vector<std::string> args;
  for (const auto& t : a.args) args.push_back(t.is_constant() ? t.name() : env.at(t.name()));
  return {a.predicate, args};
}

// Tries every assignment of the CQ's variables to domain values.
inline bool holds(const Facts& facts, const CQ& cq, const std::vector<std::string>& domain) {
  const auto var_set = cq.variables();
  std::vector<std::string> vars(var_set.begin(), var_set.end());
  std::map<std::string, std::string> env;
  std::function<bool(std::size_t)> go = [&](std::size_t i) -> bool {
    if (i == vars.size()) {
      for (const auto& a : cq.atoms)
        if (!facts.count(key(a, env))) return false;
      return true;
    }
    for (const auto& c : domain) {
      env[vars[i]] = c;
      if (go(i + 1)) return true;
    }
    return false;
  };
  return go(0);
}

inline bool holds(const Facts& facts, const UCQ& q, const std::vector<std::string>& domain) {
  for (const auto& cq : q.disjuncts)
    if (holds(facts, cq, domain)) return true;
  return false;
}

// Active domain of the facts and the query.
inline std::vector<std::string> domain_of(const Facts& universe, const UCQ& q) {
  std::set<std::string> d;
  for (const auto& f : universe) d.insert(f.second.begin(), f.second.end());
  for (const auto& c : q.constants()) d.insert(c);
  return {d.begin(), d.end()};
}

// Sum over all 2^n worlds of the tuples.
inline double world_sum(const liftpdb::pdb::ProbDatabase& db, const UCQ& q) {
  const auto& tuples = db.tuples();
  Facts universe;
  for (const auto& [a, p] : tuples) universe.insert(key(a, {}));
  const auto domain = domain_of(universe, q);
  const std::size_t n = tuples.size();
  double total = 0.0;
  for (unsigned long long mask = 0; mask < (1ULL << n); ++mask) {
    double w = 1.0;
    Facts facts;
    for (std::size_t i = 0; i < n; ++i) {
      const bool on = (mask >> i) & 1ULL;
      w *= on ? tuples[i].second : 1.0 - tuples[i].second;
      if (on) facts.insert(key(tuples[i].first, {}));
    }
    if (w != 0.0 && holds(facts, q, domain)) total += w;
  }
  return total;
}

// TractOR by definition: per component, enumerate the worlds of the latent
// E(e) and T(R) variables, materialise R(h,t) <=> E(h) & T(R) & E(t) and
// check q on the materialised facts. Averages over components.
inline double tractor_worlds(const liftpdb::tractor::TractorModel& m, const UCQ& q) {
  const auto& ents = m.entities();
  const auto& rels = m.relations();
  const std::size_t ne = ents.size(), nr = rels.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < m.d(); ++i) {
    double comp = 0.0;
    for (unsigned long long mask = 0; mask < (1ULL << (ne + nr)); ++mask) {
      double w = 1.0;
      for (std::size_t e = 0; e < ne; ++e) w *= ((mask >> e) & 1ULL) ? m.E(i, e) : 1.0 - m.E(i, e);
      for (std::size_t r = 0; r < nr; ++r) w *= ((mask >> (ne + r)) & 1ULL) ? m.T(i, r) : 1.0 - m.T(i, r);
      if (w == 0.0) continue;
      Facts facts;
      for (std::size_t r = 0; r < nr; ++r) {
        if (!((mask >> (ne + r)) & 1ULL)) continue;
        for (std::size_t h = 0; h < ne; ++h)
          for (std::size_t t = 0; t < ne; ++t)
            if (((mask >> h) & 1ULL) && ((mask >> t) & 1ULL)) facts.insert({rels[r], {ents[h], ents[t]}});
      }
      std::set<std::string> d(ents.begin(), ents.end());
      for (const auto& c : q.constants()) d.insert(c);
      if (holds(facts, q, {d.begin(), d.end()})) comp += w;
    }
    sum += comp;
  }
  return sum / static_cast<double>(m.d());
}

// Plain triple loop over exposed values.
inline double distmult(const liftpdb::tractor::TractorModel& m, std::size_t h, std::size_t r, std::size_t t) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.d(); ++i) s += m.E(i, h) * m.T(i, r) * m.E(i, t);
  return s;
}

inline liftpdb::tractor::TractorModel random_model(std::size_t entities, std::size_t relations, std::size_t d,
                                                   liftpdb::tractor::Mode mode, std::mt19937_64& rng) {
  std::vector<std::string> en, rn;
  for (std::size_t e = 0; e < entities; ++e) en.push_back("E" + std::to_string(e));
  for (std::size_t r = 0; r < relations; ++r) rn.push_back("R" + std::to_string(r));
  liftpdb::tractor::TractorModel m(en, rn, d, mode);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t e = 0; e < entities; ++e) m.set_E(i, e, u(rng));
    for (std::size_t r = 0; r < relations; ++r) m.set_T(i, r, u(rng));
  }
  return m;
}

}  // namespace oracle

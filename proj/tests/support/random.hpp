#pragma once

#include <algorithm>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "liftpdb/logic/ast.hpp"
#include "liftpdb/pdb/database.hpp"

namespace gen {

using liftpdb::logic::Atom;
using liftpdb::logic::CQ;
using liftpdb::logic::Term;
using liftpdb::logic::UCQ;

struct Pred {
  std::string name;
  std::size_t arity;
};

inline const std::vector<Pred>& preds() {
  static const std::vector<Pred> p{{"R", 2}, {"S", 2}, {"T", 1}, {"U", 1}};
  return p;
}

inline std::size_t pick(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

// Small random UCQ: 1-2 disjuncts, 1-3 atoms, variables x,y,z and
// (with probability `const_p` per argument) constants A,B.
inline UCQ random_ucq(std::mt19937_64& rng, double const_p = 0.0) {
  static const char* vars[] = {"x", "y", "z"};
  static const char* consts[] = {"A", "B"};
  std::bernoulli_distribution use_const(const_p);
  UCQ q;
  const std::size_t nd = 1 + pick(rng, 2);
  for (std::size_t d = 0; d < nd; ++d) {
    CQ cq;
    const std::size_t na = 1 + pick(rng, 3);
    for (std::size_t a = 0; a < na; ++a) {
      const auto& p = preds()[pick(rng, preds().size())];
      Atom at{p.name, {}};
      for (std::size_t k = 0; k < p.arity; ++k)
        at.args.push_back(use_const(rng) ? Term::constant(consts[pick(rng, 2)]) : Term::var(vars[pick(rng, 3)]));
      cq.atoms.push_back(at);
    }
    q.disjuncts.push_back(cq);
  }
  return q;
}

// Random tuples over domain {A,B,C,...} (size n), at most `max_tuples`.
// Probabilities include the endpoints 0 and 1 now and then.
inline liftpdb::pdb::ProbDatabase random_db(std::mt19937_64& rng, std::size_t n, std::size_t max_tuples,
                                            const std::vector<Pred>& ps = preds()) {
  std::vector<std::string> dom;
  for (std::size_t i = 0; i < n; ++i) dom.push_back(std::string(1, static_cast<char>('A' + i)));
  std::vector<Atom> all;
  for (const auto& p : ps) {
    if (p.arity == 0) all.push_back(liftpdb::logic::ground_atom(p.name, {}));
    if (p.arity == 1)
      for (const auto& a : dom) all.push_back(liftpdb::logic::ground_atom(p.name, {a}));
    if (p.arity == 2)
      for (const auto& a : dom)
        for (const auto& b : dom) all.push_back(liftpdb::logic::ground_atom(p.name, {a, b}));
  }
  std::shuffle(all.begin(), all.end(), rng);
  if (all.size() > max_tuples) all.resize(max_tuples);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  liftpdb::pdb::ProbDatabase db;
  for (const auto& c : dom) db.declare_constant(c);
  for (const auto& a : all) {
    const double r = u(rng);
    db.insert(a, r < 0.05 ? 0.0 : r > 0.95 ? 1.0 : u(rng));
  }
  return db;
}

}  // namespace gen

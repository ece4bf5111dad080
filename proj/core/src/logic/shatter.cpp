#include "liftpdb/logic/shatter.hpp"

#include <algorithm>
#include <deque>

#include "liftpdb/errors.hpp"
#include "liftpdb/logic/canonical.hpp"

namespace liftpdb::logic {

namespace {

using Pattern = std::vector<std::optional<std::string>>;
using Splits = std::map<std::string, std::vector<std::set<std::string>>>;

struct Pending {
  CQ cq;
  std::map<std::string, std::set<std::string>> excluded;
};

Splits collect_splits(const std::vector<Pending>& cqs) {
  Splits splits;
  for (const auto& p : cqs)
    for (const auto& a : p.cq.atoms) {
      bool has_const = std::any_of(a.args.begin(), a.args.end(), [](const Term& t) { return t.is_constant(); });
      if (!has_const) continue;
      auto& slots = splits[a.predicate];
      if (slots.size() < a.arity()) slots.resize(a.arity());
      for (std::size_t k = 0; k < a.arity(); ++k)
        if (a.args[k].is_constant()) slots[k].insert(a.args[k].name());
    }
  return splits;
}

// Constants that `var` must be case-split on but has not been yet.
std::set<std::string> pending_cases(const Pending& p, const std::string& var, const Splits& splits) {
  std::set<std::string> need;
  for (const auto& a : p.cq.atoms) {
    auto it = splits.find(a.predicate);
    if (it == splits.end()) continue;
    for (std::size_t k = 0; k < a.arity() && k < it->second.size(); ++k)
      if (a.args[k].is_variable() && a.args[k].name() == var) need.insert(it->second[k].begin(), it->second[k].end());
  }
  if (auto ex = p.excluded.find(var); ex != p.excluded.end())
    for (const auto& c : ex->second) need.erase(c);
  return need;
}

std::vector<std::string> variables_in_order(const CQ& cq) {
  std::vector<std::string> out;
  for (const auto& a : cq.atoms)
    for (const auto& t : a.args)
      if (t.is_variable() && std::find(out.begin(), out.end(), t.name()) == out.end()) out.push_back(t.name());
  return out;
}

// One round of case splitting against fixed splits. Returns true if anything split.
bool expand(std::vector<Pending>& cqs, const Splits& splits) {
  bool changed = false;
  std::vector<Pending> done;
  std::deque<Pending> work(cqs.begin(), cqs.end());
  while (!work.empty()) {
    Pending p = std::move(work.front());
    work.pop_front();
    bool split = false;
    for (const auto& v : variables_in_order(p.cq)) {
      auto need = pending_cases(p, v, splits);
      if (need.empty()) continue;
      for (const auto& c : need) {
        Pending bound{substitute(p.cq, v, c), p.excluded};
        bound.excluded.erase(v);
        work.push_back(std::move(bound));
      }
      p.excluded[v].insert(need.begin(), need.end());
      work.push_back(std::move(p));
      split = changed = true;
      break;
    }
    if (!split) done.push_back(std::move(p));
  }
  cqs = std::move(done);
  return changed;
}

std::string short_name(const std::string& pred, const Pattern& pattern) {
  std::string name = pred;
  for (const auto& c : pattern)
    if (c) name += "_" + *c;
  return name;
}

std::string positional_name(const std::string& pred, const Pattern& pattern) {
  std::string name = pred;
  for (const auto& c : pattern) name += "_" + c.value_or("");
  return name;
}

}  // namespace

struct ShatterBuilder {
  static Shattered build(const UCQ& q) {
    Shattered out;
    ShatterTable& table = out.table;
    table.query_predicates_ = q.predicates();

    std::vector<Pending> cqs;
    for (const auto& cq : q.disjuncts) cqs.push_back({cq, {}});
    Splits splits = collect_splits(cqs);
    while (true) {
      bool changed = expand(cqs, splits);
      Splits next = collect_splits(cqs);
      if (!changed && next == splits) break;
      splits = std::move(next);
    }
    // Pad position lists to full arity.
    for (const auto& p : cqs)
      for (const auto& a : p.cq.atoms)
        if (auto it = splits.find(a.predicate); it != splits.end() && it->second.size() < a.arity())
          it->second.resize(a.arity());
    table.splits_ = splits;

    // Cells used by the expanded query.
    std::map<std::string, std::set<Pattern>> used;
    for (const auto& p : cqs)
      for (const auto& a : p.cq.atoms) {
        if (!splits.count(a.predicate)) continue;
        Pattern pat;
        for (const auto& t : a.args)
          pat.push_back(t.is_constant() ? std::optional<std::string>(t.name()) : std::nullopt);
        used[a.predicate].insert(pat);
      }

    std::set<std::string> taken;
    for (const auto& p : table.query_predicates_)
      if (!splits.count(p)) taken.insert(p);
    for (const auto& [pred, patterns] : used) {
      auto name_all = [&](auto namer) {
        std::map<Pattern, std::string> names;
        std::set<std::string> local;
        for (const auto& pat : patterns) {
          std::string n = std::all_of(pat.begin(), pat.end(), [](const auto& c) { return !c; })
                              ? pred
                              : namer(pred, pat);
          if (taken.count(n) || !local.insert(n).second) return std::map<Pattern, std::string>{};
          names.emplace(pat, n);
        }
        return names;
      };
      auto names = name_all(short_name);
      if (names.empty()) names = name_all(positional_name);
      if (names.empty()) {
        for (const auto& pat : patterns) {
          std::string base = positional_name(pred, pat);
          std::string n = base;
          for (int k = 1; taken.count(n); ++k) n = base + "_" + std::to_string(k);
          names.emplace(pat, n);
          taken.insert(n);
        }
      }
      for (const auto& [pat, n] : names) {
        taken.insert(n);
        table.cells_.emplace(n, ShatterCell{pred, pat});
        table.names_.emplace(std::make_pair(pred, pat), n);
      }
    }

    for (const auto& p : cqs) {
      CQ cq;
      for (const auto& a : p.cq.atoms) {
        if (!splits.count(a.predicate)) {
          cq.atoms.push_back(a);
          continue;
        }
        Pattern pat;
        Atom sliced;
        for (const auto& t : a.args) {
          pat.push_back(t.is_constant() ? std::optional<std::string>(t.name()) : std::nullopt);
          if (t.is_variable()) sliced.args.push_back(t);
        }
        sliced.predicate = table.names_.at({a.predicate, pat});
        cq.atoms.push_back(std::move(sliced));
      }
      out.query.disjuncts.push_back(std::move(cq));
    }
    out.query = minimize(out.query);
    return out;
  }
};

Shattered shatter(const UCQ& q) { return ShatterBuilder::build(q); }

std::optional<Atom> ShatterTable::relocate(const Atom& tuple) const {
  if (!query_predicates_.count(tuple.predicate)) return std::nullopt;
  auto it = splits_.find(tuple.predicate);
  if (it == splits_.end()) return tuple;
  if (tuple.arity() != it->second.size()) return std::nullopt;
  Pattern pat;
  Atom sliced;
  for (std::size_t k = 0; k < tuple.arity(); ++k) {
    const auto& name = tuple.args[k].name();
    if (it->second[k].count(name)) {
      pat.emplace_back(name);
    } else {
      pat.emplace_back(std::nullopt);
      sliced.args.push_back(tuple.args[k]);
    }
  }
  auto n = names_.find({tuple.predicate, pat});
  if (n == names_.end()) return std::nullopt;
  sliced.predicate = n->second;
  return sliced;
}

std::optional<Atom> ShatterTable::restore(const Atom& atom) const {
  auto it = cells_.find(atom.predicate);
  if (it == cells_.end()) return atom;
  const ShatterCell& cell = it->second;
  const auto& slots = splits_.at(cell.predicate);
  Atom original{cell.predicate, {}};
  std::size_t next = 0;
  for (std::size_t k = 0; k < cell.pattern.size(); ++k) {
    if (cell.pattern[k]) {
      original.args.push_back(Term::constant(*cell.pattern[k]));
      continue;
    }
    if (next >= atom.arity()) throw QueryError("arity mismatch for shattered predicate " + atom.predicate);
    const Term& t = atom.args[next++];
    if (t.is_constant() && slots[k].count(t.name())) return std::nullopt;
    original.args.push_back(t);
  }
  if (next != atom.arity()) throw QueryError("arity mismatch for shattered predicate " + atom.predicate);
  return original;
}

}  // namespace liftpdb::logic

#include "liftpdb/lift/lift.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "liftpdb/logic/canonical.hpp"
#include "liftpdb/logic/decompose.hpp"
#include "liftpdb/logic/shatter.hpp"

namespace liftpdb::lift {

using logic::Atom;
using logic::CQ;
using logic::Term;
using logic::UCQ;

namespace {

constexpr std::size_t kMaxInclusionExclusion = 20;
constexpr int kMaxDepth = 256;

bool is_placeholder(const std::string& name) { return !name.empty() && name.front() == '$'; }
std::string placeholder(int slot) { return "$" + std::to_string(slot); }

int max_slot(const UCQ& q) {
  int m = -1;
  for (const auto& c : q.constants())
    if (is_placeholder(c)) m = std::max(m, std::stoi(c.substr(1)));
  return m;
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) x = parent[x] = parent[parent[x]];
  return x;
}

// Groups items that share a predicate symbol.
std::vector<std::vector<std::size_t>> group_by_symbols(const std::vector<std::set<std::string>>& symbols) {
  const std::size_t n = symbols.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::map<std::string, std::size_t> owner;
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& p : symbols[i]) {
      auto [it, fresh] = owner.emplace(p, i);
      if (!fresh) parent[find_root(parent, i)] = find_root(parent, it->second);
    }
  std::vector<std::vector<std::size_t>> groups;
  std::map<std::size_t, std::size_t> slot;
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, fresh] = slot.emplace(find_root(parent, i), groups.size());
    if (fresh) groups.emplace_back();
    groups[it->second].push_back(i);
  }
  return groups;
}

void check_input(const UCQ& q) {
  std::map<std::string, std::vector<std::pair<std::size_t, std::string>>> patterns;
  for (const auto& cq : q.disjuncts)
    for (const auto& a : cq.atoms) {
      std::vector<std::pair<std::size_t, std::string>> pat;
      for (std::size_t k = 0; k < a.arity(); ++k)
        if (a.args[k].is_constant()) {
          if (is_placeholder(a.args[k].name()))
            throw QueryError("constant '" + a.args[k].name() + "' uses the reserved '$' prefix");
          pat.emplace_back(k, a.args[k].name());
        }
      auto [it, fresh] = patterns.emplace(a.predicate, pat);
      if (!fresh && it->second != pat)
        throw QueryError("unshattered constant in " + logic::to_display(a) + "; shatter the query first");
    }

  // Repeated predicates must hold shared variables in the same order.
  for (const auto& cq : q.disjuncts)
    for (std::size_t i = 0; i < cq.atoms.size(); ++i)
      for (std::size_t j = i + 1; j < cq.atoms.size(); ++j) {
        const Atom& a = cq.atoms[i];
        const Atom& b = cq.atoms[j];
        if (a.predicate != b.predicate) continue;
        for (std::size_t p = 0; p < a.arity(); ++p)
          for (std::size_t r = 0; r < a.arity(); ++r) {
            if (p >= r) continue;
            const Term &ap = a.args[p], &ar = a.args[r], &bp = b.args[p], &br = b.args[r];
            if (!ap.is_variable() || !ar.is_variable() || ap == ar) continue;
            if (bp == ar && br == ap)
              throw QueryError("atoms " + logic::to_display(a) + " and " + logic::to_display(b) +
                               " hold their variables in opposite order; such queries are not supported");
          }
      }
}

class Compiler {
 public:
  Plan run(const UCQ& q) {
    Plan plan;
    plan.root = compile(q, 0);
    plan.slots = slots_;
    return plan;
  }

 private:
  PlanPtr compile(const UCQ& input, int depth) {
    if (depth > kMaxDepth) throw QueryError("query nesting too deep");
    UCQ q = logic::normalize(input);
    const std::string key = logic::key_of(q);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    if (!active_.insert(key).second) throw UnsafeQueryError(q);
    PlanPtr node = build(q, depth);
    active_.erase(key);
    memo_.emplace(key, node);
    return node;
  }

  PlanPtr build(const UCQ& q, int depth) {
    auto node = std::make_shared<PlanNode>();
    node->query = q;
    if (q.disjuncts.empty()) {
      node->step = Step::Constant;
      node->value = 0.0;
      return node;
    }
    if (q.disjuncts.size() == 1 && q.disjuncts.front().atoms.empty()) {
      node->step = Step::Constant;
      node->value = 1.0;
      return node;
    }

    // Step 0
    if (q.disjuncts.size() == 1 && q.disjuncts.front().atoms.size() == 1 &&
        q.disjuncts.front().atoms.front().is_ground()) {
      const Atom& a = q.disjuncts.front().atoms.front();
      node->step = Step::Lookup;
      node->predicate = a.predicate;
      for (const auto& t : a.args) {
        LookupArg arg;
        if (is_placeholder(t.name())) {
          arg.slot = std::stoi(t.name().substr(1));
          slots_ = std::max(slots_, arg.slot + 1);
        } else {
          arg.constant = t.name();
        }
        node->args.push_back(std::move(arg));
      }
      return node;
    }

    // Step 1, then Steps 2 and 3
    auto conjuncts = logic::rewrite_as_conjunction(q);
    if (conjuncts.size() > 1) return compile_conjunction(std::move(conjuncts), depth);

    // Step 4
    {
      std::vector<std::set<std::string>> symbols;
      for (const auto& cq : q.disjuncts) symbols.push_back(UCQ(cq).predicates());
      auto groups = group_by_symbols(symbols);
      if (groups.size() > 1) {
        node->step = Step::IndependentUnion;
        for (const auto& g : groups) {
          UCQ part;
          for (auto i : g) part.disjuncts.push_back(q.disjuncts[i]);
          node->children.push_back(compile(part, depth + 1));
        }
        return node;
      }
    }

    // Step 5
    if (auto sep = logic::find_separator(q)) {
      int slot = max_slot(q) + 1;
      slots_ = std::max(slots_, slot + 1);
      node->step = Step::Quantifier;
      node->slot = slot;
      node->separator = sep->variables;
      node->children.push_back(compile(logic::substitute(q, *sep, placeholder(slot)), depth + 1));
      return node;
    }

    // Step 6
    throw UnsafeQueryError(q);
  }

  PlanPtr compile_conjunction(std::vector<UCQ> conjuncts, int depth) {
    if (depth > kMaxDepth) throw QueryError("query nesting too deep");
    for (auto& c : conjuncts) c = logic::normalize(c);
    std::sort(conjuncts.begin(), conjuncts.end());
    conjuncts.erase(std::unique(conjuncts.begin(), conjuncts.end()), conjuncts.end());
    if (conjuncts.size() == 1) return compile(conjuncts.front(), depth + 1);

    std::string key = "&";
    for (const auto& c : conjuncts) key += logic::key_of(c) + '\x1d';
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    if (!active_.insert(key).second) throw UnsafeQueryError(conjoin(conjuncts));

    auto node = std::make_shared<PlanNode>();
    node->query = conjoin(conjuncts);

    std::vector<std::set<std::string>> symbols;
    for (const auto& c : conjuncts) symbols.push_back(c.predicates());
    auto groups = group_by_symbols(symbols);
    if (groups.size() > 1) {
      // Step 2
      node->step = Step::Product;
      for (const auto& g : groups) {
        std::vector<UCQ> part;
        for (auto i : g) part.push_back(conjuncts[i]);
        node->children.push_back(compile_conjunction(std::move(part), depth + 1));
      }
    } else {
      // Step 3: cancellations first, by merging equivalent unions.
      const std::size_t m = conjuncts.size();
      if (m > kMaxInclusionExclusion)
        throw QueryError("inclusion-exclusion over " + std::to_string(m) + " conjuncts is too large");
      std::map<std::string, std::pair<UCQ, long long>> terms;
      std::vector<std::string> order;
      for (unsigned long long s = 1; s < (1ULL << m); ++s) {
        UCQ u;
        for (std::size_t i = 0; i < m; ++i)
          if (s >> i & 1ULL) u = logic::disjunction(u, conjuncts[i]);
        u = logic::normalize(u);
        long long sign = __builtin_popcountll(s) % 2 == 1 ? 1 : -1;
        std::string k = logic::key_of(u);
        auto [it, fresh] = terms.emplace(k, std::make_pair(u, 0LL));
        if (fresh) order.push_back(k);
        it->second.second += sign;
      }
      node->step = Step::InclusionExclusion;
      for (const auto& k : order) {
        const auto& [u, coef] = terms.at(k);
        if (coef == 0) continue;
        node->children.push_back(compile(u, depth + 1));
        node->coefficients.push_back(coef);
      }
    }
    active_.erase(key);
    memo_.emplace(key, node);
    return node;
  }

  // Display form of a conjunction of UCQs (distributed, for explain only).
  static UCQ conjoin(const std::vector<UCQ>& parts) {
    UCQ out(CQ{});
    for (const auto& p : parts) {
      UCQ next;
      for (const auto& a : out.disjuncts)
        for (const auto& b : p.disjuncts) {
          CQ c = a;
          CQ renamed = b;
          // Keep variables of different conjuncts apart.
          for (const auto& v : b.variables()) {
            std::string fresh = v + "_" + std::to_string(&p - parts.data());
            for (auto& at : renamed.atoms)
              for (auto& t : at.args)
                if (t.is_variable() && t.name() == v) t = Term::var(fresh);
          }
          c.atoms.insert(c.atoms.end(), renamed.atoms.begin(), renamed.atoms.end());
          next.disjuncts.push_back(std::move(c));
          if (next.disjuncts.size() > 64) return parts.front();
        }
      out = std::move(next);
    }
    return out;
  }

  std::unordered_map<std::string, PlanPtr> memo_;
  std::set<std::string> active_;
  int slots_ = 0;
};

class Evaluator {
 public:
  Evaluator(const pdb::TupleSource& source, int slots) : source_(source), env_(slots) {}

  double eval(const PlanNode& n) {
    switch (n.step) {
      case Step::Constant:
        return n.value;
      case Step::Lookup: {
        Atom a{n.predicate, {}};
        a.args.reserve(n.args.size());
        for (const auto& arg : n.args)
          a.args.push_back(Term::constant(arg.slot < 0 ? arg.constant : *env_[arg.slot]));
        return source_.tuple_prob(a);
      }
      case Step::Product: {
        double p = 1.0;
        for (const auto& c : n.children) p *= eval(*c);
        return p;
      }
      case Step::InclusionExclusion: {
        double p = 0.0;
        for (std::size_t i = 0; i < n.children.size(); ++i)
          p += static_cast<double>(n.coefficients[i]) * eval(*n.children[i]);
        return p;
      }
      case Step::IndependentUnion: {
        double q = 1.0;
        for (const auto& c : n.children) q *= 1.0 - eval(*c);
        return 1.0 - q;
      }
      case Step::Quantifier: {
        const std::string* saved = env_[n.slot];
        double q = 1.0;
        for (const auto& c : source_.domain()) {
          env_[n.slot] = &c;
          q *= 1.0 - eval(*n.children.front());
        }
        env_[n.slot] = saved;
        return 1.0 - q;
      }
    }
    throw InvariantViolation("unknown plan step");
  }

 private:
  const pdb::TupleSource& source_;
  std::vector<const std::string*> env_;
};

void print(std::ostringstream& out, const PlanNode& n, int indent, const std::string& prefix) {
  out << std::string(indent * 2, ' ') << prefix << step_name(n.step);
  switch (n.step) {
    case Step::Constant:
      out << ' ' << n.value;
      break;
    case Step::Quantifier: {
      out << " $" << n.slot << " <-";
      for (const auto& v : n.separator) out << ' ' << v;
      break;
    }
    default:
      break;
  }
  out << ": " << logic::to_display(n.query) << '\n';
  for (std::size_t i = 0; i < n.children.size(); ++i) {
    std::string p;
    if (n.step == Step::InclusionExclusion) p = (n.coefficients[i] > 0 ? "+" : "") + std::to_string(n.coefficients[i]) + " * ";
    print(out, *n.children[i], indent + 1, p);
  }
}

// Same query up to variable names.
bool same_query(const UCQ& a, const UCQ& b) { return logic::key_of(logic::normalize(a)) == logic::key_of(logic::normalize(b)); }

}  // namespace

UnsafeQueryError::UnsafeQueryError(UCQ blocking)
    : QueryError("unsafe query: no lifted rule applies to " + logic::to_display(blocking)),
      blocking_(std::move(blocking)) {}

const char* step_name(Step s) {
  switch (s) {
    case Step::Constant: return "constant";
    case Step::Lookup: return "step0 lookup";
    case Step::Product: return "step2 independent-and";
    case Step::InclusionExclusion: return "step3 inclusion-exclusion";
    case Step::IndependentUnion: return "step4 independent-or";
    case Step::Quantifier: return "step5 separator";
  }
  return "?";
}

std::string explain(const Plan& plan) {
  std::ostringstream out;
  if (plan.root) print(out, *plan.root, 0, "");
  return out.str();
}

Plan compile(const UCQ& q) {
  check_input(q);
  return Compiler().run(q);
}

double evaluate(const Plan& plan, const pdb::TupleSource& source) {
  if (!plan.root) throw InvariantViolation("empty plan");
  Evaluator ev(source, plan.slots);
  return ev.eval(*plan.root);
}

LiftResult lift(const UCQ& q, const pdb::TupleSource& source) {
  LiftResult r;
  r.plan = compile(q);
  r.probability = evaluate(r.plan, source);
  return r;
}

LiftResult lift_shattered(const UCQ& q, const pdb::TupleSource& source) {
  auto sh = logic::shatter(q);
  pdb::ShatteredSource view(source, sh.table);
  return lift(sh.query, view);
}

SafetyVerdict classify(const UCQ& q) {
  SafetyVerdict v;
  try {
    v.plan = compile(q);
    v.safe = true;
  } catch (const UnsafeQueryError& e) {
    v.safe = false;
    v.blocking = same_query(e.blocking(), q) ? q : e.blocking();
  }
  return v;
}

SafetyVerdict classify(const UCQ& q, const pdb::Vocabulary& vocab) {
  const auto& known = vocab.predicates();
  for (const auto& cq : q.disjuncts)
    for (const auto& a : cq.atoms) {
      auto it = known.find(a.predicate);
      if (it == known.end()) throw QueryError("unknown predicate " + a.predicate);
      if (it->second != a.arity())
        throw QueryError("predicate " + a.predicate + " has arity " + std::to_string(it->second) +
                         ", query uses " + std::to_string(a.arity()));
    }
  return classify(q);
}

}  // namespace liftpdb::lift

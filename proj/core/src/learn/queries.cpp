#include "liftpdb/learn/queries.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "liftpdb/errors.hpp"
#include "liftpdb/logic/parser.hpp"

namespace liftpdb::learn {

using logic::Atom;
using logic::CQ;
using logic::QueryTemplate;
using logic::Term;
using logic::UCQ;

const std::vector<QueryTemplate>& template_library() {
  static const std::vector<QueryTemplate> library = [] {
    auto boolean = [](const char* name, const char* text) { return QueryTemplate{name, "", logic::parse_ucq(text)}; };
    return std::vector<QueryTemplate>{
        logic::parse_template("Q1(t) = R(A,t)"),
        boolean("Q2", "EXISTS x. R(A,x)"),
        logic::parse_template("Q3(t) = EXISTS x. R(A,x) AND S(x,t)"),
        logic::parse_template("Q4(t) = EXISTS x,y. R(A,x) AND S(x,y) AND T(y,t)"),
        logic::parse_template("Q5(t) = R(A,t) AND S(B,t)"),
        logic::parse_template("Q6(t) = R(A,t) AND S(B,t) AND T(C,t)"),
        logic::parse_template("Q7(t) = EXISTS x. R(A,x) AND S(x,t) OR EXISTS y. R(A,y) AND T(y,t)"),
        logic::parse_template("Q8(t) = EXISTS x. R(A,x) AND S(x,t) AND T(B,t)"),
        logic::parse_template("Q9(t) = EXISTS x. R(A,x) AND S(B,x) AND T(x,t)"),
        logic::parse_template("Q10(t) = EXISTS x1,y1. R(A,x1) AND S(x1,y1) OR EXISTS x2,y2. S(x2,y2) AND T(y2,t)"),
        boolean("Q11", "EXISTS x,y,z. R(A,x) AND S(x,y) AND T(y,z)"),
    };
  }();
  return library;
}

const QueryTemplate& template_by_id(const std::string& id) {
  for (const auto& t : template_library())
    if (t.name == id) return t;
  throw DataError("unknown query template " + id + " (expected Q1..Q11)");
}

QueryTemplate bind_template(const QueryTemplate& tpl, const std::map<std::string, std::string>& relations,
                            const std::map<std::string, std::string>& constants) {
  QueryTemplate out = tpl;
  for (auto& cq : out.body.disjuncts)
    for (auto& a : cq.atoms) {
      if (auto it = relations.find(a.predicate); it != relations.end()) a.predicate = it->second;
      for (auto& t : a.args)
        if (t.is_constant())
          if (auto it = constants.find(t.name()); it != constants.end()) t = Term::constant(it->second);
    }
  return out;
}

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

// Adjacency over one id space.
struct Graph {
  std::size_t entities = 0;
  std::size_t relations = 0;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> out;  // head -> (relation, tail)
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> in;   // tail -> (relation, head)
  std::vector<std::vector<Triple>> by_relation;
  std::vector<Triple> edges;
  std::unordered_set<Triple, TripleHash> index;

  Graph(std::size_t n_entities, std::size_t n_relations)
      : entities(n_entities), relations(n_relations), out(n_entities), in(n_entities), by_relation(n_relations) {}

  void add(const Triple& t) {
    if (!index.insert(t).second) return;
    out[t.head].emplace_back(t.relation, t.tail);
    in[t.tail].emplace_back(t.relation, t.head);
    by_relation[t.relation].push_back(t);
    edges.push_back(t);
  }
  bool has(const Triple& t) const { return index.count(t) > 0; }
};

// A CQ whose predicates and constants are resolved to graph ids.
struct Pattern {
  struct Arg {
    bool variable;
    std::size_t id;  // entity id for constants, slot for variables
  };
  struct Edge {
    std::size_t relation;
    Arg head, tail;
  };
  std::vector<Edge> edges;
  std::size_t slots = 0;
  std::size_t answer_slot = kNone;
  bool impossible = false;
};

Pattern resolve(const CQ& cq, const KnowledgeBase& names, const std::string& answer_var) {
  Pattern p;
  std::unordered_map<std::string, std::size_t> slot;
  auto arg = [&](const Term& t) -> Pattern::Arg {
    if (t.is_variable()) {
      auto [it, fresh] = slot.emplace(t.name(), slot.size());
      if (fresh && t.name() == answer_var) p.answer_slot = it->second;
      return {true, it->second};
    }
    try {
      return {false, names.entity_index(t.name())};
    } catch (const DataError&) {
      p.impossible = true;
      return {false, 0};
    }
  };
  for (const auto& a : cq.atoms) {
    if (a.arity() != 2) throw QueryError("query atoms must be binary relations: " + logic::to_display(a));
    Pattern::Edge e{};
    try {
      e.relation = names.relation_index(a.predicate);
    } catch (const DataError&) {
      p.impossible = true;
    }
    e.head = arg(a.args[0]);
    e.tail = arg(a.args[1]);
    p.edges.push_back(e);
  }
  p.slots = slot.size();
  return p;
}

// Backtracking homomorphism search into a graph.
class Matcher {
 public:
  Matcher(const Graph& g, const Pattern& p) : g_(g), p_(p), value_(p.slots, kNone), done_(p.edges.size(), false) {}

  bool holds() {
    if (p_.impossible) return false;
    collect_ = false;
    return walk(0);
  }

  // Values of the answer slot over all matches.
  std::set<std::size_t> answers() {
    collect_ = true;
    found_.clear();
    if (!p_.impossible) walk(0);
    return found_;
  }

 private:
  std::size_t get(const Pattern::Arg& a) const { return a.variable ? value_[a.id] : a.id; }

  bool walk(std::size_t depth) {
    if (depth == p_.edges.size()) {
      if (!collect_) return true;
      if (p_.answer_slot != kNone) found_.insert(value_[p_.answer_slot]);
      return false;
    }
    // Most bound edge first.
    std::size_t best = kNone;
    int best_bound = -1;
    for (std::size_t i = 0; i < p_.edges.size(); ++i) {
      if (done_[i]) continue;
      int b = (get(p_.edges[i].head) != kNone) + (get(p_.edges[i].tail) != kNone);
      if (b > best_bound) best = i, best_bound = b;
    }
    const auto& e = p_.edges[best];
    done_[best] = true;
    const std::size_t h = get(e.head), t = get(e.tail);
    bool result = false;
    auto try_edge = [&](std::size_t hv, std::size_t tv) {
      std::vector<std::size_t> bound;
      auto bind = [&](const Pattern::Arg& a, std::size_t v) {
        if (!a.variable) return a.id == v;
        if (value_[a.id] == kNone) {
          value_[a.id] = v;
          bound.push_back(a.id);
          return true;
        }
        return value_[a.id] == v;
      };
      bool ok = bind(e.head, hv) && bind(e.tail, tv);
      if (ok && walk(depth + 1)) result = true;
      for (auto s : bound) value_[s] = kNone;
      return result;
    };
    if (h != kNone && t != kNone) {
      if (g_.has({h, e.relation, t})) try_edge(h, t);
    } else if (h != kNone) {
      for (const auto& [r, tv] : g_.out[h])
        if (r == e.relation && try_edge(h, tv)) break;
    } else if (t != kNone) {
      for (const auto& [r, hv] : g_.in[t])
        if (r == e.relation && try_edge(hv, t)) break;
    } else {
      for (const auto& tr : g_.by_relation[e.relation])
        if (try_edge(tr.head, tr.tail)) break;
    }
    done_[best] = false;
    return result;
  }

  const Graph& g_;
  const Pattern& p_;
  std::vector<std::size_t> value_;
  std::vector<bool> done_;
  bool collect_ = false;
  std::set<std::size_t> found_;
};

// Answer ids of q over g, or nullopt meaning "every entity".
std::optional<std::set<std::size_t>> answer_ids(const Graph& g, const KnowledgeBase& names, const QueryTemplate& q) {
  std::set<std::size_t> all;
  for (const auto& cq : q.body.disjuncts) {
    Pattern p = resolve(cq, names, q.free_var);
    Matcher m(g, p);
    if (p.answer_slot == kNone) {
      if (m.holds()) return std::nullopt;
      continue;
    }
    auto found = m.answers();
    all.insert(found.begin(), found.end());
  }
  return all;
}

Graph graph_of(const KnowledgeBase& kb) {
  Graph g(kb.entities().size(), kb.relations().size());
  for (const auto& t : kb.triples()) g.add(t);
  return g;
}

// Randomised grounding of one template disjunct on the graph.
class Grounder {
 public:
  Grounder(const Graph& g, const CQ& cq, std::mt19937_64& rng) : g_(g), cq_(cq), rng_(rng) {}

  bool run(const Triple& seed_edge, std::size_t seed_atom) {
    relation_.clear();
    entity_.clear();
    used_.clear();
    budget_ = 2000;
    done_.assign(cq_.atoms.size(), false);
    if (!assign(seed_atom, seed_edge)) return false;
    done_[seed_atom] = true;
    return extend(1);
  }

  const std::map<std::string, std::size_t>& relations() const { return relation_; }
  // Keys: "c:<name>" for constant placeholders, "v:<name>" for variables.
  const std::map<std::string, std::size_t>& entities() const { return entity_; }

 private:
  static std::string key(const Term& t) { return (t.is_constant() ? "c:" : "v:") + t.name(); }

  std::size_t lookup(const Term& t) const {
    auto it = entity_.find(key(t));
    return it == entity_.end() ? kNone : it->second;
  }

  bool assign(std::size_t atom, const Triple& e) {
    const Atom& a = cq_.atoms[atom];
    if (used_.count(e)) return false;
    Log log;
    auto rollback = [&] {
      for (const auto& r : log.relations) relation_.erase(r);
      for (const auto& k : log.entities) entity_.erase(k);
      return false;
    };
    if (auto it = relation_.find(a.predicate); it == relation_.end()) {
      relation_.emplace(a.predicate, e.relation);
      log.relations.push_back(a.predicate);
    } else if (it->second != e.relation) {
      return false;
    }
    for (std::size_t k = 0; k < 2; ++k) {
      const Term& t = a.args[k];
      const std::size_t v = k == 0 ? e.head : e.tail;
      const std::size_t cur = lookup(t);
      if (cur != kNone) {
        if (cur != v) return rollback();
        continue;
      }
      if (t.is_constant())
        for (const auto& [name, val] : entity_)
          if (name[0] == 'c' && val == v) return rollback();  // placeholder constants stay distinct
      entity_.emplace(key(t), v);
      log.entities.push_back(key(t));
    }
    used_.insert(e);
    log.edge = e;
    bound_log_.push_back(std::move(log));
    return true;
  }

  void undo() {
    auto& log = bound_log_.back();
    for (const auto& r : log.relations) relation_.erase(r);
    for (const auto& k : log.entities) entity_.erase(k);
    if (log.edge) used_.erase(*log.edge);
    bound_log_.pop_back();
  }

  bool extend(std::size_t placed) {
    if (placed == cq_.atoms.size()) return true;
    if (budget_-- <= 0) return false;
    std::size_t best = kNone;
    int best_bound = -1;
    for (std::size_t i = 0; i < cq_.atoms.size(); ++i) {
      if (done_[i]) continue;
      int b = (lookup(cq_.atoms[i].args[0]) != kNone) + (lookup(cq_.atoms[i].args[1]) != kNone);
      if (b > best_bound) best = i, best_bound = b;
    }
    const Atom& a = cq_.atoms[best];
    const std::size_t h = lookup(a.args[0]), t = lookup(a.args[1]);
    auto rel_it = relation_.find(a.predicate);
    const std::size_t r = rel_it == relation_.end() ? kNone : rel_it->second;

    std::vector<Triple> candidates;
    if (h != kNone) {
      for (const auto& [rr, tv] : g_.out[h])
        if ((r == kNone || rr == r) && (t == kNone || tv == t)) candidates.push_back({h, rr, tv});
    } else if (t != kNone) {
      for (const auto& [rr, hv] : g_.in[t])
        if (r == kNone || rr == r) candidates.push_back({hv, rr, t});
    } else {
      const auto& pool = r == kNone ? g_.edges : g_.by_relation[r];
      std::uniform_int_distribution<std::size_t> pick(0, pool.empty() ? 0 : pool.size() - 1);
      for (int i = 0; i < 64 && !pool.empty(); ++i) candidates.push_back(pool[pick(rng_)]);
    }
    std::shuffle(candidates.begin(), candidates.end(), rng_);
    if (candidates.size() > 32) candidates.resize(32);

    done_[best] = true;
    for (const auto& c : candidates) {
      if (!assign(best, c)) continue;
      if (extend(placed + 1)) return true;
      undo();
    }
    done_[best] = false;
    return false;
  }

  struct Log {
    std::vector<std::string> relations;
    std::vector<std::string> entities;
    std::optional<Triple> edge;
  };

  const Graph& g_;
  const CQ& cq_;
  std::mt19937_64& rng_;
  std::map<std::string, std::size_t> relation_;
  std::map<std::string, std::size_t> entity_;
  std::unordered_set<Triple, TripleHash> used_;
  std::vector<bool> done_;
  std::vector<Log> bound_log_;
  int budget_ = 0;
};

}  // namespace

std::vector<std::string> answers(const KnowledgeBase& graph, const QueryTemplate& q) {
  if (q.is_boolean()) throw QueryError("template " + q.name + " has no answer variable");
  Graph g = graph_of(graph);
  auto ids = answer_ids(g, graph, q);
  if (!ids) return graph.entities();
  std::vector<std::string> out;
  for (auto id : *ids) out.push_back(graph.entities()[id]);
  return out;
}

EvalQuerySet generate_queries(const KnowledgeBase& train, const KnowledgeBase& test, const std::string& template_id,
                              std::size_t n, std::uint64_t seed, std::size_t pool) {
  const QueryTemplate& tpl = template_by_id(template_id);
  if (tpl.is_boolean())
    throw DataError("template " + template_id + " has no answer variable; nothing to rank");
  if (test.empty()) throw DataError("no test edges to build queries from");
  if (pool == 0) throw DataError("negative pool size must be positive");

  // One id space: train's, extended by test.
  KnowledgeBase full = train;
  std::vector<Triple> test_edges;
  for (const auto& t : test.triples()) {
    const auto& h = test.entities()[t.head];
    const auto& r = test.relations()[t.relation];
    const auto& u = test.entities()[t.tail];
    full.add(h, r, u);
    test_edges.push_back({full.entity_index(h), full.relation_index(r), full.entity_index(u)});
  }
  Graph g_full = graph_of(full);
  Graph g_train(full.entities().size(), full.relations().size());
  for (const auto& t : train.triples()) g_train.add(t);

  std::vector<std::size_t> witness_disjuncts;
  for (std::size_t d = 0; d < tpl.body.disjuncts.size(); ++d)
    for (const auto& a : tpl.body.disjuncts[d].atoms)
      if (a.mentions(tpl.free_var)) {
        witness_disjuncts.push_back(d);
        break;
      }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_edge(0, test_edges.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_entity(0, full.entities().size() - 1);
  std::uniform_int_distribution<std::size_t> pick_relation(0, full.relations().size() - 1);

  EvalQuerySet out;
  const std::size_t max_attempts = 200 * n + 1000;
  for (std::size_t attempt = 0; attempt < max_attempts && out.size() < n; ++attempt) {
    const CQ& cq = tpl.body.disjuncts[witness_disjuncts[rng() % witness_disjuncts.size()]];
    const Triple seed_edge = test_edges[pick_edge(rng)];
    const std::size_t seed_atom = rng() % cq.atoms.size();
    Grounder grounder(g_full, cq, rng);
    if (!grounder.run(seed_edge, seed_atom)) continue;

    std::map<std::string, std::string> rel_names, const_names;
    std::set<std::size_t> const_ids;
    for (const auto& [p, r] : grounder.relations()) rel_names[p] = full.relations()[r];
    std::size_t answer = kNone;
    for (const auto& [k, e] : grounder.entities()) {
      if (k[0] == 'c') {
        const_names[k.substr(2)] = full.entities()[e];
        const_ids.insert(e);
      } else if (k.substr(2) == tpl.free_var) {
        answer = e;
      }
    }
    if (answer == kNone || const_ids.count(answer)) continue;
    // Placeholders of other disjuncts.
    for (const auto& d : tpl.body.disjuncts)
      for (const auto& a : d.atoms) {
        if (!rel_names.count(a.predicate)) rel_names[a.predicate] = full.relations()[pick_relation(rng)];
        for (const auto& t : a.args) {
          if (!t.is_constant() || const_names.count(t.name())) continue;
          std::size_t e;
          do e = pick_entity(rng);
          while (const_ids.count(e) && const_ids.size() < full.entities().size());
          const_ids.insert(e);
          const_names[t.name()] = full.entities()[e];
        }
      }

    QueryTemplate instance = bind_template(tpl, rel_names, const_names);
    auto from_train = answer_ids(g_train, full, instance);
    if (!from_train || from_train->count(answer)) continue;
    auto all = answer_ids(g_full, full, instance);
    if (!all || !all->count(answer)) continue;

    std::vector<std::size_t> candidates;
    for (std::size_t e = 0; e < full.entities().size(); ++e)
      if (!all->count(e)) candidates.push_back(e);
    if (candidates.empty()) continue;
    const std::size_t k = std::min(pool, candidates.size());
    for (std::size_t i = 0; i < k; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, candidates.size() - 1);
      std::swap(candidates[i], candidates[pick(rng)]);
    }
    EvalQuery q;
    q.template_id = template_id;
    q.query = std::move(instance);
    q.answer = full.entities()[answer];
    for (std::size_t i = 0; i < k; ++i) q.negatives.push_back(full.entities()[candidates[i]]);
    out.push_back(std::move(q));
  }
  if (out.empty())
    throw DataError("template " + template_id + " could not be realised on this knowledge base");
  return out;
}

namespace {

void check_name(const std::string& e) {
  if (e.empty() || e.find_first_of(";,\n\r") != std::string::npos || e.front() == '@')
    throw DataError("entity name '" + e + "' cannot be stored in a query-set line");
}

}  // namespace

void write_query_set(std::ostream& out, const EvalQuerySet& qs) {
  for (const auto& q : qs) {
    QueryTemplate named = q.query;
    named.name = q.template_id;
    check_name(q.answer);
    out << logic::to_string(named) << ";answer=" << q.answer << ";negs=";
    for (std::size_t i = 0; i < q.negatives.size(); ++i) {
      check_name(q.negatives[i]);
      out << (i ? "," : "") << q.negatives[i];
    }
    out << '\n';
  }
}

EvalQuerySet read_query_set(std::istream& in, const std::filesystem::path& base_dir) {
  EvalQuerySet qs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line.front() == '#') continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    const auto a = line.rfind(";answer=");
    const auto n = line.rfind(";negs=");
    if (a == std::string::npos || n == std::string::npos || n < a)
      throw DataError(where + "expected <query>;answer=<entity>;negs=<entities>");
    EvalQuery q;
    try {
      q.query = logic::parse_template(line.substr(0, a));
    } catch (const QueryError& e) {
      throw DataError(where + e.what());
    }
    q.template_id = q.query.name;
    q.answer = line.substr(a + 8, n - a - 8);
    const std::string negs = line.substr(n + 6);
    if (!negs.empty() && negs.front() == '@') {
      std::ifstream f(base_dir / negs.substr(1));
      if (!f) throw DataError(where + "cannot open negatives file " + negs.substr(1));
      std::string e;
      while (std::getline(f, e))
        if (!e.empty()) q.negatives.push_back(e);
    } else {
      std::stringstream ss(negs);
      std::string e;
      while (std::getline(ss, e, ','))
        if (!e.empty()) q.negatives.push_back(e);
    }
    if (q.answer.empty()) throw DataError(where + "empty answer");
    qs.push_back(std::move(q));
  }
  return qs;
}

void save_query_set(const EvalQuerySet& qs, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write_query_set(out, qs);
}

EvalQuerySet load_query_set(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return read_query_set(in, path.parent_path());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace liftpdb::learn

// liftpdb: command-line front end for the lifted inference engine and the
// TractOR model.

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "liftpdb/errors.hpp"
#include "liftpdb/learn/kb.hpp"
#include "liftpdb/learn/metrics.hpp"
#include "liftpdb/learn/queries.hpp"
#include "liftpdb/learn/train.hpp"
#include "liftpdb/lift/lift.hpp"
#include "liftpdb/logic/parser.hpp"
#include "liftpdb/logic/shatter.hpp"
#include "liftpdb/pdb/database.hpp"
#include "liftpdb/pdb/io.hpp"
#include "liftpdb/pdb/oracle.hpp"
#include "liftpdb/pdb/world.hpp"
#include "liftpdb/tractor/io.hpp"
#include "liftpdb/tractor/query.hpp"

namespace {

using namespace liftpdb;
using nlohmann::json;

enum Exit { kOk = 0, kUsage = 1, kData = 2, kUnsafe = 3 };

struct Output {
  bool json = false;
  bool full = false;

  std::string number(double x) const {
    char buf[40];
    std::snprintf(buf, sizeof buf, full ? "%.17g" : "%.6f", x);
    return buf;
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

logic::UCQ read_boolean_query(const std::string& path) {
  auto parsed = logic::parse_query(read_file(path));
  if (auto* tpl = std::get_if<logic::QueryTemplate>(&parsed)) {
    if (!tpl->is_boolean())
      throw QueryError("expected a Boolean query; " + path + " has answer variable '" + tpl->free_var + "'");
    return tpl->body;
  }
  return std::get<logic::UCQ>(parsed);
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("LIFTPDB_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw DataError(std::string("LIFTPDB_SEED is not an unsigned integer: ") + env);
    }
  }
  return 1;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    out.push_back(line);
  }
  return out;
}

// pdb-query / pdb-oracle -------------------------------------------------

struct PdbArgs {
  std::string db;
  std::string query;
  bool explain = false;
  bool formal = false;
  std::size_t cap = pdb::kDefaultOracleCap;
};

int run_pdb_query(const PdbArgs& a, const Output& out) {
  auto db = pdb::load_pdb(a.db, a.formal);
  auto q = read_boolean_query(a.query);
  lift::LiftResult r;
  try {
    r = lift::lift_shattered(q, db);
  } catch (const lift::UnsafeQueryError& e) {
    const auto& blocking = e.blocking();
    if (out.json)
      std::cout << json{{"safe", false}, {"blocking", logic::to_display(blocking)}}.dump() << '\n';
    else
      std::cout << "UNSAFE: " << logic::to_display(blocking) << '\n';
    return kUnsafe;
  }
  if (out.json) {
    json j{{"probability", r.probability}, {"safe", true}};
    if (a.explain) j["plan"] = lift::explain(r.plan);
    std::cout << j.dump() << '\n';
  } else {
    std::cout << out.number(r.probability) << '\n';
    if (a.explain) std::cout << lift::explain(r.plan);
  }
  return kOk;
}

int run_pdb_oracle(const PdbArgs& a, const Output& out) {
  auto db = pdb::load_pdb(a.db, a.formal);
  auto q = read_boolean_query(a.query);
  const double p = pdb::oracle_query_prob(db, q, a.cap);
  if (out.json)
    std::cout << json{{"probability", p}}.dump() << '\n';
  else
    std::cout << out.number(p) << '\n';
  return kOk;
}

// safety -----------------------------------------------------------------

int run_safety(const std::string& query, bool explain, const Output& out) {
  auto q = read_boolean_query(query);
  auto sh = logic::shatter(q);
  auto v = lift::classify(sh.query);
  if (out.json) {
    json j{{"safe", v.safe}, {"shattered", logic::to_display(sh.query)}};
    if (v.safe && explain) j["plan"] = lift::explain(*v.plan);
    if (!v.safe) j["blocking"] = logic::to_display(*v.blocking);
    std::cout << j.dump() << '\n';
  } else if (v.safe) {
    std::cout << "SAFE\n";
    if (explain) std::cout << lift::explain(*v.plan);
  } else {
    std::cout << "UNSAFE: " << logic::to_display(*v.blocking) << '\n';
  }
  return kOk;
}

// tractor ----------------------------------------------------------------

struct TrainArgs {
  std::string triples;
  std::string output;
  std::string mode = "pos";
  learn::TrainConfig cfg;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

int run_train(TrainArgs a, const Output& out) {
  auto kb = learn::load_triples(a.triples);
  a.cfg.mode = tractor::parse_mode(a.mode);
  a.cfg.seed = resolve_seed(a.seed);
  std::vector<double> losses;
  auto m = learn::train(kb, a.cfg, [&](std::size_t epoch, double loss) {
    losses.push_back(loss);
    if (!a.quiet && !out.json) std::cerr << "epoch " << epoch + 1 << "\tloss " << loss << '\n';
  });
  tractor::save_model(m, a.output);
  if (out.json)
    std::cout << json{{"model", a.output}, {"entities", m.entities().size()}, {"relations", m.relations().size()},
                      {"d", m.d()}, {"mode", tractor::mode_name(m.mode())}, {"loss", losses}}
                     .dump()
              << '\n';
  else
    std::cout << "wrote " << a.output << " (" << m.entities().size() << " entities, " << m.relations().size()
              << " relations, d=" << m.d() << ", " << tractor::mode_name(m.mode()) << ")\n";
  return kOk;
}

// Unconstrained models may produce values outside [0,1]; only the display
// is clamped.
double display_prob(const tractor::TractorModel& m, double p) {
  return m.mode() == tractor::Mode::Unconstrained ? std::clamp(p, 0.0, 1.0) : p;
}

int run_tractor_query(const std::string& model, const std::string& query, const Output& out) {
  auto m = tractor::load_model(model);
  auto q = read_boolean_query(query);
  const double p = tractor::query_prob(m, q);
  if (out.json)
    std::cout << json{{"probability", display_prob(m, p)}, {"raw", p}}.dump() << '\n';
  else
    std::cout << out.number(display_prob(m, p)) << '\n';
  return kOk;
}

int run_tractor_rank(const std::string& model, const std::string& query, const std::string& candidates_path,
                     std::size_t top, const Output& out) {
  auto m = tractor::load_model(model);
  auto tpl = logic::parse_template(read_file(query));
  std::vector<std::string> candidates = candidates_path.empty() ? m.entities() : read_lines(candidates_path);
  auto ranked = tractor::answer_template(m, tpl, candidates);
  if (top > 0 && ranked.size() > top) ranked.resize(top);
  if (out.json) {
    json j = json::array();
    for (const auto& [e, s] : ranked) j.push_back({{"entity", e}, {"score", s}});
    std::cout << j.dump() << '\n';
  } else {
    for (const auto& [e, s] : ranked) std::cout << e << '\t' << out.number(s) << '\n';
  }
  return kOk;
}

// gen-queries / eval -----------------------------------------------------

struct GenArgs {
  std::string template_id;
  std::size_t n = 10000;
  std::optional<std::uint64_t> seed;
  std::string triples;
  std::string train;
  std::string test;
  double test_fraction = 0.1;
  std::size_t pool = 1000;
  std::string output;
};

int run_gen(const GenArgs& a, const Output& out) {
  learn::KnowledgeBase train, test;
  const std::uint64_t seed = resolve_seed(a.seed);
  if (!a.triples.empty()) {
    std::tie(train, test) = learn::split(learn::load_triples(a.triples), a.test_fraction, seed);
  } else {
    if (a.train.empty() || a.test.empty()) throw CLI::ValidationError("gen-queries", "give --triples, or --train and --test");
    train = learn::load_triples(a.train);
    test = learn::load_triples(a.test);
  }
  auto qs = learn::generate_queries(train, test, a.template_id, a.n, seed, a.pool);
  if (a.output.empty()) {
    learn::write_query_set(std::cout, qs);
  } else {
    learn::save_query_set(qs, a.output);
    if (out.json)
      std::cout << json{{"queries", qs.size()}, {"output", a.output}}.dump() << '\n';
    else
      std::cout << "wrote " << qs.size() << " queries to " << a.output << '\n';
  }
  if (qs.size() < a.n) std::cerr << "warning: only " << qs.size() << " of " << a.n << " queries could be generated\n";
  return kOk;
}

int run_eval(const std::string& model, const std::vector<std::string>& query_files, std::size_t threads, bool tsv,
             const Output& out) {
  auto m = tractor::load_model(model);
  learn::EvalQuerySet qs;
  for (const auto& f : query_files) {
    auto part = learn::load_query_set(f);
    qs.insert(qs.end(), part.begin(), part.end());
  }
  auto report = learn::evaluate(m, qs, threads);
  if (out.json) {
    json rows = json::array();
    for (const auto& t : report.per_template)
      rows.push_back({{"template", t.template_id}, {"queries", t.queries}, {"auc", t.auc}, {"apr", t.apr}});
    std::cout << json{{"templates", rows}, {"overall", {{"auc", report.overall_auc}, {"apr", report.overall_apr}}}}.dump()
              << '\n';
    return kOk;
  }
  if (tsv) {
    std::printf("template\tqueries\tauc\tapr\n");
    for (const auto& t : report.per_template)
      std::printf("%s\t%zu\t%s\t%s\n", t.template_id.c_str(), t.queries, out.number(100.0 * t.auc).c_str(),
                  out.number(t.apr).c_str());
    std::printf("overall\t%zu\t%s\t%s\n", qs.size(), out.number(100.0 * report.overall_auc).c_str(),
                out.number(report.overall_apr).c_str());
    return kOk;
  }
  std::printf("%-10s %8s %8s %8s\n", "template", "queries", "AUC", "APR");
  for (const auto& t : report.per_template)
    std::printf("%-10s %8zu %8.1f %8.1f\n", t.template_id.c_str(), t.queries, 100.0 * t.auc, t.apr);
  std::printf("%-10s %8zu %8.1f %8.1f\n", "overall", qs.size(), 100.0 * report.overall_auc, report.overall_apr);
  return kOk;
}

// selftest ---------------------------------------------------------------

int run_selftest(const Output& out) {
  struct Check {
    std::string name;
    double got;
    double want;
    double tol;
  };
  std::vector<Check> checks;

  tractor::TractorModel one({"A", "B", "C"}, {"R"}, 1);
  const double e1[] = {0.2, 0.4, 0.8};
  for (std::size_t e = 0; e < 3; ++e) one.set_E(0, e, e1[e]);
  one.set_T(0, 0, 0.5);
  checks.push_back({"d=1 P(R(A,B))", tractor::triple_prob(one, "A", "R", "B"), 0.04, 1e-9});
  checks.push_back({"d=1 P(R(B,C))", tractor::triple_prob(one, "B", "R", "C"), 0.16, 1e-9});
  checks.push_back({"d=1 P(R(A,C))", tractor::triple_prob(one, "A", "R", "C"), 0.08, 1e-9});

  tractor::TractorModel two({"A", "B", "C"}, {"R"}, 2);
  const double e2[] = {0.6, 0.5, 0.2};
  for (std::size_t e = 0; e < 3; ++e) {
    two.set_E(0, e, e1[e]);
    two.set_E(1, e, e2[e]);
  }
  two.set_T(0, 0, 0.5);
  two.set_T(1, 0, 1.0);
  checks.push_back({"d=2 P(R(A,B))", tractor::triple_prob(two, "A", "R", "B"), 0.17, 1e-9});
  checks.push_back({"d=2 P(R(B,C))", tractor::triple_prob(two, "B", "R", "C"), 0.13, 1e-9});
  checks.push_back({"d=2 P(R(A,C))", tractor::triple_prob(two, "A", "R", "C"), 0.10, 1e-9});
  checks.push_back({"d=2 query R(A,B)", tractor::query_prob(two, logic::parse_ucq("R(A,B)")), 0.17, 1e-9});

  auto g = tractor::sigmoid();
  auto round2 = [](double x) { return std::round(x * 100.0) / 100.0; };
  checks.push_back({"sigmoid(-0.6)", round2(tractor::score_to_prob(g, -0.6)), 0.35, 1e-12});
  checks.push_back({"sigmoid(0.2)", round2(tractor::score_to_prob(g, 0.2)), 0.55, 1e-12});
  checks.push_back({"sigmoid(2.3)", round2(tractor::score_to_prob(g, 2.3)), 0.91, 1e-12});

  pdb::ProbDatabase db;
  db.insert(logic::ground_atom("Scientist", {"Einstein"}), 0.8);
  db.insert(logic::ground_atom("Scientist", {"Erdos"}), 0.8);
  pdb::World w;
  w.set(logic::ground_atom("Scientist", {"Einstein"}), true);
  w.set(logic::ground_atom("Scientist", {"Erdos"}), true);
  checks.push_back({"world 0.8*0.8", pdb::world_prob(db, w), 0.64, 1e-9});

  bool all = true;
  json rows = json::array();
  for (const auto& c : checks) {
    const bool ok = std::abs(c.got - c.want) <= c.tol;
    all = all && ok;
    if (out.json)
      rows.push_back({{"check", c.name}, {"got", c.got}, {"want", c.want}, {"pass", ok}});
    else
      std::cout << (ok ? "PASS  " : "FAIL  ") << c.name << " = " << out.number(c.got) << " (want "
                << out.number(c.want) << ")\n";
  }
  if (out.json) std::cout << json{{"checks", rows}, {"pass", all}}.dump() << '\n';
  return all ? kOk : kData;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"liftpdb: lifted inference over probabilistic databases and TractOR embeddings"};
  app.require_subcommand(1);
  Output out;
  app.add_flag("--json", out.json, "Emit JSON instead of text");
  app.add_flag("--full", out.full, "Print 17 significant digits");

  PdbArgs pq;
  auto* c_query = app.add_subcommand("pdb-query", "Exact probability by lifted inference");
  c_query->add_option("-d,--db", pq.db, "Probabilistic database (TSV)")->required();
  c_query->add_option("-q,--query", pq.query, "Query file")->required();
  c_query->add_flag("--explain", pq.explain, "Print the lifted plan");
  c_query->add_flag("--formal", pq.formal, "Accept probabilities outside [0,1]");

  PdbArgs po;
  auto* c_oracle = app.add_subcommand("pdb-oracle", "Exact probability by world enumeration");
  c_oracle->add_option("-d,--db", po.db, "Probabilistic database (TSV)")->required();
  c_oracle->add_option("-q,--query", po.query, "Query file")->required();
  c_oracle->add_option("--cap", po.cap, "Maximum number of uncertain tuples")->capture_default_str();
  c_oracle->add_flag("--formal", po.formal, "Accept probabilities outside [0,1]");

  std::string safety_query;
  bool safety_explain = false;
  auto* c_safety = app.add_subcommand("safety", "Classify a query as safe or unsafe");
  c_safety->add_option("-q,--query", safety_query, "Query file")->required();
  c_safety->add_flag("--explain", safety_explain, "Print the plan of a safe query");

  TrainArgs ta;
  std::optional<std::uint64_t> train_seed;
  auto* c_train = app.add_subcommand("tractor-train", "Train a TractOR model on triples");
  c_train->add_option("-t,--triples", ta.triples, "Triples (TSV head, relation, tail)")->required();
  c_train->add_option("-o,--output", ta.output, "Model file to write")->required();
  c_train->add_option("--d", ta.cfg.d, "Mixture components")->capture_default_str();
  c_train->add_option("--mode", ta.mode, "neg (unconstrained) or pos (squared)")->capture_default_str();
  c_train->add_option("--epochs", ta.cfg.epochs)->capture_default_str();
  c_train->add_option("--batch", ta.cfg.batch_size)->capture_default_str();
  c_train->add_option("--lr", ta.cfg.learning_rate)->capture_default_str();
  c_train->add_option("--margin", ta.cfg.margin)->capture_default_str();
  c_train->add_option("--negatives", ta.cfg.negatives_per_positive, "Negatives per positive")->capture_default_str();
  c_train->add_option("--seed", train_seed, "Random seed (default: $LIFTPDB_SEED or 1)");
  c_train->add_flag("--quiet", ta.quiet, "Do not log per-epoch loss");

  std::string tq_model, tq_query;
  auto* c_tq = app.add_subcommand("tractor-query", "Probability of a Boolean query under a model");
  c_tq->add_option("-m,--model", tq_model)->required();
  c_tq->add_option("-q,--query", tq_query)->required();

  std::string tr_model, tr_query, tr_candidates;
  std::size_t tr_top = 0;
  auto* c_tr = app.add_subcommand("tractor-rank", "Rank candidate answers of a template");
  c_tr->add_option("-m,--model", tr_model)->required();
  c_tr->add_option("-q,--query", tr_query, "Template file, e.g. Q(t) = R(A,t)")->required();
  c_tr->add_option("--candidates", tr_candidates, "Entities, one per line (default: all)");
  c_tr->add_option("--top", tr_top, "Print only the best k");

  GenArgs ga;
  auto* c_gen = app.add_subcommand("gen-queries", "Sample evaluation queries from a template");
  c_gen->add_option("--template", ga.template_id, "Q1..Q11")->required();
  c_gen->add_option("-n", ga.n)->capture_default_str();
  c_gen->add_option("--seed", ga.seed, "Random seed (default: $LIFTPDB_SEED or 1)");
  c_gen->add_option("--triples", ga.triples, "All triples; split with --test-fraction");
  c_gen->add_option("--test-fraction", ga.test_fraction)->capture_default_str();
  c_gen->add_option("--train", ga.train, "Training triples");
  c_gen->add_option("--test", ga.test, "Test triples");
  c_gen->add_option("--pool", ga.pool, "Negatives per query")->capture_default_str();
  c_gen->add_option("-o,--output", ga.output, "Query-set file (default: stdout)");

  std::string ev_model;
  std::vector<std::string> ev_queries;
  std::size_t ev_threads = 0;
  bool ev_tsv = false;
  auto* c_eval = app.add_subcommand("eval", "AUC and APR per template");
  c_eval->add_option("-m,--model", ev_model)->required();
  c_eval->add_option("--queries", ev_queries, "Query-set files")->required();
  c_eval->add_option("--threads", ev_threads, "Worker threads (0: all cores)")->capture_default_str();
  c_eval->add_flag("--tsv", ev_tsv, "Tab-separated report");

  auto* c_self = app.add_subcommand("selftest", "Reproduce the paper's worked examples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*c_query) return run_pdb_query(pq, out);
    if (*c_oracle) return run_pdb_oracle(po, out);
    if (*c_safety) return run_safety(safety_query, safety_explain, out);
    if (*c_train) {
      ta.seed = train_seed;
      return run_train(ta, out);
    }
    if (*c_tq) return run_tractor_query(tq_model, tq_query, out);
    if (*c_tr) return run_tractor_rank(tr_model, tr_query, tr_candidates, tr_top, out);
    if (*c_gen) return run_gen(ga, out);
    if (*c_eval) return run_eval(ev_model, ev_queries, ev_threads, ev_tsv, out);
    if (*c_self) return run_selftest(out);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const lift::UnsafeQueryError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUnsafe;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "../support/oracles.hpp"
#include "liftpdb/errors.hpp"
#include "liftpdb/learn/kb.hpp"
#include "liftpdb/learn/metrics.hpp"
#include "liftpdb/learn/queries.hpp"
#include "liftpdb/learn/synthetic.hpp"
#include "liftpdb/learn/train.hpp"
#include "liftpdb/lift/lift.hpp"
#include "liftpdb/logic/parser.hpp"
#include "liftpdb/logic/shatter.hpp"
#include "liftpdb/pdb/oracle.hpp"
#include "liftpdb/pdb/world.hpp"
#include "liftpdb/tractor/query.hpp"

using namespace liftpdb;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// 1 -----------------------------------------------------------------------

Outcome figures() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::string bad;
  auto check = [&](const char* what, double got, double want, double tol) {
    if (std::abs(got - want) > tol) {
      ok = false;
      bad += std::string(" ") + what + "=" + fmt("%.17g", got);
    }
  };
  tractor::TractorModel one({"A", "B", "C"}, {"R"}, 1);
  const double e1[] = {0.2, 0.4, 0.8}, e2[] = {0.6, 0.5, 0.2};
  for (std::size_t e = 0; e < 3; ++e) one.set_E(0, e, e1[e]);
  one.set_T(0, 0, 0.5);
  check("d1(A,B)", tractor::triple_prob(one, "A", "R", "B"), 0.04, 1e-9);

  tractor::TractorModel two({"A", "B", "C"}, {"R"}, 2);
  for (std::size_t e = 0; e < 3; ++e) {
    two.set_E(0, e, e1[e]);
    two.set_E(1, e, e2[e]);
  }
  two.set_T(0, 0, 0.5);
  two.set_T(1, 0, 1.0);
  check("d2(A,B)", tractor::triple_prob(two, "A", "R", "B"), 0.17, 1e-9);
  check("d2(B,C)", tractor::triple_prob(two, "B", "R", "C"), 0.13, 1e-9);
  check("d2(A,C)", tractor::triple_prob(two, "A", "R", "C"), 0.10, 1e-9);

  auto g = tractor::sigmoid();
  auto r2 = [&](double s) { return std::round(tractor::score_to_prob(g, s) * 100.0) / 100.0; };
  check("g(-0.6)", r2(-0.6), 0.35, 1e-12);
  check("g(0.2)", r2(0.2), 0.55, 1e-12);
  check("g(2.3)", r2(2.3), 0.91, 1e-12);

  pdb::ProbDatabase db;
  db.insert(logic::ground_atom("Scientist", {"Einstein"}), 0.8);
  db.insert(logic::ground_atom("Scientist", {"Erdos"}), 0.8);
  pdb::World w;
  w.set(logic::ground_atom("Scientist", {"Einstein"}), true);
  w.set(logic::ground_atom("Scientist", {"Erdos"}), true);
  check("0.8*0.8", pdb::world_prob(db, w), 0.64, 1e-9);

  const double secs = seconds_since(t0);
  ok = ok && secs < 1.0;
  return {ok, "8 values" + (bad.empty() ? std::string(" exact") : bad) + fmt(", %.3f s (limit 1 s)", secs)};
}

// 2 -----------------------------------------------------------------------

// Binds a template's placeholders to random relations/constants and its
// answer variable to a random constant.
logic::UCQ random_instance(const logic::QueryTemplate& tpl, const std::vector<std::string>& rels,
                           const std::vector<std::string>& dom, std::mt19937_64& rng) {
  auto pick = [&](const std::vector<std::string>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };
  std::vector<std::string> shuffled = rels;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  std::map<std::string, std::string> rmap{{"R", shuffled[0]}, {"S", shuffled[1 % shuffled.size()]},
                                          {"T", shuffled[2 % shuffled.size()]}};
  auto bound = learn::bind_template(tpl, rmap, {{"A", pick(dom)}, {"B", pick(dom)}, {"C", pick(dom)}});
  return bound.is_boolean() ? bound.body : bound.instantiate(pick(dom));
}

Outcome oracle_equivalence() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const char* ids[] = {"Q1", "Q2", "Q3", "Q5", "Q6", "Q7", "Q8", "Q9"};
  int pairs = 0, mismatches = 0, errors = 0;
  std::size_t max_base = 0;
  double worst = 0.0;
  for (int round = 0; round < 75; ++round) {
    for (const char* id : ids) {
      const auto& tpl = learn::template_by_id(id);
      const std::size_t k = tpl.body.predicates().size();
      // Largest domain whose Herbrand base k * n^2 stays within 16.
      std::size_t n = 1;
      while (k * (n + 1) * (n + 1) <= 16) ++n;
      std::vector<std::string> dom, rels;
      for (std::size_t i = 0; i < n; ++i) dom.push_back("C" + std::to_string(i));
      for (std::size_t i = 0; i < k; ++i) rels.push_back("P" + std::to_string(i));
      auto q = random_instance(tpl, rels, dom, rng);
      pdb::ProbDatabase db;
      for (const auto& r : rels)
        for (const auto& a : dom)
          for (const auto& b : dom) {
            const double x = u(rng);
            db.insert(logic::ground_atom(r, {a, b}), x < 0.1 ? 0.0 : x > 0.9 ? 1.0 : u(rng));
          }
      max_base = std::max(max_base, db.size());
      try {
        const double lifted = lift::lift_shattered(q, db).probability;
        const double exact = pdb::oracle_query_prob(db, q, 16);
        worst = std::max(worst, std::abs(lifted - exact));
        if (std::abs(lifted - exact) > 1e-9) ++mismatches;
      } catch (const std::exception& e) {
        ++errors;
        std::fprintf(stderr, "criterion 2: %s on %s: %s\n", id, logic::to_string(q).c_str(), e.what());
      }
      ++pairs;
    }
  }
  const double secs = seconds_since(t0);
  const bool ok = pairs >= 500 && mismatches == 0 && errors == 0 && max_base <= 16 && secs < 120.0;
  return {ok, std::to_string(pairs) + " pairs, Herbrand base <= " + std::to_string(max_base) + ", max |lift - enum| " +
                  fmt("%.2e", worst) + ", " + std::to_string(mismatches) + " mismatches, " + std::to_string(errors) +
                  " errors" + fmt(", %.2f s (limit 120 s)", secs)};
}

// 3 -----------------------------------------------------------------------

Outcome dichotomy() {
  const auto t0 = Clock::now();
  const std::vector<std::pair<std::string, bool>> expected{
      {"H0", false}, {"Q1", true}, {"Q2", true}, {"Q3", true},  {"Q4", false},  {"Q5", true},
      {"Q6", true},  {"Q7", true}, {"Q8", true}, {"Q9", true},  {"Q10", false}, {"Q11", false}};
  std::string got;
  bool ok = true;
  for (const auto& [id, safe] : expected) {
    logic::UCQ q;
    if (id == "H0") {
      q = logic::parse_ucq("EXISTS x,y. R(A,x) AND S(x,y) AND T(y,B)");
    } else {
      const auto& tpl = learn::template_by_id(id);
      q = tpl.is_boolean() ? tpl.body : tpl.instantiate("D");
    }
    const auto v = lift::classify(logic::shatter(q).query);
    if (v.safe != safe) ok = false;
    got += " " + id + (v.safe ? "=S" : "=U");
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 1.0;
  return {ok, got.substr(1) + fmt(", %.3f s (limit 1 s)", secs)};
}

// 4 -----------------------------------------------------------------------

Outcome unary_safety() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(99);
  auto m = oracle::random_model(12, 4, 3, tractor::Mode::SquaredPositive, rng);
  const auto& lib = learn::template_library();
  int unsafe = 0, failures = 0, out_of_range = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const auto& tpl = lib[static_cast<std::size_t>(i) % lib.size()];
    auto q = random_instance(tpl, m.relations(), m.entities(), rng);
    try {
      auto rewritten = tractor::rewrite_unary(q, m);
      if (!lift::classify(logic::shatter(rewritten).query).safe) ++unsafe;
      const double p = tractor::query_prob(m, q);
      if (!(p >= -1e-12 && p <= 1 + 1e-12)) ++out_of_range;
    } catch (const std::exception& e) {
      ++failures;
      std::fprintf(stderr, "criterion 4: %s: %s\n", logic::to_string(q).c_str(), e.what());
    }
  }
  const double secs = seconds_since(t0);
  const bool ok = unsafe == 0 && failures == 0 && out_of_range == 0 && secs < 60.0;
  return {ok, std::to_string(n) + " instances, " + std::to_string(unsafe) + " unsafe, " + std::to_string(failures) +
                  " evaluation failures, " + std::to_string(out_of_range) + " out of [0,1]" +
                  fmt(", %.2f s (limit 60 s)", secs)};
}

// 5 -----------------------------------------------------------------------

Outcome distmult_equivalence() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::size_t dims[] = {1, 2, 16, 128};
  double worst = 0.0;
  int order_mismatch = 0, models = 0;
  for (int it = 0; it < 1000; ++it) {
    const std::size_t d = dims[it % 4];
    const std::size_t ne = 8, nr = 2;
    std::vector<std::string> en, rn;
    for (std::size_t e = 0; e < ne; ++e) en.push_back("E" + std::to_string(e));
    for (std::size_t r = 0; r < nr; ++r) rn.push_back("R" + std::to_string(r));
    tractor::TractorModel m(en, rn, d, tractor::Mode::Unconstrained);
    for (auto& x : m.entity_params()) x = u(rng);
    for (auto& x : m.relation_params()) x = u(rng);
    ++models;
    for (std::size_t h = 0; h < ne; ++h)
      for (std::size_t r = 0; r < nr; ++r)
        for (std::size_t t = 0; t < ne; ++t) {
          const double a = static_cast<double>(d) * tractor::triple_prob(m, en[h], rn[r], en[t]);
          const double b = tractor::distmult_score(m.entity_embedding(h), m.relation_embedding(r), m.entity_embedding(t));
          worst = std::max(worst, std::abs(a - b));
        }
    // Rank tails of R(anchor, t); the anchor itself is not a candidate.
    const std::size_t anchor = static_cast<std::size_t>(it) % ne, rel = static_cast<std::size_t>(it) % nr;
    std::vector<std::string> cands;
    for (std::size_t e = 0; e < ne; ++e)
      if (e != anchor) cands.push_back(en[e]);
    auto tpl = logic::parse_template("Q(t) = " + rn[rel] + "(" + en[anchor] + ",t)");
    auto ranked = tractor::answer_template(m, tpl, cands);
    std::vector<std::size_t> ref;
    for (std::size_t e = 0; e < ne; ++e)
      if (e != anchor) ref.push_back(e);
    std::stable_sort(ref.begin(), ref.end(), [&](std::size_t a, std::size_t b) {
      const double sa = oracle::distmult(m, anchor, rel, a), sb = oracle::distmult(m, anchor, rel, b);
      return sa != sb ? sa > sb : a < b;
    });
    for (std::size_t k = 0; k < ref.size(); ++k)
      if (ranked[k].first != en[ref[k]]) {
        ++order_mismatch;
        break;
      }
  }
  const bool ok = worst <= 1e-12 && order_mismatch == 0;
  return {ok, std::to_string(models) + " models, max |d*P - distmult| " + fmt("%.2e", worst) + ", " +
                  std::to_string(order_mismatch) + " ranking mismatches"};
}

// 6 -----------------------------------------------------------------------

// Best of `reps` wall-clock timings of f.
double best_time(const std::function<void()>& f, int reps) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = Clock::now();
    f();
    best = std::min(best, seconds_since(t0));
  }
  return best;
}

Outcome scaling() {
  std::mt19937_64 rng(6);
  const std::size_t sizes[] = {1000, 2000, 4000};
  const auto& q4 = learn::template_by_id("Q4");
  auto bound = learn::bind_template(q4, {{"R", "R0"}, {"S", "R1"}, {"T", "R2"}}, {{"A", "E0"}});
  auto chain = logic::parse_ucq("EXISTS x,y,z,w. R0(x,y) AND R1(y,z) AND R2(z,w)");
  std::vector<double> rank_t, bool_t;
  for (std::size_t n : sizes) {
    auto m = oracle::random_model(n, 3, 8, tractor::Mode::SquaredPositive, rng);
    rank_t.push_back(best_time([&] { (void)tractor::answer_template(m, bound, m.entities()); }, 3));
    bool_t.push_back(best_time(
        [&] {
          for (int i = 0; i < 20; ++i) (void)tractor::query_prob(m, chain);
        },
        5));
  }
  double worst = 0.0;
  for (std::size_t i = 1; i < rank_t.size(); ++i) {
    worst = std::max(worst, rank_t[i] / rank_t[i - 1]);
    worst = std::max(worst, bool_t[i] / bool_t[i - 1]);
  }
  const bool ok = worst <= 2.5;
  return {ok, "rank Q4(t) over all entities " + fmt("%.3f", rank_t[0]) + "/" + fmt("%.3f", rank_t[1]) + "/" +
                  fmt("%.3f", rank_t[2]) + " s; Boolean Q4 chain x20 " + fmt("%.4f", bool_t[0]) + "/" +
                  fmt("%.4f", bool_t[1]) + "/" + fmt("%.4f", bool_t[2]) + " s; worst growth per doubling " +
                  fmt("%.2fx", worst) + " (limit 2.5x)"};
}

// 7 -----------------------------------------------------------------------

Outcome gradient_check() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<std::size_t> ent(0, 5), rel(0, 2);
  double worst = 0.0;
  int points = 0;
  for (tractor::Mode mode : {tractor::Mode::Unconstrained, tractor::Mode::SquaredPositive}) {
    for (int p = 0; p < 100; ++p) {
      tractor::TractorModel m({"a", "b", "c", "d", "e", "f"}, {"r", "s", "t"}, 4, mode);
      for (auto& x : m.entity_params()) x = u(rng);
      for (auto& x : m.relation_params()) x = u(rng);
      std::vector<learn::Triple> pos, neg;
      for (int i = 0; i < 3; ++i) pos.push_back({ent(rng), rel(rng), ent(rng)});
      for (int i = 0; i < 6; ++i) neg.push_back({ent(rng), pos[static_cast<std::size_t>(i) / 2].relation, ent(rng)});
      const double margin = 10.0;  // |score| <= 4 here, so every hinge is active
      auto g = learn::Gradients::zeros_like(m);
      learn::loss_and_grads(m, pos, neg, margin, g);
      auto loss = [&](const tractor::TractorModel& mm) {
        auto scratch = learn::Gradients::zeros_like(mm);
        return learn::loss_and_grads(mm, pos, neg, margin, scratch);
      };
      const double h = 1e-5;
      double diff2 = 0.0, norm_a = 0.0, norm_n = 0.0;
      auto probe = [&](std::vector<double>& (tractor::TractorModel::*params)(), const std::vector<double>& analytic) {
        for (std::size_t k = 0; k < analytic.size(); ++k) {
          auto up = m, down = m;
          (up.*params)()[k] += h;
          (down.*params)()[k] -= h;
          const double numeric = (loss(up) - loss(down)) / (2 * h);
          diff2 += (numeric - analytic[k]) * (numeric - analytic[k]);
          norm_a += analytic[k] * analytic[k];
          norm_n += numeric * numeric;
        }
      };
      probe(&tractor::TractorModel::entity_params, g.entity);
      probe(&tractor::TractorModel::relation_params, g.relation);
      const double rel_err = std::sqrt(diff2) / std::max({std::sqrt(norm_a), std::sqrt(norm_n), 1e-300});
      worst = std::max(worst, rel_err);
      ++points;
    }
  }
  return {worst <= 1e-5, std::to_string(points) + " points (100 per mode), max relative error " + fmt("%.2e", worst) +
                             " (limit 1e-5)"};
}

// 8 -----------------------------------------------------------------------

Outcome planted() {
  const auto t0 = Clock::now();
  const auto p = learn::planted_kb(learn::PlantedConfig{});
  auto [train, test] = learn::split(p.kb, 0.1, 7);
  std::vector<double> losses;
  const auto m = learn::train(train, learn::TrainConfig{}, [&](std::size_t, double l) { losses.push_back(l); });
  // Loss smoothed over windows of 10 epochs must not increase.
  bool smooth_ok = true;
  double prev = 1e300;
  for (std::size_t w = 0; w + 10 <= losses.size(); w += 10) {
    double s = 0.0;
    for (std::size_t i = w; i < w + 10; ++i) s += losses[i];
    if (s > prev) smooth_ok = false;
    prev = s;
  }
  std::map<std::string, double> auc;
  for (const char* id : {"Q1", "Q3", "Q5"}) {
    auto qs = learn::generate_queries(train, test, id, 200, 11, 100);
    auc[id] = learn::evaluate(m, qs, 0).overall_auc;
  }
  const double secs = seconds_since(t0);
  const bool ok = auc["Q1"] >= 0.90 && auc["Q3"] >= 0.80 && auc["Q5"] >= 0.80 && smooth_ok && secs < 600.0;
  return {ok, std::to_string(p.kb.size()) + " facts, link AUC " + fmt("%.3f", auc["Q1"]) + " (>= 0.90), Q3 AUC " +
                  fmt("%.3f", auc["Q3"]) + ", Q5 AUC " + fmt("%.3f", auc["Q5"]) + " (>= 0.80), smoothed loss " +
                  (smooth_ok ? "nonincreasing" : "increased") + fmt(", %.1f s (limit 600 s)", secs)};
}

// 9 -----------------------------------------------------------------------

Outcome metric_units() {
  const std::vector<double> answers{0.9, 0.8, 0.7}, negs{0.3, 0.2, 0.1};
  std::vector<double> prs;
  for (double a : answers) prs.push_back(learn::percentile_rank(a, negs));
  const double perfect_auc = learn::auc(answers, negs), perfect_apr = learn::apr(prs);

  const std::vector<double> flat{0.5, 0.5, 0.5};
  std::vector<double> flat_prs;
  for (double a : flat) flat_prs.push_back(learn::percentile_rank(a, flat));
  const double const_auc = learn::auc(flat, flat), const_apr = learn::apr(flat_prs);

  // Positives {0.4, 0.8} vs negatives {0.2, 0.6}: 3 of 4 pairs ordered.
  const std::vector<double> p4{0.4, 0.8}, n4{0.2, 0.6};
  const double hand = learn::auc(p4, n4);

  const bool ok = perfect_auc == 1.0 && perfect_apr == 100.0 && const_auc == 0.5 && const_apr == 50.0 && hand == 0.75;
  return {ok, "perfect AUC " + fmt("%g", perfect_auc) + " APR " + fmt("%g", perfect_apr) + "; constant AUC " +
                  fmt("%g", const_auc) + " APR " + fmt("%g", const_apr) + "; 4-pair AUC " + fmt("%g", hand)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 figure regressions", figures},
      {"2 oracle equivalence", oracle_equivalence},
      {"3 dichotomy table", dichotomy},
      {"4 unary safety", unary_safety},
      {"5 DistMult equivalence", distmult_equivalence},
      {"6 linear scaling", scaling},
      {"7 gradient check", gradient_check},
      {"8 planted-model learning", planted},
      {"9 metric units", metric_units},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s  criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed;
}

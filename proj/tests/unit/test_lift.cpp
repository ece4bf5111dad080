#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "../support/oracles.hpp"
#include "../support/random.hpp"
#include "liftpdb/errors.hpp"
#include "liftpdb/lift/lift.hpp"
#include "liftpdb/logic/parser.hpp"
#include "liftpdb/logic/shatter.hpp"
#include "liftpdb/pdb/io.hpp"

using namespace liftpdb;
using logic::ground_atom;
using logic::parse_ucq;

namespace {

pdb::ProbDatabase db_from(const std::string& text) {
  std::istringstream in(text);
  return pdb::read_pdb(in);
}

double lifted(const std::string& q, const pdb::ProbDatabase& db) { return lift::lift(parse_ucq(q), db).probability; }

bool uses(const lift::PlanPtr& n, lift::Step s) {
  if (n->step == s) return true;
  for (const auto& c : n->children)
    if (uses(c, s)) return true;
  return false;
}

}  // namespace

TEST(Lift, GroundAtom) {
  auto db = db_from("R\tA\tB\t0.3\n");
  EXPECT_DOUBLE_EQ(lift::lift_shattered(parse_ucq("R(A,B)"), db).probability, 0.3);
  EXPECT_DOUBLE_EQ(lift::lift_shattered(parse_ucq("R(B,A)"), db).probability, 0.0);
}

TEST(Lift, ExistentialClosedForm) {
  auto db = db_from("T\tA\t0.2\nT\tB\t0.5\nT\tC\t0.9\n");
  EXPECT_NEAR(lifted("EXISTS x. T(x)", db), 1 - 0.8 * 0.5 * 0.1, 1e-15);
}

TEST(Lift, IndependentAndOr) {
  auto db = db_from("T\tA\t0.2\nT\tB\t0.5\nU\tA\t0.4\n");
  const double t = 1 - 0.8 * 0.5, u = 0.4;
  EXPECT_NEAR(lifted("EXISTS x,y. T(x) AND U(y)", db), t * u, 1e-15);
  EXPECT_NEAR(lifted("EXISTS x. T(x) OR EXISTS y. U(y)", db), 1 - (1 - t) * (1 - u), 1e-15);
}

TEST(Lift, SeparatorOnJoin) {
  auto db = db_from("R\tA\tB\t0.5\nR\tA\tC\t0.3\nS\tB\t0.6\nS\tC\t0.2\n");
  EXPECT_NEAR(lifted("EXISTS x,y. R(x,y) AND S(y)", db), 1 - 0.7 * 0.94, 1e-15);
}

TEST(Lift, InclusionExclusionStep) {
  auto q = parse_ucq("EXISTS x,y. T(x) AND U(y) OR EXISTS u,v. T(u) AND S(u,v)");
  auto v = lift::classify(q);
  ASSERT_TRUE(v.safe);
  EXPECT_TRUE(uses(v.plan->root, lift::Step::InclusionExclusion));
  std::mt19937_64 rng(12);
  for (int i = 0; i < 20; ++i) {
    auto db = gen::random_db(rng, 3, 12);
    EXPECT_NEAR(lift::evaluate(*v.plan, db), oracle::world_sum(db, q), 1e-12);
  }
}

TEST(Lift, H0IsUnsafe) {
  auto q = parse_ucq("EXISTS x,y. R(x) AND S(x,y) AND T(y)");
  auto v = lift::classify(q);
  EXPECT_FALSE(v.safe);
  ASSERT_TRUE(v.blocking);
  EXPECT_EQ(logic::to_display(*v.blocking), "R(x) ∧ S(x,y) ∧ T(y)");
  EXPECT_THROW(lift::compile(q), lift::UnsafeQueryError);
}

TEST(Lift, SafetyIgnoresProbabilities) {
  auto q = parse_ucq("EXISTS x,y. R(x) AND S(x,y) AND T(y)");
  auto db = db_from("R\tA\t1\nS\tA\tA\t1\nT\tA\t1\n");
  EXPECT_THROW(lift::lift(q, db), lift::UnsafeQueryError);
}

TEST(Lift, InputChecks) {
  auto db = db_from("R\tA\tB\t0.3\n");
  EXPECT_THROW(lift::lift(parse_ucq("EXISTS x. R(A,x) AND R(x,B)"), db), QueryError);
  EXPECT_THROW(lift::lift(parse_ucq("EXISTS x,y. R(x,y) AND R(y,x)"), db), QueryError);
}

TEST(Lift, Vocabulary) {
  pdb::Vocabulary voc;
  voc.add_predicate("R", 2);
  EXPECT_TRUE(lift::classify(parse_ucq("EXISTS x,y. R(x,y)"), voc).safe);
  EXPECT_THROW(lift::classify(parse_ucq("EXISTS x. S(x)"), voc), QueryError);
  EXPECT_THROW(lift::classify(parse_ucq("EXISTS x. R(x,x,x)"), voc), QueryError);
}

TEST(Lift, Deterministic) {
  auto q = parse_ucq("EXISTS x,y. R(x,y) AND S(y) OR EXISTS u. T(u)");
  auto a = lift::compile(q), b = lift::compile(q);
  EXPECT_EQ(lift::explain(a), lift::explain(b));
  std::mt19937_64 rng(1);
  auto db = gen::random_db(rng, 4, 30, {{"R", 2}, {"S", 1}, {"T", 1}});
  EXPECT_EQ(lift::evaluate(a, db), lift::evaluate(b, db));
}

TEST(Lift, ExplainNamesSteps) {
  auto plan = lift::compile(parse_ucq("EXISTS x,y. T(x) AND U(y)"));
  auto text = lift::explain(plan);
  EXPECT_NE(text.find("step2 independent-and"), std::string::npos);
  EXPECT_NE(text.find("step5 separator"), std::string::npos);
  EXPECT_NE(text.find("step0 lookup"), std::string::npos);
}

TEST(Lift, MatchesEnumerationOnSafeRandomQueries) {
  std::mt19937_64 rng(21);
  int safe = 0;
  for (int i = 0; i < 400; ++i) {
    auto q = gen::random_ucq(rng, 0.3);
    auto db = gen::random_db(rng, 3, 12);
    try {
      const double p = lift::lift_shattered(q, db).probability;
      ++safe;
      EXPECT_NEAR(p, oracle::world_sum(db, q), 1e-9) << logic::to_string(q);
    } catch (const lift::UnsafeQueryError&) {
    } catch (const QueryError&) {
      // misaligned repeated predicates
    }
  }
  EXPECT_GT(safe, 200);
}

TEST(Lift, MonotoneInTupleProbability) {
  auto q = parse_ucq("EXISTS x,y. R(x,y) AND S(y)");
  std::mt19937_64 rng(8);
  for (int i = 0; i < 30; ++i) {
    auto db = gen::random_db(rng, 3, 12, {{"R", 2}, {"S", 1}});
    const double base = lift::lift(q, db).probability;
    pdb::ProbDatabase raised;
    for (const auto& c : db.domain()) raised.declare_constant(c);
    for (const auto& [a, p] : db.tuples()) raised.insert(a, std::min(1.0, p + 0.1));
    EXPECT_GE(lift::lift(q, raised).probability, base - 1e-15);
  }
}

TEST(Lift, FormalProbabilitiesAreAlgebraic) {
  pdb::ProbDatabase db(true);
  db.insert(ground_atom("T", {"A"}), 1.5);
  db.insert(ground_atom("T", {"B"}), -0.5);
  EXPECT_NEAR(lifted("EXISTS x. T(x)", db), 1 - (1 - 1.5) * (1 + 0.5), 1e-15);
}

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "../support/oracles.hpp"
#include "../support/random.hpp"
#include "liftpdb/errors.hpp"
#include "liftpdb/logic/parser.hpp"
#include "liftpdb/pdb/database.hpp"
#include "liftpdb/pdb/io.hpp"
#include "liftpdb/pdb/oracle.hpp"
#include "liftpdb/pdb/world.hpp"

using namespace liftpdb;
using logic::ground_atom;
using logic::parse_ucq;

namespace {

pdb::ProbDatabase scientists() {
  std::istringstream in(
      "# scientists and coauthors\n"
      "Scientist\tEinstein\t0.8\n"
      "Scientist\tErdos\t0.8\n"
      "Scientist\tvon Neumann\t0.9\n"
      "Scientist\tShakespeare\t0.2\n"
      "CoAuthor\tEinstein\tErdos\t0.8\n"
      "CoAuthor\tErdos\tvon Neumann\t0.9\n"
      "CoAuthor\tvon Neumann\tEinstein\t0.5\n");
  return pdb::read_pdb(in);
}

}  // namespace

TEST(Database, InsertAndLookup) {
  auto db = scientists();
  EXPECT_EQ(db.size(), 7u);
  EXPECT_DOUBLE_EQ(db.tuple_prob(ground_atom("Scientist", {"Erdos"})), 0.8);
  EXPECT_DOUBLE_EQ(db.tuple_prob(ground_atom("Scientist", {"Gauss"})), 0.0);
  EXPECT_EQ(db.domain().size(), 4u);
}

TEST(Database, Rejections) {
  pdb::ProbDatabase db;
  db.insert(ground_atom("R", {"A", "B"}), 0.5);
  EXPECT_THROW(db.insert(ground_atom("R", {"A", "B"}), 0.3), DataError);
  EXPECT_THROW(db.insert(ground_atom("R", {"A"}), 0.3), DataError);
  EXPECT_THROW(db.insert(ground_atom("S", {"A"}), 1.5), DataError);
  EXPECT_THROW(db.insert(logic::make_atom("S", {logic::Term::var("x")}), 0.5), DataError);
  pdb::ProbDatabase formal(true);
  EXPECT_NO_THROW(formal.insert(ground_atom("S", {"A"}), 1.5));
}

TEST(World, IndependentProduct) {
  pdb::ProbDatabase db;
  db.insert(ground_atom("Scientist", {"Einstein"}), 0.8);
  db.insert(ground_atom("Scientist", {"Erdos"}), 0.8);
  pdb::World w;
  w.set(ground_atom("Scientist", {"Einstein"}), true);
  w.set(ground_atom("Scientist", {"Erdos"}), true);
  EXPECT_NEAR(pdb::world_prob(db, w), 0.64, 1e-12);
  pdb::World partial;
  partial.set(ground_atom("Scientist", {"Einstein"}), true);
  EXPECT_THROW(pdb::world_prob(db, partial), DataError);
  w.set(ground_atom("Scientist", {"Gauss"}), true);
  EXPECT_EQ(pdb::world_prob(db, w), 0.0);
}

TEST(World, ProbabilitiesSumToOne) {
  auto db = scientists();
  double total = 0.0;
  for (unsigned long long m = 0; m < (1ULL << db.size()); ++m) total += pdb::world_prob(db, pdb::world_from_mask(db, m));
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(World, ModelsMatchesGrounding) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    auto db = gen::random_db(rng, 3, 8);
    auto q = gen::random_ucq(rng, 0.2);
    const auto mask = std::uniform_int_distribution<unsigned long long>(0, (1ULL << db.size()) - 1)(rng);
    auto w = pdb::world_from_mask(db, mask);
    oracle::Facts facts;
    for (const auto& a : w.true_atoms()) facts.insert(oracle::key(a, {}));
    oracle::Facts universe;
    for (const auto& [a, p] : db.tuples()) universe.insert(oracle::key(a, {}));
    EXPECT_EQ(pdb::models(w, q), oracle::holds(facts, q, oracle::domain_of(universe, q))) << logic::to_string(q);
  }
}

TEST(World, TemplateMustBeBoolean) {
  pdb::World w;
  EXPECT_THROW(pdb::models(w, logic::parse_template("Q(t) = R(t)")), QueryError);
}

TEST(Oracle, CoAuthorExample) {
  auto db = scientists();
  auto q = parse_ucq("EXISTS x,y. Scientist(x) AND CoAuthor(x,y)");
  // Independent per x: 1 - Π_x (1 - P(S(x)) * (1 - Π_y (1 - P(C(x,y)))))
  const double want = 1.0 - (1 - 0.8 * 0.8) * (1 - 0.8 * 0.9) * (1 - 0.9 * 0.5);
  EXPECT_NEAR(pdb::oracle_query_prob(db, q), want, 1e-12);
}

TEST(Oracle, MatchesWorldSum) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 200; ++i) {
    auto db = gen::random_db(rng, 3, 10);
    auto q = gen::random_ucq(rng, 0.25);
    EXPECT_NEAR(pdb::oracle_query_prob(db, q), oracle::world_sum(db, q), 1e-12) << logic::to_string(q);
  }
}

TEST(Oracle, CapOnSupport) {
  pdb::ProbDatabase db;
  for (int i = 0; i < 25; ++i) db.insert(ground_atom("T", {"C" + std::to_string(i)}), i < 20 ? 0.5 : 0.0);
  EXPECT_NO_THROW(pdb::oracle_query_prob(db, parse_ucq("EXISTS x. T(x)")));
  db.insert(ground_atom("T", {"D"}), 0.5);
  EXPECT_THROW(pdb::oracle_query_prob(db, parse_ucq("EXISTS x. T(x)")), DataError);
  EXPECT_NO_THROW(pdb::oracle_query_prob(db, parse_ucq("EXISTS x. T(x)"), 21));
}

TEST(Io, RoundTrip) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 50; ++i) {
    auto db = gen::random_db(rng, 4, 20);
    std::ostringstream out;
    pdb::write_pdb(out, db);
    std::istringstream in(out.str());
    EXPECT_EQ(pdb::read_pdb(in), db);
  }
}

TEST(Io, FormatRealRoundTrips) {
  for (double x : {0.1, 0.17, 1.0 / 3.0, 0.0, 1.0, 1e-300}) EXPECT_EQ(std::stod(pdb::format_real(x)), x);
  EXPECT_EQ(pdb::format_real(0.5), "0.5");
}

TEST(Io, ErrorsCarryLineNumbers) {
  std::istringstream in("R\tA\t0.5\nR\tB\tabc\n");
  try {
    pdb::read_pdb(in);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("2"), std::string::npos);
  }
  std::istringstream bad("R\tA\t1.2\n");
  EXPECT_THROW(pdb::read_pdb(bad), DataError);
  std::istringstream ok("R\tA\t1.2\n");
  EXPECT_NO_THROW(pdb::read_pdb(ok, true));
}

TEST(Io, DeclaredDomain) {
  std::istringstream in("@domain A B Z\nR\tA\t0.5\n");
  auto db = pdb::read_pdb(in);
  EXPECT_EQ(db.domain().size(), 3u);
}

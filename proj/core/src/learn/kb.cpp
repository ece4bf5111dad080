#include "liftpdb/learn/kb.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include "liftpdb/errors.hpp"

namespace liftpdb::learn {

KnowledgeBase::KnowledgeBase(std::vector<std::string> entities, std::vector<std::string> relations) {
  for (const auto& e : entities) add_entity(e);
  for (const auto& r : relations) add_relation(r);
}

std::size_t KnowledgeBase::add_entity(const std::string& name) {
  auto [it, fresh] = entity_ids_.emplace(name, entities_.size());
  if (fresh) entities_.push_back(name);
  return it->second;
}

std::size_t KnowledgeBase::add_relation(const std::string& name) {
  auto [it, fresh] = relation_ids_.emplace(name, relations_.size());
  if (fresh) relations_.push_back(name);
  return it->second;
}

bool KnowledgeBase::add(const std::string& head, const std::string& relation, const std::string& tail) {
  Triple t;
  t.head = add_entity(head);
  t.relation = add_relation(relation);
  t.tail = add_entity(tail);
  return add(t);
}

bool KnowledgeBase::add(const Triple& t) {
  if (t.head >= entities_.size() || t.tail >= entities_.size() || t.relation >= relations_.size())
    throw DataError("triple refers to an undeclared entity or relation");
  if (!index_.insert(t).second) return false;
  triples_.push_back(t);
  return true;
}

std::size_t KnowledgeBase::entity_index(const std::string& name) const {
  auto it = entity_ids_.find(name);
  if (it == entity_ids_.end()) throw DataError("unknown entity " + name);
  return it->second;
}

std::size_t KnowledgeBase::relation_index(const std::string& name) const {
  auto it = relation_ids_.find(name);
  if (it == relation_ids_.end()) throw DataError("unknown relation " + name);
  return it->second;
}

KnowledgeBase read_triples(std::istream& in) {
  KnowledgeBase kb;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      auto tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 3 || std::any_of(fields.begin(), fields.end(), [](const auto& f) { return f.empty(); }))
      throw DataError("line " + std::to_string(lineno) + ": expected head<TAB>relation<TAB>tail");
    kb.add(fields[0], fields[1], fields[2]);
  }
  return kb;
}

KnowledgeBase load_triples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return read_triples(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_triples(std::ostream& out, const KnowledgeBase& kb) {
  for (const auto& t : kb.triples())
    out << kb.entities()[t.head] << '\t' << kb.relations()[t.relation] << '\t' << kb.entities()[t.tail] << '\n';
}

std::pair<KnowledgeBase, KnowledgeBase> split(const KnowledgeBase& kb, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw DataError("test fraction must lie in (0,1)");
  const std::size_t n = kb.size();
  const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<bool> is_test(n, false);
  for (std::size_t i = 0; i < n_test; ++i) is_test[order[i]] = true;
  KnowledgeBase train = kb.empty_copy(), test = kb.empty_copy();
  for (std::size_t i = 0; i < n; ++i) (is_test[i] ? test : train).add(kb.triples()[i]);
  return {std::move(train), std::move(test)};
}

std::vector<Triple> negative_sample(const KnowledgeBase& kb, const Triple& triple, std::size_t k,
                                    std::mt19937_64& rng) {
  if (k == 0) throw DataError("need at least one negative per positive");
  if (kb.entities().empty()) throw DataError("no entities to corrupt with");
  std::uniform_int_distribution<std::size_t> entity(0, kb.entities().size() - 1);
  std::bernoulli_distribution coin(0.5);
  std::vector<Triple> out;
  out.reserve(k);
  for (std::size_t attempts = 0; out.size() < k; ++attempts) {
    if (attempts >= 100000)
      throw DataError("could not find " + std::to_string(k) + " negatives: entity pool too small");
    Triple c = triple;
    (coin(rng) ? c.head : c.tail) = entity(rng);
    if (!kb.contains(c)) out.push_back(c);
  }
  return out;
}

std::vector<Triple> negative_sample(const KnowledgeBase& kb, const Triple& triple, std::size_t k,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return negative_sample(kb, triple, k, rng);
}

}  // namespace liftpdb::learn

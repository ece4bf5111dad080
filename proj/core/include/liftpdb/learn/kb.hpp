#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace liftpdb::learn {

// Indices into the knowledge base's entity and relation lists.
struct Triple {
  std::size_t head = 0;
  std::size_t relation = 0;
  std::size_t tail = 0;

  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

struct TripleHash {
  std::size_t operator()(const Triple& t) const noexcept {
    std::size_t h = t.head;
    h = h * 0x9E3779B97F4A7C15ULL + t.relation;
    h = h * 0x9E3779B97F4A7C15ULL + t.tail;
    return h ^ (h >> 29);
  }
};

// A set of (head, relation, tail) facts. Entities and relations are kept in
// first-appearance order; a train/test split shares both lists.
class KnowledgeBase {
 public:
  KnowledgeBase() = default;
  KnowledgeBase(std::vector<std::string> entities, std::vector<std::string> relations);

  std::size_t add_entity(const std::string& name);
  std::size_t add_relation(const std::string& name);
  // Returns false if the triple is already present.
  bool add(const std::string& head, const std::string& relation, const std::string& tail);
  bool add(const Triple& t);

  bool contains(const Triple& t) const { return index_.count(t) > 0; }
  const std::vector<Triple>& triples() const noexcept { return triples_; }
  const std::vector<std::string>& entities() const noexcept { return entities_; }
  const std::vector<std::string>& relations() const noexcept { return relations_; }
  std::size_t size() const noexcept { return triples_.size(); }
  bool empty() const noexcept { return triples_.empty(); }

  // Throw DataError for unknown names.
  std::size_t entity_index(const std::string& name) const;
  std::size_t relation_index(const std::string& name) const;

  // Same entities and relations, no triples.
  KnowledgeBase empty_copy() const { return KnowledgeBase(entities_, relations_); }

 private:
  std::vector<std::string> entities_;
  std::vector<std::string> relations_;
  std::unordered_map<std::string, std::size_t> entity_ids_;
  std::unordered_map<std::string, std::size_t> relation_ids_;
  std::vector<Triple> triples_;
  std::unordered_set<Triple, TripleHash> index_;
};

// TSV `head<TAB>relation<TAB>tail`; blank lines and `#` comments skipped;
// duplicates dropped. Malformed lines raise DataError with the line number.
KnowledgeBase read_triples(std::istream& in);
KnowledgeBase load_triples(const std::filesystem::path& path);
void write_triples(std::ostream& out, const KnowledgeBase& kb);

// Random split: round(fraction * size) triples go to test. Both parts keep
// the original triple order and share the entity/relation lists.
std::pair<KnowledgeBase, KnowledgeBase> split(const KnowledgeBase& kb, double test_fraction, std::uint64_t seed);

// k corruptions of `triple`: head or tail (fair coin) replaced by a uniform
// entity; corruptions present in kb are rejected. Throws DataError after
// 100000 attempts without k negatives.
std::vector<Triple> negative_sample(const KnowledgeBase& kb, const Triple& triple, std::size_t k,
                                    std::mt19937_64& rng);
std::vector<Triple> negative_sample(const KnowledgeBase& kb, const Triple& triple, std::size_t k,
                                    std::uint64_t seed);

}  // namespace liftpdb::learn

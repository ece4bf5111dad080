#pragma once

#include <cstddef>
#include <cstdint>

#include "liftpdb/learn/kb.hpp"
#include "liftpdb/tractor/model.hpp"

namespace liftpdb::learn {

struct PlantedConfig {
  std::size_t entities = 500;
  std::size_t relations = 10;
  std::size_t d = 16;
  std::size_t facts_per_relation = 1000;
  std::uint64_t seed = 1;
};

struct PlantedKB {
  tractor::TractorModel truth;  // the generating mixture
  KnowledgeBase kb;             // top-scoring triples of every relation
};

// Ground truth: a d-component mixture with nonnegative random tables. For
// each relation the facts_per_relation highest-scoring (head, tail) pairs
// (head != tail) become facts. Entities are named e0.., relations r0...
PlantedKB planted_kb(const PlantedConfig& cfg);

}  // namespace liftpdb::learn

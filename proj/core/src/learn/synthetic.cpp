#include "liftpdb/learn/synthetic.hpp"

#include <algorithm>
#include <random>

#include "liftpdb/errors.hpp"

namespace liftpdb::learn {

PlantedKB planted_kb(const PlantedConfig& cfg) {
  if (cfg.entities < 2 || cfg.relations == 0 || cfg.d == 0) throw DataError("planted KB needs entities, relations, d");
  const std::size_t pairs = cfg.entities * (cfg.entities - 1);
  if (cfg.facts_per_relation == 0 || cfg.facts_per_relation > pairs) throw DataError("facts per relation out of range");

  std::vector<std::string> entities, relations;
  for (std::size_t i = 0; i < cfg.entities; ++i) entities.push_back("e" + std::to_string(i));
  for (std::size_t i = 0; i < cfg.relations; ++i) relations.push_back("r" + std::to_string(i));
  tractor::TractorModel truth(entities, relations, cfg.d, tractor::Mode::Unconstrained);

  // Sparse-ish nonnegative factors: each entity is strong in a few components.
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t e = 0; e < cfg.entities; ++e)
    for (std::size_t i = 0; i < cfg.d; ++i) {
      const double x = u(rng);
      truth.set_E(i, e, x * x * x);
    }
  for (std::size_t r = 0; r < cfg.relations; ++r)
    for (std::size_t i = 0; i < cfg.d; ++i) {
      const double x = u(rng);
      truth.set_T(i, r, x * x * x);
    }

  KnowledgeBase kb(entities, relations);
  std::vector<std::pair<double, std::size_t>> scored(pairs);
  for (std::size_t r = 0; r < cfg.relations; ++r) {
    std::size_t k = 0;
    for (std::size_t h = 0; h < cfg.entities; ++h)
      for (std::size_t t = 0; t < cfg.entities; ++t) {
        if (h == t) continue;
        double s = 0.0;
        for (std::size_t i = 0; i < cfg.d; ++i) s += truth.E(i, h) * truth.T(i, r) * truth.E(i, t);
        scored[k] = {-s, h * cfg.entities + t};
        ++k;
      }
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(cfg.facts_per_relation),
                      scored.end());
    std::vector<std::size_t> chosen;
    for (std::size_t j = 0; j < cfg.facts_per_relation; ++j) chosen.push_back(scored[j].second);
    std::sort(chosen.begin(), chosen.end());
    for (auto c : chosen) kb.add(Triple{c / cfg.entities, r, c % cfg.entities});
  }
  return {std::move(truth), std::move(kb)};
}

}  // namespace liftpdb::learn

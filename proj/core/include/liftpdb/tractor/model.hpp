#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace liftpdb::tractor {

enum class Mode {
  Unconstrained,    // exposed values are the raw parameters (may be negative)
  SquaredPositive,  // exposed values are the squares of the raw parameters
};

const char* mode_name(Mode m);
Mode parse_mode(const std::string& name);  // "neg"/"unconstrained", "pos"/"squared-positive"

// Mixture of d rank-1 components. Component i holds one value E_i(x) per
// entity and one value T_i(R) per relation; every relation also has a bias
// in [0,1] combined by noisy-or at the triple level.
//
// Parameters are stored entity-major: the d raw values of one entity (or
// relation) are contiguous.
class TractorModel {
 public:
  TractorModel(std::vector<std::string> entities, std::vector<std::string> relations, std::size_t d,
               Mode mode = Mode::Unconstrained);

  std::size_t d() const noexcept { return d_; }
  Mode mode() const noexcept { return mode_; }
  const std::vector<std::string>& entities() const noexcept { return entities_; }
  const std::vector<std::string>& relations() const noexcept { return relations_; }

  // Throw DataError for unknown names.
  std::size_t entity_index(const std::string& name) const;
  std::size_t relation_index(const std::string& name) const;
  bool has_entity(const std::string& name) const { return entity_ids_.count(name) > 0; }
  bool has_relation(const std::string& name) const { return relation_ids_.count(name) > 0; }

  // Exposed values E_i(x), T_i(R).
  double E(std::size_t i, std::size_t entity) const { return expose(entity_raw_[entity * d_ + i]); }
  double T(std::size_t i, std::size_t relation) const { return expose(relation_raw_[relation * d_ + i]); }
  double bias(std::size_t relation) const { return bias_[relation]; }

  // Exposed embedding (column over components).
  std::vector<double> entity_embedding(std::size_t entity) const;
  std::vector<double> relation_embedding(std::size_t relation) const;

  // Raw parameters θ, d per entity / relation.
  std::span<double> entity_raw(std::size_t entity) { return {entity_raw_.data() + entity * d_, d_}; }
  std::span<const double> entity_raw(std::size_t entity) const { return {entity_raw_.data() + entity * d_, d_}; }
  std::span<double> relation_raw(std::size_t relation) { return {relation_raw_.data() + relation * d_, d_}; }
  std::span<const double> relation_raw(std::size_t relation) const {
    return {relation_raw_.data() + relation * d_, d_};
  }
  std::vector<double>& entity_params() noexcept { return entity_raw_; }
  const std::vector<double>& entity_params() const noexcept { return entity_raw_; }
  std::vector<double>& relation_params() noexcept { return relation_raw_; }
  const std::vector<double>& relation_params() const noexcept { return relation_raw_; }
  std::vector<double>& biases() noexcept { return bias_; }
  const std::vector<double>& biases() const noexcept { return bias_; }

  // Sets the exposed value; in SquaredPositive mode the raw value becomes
  // sqrt(value), which requires value >= 0.
  void set_E(std::size_t i, std::size_t entity, double value);
  void set_T(std::size_t i, std::size_t relation, double value);
  // Bias must lie in [0,1].
  void set_bias(std::size_t relation, double value);

  friend bool operator==(const TractorModel& a, const TractorModel& b);

 private:
  double expose(double raw) const noexcept { return mode_ == Mode::SquaredPositive ? raw * raw : raw; }
  double internal(double value) const;

  std::vector<std::string> entities_;
  std::vector<std::string> relations_;
  std::unordered_map<std::string, std::size_t> entity_ids_;
  std::unordered_map<std::string, std::size_t> relation_ids_;
  std::size_t d_;
  Mode mode_;
  std::vector<double> entity_raw_;
  std::vector<double> relation_raw_;
  std::vector<double> bias_;
};

}  // namespace liftpdb::tractor

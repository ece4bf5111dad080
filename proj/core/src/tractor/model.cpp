#include "liftpdb/tractor/model.hpp"

#include <cmath>

#include "liftpdb/errors.hpp"

namespace liftpdb::tractor {

const char* mode_name(Mode m) { return m == Mode::SquaredPositive ? "squared-positive" : "unconstrained"; }

Mode parse_mode(const std::string& name) {
  if (name == "neg" || name == "unconstrained") return Mode::Unconstrained;
  if (name == "pos" || name == "squared-positive") return Mode::SquaredPositive;
  throw DataError("unknown parameter mode '" + name + "' (expected neg or pos)");
}

TractorModel::TractorModel(std::vector<std::string> entities, std::vector<std::string> relations,
                           std::size_t d, Mode mode)
    : entities_(std::move(entities)), relations_(std::move(relations)), d_(d), mode_(mode) {
  if (d_ == 0) throw DataError("model needs at least one component");
  for (std::size_t i = 0; i < entities_.size(); ++i)
    if (!entity_ids_.emplace(entities_[i], i).second) throw DataError("duplicate entity " + entities_[i]);
  for (std::size_t i = 0; i < relations_.size(); ++i)
    if (!relation_ids_.emplace(relations_[i], i).second) throw DataError("duplicate relation " + relations_[i]);
  entity_raw_.assign(entities_.size() * d_, 0.0);
  relation_raw_.assign(relations_.size() * d_, 0.0);
  bias_.assign(relations_.size(), 0.0);
}

std::size_t TractorModel::entity_index(const std::string& name) const {
  auto it = entity_ids_.find(name);
  if (it == entity_ids_.end()) throw DataError("unknown entity " + name);
  return it->second;
}

std::size_t TractorModel::relation_index(const std::string& name) const {
  auto it = relation_ids_.find(name);
  if (it == relation_ids_.end()) throw DataError("unknown relation " + name);
  return it->second;
}

std::vector<double> TractorModel::entity_embedding(std::size_t entity) const {
  std::vector<double> v(d_);
  for (std::size_t i = 0; i < d_; ++i) v[i] = E(i, entity);
  return v;
}

std::vector<double> TractorModel::relation_embedding(std::size_t relation) const {
  std::vector<double> v(d_);
  for (std::size_t i = 0; i < d_; ++i) v[i] = T(i, relation);
  return v;
}

double TractorModel::internal(double value) const {
  if (mode_ == Mode::Unconstrained) return value;
  if (value < 0.0) throw DataError("squared-positive model cannot hold negative value");
  return std::sqrt(value);
}

void TractorModel::set_E(std::size_t i, std::size_t entity, double value) {
  entity_raw_.at(entity * d_ + i) = internal(value);
}

void TractorModel::set_T(std::size_t i, std::size_t relation, double value) {
  relation_raw_.at(relation * d_ + i) = internal(value);
}

void TractorModel::set_bias(std::size_t relation, double value) {
  if (!(value >= 0.0 && value <= 1.0)) throw DataError("bias must lie in [0,1]");
  bias_.at(relation) = value;
}

bool operator==(const TractorModel& a, const TractorModel& b) {
  return a.entities_ == b.entities_ && a.relations_ == b.relations_ && a.d_ == b.d_ && a.mode_ == b.mode_ &&
         a.entity_raw_ == b.entity_raw_ && a.relation_raw_ == b.relation_raw_ && a.bias_ == b.bias_;
}

}  // namespace liftpdb::tractor

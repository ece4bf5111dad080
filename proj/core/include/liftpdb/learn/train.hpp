#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "liftpdb/learn/kb.hpp"
#include "liftpdb/tractor/model.hpp"

namespace liftpdb::learn {

struct TrainConfig {
  std::size_t d = 128;
  double margin = 1.0;
  std::size_t negatives_per_positive = 1;
  std::size_t batch_size = 256;
  double learning_rate = 0.01;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::size_t epochs = 50;
  std::uint64_t seed = 0;
  tractor::Mode mode = tractor::Mode::SquaredPositive;
};

// Throws DataError unless every field is positive and the betas lie in [0,1).
void validate(const TrainConfig& cfg);

// Same layout as the model's raw parameters.
struct Gradients {
  std::vector<double> entity;
  std::vector<double> relation;
  std::vector<double> bias;

  static Gradients zeros_like(const tractor::TractorModel& m);
};

// DistMult score of a triple under m: d * mixture mean, bias excluded.
double score(const tractor::TractorModel& m, const Triple& t);

// Σ_j max(0, margin - s(pos_j') + s(neg_j)) where neg_j is paired with
// positive j' = j / k, k = |neg| / |pos|. Gradients w.r.t. the raw parameters
// are accumulated into `grads` (through θ² in SquaredPositive mode). The
// bias does not enter the loss. At the kink the hinge is inactive.
double loss_and_grads(const tractor::TractorModel& m, std::span<const Triple> positives,
                      std::span<const Triple> negatives, double margin, Gradients& grads);

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t t = 0;
};

// One bias-corrected Adam update of params in place.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, const TrainConfig& cfg);

// Per-epoch callback: epoch index (from 0) and summed hinge loss.
using EpochLog = std::function<void(std::size_t, double)>;

// Seeded uniform init in ±0.5/√d, then `epochs` passes of shuffled
// minibatches with k sampled negatives per positive and Adam. Throws
// DataError on an empty KB or a non-finite loss.
tractor::TractorModel train(const KnowledgeBase& kb, const TrainConfig& cfg, const EpochLog& log = {});

}  // namespace liftpdb::learn

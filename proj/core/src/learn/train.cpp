#include "liftpdb/learn/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "liftpdb/errors.hpp"

namespace liftpdb::learn {

using tractor::Mode;
using tractor::TractorModel;

void validate(const TrainConfig& cfg) {
  if (cfg.d == 0 || cfg.batch_size == 0 || cfg.epochs == 0 || cfg.negatives_per_positive == 0)
    throw DataError("d, batch size, epochs and negatives per positive must be positive");
  if (!(cfg.margin > 0.0) || !(cfg.learning_rate > 0.0) || !(cfg.adam_epsilon > 0.0))
    throw DataError("margin, learning rate and epsilon must be positive");
  if (!(cfg.adam_beta1 >= 0.0 && cfg.adam_beta1 < 1.0) || !(cfg.adam_beta2 >= 0.0 && cfg.adam_beta2 < 1.0))
    throw DataError("Adam betas must lie in [0,1)");
}

Gradients Gradients::zeros_like(const TractorModel& m) {
  return {std::vector<double>(m.entity_params().size(), 0.0), std::vector<double>(m.relation_params().size(), 0.0),
          std::vector<double>(m.biases().size(), 0.0)};
}

double score(const TractorModel& m, const Triple& t) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.d(); ++i) s += m.E(i, t.head) * m.T(i, t.relation) * m.E(i, t.tail);
  return s;
}

namespace {

// grads += sign * ∂s(t)/∂θ
void add_score_grad(const TractorModel& m, const Triple& t, double sign, Gradients& g) {
  const std::size_t d = m.d();
  const bool squared = m.mode() == Mode::SquaredPositive;
  auto h = m.entity_raw(t.head);
  auto r = m.relation_raw(t.relation);
  auto u = m.entity_raw(t.tail);
  double* gh = g.entity.data() + t.head * d;
  double* gr = g.relation.data() + t.relation * d;
  double* gu = g.entity.data() + t.tail * d;
  for (std::size_t i = 0; i < d; ++i) {
    if (squared) {
      const double H = h[i] * h[i], R = r[i] * r[i], U = u[i] * u[i];
      gh[i] += sign * 2.0 * h[i] * R * U;
      gr[i] += sign * 2.0 * r[i] * H * U;
      gu[i] += sign * 2.0 * u[i] * H * R;
    } else {
      gh[i] += sign * r[i] * u[i];
      gr[i] += sign * h[i] * u[i];
      gu[i] += sign * h[i] * r[i];
    }
  }
}

}  // namespace

double loss_and_grads(const TractorModel& m, std::span<const Triple> positives, std::span<const Triple> negatives,
                      double margin, Gradients& grads) {
  if (positives.empty() || negatives.size() % positives.size() != 0)
    throw DataError("negatives must come in equal groups per positive");
  const std::size_t k = negatives.size() / positives.size();
  double loss = 0.0;
  for (std::size_t j = 0; j < negatives.size(); ++j) {
    const Triple& pos = positives[j / k];
    const Triple& neg = negatives[j];
    const double l = margin - score(m, pos) + score(m, neg);
    if (l <= 0.0) continue;
    loss += l;
    add_score_grad(m, pos, -1.0, grads);
    add_score_grad(m, neg, +1.0, grads);
  }
  return loss;
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, const TrainConfig& cfg) {
  if (grads.size() != params.size()) throw DataError("gradient and parameter sizes differ");
  if (state.m.size() != params.size()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
    state.t = 0;
  }
  ++state.t;
  const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = b1 * state.m[i] + (1.0 - b1) * grads[i];
    state.v[i] = b2 * state.v[i] + (1.0 - b2) * grads[i] * grads[i];
    const double mh = state.m[i] / c1;
    const double vh = state.v[i] / c2;
    params[i] -= cfg.learning_rate * mh / (std::sqrt(vh) + cfg.adam_epsilon);
  }
}

TractorModel train(const KnowledgeBase& kb, const TrainConfig& cfg, const EpochLog& log) {
  validate(cfg);
  if (kb.empty()) throw DataError("cannot train on an empty knowledge base");
  TractorModel m(kb.entities(), kb.relations(), cfg.d, cfg.mode);

  std::mt19937_64 rng(cfg.seed);
  const double scale = 0.5 / std::sqrt(static_cast<double>(cfg.d));
  std::uniform_real_distribution<double> init(-scale, scale);
  for (auto& x : m.entity_params()) x = init(rng);
  for (auto& x : m.relation_params()) x = init(rng);

  AdamState entity_state, relation_state;
  std::vector<std::size_t> order(kb.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<Triple> pos, neg;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      pos.clear();
      neg.clear();
      for (std::size_t b = start; b < end; ++b) {
        const Triple& t = kb.triples()[order[b]];
        pos.push_back(t);
        auto corrupted = negative_sample(kb, t, cfg.negatives_per_positive, rng);
        neg.insert(neg.end(), corrupted.begin(), corrupted.end());
      }
      Gradients g = Gradients::zeros_like(m);
      const double loss = loss_and_grads(m, pos, neg, cfg.margin, g);
      if (!std::isfinite(loss)) throw DataError("training diverged (loss is not finite); lower the learning rate");
      epoch_loss += loss;
      adam_step(m.entity_params(), g.entity, entity_state, cfg);
      adam_step(m.relation_params(), g.relation, relation_state, cfg);
    }
    if (log) log(epoch, epoch_loss);
  }
  return m;
}

}  // namespace liftpdb::learn

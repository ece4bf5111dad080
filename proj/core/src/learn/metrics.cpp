#include "liftpdb/learn/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "liftpdb/errors.hpp"
#include "liftpdb/tractor/query.hpp"

namespace liftpdb::learn {

double auc(std::span<const double> positives, std::span<const double> negatives) {
  if (positives.empty() || negatives.empty()) throw DataError("AUC needs positive and negative scores");
  std::vector<double> neg(negatives.begin(), negatives.end());
  std::sort(neg.begin(), neg.end());
  double wins = 0.0;
  for (double p : positives) {
    auto lo = std::lower_bound(neg.begin(), neg.end(), p);
    auto hi = std::upper_bound(lo, neg.end(), p);
    wins += static_cast<double>(lo - neg.begin()) + 0.5 * static_cast<double>(hi - lo);
  }
  return wins / (static_cast<double>(positives.size()) * static_cast<double>(neg.size()));
}

double percentile_rank(double answer, std::span<const double> negatives) {
  if (negatives.empty()) throw DataError("percentile rank needs a nonempty negative pool");
  double below = 0.0;
  for (double n : negatives) below += n < answer ? 1.0 : n == answer ? 0.5 : 0.0;
  return 100.0 * below / static_cast<double>(negatives.size());
}

double apr(std::span<const double> percentiles) {
  if (percentiles.empty()) throw DataError("APR needs at least one query");
  return std::accumulate(percentiles.begin(), percentiles.end(), 0.0) / static_cast<double>(percentiles.size());
}

namespace {

int template_number(const std::string& id) {
  if (id.size() > 1 && id[0] == 'Q' && std::all_of(id.begin() + 1, id.end(), ::isdigit)) return std::stoi(id.substr(1));
  return 1 << 20;
}

QueryScores score_query(const tractor::TractorModel& m, const EvalQuery& q) {
  if (q.negatives.empty()) throw DataError("query without negatives: " + logic::to_string(q.query));
  QueryScores s;
  s.answer = tractor::query_prob(m, q.query.instantiate(q.answer));
  s.negatives.reserve(q.negatives.size());
  for (const auto& n : q.negatives) s.negatives.push_back(tractor::query_prob(m, q.query.instantiate(n)));
  return s;
}

}  // namespace

RankingReport evaluate(const tractor::TractorModel& m, const EvalQuerySet& qs, std::size_t threads) {
  if (qs.empty()) throw DataError("no queries to evaluate");
  for (const auto& q : qs)
    if (q.query.is_boolean()) throw DataError("query " + q.template_id + " has no answer variable");
  RankingReport report;
  report.scores.resize(qs.size());

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, qs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < qs.size();) {
      try {
        report.scores[i] = score_query(m, qs[i]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = qs.size();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::map<int, std::vector<std::size_t>> groups;
  std::map<int, std::string> ids;
  for (std::size_t i = 0; i < qs.size(); ++i) {
    int k = template_number(qs[i].template_id);
    groups[k].push_back(i);
    ids[k] = qs[i].template_id;
  }
  for (const auto& [k, members] : groups) {
    // Pooled: every answer of the template against every negative of the template.
    std::vector<double> pos, neg, pct;
    for (auto i : members) {
      const auto& s = report.scores[i];
      pct.push_back(percentile_rank(s.answer, s.negatives));
      pos.push_back(s.answer);
      neg.insert(neg.end(), s.negatives.begin(), s.negatives.end());
    }
    TemplateReport t;
    t.template_id = ids[k];
    t.queries = members.size();
    t.auc = auc(pos, neg);
    t.apr = apr(pct);
    report.per_template.push_back(t);
  }
  for (const auto& t : report.per_template) {
    report.overall_auc += t.auc;
    report.overall_apr += t.apr;
  }
  report.overall_auc /= static_cast<double>(report.per_template.size());
  report.overall_apr /= static_cast<double>(report.per_template.size());
  return report;
}

}  // namespace liftpdb::learn

#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "liftpdb/learn/queries.hpp"
#include "liftpdb/tractor/model.hpp"

namespace liftpdb::learn {

// Probability that a random positive outscores a random negative; ties
// count one half. Throws DataError if either side is empty.
double auc(std::span<const double> positives, std::span<const double> negatives);

// 100 * (#negatives strictly below + ties / 2) / #negatives.
double percentile_rank(double answer, std::span<const double> negatives);

// Mean of per-query percentile ranks. Throws DataError if empty.
double apr(std::span<const double> percentiles);

struct QueryScores {
  double answer = 0.0;
  std::vector<double> negatives;
};

struct TemplateReport {
  std::string template_id;
  std::size_t queries = 0;
  double auc = 0.0;  // pooled over all (answer, negative) pairs of the template
  double apr = 0.0;
};

struct RankingReport {
  std::vector<QueryScores> scores;           // one per input query, same order
  std::vector<TemplateReport> per_template;  // sorted by template number
  double overall_auc = 0.0;                  // mean over templates
  double overall_apr = 0.0;
};

// Scores every query's answer and negatives with tractor::query_prob. Work
// is split across `threads` workers (0: hardware concurrency); results do not
// depend on the thread count.
RankingReport evaluate(const tractor::TractorModel& m, const EvalQuerySet& qs, std::size_t threads = 1);

}  // namespace liftpdb::learn

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "liftpdb/learn/kb.hpp"
#include "liftpdb/logic/ast.hpp"

namespace liftpdb::learn {

// The query templates Q1..Q11 over placeholder relations R, S, T and
// placeholder constants A, B, C. Q2 and Q11 do not mention the answer
// variable and are Boolean.
const std::vector<logic::QueryTemplate>& template_library();
// Throws DataError for unknown ids.
const logic::QueryTemplate& template_by_id(const std::string& id);

// Replaces placeholder predicates and constants. Unmapped names are kept.
logic::QueryTemplate bind_template(const logic::QueryTemplate& tpl, const std::map<std::string, std::string>& relations,
                                   const std::map<std::string, std::string>& constants);

struct EvalQuery {
  std::string template_id;
  logic::QueryTemplate query;  // placeholders bound to KB names
  std::string answer;
  std::vector<std::string> negatives;

  friend bool operator==(const EvalQuery&, const EvalQuery&) = default;
};

using EvalQuerySet = std::vector<EvalQuery>;

// Entities t for which the query holds in the graph formed by the triples.
// A disjunct without the answer variable that holds makes every entity an
// answer.
std::vector<std::string> answers(const KnowledgeBase& graph, const logic::QueryTemplate& q);

// Samples n queries from template_id. Each instance is grounded on the union
// of train and test, starting from a test edge, and is kept only if its
// answer cannot be derived from train alone. Negatives are drawn uniformly
// (without replacement, at most `pool`) from entities that are not answers
// over train ∪ test. Throws DataError for Boolean templates and when no
// instance is found within the attempt budget; may return fewer than n
// queries when the KB supports fewer.
EvalQuerySet generate_queries(const KnowledgeBase& train, const KnowledgeBase& test, const std::string& template_id,
                              std::size_t n, std::uint64_t seed, std::size_t pool = 1000);

// One query per line: `<template text>;answer=<e>;negs=<e1,e2,...>`.
// A negatives list of the form `@path` is read from that file, one entity
// per line, relative to the query file's directory.
void write_query_set(std::ostream& out, const EvalQuerySet& qs);
EvalQuerySet read_query_set(std::istream& in, const std::filesystem::path& base_dir = {});
void save_query_set(const EvalQuerySet& qs, const std::filesystem::path& path);
EvalQuerySet load_query_set(const std::filesystem::path& path);

}  // namespace liftpdb::learn

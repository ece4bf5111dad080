#pragma once

#include <string_view>
#include <variant>

#include "liftpdb/logic/ast.hpp"

namespace liftpdb::logic {

using ParsedQuery = std::variant<UCQ, QueryTemplate>;

// Grammar (whitespace-insensitive, `#` starts a comment):
//
//   query := [ident "(" var ")" "="] ucq
//   ucq   := cq { "OR" cq }
//   cq    := ["EXISTS" var {"," var} "."] atom { "AND" atom }
//   atom  := pred "(" [term {"," term}] ")"
//   term  := var | const
//
// Variables start with a lowercase letter or `_`; constants start with an
// uppercase letter or are double-quoted. Predicates are identifiers or
// double-quoted strings. `P()` denotes a 0-ary atom.
//
// A CQ with an EXISTS prefix must declare every variable except the answer
// variable; without a prefix all non-answer variables are existential.
// A template's answer variable must occur in at least one disjunct; disjuncts
// without it do not depend on the answer.
ParsedQuery parse_query(std::string_view text);

// Parses a Boolean UCQ; a template head is rejected.
UCQ parse_ucq(std::string_view text);

// Parses a query with an answer variable.
QueryTemplate parse_template(std::string_view text);

}  // namespace liftpdb::logic

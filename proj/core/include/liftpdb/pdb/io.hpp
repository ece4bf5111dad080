#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "liftpdb/pdb/database.hpp"

namespace liftpdb::pdb {

// Tab-separated tuples, one per line:
//   predicate <TAB> arg1 <TAB> ... <TAB> argN <TAB> probability
// `@domain c1 c2 ...` lines declare extra constants; `#` starts a comment.
// Errors are DataError with the offending line number.
ProbDatabase read_pdb(std::istream& in, bool formal = false);
void write_pdb(std::ostream& out, const ProbDatabase& db);

ProbDatabase load_pdb(const std::filesystem::path& path, bool formal = false);
void save_pdb(const ProbDatabase& db, const std::filesystem::path& path);

// Shortest decimal form that parses back to the same double (at most 17
// significant digits).
std::string format_real(double x);

}  // namespace liftpdb::pdb

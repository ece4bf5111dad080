#include "liftpdb/pdb/io.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "liftpdb/errors.hpp"

namespace liftpdb::pdb {

namespace {

std::string strip(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    out.push_back(strip(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start)));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

double parse_prob(const std::string& s, const std::string& where) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw DataError(where + "not a number: '" + s + "'");
  return value;
}

}  // namespace

std::string format_real(double x) {
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

ProbDatabase read_pdb(std::istream& in, bool formal) {
  ProbDatabase db(formal);
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (strip(line).empty()) continue;
    if (strip(line).rfind("@domain", 0) == 0) {
      std::istringstream words(strip(line).substr(7));
      std::string c;
      while (words >> c) db.declare_constant(c);
      continue;
    }
    auto fields = split_tabs(line);
    if (fields.size() < 2) throw DataError(where + "expected predicate, arguments and probability separated by tabs");
    for (const auto& f : fields)
      if (f.empty()) throw DataError(where + "empty field");
    logic::Atom atom{fields.front(), {}};
    for (std::size_t i = 1; i + 1 < fields.size(); ++i) atom.args.push_back(logic::Term::constant(fields[i]));
    double p = parse_prob(fields.back(), where);
    try {
      db.insert(atom, p);
    } catch (const DataError& e) {
      throw DataError(where + e.what());
    }
  }
  return db;
}

void write_pdb(std::ostream& out, const ProbDatabase& db) {
  const auto& declared = db.declared_constants();
  if (!declared.empty()) {
    out << "@domain";
    for (const auto& c : declared) out << ' ' << c;
    out << '\n';
  }
  for (const auto& [atom, p] : db.tuples()) {
    out << atom.predicate;
    for (const auto& t : atom.args) out << '\t' << t.name();
    out << '\t' << format_real(p) << '\n';
  }
}

ProbDatabase load_pdb(const std::filesystem::path& path, bool formal) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return read_pdb(in, formal);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void save_pdb(const ProbDatabase& db, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write_pdb(out, db);
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace liftpdb::pdb

#include "liftpdb/tractor/io.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

#include "liftpdb/errors.hpp"

namespace liftpdb::tractor {

using nlohmann::json;

void write_model(std::ostream& out, const TractorModel& m) {
  const std::size_t d = m.d();
  json E = json::array(), T = json::array();
  for (std::size_t i = 0; i < d; ++i) {
    json row = json::array();
    for (std::size_t e = 0; e < m.entities().size(); ++e) row.push_back(m.entity_raw(e)[i]);
    E.push_back(std::move(row));
    row = json::array();
    for (std::size_t r = 0; r < m.relations().size(); ++r) row.push_back(m.relation_raw(r)[i]);
    T.push_back(std::move(row));
  }
  json doc = {{"format", "tractor-model"},
              {"version", kModelFormatVersion},
              {"mode", mode_name(m.mode())},
              {"d", d},
              {"entities", m.entities()},
              {"relations", m.relations()},
              {"E", std::move(E)},
              {"T", std::move(T)},
              {"bias", m.biases()}};
  out << doc.dump(1) << '\n';
}

TractorModel read_model(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (doc.value("format", "") != "tractor-model") throw DataError("not a tractor model file");
    const int version = doc.at("version").get<int>();
    if (version != kModelFormatVersion) throw DataError("unsupported model version " + std::to_string(version));
    const auto d = doc.at("d").get<std::size_t>();
    TractorModel m(doc.at("entities").get<std::vector<std::string>>(),
                   doc.at("relations").get<std::vector<std::string>>(), d,
                   parse_mode(doc.at("mode").get<std::string>()));
    const auto& E = doc.at("E");
    const auto& T = doc.at("T");
    if (E.size() != d || T.size() != d) throw DataError("E and T need one row per component");
    for (std::size_t i = 0; i < d; ++i) {
      if (E[i].size() != m.entities().size()) throw DataError("E row " + std::to_string(i) + " has wrong length");
      if (T[i].size() != m.relations().size()) throw DataError("T row " + std::to_string(i) + " has wrong length");
      for (std::size_t e = 0; e < m.entities().size(); ++e) m.entity_raw(e)[i] = E[i][e].get<double>();
      for (std::size_t r = 0; r < m.relations().size(); ++r) m.relation_raw(r)[i] = T[i][r].get<double>();
    }
    const auto bias = doc.value("bias", std::vector<double>(m.relations().size(), 0.0));
    if (bias.size() != m.relations().size()) throw DataError("bias needs one value per relation");
    for (std::size_t r = 0; r < bias.size(); ++r) m.set_bias(r, bias[r]);
    return m;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const TractorModel& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write_model(out, m);
  if (!out) throw DataError("write failed: " + path.string());
}

TractorModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_model(in);
}

}  // namespace liftpdb::tractor

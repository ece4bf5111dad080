#pragma once

#include <filesystem>
#include <iosfwd>

#include "liftpdb/tractor/model.hpp"

namespace liftpdb::tractor {

inline constexpr int kModelFormatVersion = 1;

// JSON document:
//   { "format": "tractor-model", "version": 1, "mode": "unconstrained",
//     "d": 2, "entities": [...], "relations": [...],
//     "E": [[...], ...], "T": [[...], ...], "bias": [...] }
// E and T have d rows (one per component) of raw parameters, one column per
// entity / relation. Doubles are written in shortest round-trip form.
void write_model(std::ostream& out, const TractorModel& m);
TractorModel read_model(std::istream& in);

void save_model(const TractorModel& m, const std::filesystem::path& path);
TractorModel load_model(const std::filesystem::path& path);

}  // namespace liftpdb::tractor

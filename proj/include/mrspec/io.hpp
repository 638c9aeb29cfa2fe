#pragma once

// File formats: JSON models/beliefs/designs, series CSV with a JSON sidecar,
// and plain numeric CSV tables (17 significant digits, LF endings).

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mrspec/bench.hpp"
#include "mrspec/blm.hpp"
#include "mrspec/likelihood.hpp"
#include "mrspec/process.hpp"

namespace mrspec::io {

using nlohmann::json;

/// Malformed or missing input (config, CSV, JSON).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string format_number(double v);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& content);
json read_json(const std::filesystem::path& path);

json to_json(const SpectralModel& model);
/// {"ar":[],"ma":[],"sar":[],"sma":[],"s":12,"sigma2":1.0}; sigma2 is required.
SpectralModel model_from_json(const json& j);

json to_json(const BeliefState& state);
BeliefState belief_from_json(const json& j);

json to_json(const PriorSpec& prior);
PriorSpec prior_from_json(const json& j, PriorSpec defaults = {});

json to_json(const ExperimentDesign& design);

/// Reads an optional field with a type check; throws InputError naming the field.
template <typename T>
T field_or(const json& j, const char* name, T fallback) {
  if (!j.contains(name)) return fallback;
  try {
    return j.at(name).get<T>();
  } catch (const json::exception&) {
    throw InputError(std::string("field '") + name + "' has the wrong type");
  }
}

template <typename T>
T required_field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw InputError(std::string("missing required field '") + name + "'");
  return field_or<T>(j, name, T{});
}

/// CSV with header `index,value` (base indices) plus sidecar JSON.
std::string series_csv(const SampledSeries& series);
json series_sidecar(const SampledSeries& series);
void write_series(const std::filesystem::path& csv_path, const SampledSeries& series);
/// Sidecar defaults to `<csv>.json` when present; otherwise stride/offset are
/// inferred from the indices.
SampledSeries read_series(const std::filesystem::path& csv_path,
                          const std::filesystem::path& sidecar_path = {});
SampledSeries parse_series_csv(const std::string& text, const json& sidecar);

/// Column-major numeric table.
std::string table_csv(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns);

}  // namespace mrspec::io

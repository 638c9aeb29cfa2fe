#include "mrspec/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mrspec::io {

std::string format_number(double v) {
  if (std::isnan(v)) return "NA";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << content;
}

json read_json(const std::filesystem::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw InputError("invalid JSON in '" + path.string() + "': " + e.what());
  }
}

json to_json(const SpectralModel& m) {
  return {{"ar", m.ar},
          {"ma", m.ma},
          {"sar", m.seasonal_ar},
          {"sma", m.seasonal_ma},
          {"s", m.season_period},
          {"sigma2", m.innovation_variance}};
}

SpectralModel model_from_json(const json& j) {
  if (!j.is_object()) throw InputError("model must be a JSON object");
  SpectralModel m;
  m.ar = field_or<std::vector<double>>(j, "ar", {});
  m.ma = field_or<std::vector<double>>(j, "ma", {});
  m.seasonal_ar = field_or<std::vector<double>>(j, "sar", {});
  m.seasonal_ma = field_or<std::vector<double>>(j, "sma", {});
  m.season_period = field_or<int>(j, "s", 1);
  if ((!m.seasonal_ar.empty() || !m.seasonal_ma.empty()) && !j.contains("s"))
    throw InputError("missing required field 's' for a seasonal model");
  if (m.season_period < 1) throw InputError("field 's' must be a positive integer");
  m.innovation_variance = required_field<double>(j, "sigma2");
  return m;
}

json to_json(const BeliefState& s) {
  json variance = json::array();
  for (Eigen::Index i = 0; i < s.variance.rows(); ++i) {
    std::vector<double> row(s.variance.cols());
    for (Eigen::Index k = 0; k < s.variance.cols(); ++k) row[static_cast<std::size_t>(k)] = s.variance(i, k);
    variance.push_back(row);
  }
  return {{"mean", std::vector<double>(s.mean.data(), s.mean.data() + s.mean.size())}, {"variance", variance}};
}

BeliefState belief_from_json(const json& j) {
  const auto mean = required_field<std::vector<double>>(j, "mean");
  const auto rows = required_field<std::vector<std::vector<double>>>(j, "variance");
  const auto m = static_cast<Eigen::Index>(mean.size());
  if (static_cast<Eigen::Index>(rows.size()) != m) throw InputError("belief variance must be square and match mean");
  Eigen::MatrixXd v(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(row.size()) != m) throw InputError("belief variance must be square and match mean");
    for (Eigen::Index k = 0; k < m; ++k) v(i, k) = row[static_cast<std::size_t>(k)];
  }
  return make_belief(Eigen::Map<const Eigen::VectorXd>(mean.data(), m), v);
}

json to_json(const PriorSpec& p) {
  return {{"basis_size", p.basis_size},
          {"intercept_mean", p.intercept_mean},
          {"scale", p.scale},
          {"smoothness", p.smoothness},
          {"cutoff", p.cutoff}};
}

PriorSpec prior_from_json(const json& j, PriorSpec d) {
  if (j.is_null()) return d;
  if (!j.is_object()) throw InputError("prior must be a JSON object");
  d.basis_size = field_or<std::size_t>(j, "basis_size", d.basis_size);
  d.intercept_mean = field_or<double>(j, "intercept_mean", d.intercept_mean);
  d.scale = field_or<double>(j, "scale", d.scale);
  d.smoothness = field_or<double>(j, "smoothness", d.smoothness);
  d.cutoff = field_or<double>(j, "cutoff", d.cutoff);
  return d;
}

json to_json(const ExperimentDesign& d) {
  return {{"n_low", d.n_low},         {"n_high", d.n_high},   {"delta_low", d.delta_low},
          {"replicates", d.replicates}, {"omega_true", d.omega_true}, {"modulus", d.modulus},
          {"grid", d.grid},           {"seed", d.seed}};
}

std::string series_csv(const SampledSeries& s) {
  std::string out = "index,value\n";
  for (std::size_t k = 0; k < s.size(); ++k)
    out += std::to_string(s.base_index(k)) + "," + format_number(s.values[k]) + "\n";
  return out;
}

json series_sidecar(const SampledSeries& s) {
  return {{"stride", s.stride}, {"offset", s.offset}, {"base_step", s.base_step}};
}

void write_series(const std::filesystem::path& csv_path, const SampledSeries& s) {
  write_text(csv_path, series_csv(s));
  auto sidecar = csv_path;
  sidecar += ".json";
  write_text(sidecar, series_sidecar(s).dump(2) + "\n");
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

template <typename T>
bool parse_full(const std::string& text, T& out) {
  std::istringstream ss(text);
  ss >> out;
  return !ss.fail() && (ss >> std::ws).eof();
}

}  // namespace

SampledSeries parse_series_csv(const std::string& text, const json& sidecar) {
  std::istringstream in(text);
  std::string line;
  std::size_t row = 0;
  std::vector<long> idx;
  std::vector<std::size_t> rows;
  SampledSeries s;
  while (std::getline(in, line)) {
    ++row;
    if (row == 1) {
      if (split(line, ',') != std::vector<std::string>{"index", "value"})
        throw InputError("series CSV row 1: expected header 'index,value'");
      continue;
    }
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line, ',');
    long index = 0;
    double value = 0.0;
    if (cells.size() != 2 || !parse_full(cells[0], index) || !parse_full(cells[1], value) || !std::isfinite(value))
      throw InputError("series CSV row " + std::to_string(row) + ": expected '<integer index>,<number>'");
    if (!idx.empty() && index <= idx.back())
      throw InputError("series CSV row " + std::to_string(row) + ": indices must be increasing");
    idx.push_back(index);
    rows.push_back(row);
    s.values.push_back(value);
  }
  if (row == 0) throw InputError("series CSV is empty");
  if (idx.empty()) throw InputError("series CSV has no data rows");

  const long inferred_stride = idx.size() > 1 ? idx[1] - idx[0] : 1;
  s.stride = field_or<int>(sidecar, "stride", static_cast<int>(inferred_stride));
  s.offset = field_or<int>(sidecar, "offset", static_cast<int>(idx[0]));
  s.base_step = field_or<double>(sidecar, "base_step", 1.0);
  if (s.stride < 1) throw InputError("sidecar 'stride' must be at least 1");
  if (s.offset < 0) throw InputError("sidecar 'offset' must be non-negative");
  // Re-anchor so that index 0 of the series is its first row.
  const long first = idx[0];
  if ((first - s.offset) % s.stride != 0)
    throw InputError("series CSV row " + std::to_string(rows[0]) + ": index is inconsistent with stride/offset");
  for (std::size_t k = 0; k < idx.size(); ++k)
    if (idx[k] != first + static_cast<long>(k) * s.stride)
      throw InputError("series CSV row " + std::to_string(rows[k]) + ": index breaks the regular stride");
  s.offset = static_cast<int>(first);
  return s;
}

SampledSeries read_series(const std::filesystem::path& csv_path, const std::filesystem::path& sidecar_path) {
  json sidecar = json::object();
  auto side = sidecar_path;
  if (side.empty()) {
    side = csv_path;
    side += ".json";
    if (!std::filesystem::exists(side)) side.clear();
  }
  if (!side.empty()) sidecar = read_json(side);
  return parse_series_csv(read_text(csv_path), sidecar);
}

std::string table_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size()) throw std::invalid_argument("table header and columns disagree");
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) out += (c ? "," : "") + header[c];
  out += '\n';
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) out += (c ? "," : "") + format_number(columns[c].at(r));
    out += '\n';
  }
  return out;
}

}  // namespace mrspec::io

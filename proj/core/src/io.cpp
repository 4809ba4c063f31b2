#include "projwass/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace projwass::io {

using nlohmann::ordered_json;

namespace {

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

double parse_double(const std::string& token, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (trim(std::string_view(token).substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("CSV line " + std::to_string(line_no) + ": cannot parse '" + token + "' as a number");
}

ordered_json matrix_json(const Matrix& m) {
  ordered_json entries = ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    entries.push_back(std::move(row));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(entries)}};
}

ordered_json network_json(const PotentialNetwork& net) {
  const Vector theta = net.parameters();
  return {{"dims", net.dims()},
          {"activation", to_string(net.activation())},
          {"parameters", std::vector<double>(theta.data(), theta.data() + theta.size())}};
}

ordered_json config_json(const PwConfig& cfg) {
  return {{"k", cfg.k},
          {"lambda", cfg.lambda},
          {"batch_size", cfg.batch_size},
          {"iterations", cfg.iterations},
          {"learning_rate", cfg.learning_rate},
          {"schedule", cfg.schedule == LearningRateSchedule::kConstant ? "constant" : "inverse-sqrt"},
          {"seed", cfg.seed.seed},
          {"stream_id", cfg.seed.stream_id},
          {"reorthonormalize_every", cfg.reorthonormalize_every},
          {"network_dims", cfg.resolved_network_dims()},
          {"activation", to_string(cfg.activation)},
          {"full_scan_limit", cfg.full_scan_limit},
          {"init_candidates", cfg.init_candidates}};
}

ordered_json report_json(const ThresholdReport& r) {
  return {{"concentration_term", r.concentration_term},
          {"complexity_term_n", r.complexity_term_n},
          {"complexity_term_m", r.complexity_term_m},
          {"equal_size_form", r.equal_size_form},
          {"threshold", r.threshold}};
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string sample_set_to_csv(const SampleSet& x) {
  std::string out;
  for (std::size_t j = 0; j < x.dim(); ++j) {
    if (j > 0) out += ',';
    out += 'x' + std::to_string(j + 1);
  }
  out += '\n';
  const RowMatrix& data = x.data();
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_double(data(i, j));
    }
    out += '\n';
  }
  return out;
}

SampleSet sample_set_from_csv(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (!header_seen) {
      header_seen = true;
      width = fields.size();
      continue;
    }
    if (fields.size() != width) {
      throw DimensionError("CSV line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                           " fields, header has " + std::to_string(width));
    }
    std::vector<double> row;
    row.reserve(width);
    for (const auto& f : fields) row.push_back(parse_double(f, line_no));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw EmptyInputError("CSV contains no observations");
  RowMatrix data(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return SampleSet(std::move(data));
}

SampleSet read_sample_set(const std::filesystem::path& path) { return sample_set_from_csv(read_file(path)); }

std::string table_to_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j > 0) out += ',';
    out += header[j];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j > 0) out += ',';
      out += format_double(row[j]);
    }
    out += '\n';
  }
  return out;
}

std::string network_to_json(const PotentialNetwork& net, int indent) { return network_json(net).dump(indent); }

PotentialNetwork network_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    PotentialNetwork net(j.at("dims").get<std::vector<std::size_t>>(),
                         activation_from_string(j.at("activation").get<std::string>()));
    const auto params = j.at("parameters").get<std::vector<double>>();
    net.set_parameters(Eigen::Map<const Vector>(params.data(), static_cast<Eigen::Index>(params.size())));
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid network checkpoint: ") + e.what());
  }
}

std::string pw_config_to_json(const PwConfig& cfg, int indent) { return config_json(cfg).dump(indent); }

std::string pw_estimate_to_json(const PwEstimate& est, const PwConfig& cfg, int indent) {
  ordered_json j = {{"value", est.value},
                    {"defect", est.defect},
                    {"projector", matrix_json(est.projector.entries())},
                    {"raw_projector", matrix_json(est.raw_projector.entries())},
                    {"network", network_json(est.network)},
                    {"config", config_json(cfg)}};
  return j.dump(indent);
}

std::string trace_to_csv(const std::vector<TracePoint>& trace) {
  std::string out = "iteration,objective,defect\n";
  for (const auto& p : trace) {
    out += std::to_string(p.iteration) + ',' + format_double(p.objective) + ',' + format_double(p.defect) + '\n';
  }
  return out;
}

std::string kde_to_csv(const std::vector<KdePoint>& curve) {
  std::string out = "t,density\n";
  for (const auto& p : curve) out += format_double(p.t) + ',' + format_double(p.density) + '\n';
  return out;
}

std::string threshold_report_to_json(const ThresholdReport& report, const ThresholdParams& params, int indent) {
  ordered_json j = {{"alpha", params.alpha},
                    {"n", params.n},
                    {"m", params.m},
                    {"constants",
                     {{"diameter_mu", params.diameter_mu},
                      {"diameter_nu", params.diameter_nu},
                      {"lipschitz", params.lipschitz},
                      {"second_moment_mu", params.second_moment_mu},
                      {"second_moment_nu", params.second_moment_nu},
                      {"k", params.k}}},
                    {"terms", report_json(report)},
                    {"threshold", report.threshold}};
  return j.dump(indent);
}

std::string verdict_to_json(const TestVerdict& v, int indent) {
  ordered_json j = {{"method", to_string(v.method)}, {"statistic", v.statistic}};
  j["threshold"] = v.threshold ? ordered_json(*v.threshold) : ordered_json(nullptr);
  j["decision"] = v.decision ? ordered_json(to_string(*v.decision)) : ordered_json(nullptr);
  j["p_value"] = v.p_value ? ordered_json(*v.p_value) : ordered_json(nullptr);
  j["permutations_used"] = v.permutations_used;
  if (v.threshold_report) j["threshold_terms"] = report_json(*v.threshold_report);
  return j.dump(indent);
}

std::string roc_to_csv(const RocCurve& roc) {
  std::string out = "fpr,tpr\n";
  for (const auto& p : roc.points) out += format_double(p.fpr) + ',' + format_double(p.tpr) + '\n';
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace projwass::io

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "projwass/core.hpp"
#include "projwass/datasets.hpp"
#include "projwass/potential.hpp"
#include "projwass/pw.hpp"
#include "projwass/tester.hpp"

namespace projwass::io {

/// Formats a double with round-trip precision (%.17g).
std::string format_double(double v);

/// SampleSet CSV: header `x1,...,xd`, one observation per line.
std::string sample_set_to_csv(const SampleSet& x);
SampleSet sample_set_from_csv(std::string_view text);
SampleSet read_sample_set(const std::filesystem::path& path);

/// Generic CSV with a header row and numeric rows.
std::string table_to_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);

/// {"dims": [...], "activation": "relu", "parameters": [...]} with layer-major
/// parameters (each layer: W row-major, then b).
std::string network_to_json(const PotentialNetwork& net, int indent = 2);
PotentialNetwork network_from_json(std::string_view text);

std::string pw_config_to_json(const PwConfig& cfg, int indent = 2);
std::string pw_estimate_to_json(const PwEstimate& est, const PwConfig& cfg, int indent = 2);
std::string trace_to_csv(const std::vector<TracePoint>& trace);
std::string kde_to_csv(const std::vector<KdePoint>& curve);

std::string threshold_report_to_json(const ThresholdReport& report, const ThresholdParams& params, int indent = 2);
std::string verdict_to_json(const TestVerdict& verdict, int indent = 2);
std::string roc_to_csv(const RocCurve& roc);

/// Writes to `<path>.tmp` then renames, so readers never see partial files.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace projwass::io

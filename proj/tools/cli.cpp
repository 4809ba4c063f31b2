#include "cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "projwass/bounds.hpp"
#include "projwass/datasets.hpp"
#include "projwass/io.hpp"
#include "projwass/mmd.hpp"
#include "projwass/pw.hpp"
#include "projwass/tester.hpp"
#include "projwass/transport1d.hpp"

#ifndef PROJWASS_VERSION
#define PROJWASS_VERSION "unknown"
#endif

namespace projwass::cli {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

struct PwFlags {
  PwConfig cfg;
  std::string schedule = "inverse-sqrt";
  std::string activation = "relu";
  std::vector<std::size_t> hidden{32, 32};
  std::size_t full_scan_limit = 4096;

  explicit PwFlags(const PwConfig& base) : cfg(base) {
    schedule = base.schedule == LearningRateSchedule::kConstant ? "constant" : "inverse-sqrt";
    activation = to_string(base.activation);
    full_scan_limit = base.full_scan_limit;
  }

  PwConfig resolve(std::uint64_t seed) const {
    PwConfig out = cfg;
    out.schedule = schedule == "constant" ? LearningRateSchedule::kConstant : LearningRateSchedule::kInverseSqrt;
    out.activation = activation_from_string(activation);
    out.network_dims.assign(1, out.k);
    out.network_dims.insert(out.network_dims.end(), hidden.begin(), hidden.end());
    out.network_dims.push_back(1);
    out.full_scan_limit = full_scan_limit;
    out.seed = RngSeed{seed, 0};
    return out;
  }
};

void add_pw_flags(CLI::App* sub, PwFlags& f) {
  sub->add_option("--k", f.cfg.k, "Projection dimension")->capture_default_str();
  sub->add_option("--lambda", f.cfg.lambda, "Orthogonality penalty")->capture_default_str();
  sub->add_option("--batch", f.cfg.batch_size, "Minibatch size")->capture_default_str();
  sub->add_option("--iters", f.cfg.iterations, "SGD iterations")->capture_default_str();
  sub->add_option("--lr", f.cfg.learning_rate, "Base learning rate")->capture_default_str();
  sub->add_option("--schedule", f.schedule, "Learning-rate schedule")
      ->check(CLI::IsMember({"constant", "inverse-sqrt"}))
      ->capture_default_str();
  sub->add_option("--activation", f.activation, "Potential activation")
      ->check(CLI::IsMember({"relu", "tanh"}))
      ->capture_default_str();
  sub->add_option("--hidden", f.hidden, "Hidden layer widths, comma separated")->delimiter(',');
  sub->add_option("--reorth", f.cfg.reorthonormalize_every, "Orthonormalize A every N steps (0 = never)")
      ->capture_default_str();
  sub->add_option("--full-scan-limit", f.full_scan_limit, "Scan all of Y in the c-transform up to this size")
      ->capture_default_str();
  sub->add_option("--init-candidates", f.cfg.init_candidates, "Random starting projections screened before SGD")
      ->capture_default_str();
}

std::size_t resolve_jobs(std::size_t jobs) {
  if (jobs > 0) return jobs;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json pw_config_json(const PwConfig& cfg) { return Json::parse(io::pw_config_to_json(cfg)); }

/// Output files are deterministic; only the manifest carries wall-clock data.
void write_manifest(const fs::path& path, const std::string& command, std::uint64_t seed, Json config,
                    const std::vector<fs::path>& outputs, Clock::time_point started) {
  Json manifest;
  manifest["command"] = command;
  manifest["version"] = PROJWASS_VERSION;
  manifest["seed"] = seed;
  manifest["config"] = std::move(config);
  Json files = Json::array();
  for (const auto& p : outputs) files.push_back(p.string());
  manifest["outputs"] = std::move(files);
  manifest["started_at"] = utc_timestamp();
  manifest["duration_seconds"] = std::chrono::duration<double>(Clock::now() - started).count();
  io::write_file_atomic(path, manifest.dump(2) + "\n");
}

bool resolve_sigmoid(const std::string& flag, bool threshold_mode) {
  if (flag == "on") return true;
  if (flag == "off") return false;
  return threshold_mode;
}

// ---------------------------------------------------------------------------

struct GenerateOptions {
  std::string family = "blob";
  std::string role = "mu";
  std::size_t n = 100;
  std::size_t d = 2;
  double delta = 0.81;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_generate(const GenerateOptions& o, std::ostream& out) {
  const auto started = Clock::now();
  DatasetSpec spec;
  spec.family = family_from_string(o.family);
  spec.role = role_from_string(o.role);
  spec.d = o.d;
  spec.delta = o.delta;
  spec.validate();
  if (o.n < 1) throw ConfigError("--n must be >= 1");

  const SampleSet samples = generate(spec, o.n, RngSeed{o.seed, 0});
  const fs::path path(o.out);
  io::write_file_atomic(path, io::sample_set_to_csv(samples));

  Json config;
  config["family"] = o.family;
  config["role"] = o.role;
  config["n"] = o.n;
  config["d"] = o.d;
  config["delta"] = o.delta;
  write_manifest(fs::path(o.out + ".manifest.json"), "generate", o.seed, config, {path}, started);
  out << "wrote " << samples.size() << "x" << samples.dim() << " samples to " << path.string() << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct PwOptions {
  std::string x;
  std::string y;
  std::uint64_t seed = 0;
  std::size_t kde_grid = 0;
  std::string out_dir = ".";
};

int cmd_pw(const PwOptions& o, const PwFlags& flags, std::ostream& out) {
  const auto started = Clock::now();
  const SampleSet x = io::read_sample_set(o.x);
  const SampleSet y = io::read_sample_set(o.y);
  if (x.dim() != y.dim()) {
    throw DimensionError("--x has dimension " + std::to_string(x.dim()) + " but --y has dimension " +
                         std::to_string(y.dim()));
  }
  const PwConfig cfg = flags.resolve(o.seed);
  const PwEstimate est = estimate_pw(x, y, cfg);

  const fs::path dir(o.out_dir);
  std::vector<fs::path> outputs;
  auto emit = [&](const std::string& name, const std::string& contents) {
    outputs.push_back(dir / name);
    io::write_file_atomic(outputs.back(), contents);
  };
  emit("estimate.json", io::pw_estimate_to_json(est, cfg) + "\n");
  emit("trace.csv", io::trace_to_csv(est.trace));
  const SampleSet px = project(est.projector, x);
  const SampleSet py = project(est.projector, y);
  emit("projected_x.csv", io::sample_set_to_csv(px));
  emit("projected_y.csv", io::sample_set_to_csv(py));
  if (o.kde_grid > 0 && cfg.k == 1) {
    emit("kde_x.csv", io::kde_to_csv(kde_export(px, o.kde_grid)));
    emit("kde_y.csv", io::kde_to_csv(kde_export(py, o.kde_grid)));
  }

  Json config;
  config["x"] = o.x;
  config["y"] = o.y;
  config["kde_grid"] = o.kde_grid;
  config["pw"] = pw_config_json(cfg);
  write_manifest(dir / "manifest.json", "pw", o.seed, config, outputs, started);

  out << "value " << io::format_double(est.value) << "\n";
  out << "defect " << io::format_double(est.defect) << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct TestOptions {
  std::string x;
  std::string y;
  std::string method = "pw";
  std::string mode = "threshold";
  double alpha = 0.05;
  std::size_t permutations = 199;
  std::uint64_t seed = 0;
  std::string sigmoid = "auto";
  double bandwidth = 0.0;
  std::size_t jobs = 1;
  std::string out;
};

int cmd_test(const TestOptions& o, const PwFlags& flags, std::ostream& out) {
  const auto started = Clock::now();
  if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw ConfigError("--alpha must lie in (0, 1)");
  const bool threshold_mode = o.mode == "threshold";
  if (!threshold_mode && o.permutations < 19) throw ConfigError("--permutations must be >= 19");

  const SampleSet x = io::read_sample_set(o.x);
  const SampleSet y = io::read_sample_set(o.y);
  if (x.dim() != y.dim()) {
    throw DimensionError("--x has dimension " + std::to_string(x.dim()) + " but --y has dimension " +
                         std::to_string(y.dim()));
  }

  MethodConfig mc;
  mc.pw = flags.resolve(o.seed);
  mc.mmd.bandwidth = o.bandwidth;
  mc.mmd.subsample_seed = RngSeed{o.seed, 0}.derive(3);
  mc.sigmoid = resolve_sigmoid(o.sigmoid, threshold_mode);
  const TestMethod method = method_from_string(o.method);

  const TestVerdict verdict =
      threshold_mode ? run_test(x, y, method, o.alpha, mc)
                     : run_permutation_test(x, y, method, o.alpha, mc, o.permutations, RngSeed{o.seed, 0}.derive(1),
                                            resolve_jobs(o.jobs));

  std::vector<fs::path> outputs;
  if (!o.out.empty()) {
    outputs.emplace_back(o.out);
    io::write_file_atomic(outputs.back(), io::verdict_to_json(verdict) + "\n");
    Json config;
    config["x"] = o.x;
    config["y"] = o.y;
    config["method"] = o.method;
    config["mode"] = o.mode;
    config["alpha"] = o.alpha;
    config["permutations"] = threshold_mode ? 0 : o.permutations;
    config["sigmoid"] = mc.sigmoid;
    config["bandwidth"] = o.bandwidth;
    if (method == TestMethod::kPw) config["pw"] = pw_config_json(mc.pw);
    write_manifest(fs::path(o.out + ".manifest.json"), "test", o.seed, config, outputs, started);
  }

  out << "statistic " << io::format_double(verdict.statistic) << "\n";
  if (verdict.threshold) out << "threshold " << io::format_double(*verdict.threshold) << "\n";
  if (verdict.p_value) out << "p_value " << io::format_double(*verdict.p_value) << "\n";
  out << "decision " << to_string(*verdict.decision) << "\n";
  return *verdict.decision == Decision::kRejectH0 ? kRejected : kOk;
}

// ---------------------------------------------------------------------------

struct RocOptions {
  std::string family = "laplace-shift";
  std::size_t d = 0;
  std::size_t n = 100;
  std::size_t trials = 100;
  std::string method = "both";
  std::uint64_t seed = 0;
  std::string sigmoid = "off";
  double bandwidth = 0.0;
  std::size_t jobs = 1;
  std::string out_dir = ".";
};

int cmd_roc(const RocOptions& o, const PwFlags& flags, std::ostream& out) {
  const auto started = Clock::now();
  if (o.trials < 20) throw ConfigError("--trials must be >= 20");
  const DatasetFamily family = family_from_string(o.family);
  const std::size_t d = o.d > 0 ? o.d : (family == DatasetFamily::kBlob ? 2 : 10);
  const RocExperiment experiment = standard_roc_experiment(family, d, o.n, o.trials);
  experiment.h0.first.validate();

  MethodConfig mc;
  mc.pw = flags.resolve(o.seed);
  mc.mmd.bandwidth = o.bandwidth;
  mc.sigmoid = resolve_sigmoid(o.sigmoid, false);

  std::vector<TestMethod> methods;
  if (o.method == "both") {
    methods = {TestMethod::kPw, TestMethod::kMmd};
  } else {
    methods = {method_from_string(o.method)};
  }

  const fs::path dir(o.out_dir);
  std::vector<fs::path> outputs;
  for (TestMethod method : methods) {
    const std::string name = to_string(method);
    const RocCurve roc = evaluate_roc(experiment, method, mc, RngSeed{o.seed, 0}, resolve_jobs(o.jobs));

    outputs.push_back(dir / ("roc_" + name + ".csv"));
    io::write_file_atomic(outputs.back(), io::roc_to_csv(roc));

    std::vector<std::vector<double>> rows;
    for (std::size_t t = 0; t < roc.statistics_h0.size(); ++t) {
      rows.push_back({0.0, static_cast<double>(t), roc.statistics_h0[t]});
    }
    for (std::size_t t = 0; t < roc.statistics_h1.size(); ++t) {
      rows.push_back({1.0, static_cast<double>(t), roc.statistics_h1[t]});
    }
    outputs.push_back(dir / ("statistics_" + name + ".csv"));
    io::write_file_atomic(outputs.back(), io::table_to_csv({"hypothesis", "trial", "statistic"}, rows));

    Json summary;
    summary["auc"] = roc.auc;
    summary["trials_h0"] = roc.trials_h0;
    summary["trials_h1"] = roc.trials_h1;
    summary["method"] = name;
    Json config;
    config["family"] = o.family;
    config["d"] = d;
    config["n"] = o.n;
    config["seed"] = o.seed;
    config["sigmoid"] = mc.sigmoid;
    if (method == TestMethod::kPw) {
      config["pw"] = pw_config_json(mc.pw);
    } else {
      config["bandwidth"] = o.bandwidth;
    }
    summary["config"] = std::move(config);
    outputs.push_back(dir / ("roc_" + name + ".json"));
    io::write_file_atomic(outputs.back(), summary.dump(2) + "\n");

    out << "auc " << name << " " << io::format_double(roc.auc) << "\n";
  }

  Json config;
  config["family"] = o.family;
  config["d"] = d;
  config["n"] = o.n;
  config["trials"] = o.trials;
  config["method"] = o.method;
  config["sigmoid"] = mc.sigmoid;
  config["bandwidth"] = o.bandwidth;
  config["pw"] = pw_config_json(mc.pw);
  write_manifest(dir / "manifest.json", "roc", o.seed, config, outputs, started);
  return kOk;
}

// ---------------------------------------------------------------------------

struct SweepOptions {
  std::string x;
  std::string y;
  std::vector<double> lambdas{1.0, 10.0, 100.0};
  std::size_t repeats = 1;
  std::uint64_t seed = 0;
  std::string out = "sweep.csv";
};

SampleSet oracle_instance(double y_offset) {
  RowMatrix m(2, 2);
  m << 0.0, y_offset, 1.0, y_offset;
  return SampleSet(std::move(m));
}

int cmd_sweep_lambda(const SweepOptions& o, const PwFlags& flags, std::ostream& out) {
  const auto started = Clock::now();
  for (double lambda : o.lambdas) {
    if (!(lambda > 0.0)) throw ConfigError("--lambdas entries must be positive");
  }
  if (o.repeats < 1) throw ConfigError("--repeats must be >= 1");
  if (o.x.empty() != o.y.empty()) throw ConfigError("--x and --y must be given together");

  const bool builtin = o.x.empty();
  const SampleSet x = builtin ? oracle_instance(0.0) : io::read_sample_set(o.x);
  const SampleSet y = builtin ? oracle_instance(2.0) : io::read_sample_set(o.y);
  if (x.dim() != y.dim()) {
    throw DimensionError("--x has dimension " + std::to_string(x.dim()) + " but --y has dimension " +
                         std::to_string(y.dim()));
  }

  PwConfig cfg = flags.resolve(o.seed);
  std::vector<std::vector<double>> rows;
  for (std::size_t r = 0; r < o.repeats; ++r) {
    cfg.seed = RngSeed{o.seed, 0}.derive(r);
    for (const auto& row : penalty_gap_probe(x, y, cfg, o.lambdas)) {
      rows.push_back({static_cast<double>(r), row.lambda, row.value, row.defect});
    }
  }
  const fs::path path(o.out);
  io::write_file_atomic(path, io::table_to_csv({"repeat", "lambda", "value", "defect"}, rows));

  Json config;
  config["x"] = builtin ? "builtin:oracle" : o.x;
  config["y"] = builtin ? "builtin:oracle" : o.y;
  config["lambdas"] = o.lambdas;
  config["repeats"] = o.repeats;
  config["pw"] = pw_config_json(cfg);
  write_manifest(fs::path(o.out + ".manifest.json"), "sweep-lambda", o.seed, config, {path}, started);
  out << "wrote " << rows.size() << " rows to " << path.string() << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Projected Wasserstein two-sample testing toolkit", "projwass"};
  app.require_subcommand(1);
  app.set_version_flag("--version", PROJWASS_VERSION);

  GenerateOptions gen;
  auto* generate_cmd = app.add_subcommand("generate", "Draw samples from a benchmark distribution");
  generate_cmd->add_option("--family", gen.family, "blob, hdgm, laplace-shift or gauss-var")->required();
  generate_cmd->add_option("--role", gen.role, "mu or nu")->capture_default_str();
  generate_cmd->add_option("--n", gen.n, "Number of samples")->capture_default_str();
  generate_cmd->add_option("--d", gen.d, "Dimension")->capture_default_str();
  generate_cmd->add_option("--delta", gen.delta, "Correlation for blob and hdgm")->capture_default_str();
  generate_cmd->add_option("--seed", gen.seed)->capture_default_str();
  generate_cmd->add_option("--out", gen.out, "Output CSV")->required();

  PwOptions pw;
  PwFlags pw_flags{PwConfig{}};
  auto* pw_cmd = app.add_subcommand("pw", "Estimate the projected Wasserstein distance");
  pw_cmd->add_option("--x", pw.x, "First sample CSV")->required();
  pw_cmd->add_option("--y", pw.y, "Second sample CSV")->required();
  pw_cmd->add_option("--seed", pw.seed)->capture_default_str();
  pw_cmd->add_option("--kde-grid", pw.kde_grid, "Grid points for KDE export of the projections (0 = none)")
      ->capture_default_str();
  pw_cmd->add_option("--out-dir", pw.out_dir)->capture_default_str();
  add_pw_flags(pw_cmd, pw_flags);

  TestOptions test;
  PwFlags test_flags{PwConfig{}};
  auto* test_cmd = app.add_subcommand("test", "Two-sample test; exit 0 accepts H0, exit 1 rejects");
  test_cmd->add_option("--x", test.x, "First sample CSV")->required();
  test_cmd->add_option("--y", test.y, "Second sample CSV")->required();
  test_cmd->add_option("--method", test.method)->check(CLI::IsMember({"pw", "mmd"}))->capture_default_str();
  test_cmd->add_option("--mode", test.mode)
      ->check(CLI::IsMember({"threshold", "permutation"}))
      ->capture_default_str();
  test_cmd->add_option("--alpha", test.alpha)->capture_default_str();
  test_cmd->add_option("--permutations", test.permutations)->capture_default_str();
  test_cmd->add_option("--seed", test.seed)->capture_default_str();
  test_cmd->add_option("--sigmoid", test.sigmoid, "auto: on in threshold mode, off in permutation mode")
      ->check(CLI::IsMember({"auto", "on", "off"}))
      ->capture_default_str();
  test_cmd->add_option("--bandwidth", test.bandwidth, "Gaussian kernel bandwidth (<= 0: median heuristic)")
      ->capture_default_str();
  test_cmd->add_option("--jobs", test.jobs, "Worker threads (0 = all cores)")->capture_default_str();
  test_cmd->add_option("--out", test.out, "Verdict JSON");
  add_pw_flags(test_cmd, test_flags);

  RocOptions roc;
  PwFlags roc_flags{power_study_pw_config()};
  auto* roc_cmd = app.add_subcommand("roc", "Empirical ROC of a statistic on a benchmark family");
  roc_cmd->add_option("--family", roc.family)->capture_default_str();
  roc_cmd->add_option("--d", roc.d, "Dimension (default 2 for blob, else 10)");
  roc_cmd->add_option("--n", roc.n)->capture_default_str();
  roc_cmd->add_option("--trials", roc.trials, "Trials per hypothesis")->capture_default_str();
  roc_cmd->add_option("--method", roc.method)->check(CLI::IsMember({"pw", "mmd", "both"}))->capture_default_str();
  roc_cmd->add_option("--seed", roc.seed)->capture_default_str();
  roc_cmd->add_option("--sigmoid", roc.sigmoid)->check(CLI::IsMember({"on", "off"}))->capture_default_str();
  roc_cmd->add_option("--bandwidth", roc.bandwidth)->capture_default_str();
  roc_cmd->add_option("--jobs", roc.jobs, "Worker threads (0 = all cores)")->capture_default_str();
  roc_cmd->add_option("--out-dir", roc.out_dir)->capture_default_str();
  add_pw_flags(roc_cmd, roc_flags);

  SweepOptions sweep;
  PwFlags sweep_flags{PwConfig{}};
  auto* sweep_cmd = app.add_subcommand("sweep-lambda", "Final value and orthogonality defect across penalties");
  sweep_cmd->add_option("--x", sweep.x, "First sample CSV (default: built-in two-point instance)");
  sweep_cmd->add_option("--y", sweep.y, "Second sample CSV");
  sweep_cmd->add_option("--lambdas", sweep.lambdas, "Increasing penalties, comma separated")->delimiter(',');
  sweep_cmd->add_option("--repeats", sweep.repeats, "Independent seeds")->capture_default_str();
  sweep_cmd->add_option("--seed", sweep.seed)->capture_default_str();
  sweep_cmd->add_option("--out", sweep.out)->capture_default_str();
  add_pw_flags(sweep_cmd, sweep_flags);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (*generate_cmd) return cmd_generate(gen, out);
    if (*pw_cmd) return cmd_pw(pw, pw_flags, out);
    if (*test_cmd) return cmd_test(test, test_flags, out);
    if (*roc_cmd) return cmd_roc(roc, roc_flags, out);
    if (*sweep_cmd) return cmd_sweep_lambda(sweep, sweep_flags, out);
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << "\n";
    return kDimensionMismatch;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kDiverged;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const EmptyInputError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}

}  // namespace projwass::cli

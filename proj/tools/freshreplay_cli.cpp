// Copyright 2026 The FreshReplay Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// freshreplay command-line driver. Talks to the library only through freshreplay.h.
//
// Exit codes:
//   0  success
//   1  usage, parse or validation error (including a missing config or sweep file)
//   2  runtime failure inside the library
//   3  staleness-demo gate failed
//   4  bench-refresh gate failed
//   5  could not write an output file

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "freshreplay/freshreplay.h"

namespace fs = std::filesystem;

namespace {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitRuntime = 2,
  kExitStaleness = 3,
  kExitBench = 4,
  kExitOutput = 5,
};

struct CliFailure {
  int code;
  std::string message;
};

[[noreturn]] void fail(int code, std::string message) { throw CliFailure{code, std::move(message)}; }

void check(fr_status status, int code, const std::string& context) {
  if (status != FR_OK) {
    fail(code, context + ": " + fr_last_error());
  }
}

struct ConfigDeleter {
  void operator()(fr_config* c) const { fr_config_free(c); }
};
struct ExperimentDeleter {
  void operator()(fr_experiment* e) const { fr_experiment_free(e); }
};
struct BufferDeleter {
  void operator()(fr_buffer* b) const { fr_buffer_close(b); }
};
using ConfigPtr = std::unique_ptr<fr_config, ConfigDeleter>;
using ExperimentPtr = std::unique_ptr<fr_experiment, ExperimentDeleter>;
using BufferPtr = std::unique_ptr<fr_buffer, BufferDeleter>;

std::string format_real(double value) {
  if (std::isinf(value)) {
    return value > 0 ? "inf" : "-inf";
  }
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

double parse_real(const std::string& text, const std::string& what) {
  if (text == "inf" || text == "+inf") {
    return std::numeric_limits<double>::infinity();
  }
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    fail(kExitUsage, what + ": not a number: '" + text + "'");
  }
  return value;
}

ConfigPtr load_or_default(const std::string& path) {
  fr_config* raw = nullptr;
  if (path.empty()) {
    check(fr_config_new(&raw), kExitRuntime, "config");
  } else {
    check(fr_config_load(path.c_str(), &raw), kExitUsage, "config");
  }
  return ConfigPtr(raw);
}

void apply_override(fr_config* config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    fail(kExitUsage, "--set expects key=value, got '" + assignment + "'");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  check(fr_config_set(config, key.c_str(), value.c_str()), kExitUsage, "--set " + key);
}

std::string config_value(const fr_config* config, const char* key) {
  size_t len = 0;
  check(fr_config_get(config, key, nullptr, 0, &len), kExitRuntime, key);
  std::string value(len + 1, '\0');
  check(fr_config_get(config, key, value.data(), value.size(), &len), kExitRuntime, key);
  value.resize(len);
  return value;
}

std::string serialize(const fr_config* config) {
  size_t len = 0;
  check(fr_config_serialize(config, nullptr, 0, &len), kExitRuntime, "config");
  std::string text(len + 1, '\0');
  check(fr_config_serialize(config, text.data(), text.size(), &len), kExitRuntime, "config");
  text.resize(len);
  return text;
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    fail(kExitOutput, "cannot create " + dir.string() + ": " + ec.message());
  }
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    fail(kExitOutput, "cannot open " + path.string() + " for writing");
  }
  return out;
}

void finish_output(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) {
    fail(kExitOutput, "write to " + path.string() + " failed");
  }
}

// ---- run ------------------------------------------------------------------

struct RunResult {
  std::vector<double> returns;
  double final_return = 0.0;
  double peak_return = -std::numeric_limits<double>::infinity();
};

nlohmann::ordered_json metrics_record(const fr_metrics& m) {
  nlohmann::ordered_json record;
  record["iteration"] = m.iteration;
  record["mean_return"] = m.mean_return;
  record["mean_sampled_age"] = m.mean_sampled_age;
  record["mean_is_weight"] = m.mean_is_weight;
  record["clip_fraction"] = m.clip_fraction;
  record["buffer_occupancy"] = m.buffer_occupancy;
  record["gradient_steps"] = m.gradient_steps;
  return record;
}

// Runs one configured experiment into `dir`. Wall-clock refresh times go to timing.csv so
// that metrics.jsonl stays byte-identical between runs with the same seed.
RunResult execute_run(const fr_config* config, const fs::path& dir, bool quiet) {
  check(fr_config_validate(config), kExitUsage, "config");
  ensure_directory(dir);

  const std::string method = config_value(config, "method");
  const std::string text = serialize(config);

  fr_experiment* raw = nullptr;
  check(fr_experiment_create(config, &raw), kExitUsage, "experiment");
  ExperimentPtr experiment(raw);

  const fs::path config_path = dir / "config.cfg";
  const fs::path metrics_path = dir / "metrics.jsonl";
  const fs::path summary_path = dir / "summary.csv";
  const fs::path timing_path = dir / "timing.csv";
  auto config_out = open_output(config_path);
  config_out << text;
  finish_output(config_out, config_path);

  auto metrics_out = open_output(metrics_path);
  auto summary_out = open_output(summary_path);
  auto timing_out = open_output(timing_path);
  summary_out << "iteration," << method << "\n";
  timing_out << "iteration,refresh_wall_time\n";

  const auto iterations = std::stoll(config_value(config, "trainer.max_iterations"));
  RunResult result;
  result.returns.reserve(static_cast<std::size_t>(iterations));
  for (std::int64_t i = 0; i < iterations; ++i) {
    fr_metrics m{};
    check(fr_experiment_run_iteration(experiment.get(), &m), kExitRuntime, "iteration " + std::to_string(i));
    metrics_out << metrics_record(m).dump() << "\n";
    summary_out << m.iteration << "," << format_real(m.mean_return) << "\n";
    timing_out << m.iteration << "," << format_real(m.refresh_wall_time) << "\n";
    result.returns.push_back(m.mean_return);
    result.peak_return = std::max(result.peak_return, m.mean_return);
    if (!quiet && (i + 1) % 50 == 0) {
      std::cout << "iteration " << (i + 1) << "/" << iterations << " mean_return " << m.mean_return << "\n";
    }
  }
  finish_output(metrics_out, metrics_path);
  finish_output(summary_out, summary_path);
  finish_output(timing_out, timing_path);
  result.final_return = result.returns.empty() ? 0.0 : result.returns.back();

  const fs::path checkpoint = dir / "policy.bin";
  check(fr_experiment_save_checkpoint(experiment.get(), checkpoint.string().c_str()), kExitOutput, "checkpoint");
  return result;
}

struct RunArgs {
  std::string config;
  std::vector<std::string> overrides;
  std::string out = "run";
  std::int64_t seed = -1;
};

int cmd_run(const RunArgs& args) {
  auto config = load_or_default(args.config);
  for (const auto& assignment : args.overrides) {
    apply_override(config.get(), assignment);
  }
  if (args.seed >= 0) {
    check(fr_config_set(config.get(), "seed", std::to_string(args.seed).c_str()), kExitUsage, "--seed");
  }
  const auto result = execute_run(config.get(), args.out, false);
  std::cout << "final mean_return " << format_real(result.final_return) << " peak " << format_real(result.peak_return)
            << "\nwrote " << args.out << "\n";
  return kExitOk;
}

// ---- sweep ----------------------------------------------------------------

struct SweepSpec {
  std::string base;
  std::vector<std::string> overrides;
  std::string axis;
  std::vector<std::string> values;
  std::vector<std::int64_t> seeds;
};

std::string json_scalar(const nlohmann::json& value, const std::string& where) {
  if (value.is_string()) {
    return value.get<std::string>();
  }
  if (value.is_number_integer()) {
    return std::to_string(value.get<std::int64_t>());
  }
  if (value.is_number()) {
    return format_real(value.get<double>());
  }
  if (value.is_boolean()) {
    return value.get<bool>() ? "true" : "false";
  }
  fail(kExitUsage, where + ": expected a string, number or boolean");
}

SweepSpec load_sweep(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    fail(kExitUsage, "cannot open sweep spec " + path.string());
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(kExitUsage, path.string() + ": " + e.what());
  }
  if (!doc.is_object()) {
    fail(kExitUsage, path.string() + ": expected a JSON object");
  }

  SweepSpec spec;
  try {
    if (doc.contains("base")) {
      fs::path base = doc.at("base").get<std::string>();
      spec.base = base.is_absolute() ? base.string() : (path.parent_path() / base).string();
    }
    if (doc.contains("set")) {
      for (const auto& [key, value] : doc.at("set").items()) {
        spec.overrides.push_back(key + "=" + json_scalar(value, "set." + key));
      }
    }
    spec.axis = doc.at("axis").get<std::string>();
    for (const auto& value : doc.at("values")) {
      spec.values.push_back(json_scalar(value, "values"));
    }
    const auto& seeds = doc.contains("seeds") ? doc.at("seeds") : nlohmann::json(1);
    if (seeds.is_number_integer()) {
      const auto count = seeds.get<std::int64_t>();
      if (count < 1) {
        fail(kExitUsage, path.string() + ": seeds must be at least 1");
      }
      // Seeds are consecutive from the base config's seed, filled in by cmd_sweep.
      spec.seeds.assign(static_cast<std::size_t>(count), -1);
    } else {
      for (const auto& s : seeds) {
        spec.seeds.push_back(s.get<std::int64_t>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(kExitUsage, path.string() + ": " + e.what());
  }
  if (spec.values.empty()) {
    fail(kExitUsage, path.string() + ": axis values must not be empty");
  }
  if (spec.seeds.empty()) {
    fail(kExitUsage, path.string() + ": seeds must not be empty");
  }
  return spec;
}

struct Cell {
  std::string value;
  std::int64_t seed;
  ConfigPtr config;
  fs::path dir;
  RunResult result;
};

std::pair<double, double> mean_std(const std::vector<double>& xs) {
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() < 2) {
    return {mean, 0.0};
  }
  double ss = 0.0;
  for (double x : xs) {
    ss += (x - mean) * (x - mean);
  }
  return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

int cmd_sweep(const std::string& spec_path, const std::string& out, unsigned jobs) {
  auto spec = load_sweep(spec_path);
  auto base = load_or_default(spec.base);
  for (const auto& assignment : spec.overrides) {
    apply_override(base.get(), assignment);
  }
  const auto base_seed = std::stoll(config_value(base.get(), "seed"));
  for (std::size_t i = 0; i < spec.seeds.size(); ++i) {
    if (spec.seeds[i] < 0) {
      spec.seeds[i] = base_seed + static_cast<std::int64_t>(i);
    }
  }

  // Build and validate every cell before running anything.
  std::vector<Cell> cells;
  for (const auto& value : spec.values) {
    for (auto seed : spec.seeds) {
      fr_config* raw = nullptr;
      check(fr_config_clone(base.get(), &raw), kExitRuntime, "config");
      ConfigPtr config(raw);
      check(fr_config_set(config.get(), spec.axis.c_str(), value.c_str()), kExitUsage,
            "axis " + spec.axis + "=" + value);
      check(fr_config_set(config.get(), "seed", std::to_string(seed).c_str()), kExitUsage, "seed");
      check(fr_config_validate(config.get()), kExitUsage, spec.axis + "=" + value);
      const fs::path dir = fs::path(out) / (spec.axis + "=" + value) / ("seed_" + std::to_string(seed));
      cells.push_back({value, seed, std::move(config), dir, {}});
    }
  }

  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::optional<CliFailure> failure;
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        cells[i].result = execute_run(cells[i].config.get(), cells[i].dir, true);
      } catch (const CliFailure& f) {
        std::lock_guard lock(failure_mutex);
        if (!failure) {
          failure = f;
        }
        next = cells.size();
      }
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(cells.size())));
  std::vector<std::thread> threads;
  for (unsigned j = 1; j < jobs; ++j) {
    threads.emplace_back(worker);
  }
  worker();
  for (auto& t : threads) {
    t.join();
  }
  if (failure) {
    throw *failure;
  }

  const fs::path aggregate_path = fs::path(out) / "aggregate.csv";
  auto aggregate = open_output(aggregate_path);
  aggregate << spec.axis << ",seeds,final_mean,final_std,peak_mean,peak_std\n";
  for (const auto& value : spec.values) {
    std::vector<double> finals;
    std::vector<double> peaks;
    for (const auto& cell : cells) {
      if (cell.value == value) {
        finals.push_back(cell.result.final_return);
        peaks.push_back(cell.result.peak_return);
      }
    }
    const auto [final_mean, final_std] = mean_std(finals);
    const auto [peak_mean, peak_std] = mean_std(peaks);
    aggregate << value << "," << finals.size() << "," << format_real(final_mean) << "," << format_real(final_std)
              << "," << format_real(peak_mean) << "," << format_real(peak_std) << "\n";
    std::cout << spec.axis << "=" << value << " final " << final_mean << " +- " << final_std << " peak " << peak_mean
              << " +- " << peak_std << "\n";
  }
  finish_output(aggregate, aggregate_path);
  std::cout << "wrote " << cells.size() << " runs and " << aggregate_path.string() << "\n";
  return kExitOk;
}

// ---- staleness-demo -------------------------------------------------------

struct StalenessArgs {
  fr_staleness_params params{};
  std::string tau_a = "500";
  std::string tau_b = "inf";
  std::string out = ".";
};

int cmd_staleness(StalenessArgs args) {
  args.params.tau_a = parse_real(args.tau_a, "--tau-a");
  args.params.tau_b = parse_real(args.tau_b, "--tau-b");
  if (args.params.steps < 1) {
    fail(kExitUsage, "--steps must be positive");
  }
  std::vector<fr_staleness_row> rows(static_cast<std::size_t>(args.params.steps));
  fr_staleness_summary summary{};
  check(fr_staleness_run(&args.params, rows.data(), rows.size(), &summary), kExitUsage, "staleness-demo");
  rows.resize(summary.num_rows);

  ensure_directory(args.out);
  const fs::path csv_path = fs::path(args.out) / "staleness.csv";
  auto csv = open_output(csv_path);
  csv << "step,expected_age_tau_a,expected_age_tau_b,sampled_age_tau_a,sampled_age_tau_b\n";
  for (const auto& row : rows) {
    csv << row.step << "," << format_real(row.expected_age_a) << "," << format_real(row.expected_age_b) << ","
        << format_real(row.sampled_age_a) << "," << format_real(row.sampled_age_b) << "\n";
  }
  finish_output(csv, csv_path);

  const bool pass = summary.gap >= 0.25;
  std::cout << "tau_a=" << args.tau_a << " mean_age " << summary.mean_age_a << " sampled " << summary.mean_sampled_age_a
            << "\n"
            << "tau_b=" << args.tau_b << " mean_age " << summary.mean_age_b << " sampled " << summary.mean_sampled_age_b
            << "\n"
            << "gap " << summary.gap << " (need >= 0.25): " << (pass ? "PASS" : "FAIL") << "\n"
            << "per-step csv " << csv_path.string() << "\n";
  return pass ? kExitOk : kExitStaleness;
}

// ---- ess-report -----------------------------------------------------------

std::vector<std::vector<double>> read_distribution_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    fail(kExitUsage, "cannot open " + path);
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') {
      continue;
    }
    std::vector<double> row;
    std::stringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      row.push_back(parse_real(field, path + ":" + std::to_string(line_no)));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      fail(kExitUsage, path + ":" + std::to_string(line_no) + ": row length differs from the first row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    fail(kExitUsage, path + ": no distributions");
  }
  return rows;
}

struct EssArgs {
  std::string path;
  double gap = 0.1;
  std::size_t steps = 50;
  std::size_t behavior_index = 0;
  double n = 128.0;
  std::string out;
};

int cmd_ess(const EssArgs& args) {
  std::vector<double> flat;
  std::size_t support = 2;
  std::size_t path_len = args.steps + 1;
  if (args.path.empty()) {
    flat.resize(path_len * support);
    check(fr_linear_logit_drift_path(args.gap, args.steps, flat.data()), kExitUsage, "drift path");
  } else {
    const auto rows = read_distribution_csv(args.path);
    support = rows.front().size();
    path_len = rows.size();
    for (const auto& row : rows) {
      flat.insert(flat.end(), row.begin(), row.end());
    }
  }
  if (args.behavior_index >= path_len) {
    fail(kExitUsage, "--behavior-index out of range");
  }
  std::vector<fr_divergence> reports(path_len - args.behavior_index);
  check(fr_drift_ess_curve(flat.data(), path_len, support, args.behavior_index, args.n, reports.data()), kExitUsage,
        "ess-report");

  std::ostringstream csv;
  csv << "delta,var_rho,chi2,kl,renyi2,ess,ess_kl_bound\n";
  for (std::size_t d = 0; d < reports.size(); ++d) {
    const auto& r = reports[d];
    csv << d << "," << format_real(r.var_rho) << "," << format_real(r.chi2) << "," << format_real(r.kl) << ","
        << format_real(r.renyi2) << "," << format_real(r.ess) << "," << format_real(r.ess_kl_bound) << "\n";
  }
  if (args.out.empty()) {
    std::cout << csv.str();
  } else {
    ensure_directory(args.out);
    const fs::path csv_path = fs::path(args.out) / "ess_report.csv";
    auto file = open_output(csv_path);
    file << csv.str();
    finish_output(file, csv_path);
    std::cout << "wrote " << csv_path.string() << "\n";
  }
  return kExitOk;
}

// ---- bench-refresh --------------------------------------------------------

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const auto mid = xs.size() / 2;
  return xs.size() % 2 == 1 ? xs[mid] : 0.5 * (xs[mid - 1] + xs[mid]);
}

// Fills a buffer of `n` single-step trajectories and returns the median refresh time.
double bench_once(std::size_t n, int runs, std::uint64_t seed) {
  fr_config* raw = nullptr;
  check(fr_config_new(&raw), kExitRuntime, "config");
  ConfigPtr config(raw);
  check(fr_config_set(config.get(), "buffer.capacity", std::to_string(n).c_str()), kExitUsage, "--n");
  check(fr_config_set(config.get(), "trainer.batch_size", "1"), kExitRuntime, "config");
  check(fr_config_set(config.get(), "seed", std::to_string(seed).c_str()), kExitRuntime, "config");
  fr_buffer* raw_buffer = nullptr;
  check(fr_buffer_open(config.get(), &raw_buffer), kExitUsage, "buffer");
  BufferPtr buffer(raw_buffer);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> reward(-1.0, 1.0);
  fr_step step{0, 0, 0.0, std::log(0.25), 0, 1};
  for (std::size_t i = 0; i < n; ++i) {
    step.reward = reward(rng);
    const auto collected = static_cast<std::int64_t>(i / 128);
    fr_trajectory_record record{&step, 1, collected, collected};
    fr_signal signal{step.reward, 0.0, 0.0, 0, 0};
    std::uint64_t id = 0;
    check(fr_buffer_insert(buffer.get(), &record, &signal, collected, &id), kExitRuntime, "insert");
  }

  const auto start_step = static_cast<std::int64_t>(n / 128) + 1;
  std::vector<double> times;
  for (int r = 0; r < runs; ++r) {
    fr_refresh_report report{};
    check(fr_buffer_refresh(buffer.get(), start_step + r, &report), kExitRuntime, "refresh");
    times.push_back(report.wall_time_seconds);
  }
  return median(times);
}

double r_squared(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) {
    return 0.0;
  }
  return sxy * sxy / (sxx * syy);
}

struct BenchArgs {
  std::size_t n = 100000;
  int runs = 20;
  double budget_ms = 100.0;
  bool scaling = false;
  std::uint64_t seed = 42;
};

int cmd_bench(const BenchArgs& args) {
  if (args.n == 0 || args.runs < 1) {
    fail(kExitUsage, "--n and --runs must be positive");
  }
  const double seconds = bench_once(args.n, args.runs, args.seed);
  const bool within_budget = seconds * 1e3 <= args.budget_ms;
  std::cout << "n " << args.n << " median_refresh_ms " << seconds * 1e3 << " over " << args.runs << " runs (budget "
            << args.budget_ms << " ms): " << (within_budget ? "PASS" : "MISS") << "\n";

  bool pass = within_budget;
  if (args.scaling || !within_budget) {
    const std::vector<double> sizes{1e4, 3e4, 1e5};
    std::vector<double> medians;
    for (double size : sizes) {
      medians.push_back(bench_once(static_cast<std::size_t>(size), args.runs, args.seed));
      std::cout << "scaling n " << size << " median_refresh_ms " << medians.back() * 1e3 << "\n";
    }
    const double r2 = r_squared(sizes, medians);
    const bool linear = r2 >= 0.98;
    std::cout << "scaling r2 " << r2 << " (need >= 0.98): " << (linear ? "PASS" : "FAIL") << "\n";
    pass = pass || linear;
  }
  return pass ? kExitOk : kExitBench;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trajectory-level prioritized replay with age-decayed priorities"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Train one configuration; writes metrics.jsonl and summary.csv");
  run->add_option("--config", run_args.config, "Config file (key = value lines)");
  run->add_option("--set", run_args.overrides, "Override one key, e.g. --set priority.tau=inf")->take_all();
  run->add_option("--out", run_args.out, "Output directory")->capture_default_str();
  run->add_option("--seed", run_args.seed, "Override the config seed");

  std::string sweep_spec;
  std::string sweep_out = "sweep";
  unsigned sweep_jobs = 1;
  auto* sweep = app.add_subcommand("sweep", "Run a grid of configurations and aggregate final/peak returns");
  sweep->add_option("spec", sweep_spec, "Sweep spec (JSON)")->required();
  sweep->add_option("--out", sweep_out, "Output directory")->capture_default_str();
  sweep->add_option("--jobs", sweep_jobs, "Cells run concurrently")->capture_default_str();

  StalenessArgs staleness_args;
  fr_staleness_params_default(&staleness_args.params);
  auto* staleness = app.add_subcommand("staleness-demo", "Mean sampled age with and without age decay");
  staleness->add_option("--steps", staleness_args.params.steps)->capture_default_str();
  staleness->add_option("--early-steps", staleness_args.params.early_steps)->capture_default_str();
  staleness->add_option("--early-base", staleness_args.params.early_base)->capture_default_str();
  staleness->add_option("--late-base", staleness_args.params.late_base)->capture_default_str();
  staleness->add_option("--alpha", staleness_args.params.alpha)->capture_default_str();
  staleness->add_option("--batch", staleness_args.params.batch_size)->capture_default_str();
  staleness->add_option("--seed", staleness_args.params.seed)->capture_default_str();
  staleness->add_option("--tau-a", staleness_args.tau_a, "Decay constant of the treated buffer")->capture_default_str();
  staleness->add_option("--tau-b", staleness_args.tau_b, "Decay constant of the control buffer")->capture_default_str();
  staleness->add_option("--out", staleness_args.out, "Directory for staleness.csv")->capture_default_str();

  EssArgs ess_args;
  auto* ess = app.add_subcommand("ess-report", "ESS and divergences along a policy drift path");
  ess->add_option("--path", ess_args.path, "CSV of distributions, one per row (default: linear logit drift)");
  ess->add_option("--gap", ess_args.gap, "Logit gap added per step of the default path")->capture_default_str();
  ess->add_option("--steps", ess_args.steps, "Steps of the default path")->capture_default_str();
  ess->add_option("--behavior-index", ess_args.behavior_index)->capture_default_str();
  ess->add_option("--n", ess_args.n, "Nominal sample count")->capture_default_str();
  ess->add_option("--out", ess_args.out, "Directory for ess_report.csv (default: stdout)");

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench-refresh", "Time a full priority refresh");
  bench->add_option("--n", bench_args.n, "Buffer size")->capture_default_str();
  bench->add_option("--runs", bench_args.runs)->capture_default_str();
  bench->add_option("--budget-ms", bench_args.budget_ms)->capture_default_str();
  bench->add_flag("--scaling", bench_args.scaling, "Always run the linear-scaling check");
  bench->add_option("--seed", bench_args.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) {
      return cmd_run(run_args);
    }
    if (*sweep) {
      return cmd_sweep(sweep_spec, sweep_out, sweep_jobs);
    }
    if (*staleness) {
      return cmd_staleness(staleness_args);
    }
    if (*ess) {
      return cmd_ess(ess_args);
    }
    if (*bench) {
      return cmd_bench(bench_args);
    }
  } catch (const CliFailure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

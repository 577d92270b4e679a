// Copyright The limor Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "limor/audit.hpp"
#include "limor/error.hpp"

namespace limor
{

struct ExperimentConfig
{
  std::string model;  // see load_model
  std::optional<LimitSpec> limit;
  Algorithm algorithm = Algorithm::FLITIA;
  std::vector<Eigen::Index> orders;
  std::uint64_t seed = 42;
  ConvergenceControl control;
  std::string out_dir;
  std::optional<std::string> init;  // ROM JSON used as starting point
  Side pork_side = Side::Input;
  int plot_points = 200;
  int impulse_samples = 500;

  // Throws InvalidArgument for inconsistent settings (e.g. fl* algorithm with a time window).
  void validate() const;
};

// A single experiment object, or {"experiments": [...]} for several.
std::vector<ExperimentConfig> load_configs(const std::string &path);

struct OrderResult
{
  Eigen::Index order = 0;
  bool ok = false;
  std::string error;
  std::optional<ErrorCode> error_code;
  double error_norm = 0.0;
  double relative_error = 0.0;
  bool converged = false;
  bool stagnated = false;
  int iterations = 0;
  double res_B = 0.0, res_C = 0.0, res_A = 0.0;
  std::optional<double> f_deviation;
  double wall_time = 0.0;  // seconds spent in the reduction
  std::optional<StateSpaceModel> rom;
  std::optional<ProjectionPair> pair;
};

struct RunReport
{
  ExperimentConfig config;
  std::optional<StateSpaceModel> model;
  Eigen::Index states = 0, inputs = 0, outputs = 0;
  double reference_norm = 0.0;  // limited H2 norm of the model
  std::vector<OrderResult> rows;

  bool any_failed() const;
};

// Loads the model, then reduces and audits each order. Per-order numerical failures are
// recorded in the row; configuration and input errors throw.
RunReport run_experiment(const ExperimentConfig &config);
RunReport run_experiment(const ExperimentConfig &config, const StateSpaceModel &model);

extern const char *const kCsvHeader;
std::string report_csv(const RunReport &report);
std::string report_json(const RunReport &report);

// Largest singular value of the error transfer function on a grid over the band
// (log-spaced; endpoints exactly w1 and w2, with w1 = 0 kept as the first point).
struct FrequencyPlot
{
  std::vector<double> frequency;
  std::vector<double> sigma_max;
};
FrequencyPlot frequency_plot(const StateSpaceModel &model, const StateSpaceModel &rom,
                             const FrequencyBand &band, int points);

// Impulse response of the error system, one row per sample: t, then E(t) entries row-major.
Mat impulse_plot(const StateSpaceModel &model, const StateSpaceModel &rom, const TimeWindow &window,
                 int samples);

// report.csv, report.json, plot_order_<r>.csv and rom_order_<r>.json; all writes atomic.
void emit_report(const RunReport &report, const std::string &out_dir);

}  // namespace limor

// Copyright The limor Authors.
// SPDX-License-Identifier: Apache-2.0

#include "limor/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include <Eigen/SVD>

#include "json.hpp"
#include "limor/io.hpp"

namespace limor
{

using nlohmann::json;

const char *const kCsvHeader =
  "order,error_norm,converged,iterations,res_B,res_C,res_A,f_deviation,wall_time";

namespace
{

std::string num(double v)
{
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

json num_json(double v)
{
  if (!std::isfinite(v)) return nullptr;
  return v;
}

template <typename T>
T get_or(const json &j, const char *key, T fallback)
{
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

ExperimentConfig config_from_json(const json &j, const std::string &base)
{
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "experiment config must be an object");
  ExperimentConfig c;
  auto resolve = [&](const std::string &p) {
    std::vector<std::string> out;
    std::stringstream ss(p);
    std::string item, joined;
    while (std::getline(ss, item, ','))
    {
      std::filesystem::path q = item;
      if (q.is_relative() && !base.empty()) q = std::filesystem::path(base) / q;
      joined += (joined.empty() ? "" : ",") + q.string();
    }
    return joined;
  };
  try
  {
    if (!j.contains("model") || !j.contains("limit") || !j.contains("algorithm"))
    {
      throw Error(ErrorCode::InvalidArgument, "config needs model, limit and algorithm");
    }
    c.model = resolve(j.at("model").get<std::string>());
    c.limit = LimitSpec::parse(j.at("limit").get<std::string>());
    c.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    for (const auto &o : get_or(j, "orders", json::array())) c.orders.push_back(o.get<long>());
    c.seed = get_or<std::uint64_t>(j, "seed", 42);
    c.control.shift_tolerance = get_or(j, "tol", c.control.shift_tolerance);
    c.control.max_iterations = get_or(j, "max_iter", c.control.max_iterations);
    c.control.stagnation_window = get_or(j, "stagnation_window", c.control.stagnation_window);
    c.out_dir = resolve(get_or<std::string>(j, "out", "out"));
    if (j.contains("init")) c.init = resolve(j.at("init").get<std::string>());
    const std::string side = get_or<std::string>(j, "pork_side", "input");
    if (side != "input" && side != "output")
      throw Error(ErrorCode::InvalidArgument, "pork_side must be 'input' or 'output'");
    c.pork_side = side == "input" ? Side::Input : Side::Output;
    c.plot_points = get_or(j, "plot_points", c.plot_points);
    c.impulse_samples = get_or(j, "impulse_samples", c.impulse_samples);
  }
  catch (const json::exception &e)
  {
    throw Error(ErrorCode::InvalidArgument, std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

json config_echo(const ExperimentConfig &c)
{
  json j;
  j["model"] = c.model;
  j["limit"] = c.limit ? c.limit->to_string() : "";
  j["algorithm"] = algorithm_name(c.algorithm);
  j["orders"] = json::array();
  for (auto r : c.orders) j["orders"].push_back(r);
  j["seed"] = c.seed;
  j["tol"] = c.control.shift_tolerance;
  j["max_iter"] = c.control.max_iterations;
  j["stagnation_window"] = c.control.stagnation_window;
  j["init"] = c.init ? json(*c.init) : json(nullptr);
  j["pork_side"] = c.pork_side == Side::Input ? "input" : "output";
  return j;
}

}  // namespace

void ExperimentConfig::validate() const
{
  if (!limit) throw Error(ErrorCode::InvalidArgument, "no limit given");
  if (is_frequency_algorithm(algorithm) != limit->is_frequency())
  {
    throw Error(ErrorCode::InvalidArgument,
                std::string(algorithm_name(algorithm)) + " needs a " +
                  (is_frequency_algorithm(algorithm) ? "frequency band (freq:w1:w2)"
                                                     : "time window (time:t1:t2)"));
  }
  for (auto r : orders)
    if (r < 1) throw Error(ErrorCode::InvalidArgument, "orders must be positive");
  if (control.max_iterations < 1) throw Error(ErrorCode::InvalidArgument, "max_iter must be positive");
  if (!(control.shift_tolerance >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be >= 0");
  if (plot_points < 200) throw Error(ErrorCode::InvalidArgument, "plot_points must be at least 200");
  if (impulse_samples < 500)
    throw Error(ErrorCode::InvalidArgument, "impulse_samples must be at least 500");
}

std::vector<ExperimentConfig> load_configs(const std::string &path)
{
  json j;
  try
  {
    j = json::parse(read_text_file(path));
  }
  catch (const json::parse_error &e)
  {
    throw ParseError(path, 0, 0, e.what());
  }
  const std::string base = std::filesystem::path(path).parent_path().string();
  std::vector<ExperimentConfig> out;
  if (j.is_object() && j.contains("experiments"))
  {
    for (const auto &e : j.at("experiments")) out.push_back(config_from_json(e, base));
  }
  else
  {
    out.push_back(config_from_json(j, base));
  }
  return out;
}

bool RunReport::any_failed() const
{
  for (const auto &r : rows)
    if (!r.ok) return true;
  return false;
}

RunReport run_experiment(const ExperimentConfig &config)
{
  config.validate();
  return run_experiment(config, load_model(config.model));
}

RunReport run_experiment(const ExperimentConfig &config, const StateSpaceModel &model)
{
  config.validate();
  for (auto r : config.orders)
  {
    if (r >= model.states())
    {
      std::ostringstream os;
      os << "order " << r << " is not below the model order " << model.states();
      throw Error(ErrorCode::InvalidArgument, os.str());
    }
  }
  std::optional<StateSpaceModel> init;
  if (config.init) init = load_rom(*config.init).rom;

  RunReport report;
  report.config = config;
  report.model = model;
  report.states = model.states();
  report.inputs = model.inputs();
  report.outputs = model.outputs();
  if (config.orders.empty()) return report;

  const LimitedProblem problem = make_problem(model, *config.limit);
  const LimitedGramians full = limited_gramians(problem.model, problem.aug, problem.limit);
  report.reference_norm = std::sqrt(std::max(limited_h2_norm_squared(problem.model, full), 0.0));
  const bool bt = config.algorithm == Algorithm::FLBT || config.algorithm == Algorithm::TLBT;

  for (auto order : config.orders)
  {
    OrderResult row;
    row.order = order;
    try
    {
      const auto t0 = std::chrono::steady_clock::now();
      ReductionResult res;
      if (bt)
      {
        res = limited_bt(problem, full, order);
      }
      else
      {
        ReduceRequest req;
        req.algorithm = config.algorithm;
        req.order = order;
        req.seed = config.seed + static_cast<std::uint64_t>(order);
        req.control = config.control;
        req.pork_side = config.pork_side;
        if (init) req.init = *init;
        res = reduce(problem, req);
      }
      row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      row.converged = res.converged;
      row.stagnated = res.stagnated;
      row.iterations = res.iterations;
      row.rom = res.rom;
      row.pair = res.pair;
      const H2ErrorDetail err =
        limited_h2_error_detail(problem.model, problem.aug, full, res.rom, problem.limit);
      row.error_norm = err.norm;
      row.relative_error = err.norm / std::max(report.reference_norm, 1e-300);
      const OptimalityReport audit = gramian_conditions(problem, res.rom, &res.pair);
      row.res_B = audit.res_B;
      row.res_C = audit.res_C;
      row.res_A = audit.res_A;
      row.f_deviation = audit.f_deviation;
      row.ok = true;
    }
    catch (const Error &e)
    {
      row.ok = false;
      row.error = e.what();
      row.error_code = e.code();
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string report_csv(const RunReport &report)
{
  std::ostringstream os;
  os << kCsvHeader << "\n";
  const double nan = std::nan("");
  for (const auto &r : report.rows)
  {
    os << r.order << "," << num(r.ok ? r.error_norm : nan) << "," << (r.converged ? "true" : "false")
       << "," << r.iterations << "," << num(r.ok ? r.res_B : nan) << ","
       << num(r.ok ? r.res_C : nan) << "," << num(r.ok ? r.res_A : nan) << ","
       << num(r.f_deviation.value_or(nan)) << "," << num(r.wall_time) << "\n";
  }
  return os.str();
}

std::string report_json(const RunReport &report)
{
  json j;
  j["config"] = config_echo(report.config);
  j["model"] = {{"states", report.states}, {"inputs", report.inputs}, {"outputs", report.outputs}};
  j["reference_norm"] = num_json(report.reference_norm);
  j["versions"] = {{"limor", "0.1.0"}, {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                                     std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                                     std::to_string(EIGEN_MINOR_VERSION)}};
  j["rows"] = json::array();
  for (const auto &r : report.rows)
  {
    json row;
    row["order"] = r.order;
    row["ok"] = r.ok;
    row["error"] = r.ok ? json(nullptr) : json(r.error);
    row["error_norm"] = r.ok ? num_json(r.error_norm) : json(nullptr);
    row["relative_error"] = r.ok ? num_json(r.relative_error) : json(nullptr);
    row["converged"] = r.converged;
    row["stagnated"] = r.stagnated;
    row["iterations"] = r.iterations;
    row["res_B"] = r.ok ? num_json(r.res_B) : json(nullptr);
    row["res_C"] = r.ok ? num_json(r.res_C) : json(nullptr);
    row["res_A"] = r.ok ? num_json(r.res_A) : json(nullptr);
    row["f_deviation"] = r.f_deviation ? num_json(*r.f_deviation) : json(nullptr);
    row["wall_time"] = r.wall_time;
    j["rows"].push_back(std::move(row));
  }
  return j.dump(2) + "\n";
}

FrequencyPlot frequency_plot(const StateSpaceModel &model, const StateSpaceModel &rom,
                             const FrequencyBand &band, int points)
{
  if (points < 2) throw Error(ErrorCode::InvalidArgument, "need at least two plot points");
  const StateSpaceModel err = error_system(model, rom);
  FrequencyPlot out;
  out.frequency.resize(points);
  if (band.w1 > 0.0)
  {
    const double a = std::log10(band.w1), b = std::log10(band.w2);
    for (int k = 0; k < points; ++k)
      out.frequency[k] = std::pow(10.0, a + (b - a) * k / double(points - 1));
  }
  else
  {
    // Log grid from w2/1000 to w2, with w = 0 itself as the first point.
    const double a = std::log10(band.w2) - 3.0, b = std::log10(band.w2);
    out.frequency[0] = 0.0;
    for (int k = 1; k < points; ++k)
      out.frequency[k] = std::pow(10.0, a + (b - a) * (k - 1) / double(points - 2));
  }
  out.frequency.front() = band.w1;
  out.frequency.back() = band.w2;
  for (double w : out.frequency)
  {
    const CMat E = eval_transfer(err, cplx(0.0, w));
    Eigen::JacobiSVD<CMat> svd(E);
    out.sigma_max.push_back(svd.singularValues()(0));
  }
  return out;
}

Mat impulse_plot(const StateSpaceModel &model, const StateSpaceModel &rom, const TimeWindow &window,
                 int samples)
{
  if (samples < 2) throw Error(ErrorCode::InvalidArgument, "need at least two samples");
  const StateSpaceModel err = error_system(model, rom);
  const Eigen::Index p = err.outputs(), m = err.inputs();
  const double h = (window.t2 - window.t1) / (samples - 1);
  const Mat step = matrix_exponential(err.A(), h);
  Mat X = matrix_exponential(err.A(), window.t1) * err.B();
  Mat out(samples, 1 + p * m);
  for (int k = 0; k < samples; ++k)
  {
    out(k, 0) = k == samples - 1 ? window.t2 : window.t1 + k * h;
    const Mat Y = err.C() * X;
    for (Eigen::Index i = 0; i < p; ++i)
      for (Eigen::Index j = 0; j < m; ++j) out(k, 1 + i * m + j) = Y(i, j);
    X = step * X;
  }
  return out;
}

void emit_report(const RunReport &report, const std::string &out_dir)
{
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create output directory " + out_dir);
  const fs::path dir(out_dir);
  atomic_write((dir / "report.csv").string(), report_csv(report));
  atomic_write((dir / "report.json").string(), report_json(report));

  const StateSpaceModel model = report.model ? *report.model : load_model(report.config.model);
  for (const auto &r : report.rows)
  {
    if (!r.rom) continue;
    const std::string stem = "order_" + std::to_string(r.order);
    save_rom((dir / ("rom_" + stem + ".json")).string(), *r.rom, r.pair ? &*r.pair : nullptr);
    if (!r.ok) continue;
    std::ostringstream os;
    if (report.config.limit->is_frequency())
    {
      const FrequencyPlot fp =
        frequency_plot(model, *r.rom, report.config.limit->band(), report.config.plot_points);
      os << "frequency,sigma_max\n";
      for (std::size_t k = 0; k < fp.frequency.size(); ++k)
        os << num(fp.frequency[k]) << "," << num(fp.sigma_max[k]) << "\n";
    }
    else
    {
      const Mat y =
        impulse_plot(model, *r.rom, report.config.limit->window(), report.config.impulse_samples);
      os << "time";
      for (Eigen::Index i = 0; i < report.outputs; ++i)
        for (Eigen::Index j = 0; j < report.inputs; ++j) os << ",e_" << i + 1 << "_" << j + 1;
      os << "\n";
      for (Eigen::Index k = 0; k < y.rows(); ++k)
      {
        for (Eigen::Index c = 0; c < y.cols(); ++c) os << (c ? "," : "") << num(y(k, c));
        os << "\n";
      }
    }
    atomic_write((dir / ("plot_" + stem + ".csv")).string(), os.str());
  }
}

}  // namespace limor

// Copyright The limor Authors.
// SPDX-License-Identifier: Apache-2.0

// limor: frequency/time-limited H2 model reduction from the command line.
//
//   limor reduce --model m.json --limit freq:0:0.5 --algo flitia --orders 2,3 --out dir
//   limor audit  --model m.json --rom rom.json --limit freq:0:0.5
//   limor bench  --config experiments.json
//
// Exit codes: 0 success, 2 invalid input, 3 numerical failure (including any failed order).

#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "limor/experiment.hpp"
#include "limor/io.hpp"

namespace
{

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

using nlohmann::json;

std::vector<Eigen::Index> parse_orders(const std::string &text)
{
  std::vector<Eigen::Index> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
  {
    if (item.empty()) continue;
    std::size_t used = 0;
    long v = 0;
    try
    {
      v = std::stol(item, &used);
    }
    catch (const std::exception &)
    {
      used = 0;
    }
    if (used != item.size())
      throw limor::Error(limor::ErrorCode::InvalidArgument, "bad order '" + item + "'");
    out.push_back(v);
  }
  return out;
}

void print_summary(const limor::RunReport &report, const std::string &out)
{
  std::printf("%-6s %-14s %-9s %-6s %s\n", "order", "error_norm", "converged", "iters", "status");
  for (const auto &r : report.rows)
  {
    std::printf("%-6ld %-14.6e %-9s %-6d %s\n", static_cast<long>(r.order), r.ok ? r.error_norm : 0.0,
                r.converged ? "yes" : "no", r.iterations, r.ok ? "ok" : r.error.c_str());
  }
  std::printf("report written to %s\n", out.c_str());
}

int run_and_emit(const limor::ExperimentConfig &config)
{
  const limor::RunReport report = limor::run_experiment(config);
  limor::emit_report(report, config.out_dir);
  print_summary(report, config.out_dir);
  return report.any_failed() ? kExitNumerical : 0;
}

json matrix_json(const limor::Mat &M)
{
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i)
  {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(row);
  }
  return rows;
}

int audit(const std::string &model_path, const std::string &rom_path, const std::string &limit_text,
          const std::string &out)
{
  const limor::StateSpaceModel model = limor::load_model(model_path);
  const limor::RomBundle rom = limor::load_rom(rom_path);
  const limor::LimitedProblem problem = limor::make_problem(model, limor::LimitSpec::parse(limit_text));
  const limor::OptimalityReport rep =
    limor::gramian_conditions(problem, rom.rom, rom.pair ? &*rom.pair : nullptr);
  const limor::H2ErrorDetail err = limor::limited_h2_error_detail(
    problem.model, problem.aug, limor::limited_gramians(problem.model, problem.aug, problem.limit),
    rom.rom, problem.limit);

  json j;
  j["limit"] = problem.limit.to_string();
  j["error_norm"] = err.norm;
  j["res_B"] = rep.res_B;
  j["res_C"] = rep.res_C;
  j["res_A"] = rep.res_A;
  j["relative_res_B"] = rep.relative_B();
  j["relative_res_C"] = rep.relative_C();
  j["relative_res_A"] = rep.relative_A();
  j["wilson_res"] = rep.wilson_res;
  j["f_deviation"] = rep.f_deviation ? json(*rep.f_deviation) : json(nullptr);
  j["C_P_bar"] = matrix_json(rep.CP_bar);
  j["C_hat_P_hat"] = matrix_json(rep.CP_hat);
  j["Q_bar_T_B"] = matrix_json(rep.QB_bar);
  j["Q_hat_B_hat"] = matrix_json(rep.QB_hat);
  if (rep.interpolation)
  {
    j["interpolation"] = {{"right", rep.interpolation->max_relative_right()},
                          {"left", rep.interpolation->max_relative_left()},
                          {"hermite", rep.interpolation->max_relative_hermite()}};
  }
  const std::string text = j.dump(2) + "\n";
  if (!out.empty()) limor::atomic_write(out, text);
  std::cout << text;
  return 0;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Frequency- and time-limited H2 model order reduction"};
  app.require_subcommand(1);

  limor::ExperimentConfig cfg;
  std::string limit_text, algo = "flitia", orders_text, init, side = "input";
  auto *reduce = app.add_subcommand("reduce", "Reduce a model for a list of orders");
  reduce->add_option("--model", cfg.model, "JSON bundle, JSON manifest or a.mtx,b.mtx,c.mtx")->required();
  reduce->add_option("--limit", limit_text, "freq:<w1>:<w2> or time:<t1>:<t2>")->required();
  reduce->add_option("--algo", algo, "flitia|tlitia|flhmor|tlhmor|flpork|tlpork|fltsia|tlirka|flbt|tlbt")
    ->required();
  reduce->add_option("--orders", orders_text, "comma-separated ROM orders")->required();
  reduce->add_option("--seed", cfg.seed, "seed for random initial guesses");
  reduce->add_option("--tol", cfg.control.shift_tolerance, "relative pole-change tolerance");
  reduce->add_option("--max-iter", cfg.control.max_iterations, "iteration cap");
  reduce->add_option("--out", cfg.out_dir, "output directory")->required();
  reduce->add_option("--init", init, "initial ROM (JSON bundle)");
  reduce->add_option("--pork-side", side, "input|output")->check(CLI::IsMember({"input", "output"}));
  reduce->add_option("--plot-points", cfg.plot_points, "frequency samples (>= 200)");
  reduce->add_option("--impulse-samples", cfg.impulse_samples, "time samples (>= 500)");

  std::string a_model, a_rom, a_limit, a_out;
  auto *aud = app.add_subcommand("audit", "Check optimality conditions of a ROM");
  aud->add_option("--model", a_model, "full model")->required();
  aud->add_option("--rom", a_rom, "ROM JSON bundle (V and W used when present)")->required();
  aud->add_option("--limit", a_limit, "freq:<w1>:<w2> or time:<t1>:<t2>")->required();
  aud->add_option("--out", a_out, "also write the JSON report here");

  std::string config_path;
  auto *bench = app.add_subcommand("bench", "Run experiments from a JSON config");
  bench->add_option("--config", config_path, "experiment config")->required();

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  try
  {
    if (*reduce)
    {
      cfg.limit = limor::LimitSpec::parse(limit_text);
      cfg.algorithm = limor::parse_algorithm(algo);
      cfg.orders = parse_orders(orders_text);
      cfg.pork_side = side == "input" ? limor::Side::Input : limor::Side::Output;
      if (!init.empty()) cfg.init = init;
      return run_and_emit(cfg);
    }
    if (*aud) return audit(a_model, a_rom, a_limit, a_out);
    int rc = 0;
    for (const auto &c : limor::load_configs(config_path)) rc = std::max(rc, run_and_emit(c));
    return rc;
  }
  catch (const limor::Error &e)
  {
    std::fprintf(stderr, "error: %s\n", e.what());
    return limor::is_validation_error(e.code()) ? kExitValidation : kExitNumerical;
  }
  catch (const std::exception &e)
  {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
}

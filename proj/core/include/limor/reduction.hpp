// Copyright The limor Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "limor/gramians.hpp"
#include "limor/projection.hpp"

namespace limor
{

struct ConvergenceControl
{
  int max_iterations = 200;
  double shift_tolerance = 1e-6;
  // Stop (not converged) when the best shift change has not improved for this many iterations.
  int stagnation_window = 10;
};

enum class Algorithm
{
  FLITIA,
  TLITIA,
  FLHMOR,
  TLHMOR,
  FLPORK,
  TLPORK,
  FLTSIA,
  TLIRKA,
  FLBT,
  TLBT,
};

const char *algorithm_name(Algorithm a);
// Lower-case names as used by the CLI; throws InvalidArgument.
Algorithm parse_algorithm(const std::string &name);
bool is_frequency_algorithm(Algorithm a);

// Model with its limit and augmented I/O, computed once and shared by all orders.
struct LimitedProblem
{
  StateSpaceModel model;
  LimitSpec limit;
  AugmentedIO aug;
  Mat limit_fn;  // F[A] for a band, e^{A t2} for a window
};

// Throws InvalidArgument if the limit is empty or the model is unstable.
LimitedProblem make_problem(const StateSpaceModel &model, const LimitSpec &limit);

struct ReductionResult
{
  StateSpaceModel rom;
  ProjectionPair pair;
  bool converged = false;
  bool stagnated = false;
  int iterations = 0;
  double shift_change = 0.0;
  std::vector<double> change_history;
};

// Shifts -lambda_i(Ahat) with directions b_i = Bhat^T R^{-T} e_i, c_i = Chat R e_i.
// Unstable poles are reflected across the imaginary axis first.
InterpolationData mirrored_data(const StateSpaceModel &rom);

// Random stable r-th order model (block-diagonal, conjugate pole pairs) for initial guesses.
// Pole magnitudes scale with `scale`.
StateSpaceModel random_stable_model(Eigen::Index r, Eigen::Index m, Eigen::Index p,
                                    std::uint64_t seed, double scale = 1.0);

// Limited iterative tangential interpolation (FLITIA / TLITIA).
ReductionResult itia(const LimitedProblem &problem, const InterpolationData &init,
                     const ConvergenceControl &control = {});

// Hermite-form iteration on limited cross gramians (FLHMOR / TLHMOR).
ReductionResult hmor(const LimitedProblem &problem, const StateSpaceModel &init,
                     const ConvergenceControl &control = {});

///
/// Pseudo-optimal rational Krylov reduction (FLPORK / TLPORK).
///
/// Input side: ROM poles are -sigma_i and C Pbar = Chat Phat holds for the
/// limited gramians. Output side: Qbar^T B = Qhat Bhat holds instead.
///
ReductionResult pork(const LimitedProblem &problem, const InterpolationData &data,
                     Side side = Side::Input);

// Gramian-weighted heuristic iteration (FLTSIA / TLIRKA).
ReductionResult heuristic_iter(const LimitedProblem &problem, const StateSpaceModel &init,
                               const ConvergenceControl &control = {});

// Square-root balanced truncation on the limited gramians (FLBT / TLBT).
ReductionResult limited_bt(const LimitedProblem &problem, Eigen::Index order);
ReductionResult limited_bt(const LimitedProblem &problem, const LimitedGramians &gramians,
                           Eigen::Index order);

struct ReduceRequest
{
  Algorithm algorithm = Algorithm::FLITIA;
  Eigen::Index order = 0;
  // Starting ROM for the iterative methods and shift source for PORK.
  // When empty, random_stable_model(order, ..., seed) is used.
  std::optional<StateSpaceModel> init;
  std::uint64_t seed = 42;
  ConvergenceControl control;
  Side pork_side = Side::Input;
};

// Dispatches on the algorithm; throws InvalidArgument if it does not match the limit type.
ReductionResult reduce(const LimitedProblem &problem, const ReduceRequest &request);

// Default pole scale for random initial guesses of a problem.
double initial_pole_scale(const LimitedProblem &problem);

}  // namespace limor

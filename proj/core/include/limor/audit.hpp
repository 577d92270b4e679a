// Copyright The limor Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "limor/reduction.hpp"

namespace limor
{

// Per-pole residuals of the bi-tangential conditions at -lambdahat_i.
struct InterpolationResiduals
{
  CVec poles;
  std::vector<double> right;      // ||T r - That r||
  std::vector<double> left;       // ||l^T T - l^T That||
  std::vector<double> hermite;    // |l^T T' r - l^T That' r|
  std::vector<double> aug_right;  // same as `right` through (A, B_aug, C)
  std::vector<double> aug_left;   // same as `left` through (A, B, C_aug)
  std::vector<double> right_scale, left_scale, hermite_scale;  // minuend norms

  double max_relative_right() const;
  double max_relative_left() const;
  double max_relative_hermite() const;
};

struct OptimalityReport
{
  double res_B = 0.0;  // ||Qbar_lim^T B - Qhat_lim Bhat||_F
  double res_C = 0.0;  // ||C Pbar_lim - Chat Phat_lim||_F
  double res_A = 0.0;  // ||Qbar^T Pbar_lim - Qhat Phat_lim + Z||_F, unlimited Q
  double wilson_res = 0.0;
  double identity_gap = 0.0;
  double scale_B = 0.0, scale_C = 0.0, scale_A = 0.0, scale_wilson = 0.0;
  std::optional<double> f_deviation;  // needs the projection pair
  Mat CP_bar, CP_hat;                 // p x r
  Mat QB_bar, QB_hat;                 // r x m: Qbar^T B, Qhat Bhat
  std::optional<InterpolationResiduals> interpolation;  // empty for repeated ROM poles

  double relative_B() const;
  double relative_C() const;
  double relative_A() const;
};

OptimalityReport gramian_conditions(const LimitedProblem &problem, const StateSpaceModel &rom,
                                    const ProjectionPair *pair = nullptr);

// The (a1)/(b1) residual Qbar^T Pbar_lim - Qhat Phat_lim + Z; equals -1/2 of the gradient
// of the squared limited H2 error with respect to Ahat.
Mat gradient_residual(const LimitedProblem &problem, const StateSpaceModel &rom);

struct WilsonForm
{
  Mat X;
  Mat rewritten;   // Qbar_lim^T Pbar_lim - Qhat_lim Phat_lim + X
  Mat original;    // gradient_residual
  double residual = 0.0;      // ||rewritten||_F
  double identity_gap = 0.0;  // ||rewritten - F[Ahat^T] original|| (band) or ||rewritten - original||
  double scale = 0.0;
};

// Throws RankDeficientF if F[Ahat] is numerically singular (band case).
WilsonForm wilson_form(const LimitedProblem &problem, const StateSpaceModel &rom);

InterpolationResiduals interpolation_residuals(const LimitedProblem &problem,
                                               const StateSpaceModel &rom);

///
/// Pairs the gramian residuals with their interpolation counterparts after the
/// basis change by the ROM eigenvectors Rhat:
///
///   (C Pbar - Chat Phat) Rhat^{-T} e_i = T(-lambda_i) r_i - That(-lambda_i) r_i
///   (B^T Qbar - Bhat^T Qhat) Rhat e_i  = T(-lambda_i)^T l_i - That(-lambda_i)^T l_i
///
struct EquivalenceReport
{
  double gram_C = 0.0, interp_C = 0.0;  // Frobenius norm / root-sum-square over poles
  double gram_B = 0.0, interp_B = 0.0;
  double column_gap_C = 0.0, column_gap_B = 0.0;  // relative, column by column
  double norm_gap_C = 0.0, norm_gap_B = 0.0;      // relative
  double scale_C = 0.0, scale_B = 0.0;
};

EquivalenceReport equivalence_report(const LimitedProblem &problem, const StateSpaceModel &rom);

// Largest singular value (dense for small sizes, power iteration otherwise).
double spectral_norm(const Mat &M);

// f_deviation = ||F[A] - V F[Ahat] W^T||_2 (band) or ||e^{A t2} - V e^{Ahat t2} W^T||_2.
double f_deviation(const LimitedProblem &problem, const StateSpaceModel &rom,
                   const ProjectionPair &pair);

}  // namespace limor

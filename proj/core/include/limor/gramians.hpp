// Copyright The limor Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "limor/lti.hpp"

namespace limor
{

// Limited controllability / observability gramians of one model.
//   band:   A P + P A^T + B (F B)^T + (F B) B^T = 0
//   window: A P + P A^T + e^{A t1} B B^T e^{A^T t1} - e^{A t2} B B^T e^{A^T t2} = 0
struct LimitedGramians
{
  Mat P;
  Mat Q;
};

LimitedGramians limited_gramians(const StateSpaceModel &model, const LimitSpec &limit);
LimitedGramians limited_gramians(const StateSpaceModel &model, const AugmentedIO &aug,
                                 const LimitSpec &limit);

// Limited cross gramians (n x r) and reduced gramians (r x r) of a model / ROM pair.
struct GramianSet
{
  Mat P_bar;
  Mat Q_bar;
  Mat P_hat;
  Mat Q_hat;
};

GramianSet cross_gramians(const StateSpaceModel &model, const StateSpaceModel &rom,
                          const LimitSpec &limit);
GramianSet cross_gramians(const StateSpaceModel &model, const AugmentedIO &aug,
                          const StateSpaceModel &rom, const AugmentedIO &rom_aug,
                          const LimitSpec &limit);

// Unlimited cross / reduced observability gramians:
//   A^T Qbar + Qbar Ahat + C^T Chat = 0,   Ahat^T Qhat + Qhat Ahat + Chat^T Chat = 0.
struct UnlimitedObservability
{
  Mat Q_bar;
  Mat Q_hat;
};

UnlimitedObservability unlimited_observability(const StateSpaceModel &model,
                                               const StateSpaceModel &rom);

struct H2ErrorDetail
{
  double squared = 0.0;    // clamped at 0
  double norm = 0.0;
  double p_form = 0.0;     // unclamped trace forms
  double q_form = 0.0;
  double scale = 0.0;      // sum of absolute trace terms
};

///
/// Limited H2 error ||G - Ghat|| over the band or window, from the trace forms
///
///   tr(C P C^T) - 2 tr(C Pbar Chat^T) + tr(Chat Phat Chat^T)
///   tr(B^T Q B) - 2 tr(B^T Qbar Bhat) + tr(Bhat^T Qhat Bhat).
///
/// Throws NumericalFailure if the forms disagree by more than 1e-8 of the
/// term scale, NegativeTrace if the squared norm is below -1e-10 of it.
///
double limited_h2_error(const StateSpaceModel &model, const StateSpaceModel &rom,
                        const LimitSpec &limit);
H2ErrorDetail limited_h2_error_detail(const StateSpaceModel &model, const AugmentedIO &aug,
                                      const LimitedGramians &full, const StateSpaceModel &rom,
                                      const LimitSpec &limit);

// Squared limited H2 norm of a single model (used for relative errors).
double limited_h2_norm_squared(const StateSpaceModel &model, const LimitedGramians &full);

struct OracleResolution
{
  double rel_tol = 1e-10;
  int max_depth = 25;  // band: adaptive bisection depth
  int panels = 400;    // window: exp-stepping panels
};

///
/// Independent estimate of the squared limited H2 error.
///
/// band:   (1/pi) int_{w1}^{w2} ||E(jv)||_F^2 dv by adaptive Gauss-Kronrod,
///         split at the error-system resonances inside the band.
/// window: int_{t1}^{t2} ||C_e e^{A_e t} B_e||_F^2 dt by exact exponential
///         stepping with Gauss-Legendre panels.
///
/// Throws ResolutionTooCoarse when the error estimate exceeds rel_tol.
///
double limited_h2_error_oracle(const StateSpaceModel &model, const StateSpaceModel &rom,
                               const LimitSpec &limit, const OracleResolution &res = {});

// Rank-r factored gramian basis * core * basis^T.
struct FactoredGramian
{
  Mat basis;
  Mat core;

  Mat dense() const { return basis * core * basis.transpose(); }
};

struct ApproxGramians
{
  FactoredGramian P;
  FactoredGramian Q;
};

// Ptilde = V Phat V^T, Qtilde = W Qhat W^T.
ApproxGramians approx_gramians(const Mat &P_hat, const Mat &Q_hat, const Mat &V, const Mat &W);

}  // namespace limor

// Copyright The limor Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>

#include "limor/kernels.hpp"
#include "limor/limits.hpp"
#include "limor/types.hpp"

namespace limor
{

///
/// Continuous-time state-space model x' = A x + B u, y = C x.
///
/// Immutable. The complex Schur form of A is computed lazily and shared by
/// copies, so passing models by value is cheap.
///
class StateSpaceModel
{
public:
  StateSpaceModel() = default;
  // Validates shapes and finiteness. With `require_stable`, A must be Hurwitz.
  StateSpaceModel(Mat A, Mat B, Mat C, bool require_stable = true);

  const Mat &A() const { return A_; }
  const Mat &B() const { return B_; }
  const Mat &C() const { return C_; }
  Eigen::Index states() const { return A_.rows(); }
  Eigen::Index inputs() const { return B_.cols(); }
  Eigen::Index outputs() const { return C_.rows(); }

  const SchurForm &schur() const;
  bool is_stable() const { return schur().spectral_abscissa() < 0.0; }

private:
  Mat A_, B_, C_;
  struct Cache;
  std::shared_ptr<Cache> cache_;
};

// G(s) = C (sI - A)^{-1} B.
CMat eval_transfer(const StateSpaceModel &model, cplx s);
// G'(s) = -C (sI - A)^{-2} B.
CMat eval_transfer_derivative(const StateSpaceModel &model, cplx s);

///
/// G(s) = sum_i l_i r_i^T / (s - lambda_i), with l_i = C R e_i and
/// r_i = B^T R^{-T} e_i (residue directions). Requires simple poles.
///
struct PoleResidueForm
{
  CVec poles;
  CMat left;    // p x n, column i is l_i
  CMat right;   // m x n, column i is r_i
  CMat eigenvectors;

  CMat eval(cplx s) const;
};

PoleResidueForm pole_residue(const StateSpaceModel &model);

///
/// Augmented input/output pair of the limited problem.
///
/// Band [w1, w2]:   B_aug = [B, F B],     C_aug = [C; C F],   F = freq_log_gain(A).
/// Window [t1, t2]: B_aug = [e^{A t1} B, -e^{A t2} B],  C_aug = [C e^{A t1}; -C e^{A t2}].
///
struct AugmentedIO
{
  Mat B_aug;
  Mat C_aug;
};

AugmentedIO augmented_io(const StateSpaceModel &model, const LimitSpec &limit);
// Same, reusing a precomputed limit_function(model, limit).
AugmentedIO augmented_io(const StateSpaceModel &model, const LimitSpec &limit, const Mat &limit_fn);

// The matrix function that defines the limit: F[A] (band) or e^{A t2} (window).
Mat limit_function(const StateSpaceModel &model, const LimitSpec &limit);

// Error system with A_e = blkdiag(A, Ahat), B_e = [B; Bhat], C_e = [C, -Chat].
StateSpaceModel error_system(const StateSpaceModel &model, const StateSpaceModel &rom);

///
/// Surrogate transfer function of the limited problem.
///
/// Band:   T(s) = sum_i l_i r_i^T F(lambda_i) / (s - lambda_i) + G(s) F(-s).
/// Window: T(s) = e^{-s t1} C (sI - A)^{-1} e^{A t1} B - e^{-s t2} C (sI - A)^{-1} e^{A t2} B.
///
/// Both are evaluated as T(s) = C (sI - A)^{-1} B_aug w(s) with the weight
/// w(s) = [F(-s) I; I] or [e^{-s t1} I; e^{-s t2} I], which equals the
/// pole-residue sum without needing simple poles.
///
struct SurrogateValue
{
  CMat value;
  CMat derivative;
};

SurrogateValue surrogate_eval(const StateSpaceModel &model, const LimitSpec &limit, cplx s);
SurrogateValue surrogate_eval(const StateSpaceModel &model, const AugmentedIO &aug,
                              const LimitSpec &limit, cplx s);

// The 2m x m weight w(s) and its derivative.
CMat surrogate_weight(const LimitSpec &limit, Eigen::Index m, cplx s);
CMat surrogate_weight_derivative(const LimitSpec &limit, Eigen::Index m, cplx s);

// Maximum relative difference of two transfer functions over a set of points.
double transfer_distance(const StateSpaceModel &a, const StateSpaceModel &b, const CVec &points);

}  // namespace limor

// Copyright The limor Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "limor/lti.hpp"

namespace limor
{

// Shifts with tangential directions. Must be closed under conjugation:
// a non-real (sigma, b, c) needs a partner (conj sigma, conj b, conj c).
struct InterpolationData
{
  CVec shifts;  // r
  CMat right;   // m x r
  CMat left;    // p x r

  Eigen::Index size() const { return shifts.size(); }
  // Throws DimensionMismatch or NotConjugateClosed.
  void validate(Eigen::Index m, Eigen::Index p) const;
};

enum class Side
{
  Input,
  Output,
};

///
/// Tangential Krylov basis of the limited problem.
///
/// Input side:  column i = (sigma_i I - A)^{-1} B_aug w(sigma_i) b_i
/// Output side: column i = (sigma_i I - A^T)^{-1} C_aug^T w(sigma_i) c_i
///
/// with the surrogate weight w (see surrogate_weight).
///
CMat tangential_basis(const StateSpaceModel &model, const AugmentedIO &aug,
                      const LimitSpec &limit, const InterpolationData &data, Side side);

// Replaces each conjugate column pair (v, conj v) by (Re v, Im v) in place.
// Throws NotConjugateClosed when a non-real column has no partner.
Mat realify(const CMat &M);

struct ProjectionPair
{
  Mat V;
  Mat W;
};

///
/// Bi-orthogonal Gram-Schmidt: for each i, remove components along earlier
/// pairs (v -= V_k W_k^T v, w -= W_k V_k^T w), normalize both, then scale v by
/// 1 / (w^T v). The result satisfies W^T V = I.
///
/// Throws BreakdownNearZero when |w^T v| < 1e-12 for unit v, w.
///
ProjectionPair biorth_gram_schmidt(const Mat &V, const Mat &W);

// (W^T A V, W^T B, C V); the result may be unstable.
StateSpaceModel project(const StateSpaceModel &model, const ProjectionPair &pair);

// Orthonormal basis of the column span. Throws RankDeficient if the rank is below `rank`.
Mat orthonormal_basis(const Mat &M, Eigen::Index rank);

}  // namespace limor

// Copyright The limor Authors.
// SPDX-License-Identifier: Apache-2.0

#include "limor/projection.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "limor/error.hpp"

namespace limor
{

namespace
{

constexpr double kPairTol = 1e-8;
constexpr double kRealTol = 1e-12;
constexpr double kBreakdownTol = 1e-12;

bool is_real_column(const CVec &v)
{
  const double scale = v.cwiseAbs().maxCoeff();
  return v.imag().cwiseAbs().maxCoeff() <= kRealTol * std::max(scale, 1e-300);
}

}  // namespace

void InterpolationData::validate(Eigen::Index m, Eigen::Index p) const
{
  const Eigen::Index r = shifts.size();
  if (right.rows() != m || right.cols() != r || left.rows() != p || left.cols() != r)
  {
    std::ostringstream os;
    os << "interpolation data: " << r << " shifts, right " << right.rows() << "x" << right.cols()
       << " (want " << m << "x" << r << "), left " << left.rows() << "x" << left.cols()
       << " (want " << p << "x" << r << ")";
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
  if (!shifts.allFinite() || !right.allFinite() || !left.allFinite())
  {
    throw Error(ErrorCode::NonFinite, "interpolation data has non-finite entries");
  }
  std::vector<bool> used(r, false);
  for (Eigen::Index i = 0; i < r; ++i)
  {
    if (used[i]) continue;
    const cplx s = shifts(i);
    const double tol = kPairTol * std::max(1.0, std::abs(s));
    if (std::abs(s.imag()) <= tol)
    {
      if (!is_real_column(right.col(i)) || !is_real_column(left.col(i)))
      {
        throw Error(ErrorCode::NotConjugateClosed, "real shift carries complex directions");
      }
      used[i] = true;
      continue;
    }
    bool found = false;
    for (Eigen::Index j = 0; j < r && !found; ++j)
    {
      if (j == i || used[j]) continue;
      if (std::abs(shifts(j) - std::conj(s)) > tol) continue;
      const double db = (right.col(j) - right.col(i).conjugate()).norm();
      const double dc = (left.col(j) - left.col(i).conjugate()).norm();
      if (db <= kPairTol * std::max(1.0, right.col(i).norm()) &&
          dc <= kPairTol * std::max(1.0, left.col(i).norm()))
      {
        used[i] = used[j] = true;
        found = true;
      }
    }
    if (!found)
    {
      std::ostringstream os;
      os << "shift " << s << " has no conjugate partner with conjugate directions";
      throw Error(ErrorCode::NotConjugateClosed, os.str());
    }
  }
}

CMat tangential_basis(const StateSpaceModel &model, const AugmentedIO &aug,
                      const LimitSpec &limit, const InterpolationData &data, Side side)
{
  data.validate(model.inputs(), model.outputs());
  const Eigen::Index n = model.states(), r = data.size();
  CMat out(n, r);
  const CMat X = side == Side::Input ? CMat(aug.B_aug.cast<cplx>())
                                     : CMat(aug.C_aug.transpose().cast<cplx>());
  const Eigen::Index k = side == Side::Input ? model.inputs() : model.outputs();
  for (Eigen::Index i = 0; i < r; ++i)
  {
    const cplx s = data.shifts(i);
    const CVec dir = side == Side::Input ? CVec(data.right.col(i)) : CVec(data.left.col(i));
    const CVec rhs = X * (surrogate_weight(limit, k, s) * dir);
    out.col(i) = model.schur().shifted_solve(s, rhs, side == Side::Input ? Op::None : Op::Transpose);
  }
  return out;
}

Mat realify(const CMat &M)
{
  const Eigen::Index r = M.cols();
  Mat out(M.rows(), r);
  std::vector<bool> done(r, false);
  for (Eigen::Index i = 0; i < r; ++i)
  {
    if (done[i]) continue;
    const CVec v = M.col(i);
    if (is_real_column(v))
    {
      out.col(i) = v.real();
      done[i] = true;
      continue;
    }
    Eigen::Index best = -1;
    double best_gap = kPairTol * std::max(v.norm(), 1e-300);
    for (Eigen::Index j = i + 1; j < r; ++j)
    {
      if (done[j]) continue;
      const double gap = (M.col(j) - v.conjugate()).norm();
      if (gap <= best_gap)
      {
        best = j;
        best_gap = gap;
      }
    }
    if (best < 0)
    {
      std::ostringstream os;
      os << "column " << i << " has no conjugate partner";
      throw Error(ErrorCode::NotConjugateClosed, os.str());
    }
    out.col(i) = v.real();
    out.col(best) = v.imag();
    done[i] = done[best] = true;
  }
  return out;
}

ProjectionPair biorth_gram_schmidt(const Mat &V0, const Mat &W0)
{
  if (V0.rows() != W0.rows() || V0.cols() != W0.cols())
  {
    throw Error(ErrorCode::DimensionMismatch, "biorthogonalization needs V and W of equal shape");
  }
  ProjectionPair out{V0, W0};
  Mat &V = out.V;
  Mat &W = out.W;
  for (Eigen::Index i = 0; i < V.cols(); ++i)
  {
    Vec v = V.col(i);
    Vec w = W.col(i);
    // Two sweeps: the projectors are idempotent, the second pass only removes roundoff.
    for (int sweep = 0; sweep < 2; ++sweep)
    {
      for (Eigen::Index k = 0; k < i; ++k)
      {
        v -= V.col(k) * W.col(k).dot(v);
        w -= W.col(k) * V.col(k).dot(w);
      }
    }
    const double nv = v.norm(), nw = w.norm();
    if (nv == 0.0 || nw == 0.0)
    {
      throw Error(ErrorCode::BreakdownNearZero, "basis column vanished after projection");
    }
    v /= nv;
    w /= nw;
    const double d = w.dot(v);
    if (std::abs(d) < kBreakdownTol)
    {
      std::ostringstream os;
      os << "w^T v = " << d << " at column " << i;
      throw Error(ErrorCode::BreakdownNearZero, os.str());
    }
    V.col(i) = v / d;
    W.col(i) = w;
  }
  return out;
}

StateSpaceModel project(const StateSpaceModel &model, const ProjectionPair &pair)
{
  if (pair.V.rows() != model.states() || pair.W.rows() != model.states() ||
      pair.V.cols() != pair.W.cols())
  {
    throw Error(ErrorCode::DimensionMismatch, "projection pair does not match the model");
  }
  return StateSpaceModel(pair.W.transpose() * model.A() * pair.V, pair.W.transpose() * model.B(),
                         model.C() * pair.V, false);
}

Mat orthonormal_basis(const Mat &M, Eigen::Index rank)
{
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeThinU);
  const Vec &s = svd.singularValues();
  const double tol = 1e-12 * std::max(s.size() ? s(0) : 0.0, 1e-300) *
                     std::max<double>(M.rows(), M.cols());
  Eigen::Index k = 0;
  while (k < s.size() && s(k) > tol) ++k;
  if (k < rank)
  {
    std::ostringstream os;
    os << "basis has numerical rank " << k << ", need " << rank;
    throw Error(ErrorCode::RankDeficient, os.str());
  }
  return svd.matrixU().leftCols(rank);
}

}  // namespace limor

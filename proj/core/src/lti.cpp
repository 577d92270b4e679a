// Copyright The limor Authors.
// SPDX-License-Identifier: Apache-2.0

#include "limor/lti.hpp"

#include <mutex>
#include <sstream>

#include <Eigen/LU>

#include "limor/error.hpp"

namespace limor
{

struct StateSpaceModel::Cache
{
  std::once_flag once;
  SchurForm schur;
};

StateSpaceModel::StateSpaceModel(Mat A, Mat B, Mat C, bool require_stable)
  : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), cache_(std::make_shared<Cache>())
{
  if (A_.rows() != A_.cols() || B_.rows() != A_.rows() || C_.cols() != A_.rows())
  {
    std::ostringstream os;
    os << "model shapes A " << A_.rows() << "x" << A_.cols() << ", B " << B_.rows() << "x"
       << B_.cols() << ", C " << C_.rows() << "x" << C_.cols() << " are inconsistent";
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
  if (!A_.allFinite() || !B_.allFinite() || !C_.allFinite())
  {
    throw Error(ErrorCode::NonFinite, "model matrices contain non-finite entries");
  }
  if (require_stable && A_.rows() > 0 && !is_stable())
  {
    std::ostringstream os;
    os << "A is not Hurwitz (spectral abscissa " << schur().spectral_abscissa() << ")";
    throw Error(ErrorCode::UnstableMatrix, os.str());
  }
}

const SchurForm &StateSpaceModel::schur() const
{
  if (!cache_) throw Error(ErrorCode::InvalidArgument, "empty model");
  std::call_once(cache_->once, [this] { cache_->schur = SchurForm(A_); });
  return cache_->schur;
}

CMat eval_transfer(const StateSpaceModel &model, cplx s)
{
  return model.C().cast<cplx>() * model.schur().shifted_solve(s, model.B().cast<cplx>());
}

CMat eval_transfer_derivative(const StateSpaceModel &model, cplx s)
{
  const CMat X = model.schur().shifted_solve(s, model.B().cast<cplx>());
  return -model.C().cast<cplx>() * model.schur().shifted_solve(s, X);
}

CMat PoleResidueForm::eval(cplx s) const
{
  CMat G = CMat::Zero(left.rows(), right.rows());
  for (Eigen::Index i = 0; i < poles.size(); ++i)
  {
    G += left.col(i) * right.col(i).transpose() / (s - poles(i));
  }
  return G;
}

PoleResidueForm pole_residue(const StateSpaceModel &model)
{
  SpectralFactorization sf = spectral_factorization(model.A());
  PoleResidueForm out;
  out.poles = sf.eigenvalues;
  out.eigenvectors = sf.eigenvectors;
  Eigen::PartialPivLU<CMat> lu(sf.eigenvectors);
  // Columns of B^T R^{-T} = (R^{-1} B)^T.
  out.right = lu.solve(model.B().cast<cplx>()).transpose();
  out.left = model.C().cast<cplx>() * sf.eigenvectors;
  return out;
}

AugmentedIO augmented_io(const StateSpaceModel &model, const LimitSpec &limit, const Mat &fn)
{
  AugmentedIO aug;
  const Eigen::Index n = model.states(), m = model.inputs(), p = model.outputs();
  if (fn.rows() != n || fn.cols() != n)
  {
    throw Error(ErrorCode::DimensionMismatch, "limit function has the wrong size");
  }
  aug.B_aug.resize(n, 2 * m);
  aug.C_aug.resize(2 * p, n);
  if (limit.is_frequency())
  {
    aug.B_aug << model.B(), fn * model.B();
    aug.C_aug << model.C(), model.C() * fn;
  }
  else if (limit.window().t1 == 0.0)
  {
    aug.B_aug << model.B(), -fn * model.B();
    aug.C_aug << model.C(), -model.C() * fn;
  }
  else
  {
    const Mat E1 = matrix_exponential(model.A(), limit.window().t1);
    aug.B_aug << E1 * model.B(), -fn * model.B();
    aug.C_aug << model.C() * E1, -model.C() * fn;
  }
  return aug;
}

AugmentedIO augmented_io(const StateSpaceModel &model, const LimitSpec &limit)
{
  return augmented_io(model, limit, limit_function(model, limit));
}

Mat limit_function(const StateSpaceModel &model, const LimitSpec &limit)
{
  if (limit.is_frequency()) return freq_log_gain(model.schur(), limit.band());
  return matrix_exponential(model.A(), limit.window().t2);
}

StateSpaceModel error_system(const StateSpaceModel &model, const StateSpaceModel &rom)
{
  if (model.inputs() != rom.inputs() || model.outputs() != rom.outputs())
  {
    throw Error(ErrorCode::DimensionMismatch, "model and reduced model have different I/O sizes");
  }
  const Eigen::Index n = model.states(), r = rom.states();
  Mat A = Mat::Zero(n + r, n + r);
  A.topLeftCorner(n, n) = model.A();
  A.bottomRightCorner(r, r) = rom.A();
  Mat B(n + r, model.inputs());
  B << model.B(), rom.B();
  Mat C(model.outputs(), n + r);
  C << model.C(), -rom.C();
  return StateSpaceModel(std::move(A), std::move(B), std::move(C), false);
}

CMat surrogate_weight(const LimitSpec &limit, Eigen::Index m, cplx s)
{
  CMat w = CMat::Zero(2 * m, m);
  const CMat I = CMat::Identity(m, m);
  if (limit.is_frequency())
  {
    w.topRows(m) = freq_log_gain(-s, limit.band()) * I;
    w.bottomRows(m) = I;
  }
  else
  {
    w.topRows(m) = std::exp(-s * limit.window().t1) * I;
    w.bottomRows(m) = std::exp(-s * limit.window().t2) * I;
  }
  return w;
}

CMat surrogate_weight_derivative(const LimitSpec &limit, Eigen::Index m, cplx s)
{
  CMat w = CMat::Zero(2 * m, m);
  const CMat I = CMat::Identity(m, m);
  if (limit.is_frequency())
  {
    w.topRows(m) = -freq_log_gain_derivative(-s, limit.band()) * I;
  }
  else
  {
    const double t1 = limit.window().t1, t2 = limit.window().t2;
    w.topRows(m) = -t1 * std::exp(-s * t1) * I;
    w.bottomRows(m) = -t2 * std::exp(-s * t2) * I;
  }
  return w;
}

SurrogateValue surrogate_eval(const StateSpaceModel &model, const AugmentedIO &aug,
                              const LimitSpec &limit, cplx s)
{
  const Eigen::Index m = model.inputs();
  const CMat X = model.schur().shifted_solve(s, aug.B_aug.cast<cplx>());
  const CMat X2 = model.schur().shifted_solve(s, X);
  const CMat C = model.C().cast<cplx>();
  const CMat w = surrogate_weight(limit, m, s);
  const CMat dw = surrogate_weight_derivative(limit, m, s);
  SurrogateValue out;
  out.value = C * X * w;
  out.derivative = -C * X2 * w + C * X * dw;
  return out;
}

SurrogateValue surrogate_eval(const StateSpaceModel &model, const LimitSpec &limit, cplx s)
{
  return surrogate_eval(model, augmented_io(model, limit), limit, s);
}

double transfer_distance(const StateSpaceModel &a, const StateSpaceModel &b, const CVec &points)
{
  double worst = 0.0;
  for (Eigen::Index k = 0; k < points.size(); ++k)
  {
    const CMat Ga = eval_transfer(a, points(k));
    const CMat Gb = eval_transfer(b, points(k));
    worst = std::max(worst, (Ga - Gb).norm() / std::max(Ga.norm(), 1e-300));
  }
  return worst;
}

}  // namespace limor

// Copyright The limor Authors.
// SPDX-License-Identifier: Apache-2.0

#include "limor/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include "limor/error.hpp"

namespace limor
{

namespace
{

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kPi = 3.14159265358979323846;
constexpr double kBranchCutTol = 1e-8;

void require_square(const Mat &A, const char *name)
{
  if (A.rows() != A.cols())
  {
    std::ostringstream os;
    os << name << " must be square, got " << A.rows() << "x" << A.cols();
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
}

void require_finite(const Mat &A, const char *name)
{
  if (!A.allFinite()) throw Error(ErrorCode::NonFinite, std::string(name) + " has non-finite entries");
}

// Solves (sign*T + shift*I) y = y in place, T upper triangular.
// With `transposed`, the matrix is T^T (lower); T is still passed in upper form.
void shifted_triangular_solve(const CMat &T, bool transposed, double sign, cplx shift,
                              Eigen::Ref<CVec> y)
{
  const Eigen::Index n = T.rows();
  if (!transposed)
  {
    for (Eigen::Index i = n - 1; i >= 0; --i)
    {
      y(i) /= sign * T(i, i) + shift;
      if (i > 0) y.head(i) -= (sign * y(i)) * T.col(i).head(i);
    }
  }
  else
  {
    for (Eigen::Index i = 0; i < n; ++i)
    {
      cplx acc = T.col(i).head(i).cwiseProduct(y.head(i)).sum();
      y(i) = (y(i) - sign * acc) / (sign * T(i, i) + shift);
    }
  }
}

// Solves TA' Y + Y TB' = Y (in place), TA' = TA or TA^T and TB' = TB or TB^T.
void triangular_sylvester(const CMat &TA, bool transA, const CMat &TB, bool transB, CMat &Y)
{
  const Eigen::Index r = TB.rows();
  CVec col;
  for (Eigen::Index step = 0; step < r; ++step)
  {
    // Upper TB' couples column k to earlier columns, lower TB' to later ones.
    const Eigen::Index k = transB ? r - 1 - step : step;
    col = Y.col(k);
    if (!transB && k > 0)
    {
      col.noalias() -= Y.leftCols(k) * TB.col(k).head(k);
    }
    else if (transB && k + 1 < r)
    {
      col.noalias() -= Y.rightCols(r - k - 1) * TB.row(k).tail(r - k - 1).transpose();
    }
    shifted_triangular_solve(TA, transA, 1.0, TB(k, k), col);
    Y.col(k) = col;
  }
}

// op(A) = P T' P^{-1}; P = U for Op::None, conj(U) for Op::Transpose.
CMat left_map_inverse(const SchurForm &F, Op op, const CMat &X)
{
  // P^{-1} X
  return op == Op::None ? CMat(F.unitary().adjoint() * X) : CMat(F.unitary().transpose() * X);
}

CMat left_map(const SchurForm &F, Op op, const CMat &X)
{
  return op == Op::None ? CMat(F.unitary() * X) : CMat(F.unitary().conjugate() * X);
}

void check_spectra(const SchurForm &A, const SchurForm &B)
{
  const double tol = 100.0 * kEps * std::max(1.0, A.norm() + B.norm());
  const CVec la = A.eigenvalues();
  const CVec lb = B.eigenvalues();
  for (Eigen::Index i = 0; i < la.size(); ++i)
  {
    for (Eigen::Index j = 0; j < lb.size(); ++j)
    {
      if (std::abs(la(i) + lb(j)) <= tol)
      {
        std::ostringstream os;
        os << "lambda(A)=" << la(i) << " and lambda(B)=" << lb(j) << " sum to zero";
        throw Error(ErrorCode::SpectraOverlap, os.str());
      }
    }
  }
}

double distance_to_branch_cut(cplx z)
{
  return z.real() <= 0.0 ? std::abs(z.imag()) : std::abs(z);
}

// (j / 2 pi) log(M), M = (jwI + T)(-jwI + T)^{-1}, in Schur coordinates.
CMat log_gain_triangular(const CMat &T, double w)
{
  const Eigen::Index n = T.rows();
  const cplx jw(0.0, w);
  for (Eigen::Index i = 0; i < n; ++i)
  {
    const cplx z = (jw + T(i, i)) / (-jw + T(i, i));
    if (distance_to_branch_cut(z) <= kBranchCutTol)
    {
      std::ostringstream os;
      os << "Mobius image " << z << " of eigenvalue " << T(i, i) << " at w=" << w
         << " is within " << kBranchCutTol << " of the branch cut";
      throw Error(ErrorCode::BranchCutProximity, os.str());
    }
  }
  CMat num = T;
  num.diagonal().array() += jw;
  CMat den = T;
  den.diagonal().array() -= jw;
  // Both factors are upper triangular and commute.
  CMat M = den.triangularView<Eigen::Upper>().solve(num);
  M.triangularView<Eigen::StrictlyLower>().setZero();
  CMat L = M.log();
  return cplx(0.0, 1.0 / (2.0 * kPi)) * L;
}

}  // namespace

SchurForm::SchurForm(const Mat &A)
{
  require_square(A, "A");
  require_finite(A, "A");
  norm_ = A.norm();
  if (A.rows() == 0) return;
  Eigen::ComplexSchur<CMat> schur(A.cast<cplx>());
  if (schur.info() != Eigen::Success)
  {
    throw Error(ErrorCode::NumericalFailure, "complex Schur decomposition did not converge");
  }
  U_ = schur.matrixU();
  T_ = schur.matrixT();
}

double SchurForm::spectral_abscissa() const
{
  if (T_.rows() == 0) return -std::numeric_limits<double>::infinity();
  return T_.diagonal().real().maxCoeff();
}

CMat SchurForm::shifted_solve(cplx s, const CMat &X, Op op) const
{
  if (X.rows() != size())
  {
    throw Error(ErrorCode::DimensionMismatch, "shifted_solve right-hand side has wrong row count");
  }
  const double tol = 1e-13 * std::max({1.0, norm_, std::abs(s)});
  for (Eigen::Index i = 0; i < size(); ++i)
  {
    if (std::abs(s - T_(i, i)) <= tol)
    {
      std::ostringstream os;
      os << "shift " << s << " coincides with eigenvalue " << T_(i, i);
      throw Error(ErrorCode::SingularShift, os.str());
    }
  }
  CMat Y = left_map_inverse(*this, op, X);
  for (Eigen::Index k = 0; k < Y.cols(); ++k)
  {
    shifted_triangular_solve(T_, op == Op::Transpose, -1.0, s, Y.col(k));
  }
  return left_map(*this, op, Y);
}

Mat solve_sylvester(const SchurForm &A, Op opA, const SchurForm &B, Op opB, const Mat &C)
{
  if (C.rows() != A.size() || C.cols() != B.size())
  {
    std::ostringstream os;
    os << "Sylvester: A is " << A.size() << ", B is " << B.size() << ", C is " << C.rows() << "x"
       << C.cols();
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
  require_finite(C, "C");
  if (C.size() == 0) return Mat::Zero(C.rows(), C.cols());
  check_spectra(A, B);

  // Y = P_A^{-1} X P_B, and T_A' Y + Y T_B' = -P_A^{-1} C P_B.
  CMat rhs = -left_map_inverse(A, opA, C.cast<cplx>());
  rhs = (opB == Op::None ? CMat(rhs * B.unitary()) : CMat(rhs * B.unitary().conjugate()));
  triangular_sylvester(A.triangular(), opA == Op::Transpose, B.triangular(), opB == Op::Transpose,
                       rhs);
  CMat X = left_map(A, opA, rhs);
  X = (opB == Op::None ? CMat(X * B.unitary().adjoint()) : CMat(X * B.unitary().transpose()));
  return X.real();
}

Mat solve_sylvester(const Mat &A, const Mat &B, const Mat &C)
{
  require_square(A, "A");
  require_square(B, "B");
  return solve_sylvester(SchurForm(A), Op::None, SchurForm(B), Op::None, C);
}

Mat solve_lyapunov(const SchurForm &A, const Mat &C)
{
  Mat X = solve_sylvester(A, Op::None, A, Op::Transpose, C);
  return 0.5 * (X + X.transpose());
}

Mat solve_lyapunov(const Mat &A, const Mat &C)
{
  return solve_lyapunov(SchurForm(A), C);
}

Mat matrix_exponential(const Mat &A, double t)
{
  require_square(A, "A");
  require_finite(A, "A");
  if (!std::isfinite(t)) throw Error(ErrorCode::NonFinite, "exponential time is not finite");
  if (t == 0.0 || A.rows() == 0) return Mat::Identity(A.rows(), A.cols());
  Mat At = A * t;
  return At.exp();
}

Mat freq_log_gain(const SchurForm &A, const FrequencyBand &band)
{
  const Eigen::Index n = A.size();
  if (!(band.w1 >= 0.0 && band.w1 < band.w2 && std::isfinite(band.w2)))
  {
    throw Error(ErrorCode::InvalidArgument, "frequency band must satisfy 0 <= w1 < w2");
  }
  if (n == 0) return Mat(0, 0);
  if (!(A.spectral_abscissa() < 0.0))
  {
    std::ostringstream os;
    os << "log gain needs a Hurwitz matrix; spectral abscissa is " << A.spectral_abscissa();
    throw Error(ErrorCode::UnstableMatrix, os.str());
  }
  CMat L = log_gain_triangular(A.triangular(), band.w2);
  if (band.w1 > 0.0) L -= log_gain_triangular(A.triangular(), band.w1);
  const CMat F = A.unitary() * L * A.unitary().adjoint();
  const double re = F.real().norm();
  const double im = F.imag().norm();
  if (im > 1e-10 * std::max(re, 1.0) * std::max<double>(1.0, std::sqrt(double(n))))
  {
    std::ostringstream os;
    os << "log gain has imaginary residual " << im << " against real part " << re;
    throw Error(ErrorCode::NumericalFailure, os.str());
  }
  return F.real();
}

Mat freq_log_gain(const Mat &A, const FrequencyBand &band)
{
  require_square(A, "A");
  return freq_log_gain(SchurForm(A), band);
}

cplx freq_log_gain(cplx x, const FrequencyBand &band)
{
  auto edge = [&](double w) -> cplx
  {
    if (w == 0.0) return 0.0;
    const cplx jw(0.0, w);
    const cplx z = (jw + x) / (-jw + x);
    if (distance_to_branch_cut(z) <= kBranchCutTol)
    {
      std::ostringstream os;
      os << "Mobius image of " << x << " at w=" << w << " is on the branch cut";
      throw Error(ErrorCode::BranchCutProximity, os.str());
    }
    return cplx(0.0, 1.0 / (2.0 * kPi)) * std::log(z);
  };
  return edge(band.w2) - edge(band.w1);
}

cplx freq_log_gain_derivative(cplx x, const FrequencyBand &band)
{
  auto edge = [&](double w) -> cplx
  {
    if (w == 0.0) return 0.0;
    const cplx jw(0.0, w);
    return cplx(0.0, 1.0 / (2.0 * kPi)) * (1.0 / (x + jw) - 1.0 / (x - jw));
  };
  return edge(band.w2) - edge(band.w1);
}

CMat logm_frechet(const CMat &M, const CMat &E)
{
  const Eigen::Index n = M.rows();
  if (M.cols() != n || E.rows() != n || E.cols() != n)
  {
    throw Error(ErrorCode::DimensionMismatch, "logm_frechet needs square M and E of equal size");
  }
  if (!M.allFinite() || !E.allFinite())
  {
    throw Error(ErrorCode::NonFinite, "logm_frechet input has non-finite entries");
  }
  if (n == 0) return CMat(0, 0);
  Eigen::ComplexSchur<CMat> schur(M);
  const CVec lam = schur.matrixT().diagonal();
  for (Eigen::Index i = 0; i < n; ++i)
  {
    if (distance_to_branch_cut(lam(i)) <= kBranchCutTol)
    {
      std::ostringstream os;
      os << "eigenvalue " << lam(i) << " of M is within " << kBranchCutTol
         << " of the closed negative real axis";
      throw Error(ErrorCode::BranchCutProximity, os.str());
    }
  }
  CMat block = CMat::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = M;
  block.bottomRightCorner(n, n) = M;
  block.topRightCorner(n, n) = E;
  CMat L = block.log();
  return L.topRightCorner(n, n);
}

Mat expm_frechet(const Mat &X, const Mat &E)
{
  const Eigen::Index n = X.rows();
  if (X.cols() != n || E.rows() != n || E.cols() != n)
  {
    throw Error(ErrorCode::DimensionMismatch, "expm_frechet needs square X and E of equal size");
  }
  if (n == 0) return Mat(0, 0);
  Mat block = Mat::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = X;
  block.bottomRightCorner(n, n) = X;
  block.topRightCorner(n, n) = E;
  Mat Eb = block.exp();
  return Eb.topRightCorner(n, n);
}

SpectralFactorization spectral_factorization(const Mat &A)
{
  require_square(A, "A");
  require_finite(A, "A");
  const Eigen::Index n = A.rows();
  SpectralFactorization out;
  if (n == 0) return out;

  Eigen::EigenSolver<Mat> es(A, true);
  if (es.info() != Eigen::Success)
  {
    throw Error(ErrorCode::NumericalFailure, "eigenvalue iteration did not converge");
  }
  const CVec lam = es.eigenvalues();
  const CMat R = es.eigenvectors();

  std::vector<Eigen::Index> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (lam(a).real() != lam(b).real()) return lam(a).real() < lam(b).real();
    return lam(a).imag() < lam(b).imag();
  });

  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k)
  {
    out.eigenvalues(k) = lam(idx[k]);
    out.eigenvectors.col(k) = R.col(idx[k]);
  }

  const double norm_a = A.norm();
  const double tol = 1e-8 * std::max(norm_a, kEps);
  for (Eigen::Index i = 0; i < n; ++i)
  {
    for (Eigen::Index j = i + 1; j < n; ++j)
    {
      if (std::abs(out.eigenvalues(i) - out.eigenvalues(j)) <= tol)
      {
        std::ostringstream os;
        os << "eigenvalues " << out.eigenvalues(i) << " and " << out.eigenvalues(j)
           << " are not distinct";
        throw Error(ErrorCode::RepeatedPoles, os.str());
      }
    }
  }

  // Fix scale and phase: unit norm, largest entry real positive. Pair partners are
  // then set to exact conjugates.
  for (Eigen::Index k = 0; k < n; ++k)
  {
    auto v = out.eigenvectors.col(k);
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    const cplx phase = std::conj(v(imax)) / std::abs(v(imax));
    v *= phase / v.norm();
  }
  for (Eigen::Index k = 0; k < n; ++k)
  {
    if (out.eigenvalues(k).imag() < 0.0 && k + 1 < n &&
        out.eigenvalues(k + 1).real() == out.eigenvalues(k).real() &&
        out.eigenvalues(k + 1).imag() == -out.eigenvalues(k).imag())
    {
      out.eigenvectors.col(k + 1) = out.eigenvectors.col(k).conjugate();
      ++k;
    }
    else if (out.eigenvalues(k).imag() == 0.0)
    {
      out.eigenvectors.col(k) = out.eigenvectors.col(k).real().cast<cplx>();
    }
  }

  const CMat resid = A.cast<cplx>() * out.eigenvectors -
                     out.eigenvectors * out.eigenvalues.asDiagonal();
  if (resid.norm() > 1e-8 * std::max(1.0, norm_a) * std::sqrt(double(n)))
  {
    throw Error(ErrorCode::NumericalFailure, "eigendecomposition residual is too large");
  }
  Eigen::JacobiSVD<CMat> svd(out.eigenvectors);
  const auto &s = svd.singularValues();
  out.condition = s(n - 1) > 0.0 ? s(0) / s(n - 1) : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace limor

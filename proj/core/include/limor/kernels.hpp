// Copyright The limor Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "limor/limits.hpp"
#include "limor/types.hpp"

namespace limor
{

enum class Op
{
  None,
  Transpose,
};

///
/// Complex Schur form A = U T U^* of a real square matrix.
///
/// Built once per matrix and reused for Sylvester solves with A or A^T on
/// either side, and for shifted solves (sI - A)^{-1} X.
///
class SchurForm
{
public:
  SchurForm() = default;
  explicit SchurForm(const Mat &A);

  Eigen::Index size() const { return T_.rows(); }
  const CMat &unitary() const { return U_; }
  const CMat &triangular() const { return T_; }
  CVec eigenvalues() const { return T_.diagonal(); }
  // Frobenius norm of the original matrix.
  double norm() const { return norm_; }
  double spectral_abscissa() const;

  // (sI - op(A))^{-1} X. Throws SingularShift when s is an eigenvalue to working precision.
  CMat shifted_solve(cplx s, const CMat &X, Op op = Op::None) const;

private:
  CMat U_;
  CMat T_;
  double norm_ = 0.0;
};

// Solves A X + X B + C = 0 (Bartels-Stewart on complex Schur forms).
// Throws SpectraOverlap if lambda_i(A) + lambda_j(B) vanishes to working precision.
Mat solve_sylvester(const Mat &A, const Mat &B, const Mat &C);

// Same equation with op(A) X + X op(B) + C = 0 on precomputed Schur forms.
Mat solve_sylvester(const SchurForm &A, Op opA, const SchurForm &B, Op opB, const Mat &C);

// A X + X A^T + C = 0, result symmetrized.
Mat solve_lyapunov(const SchurForm &A, const Mat &C);
Mat solve_lyapunov(const Mat &A, const Mat &C);

// exp(A t).
Mat matrix_exponential(const Mat &A, double t = 1.0);

///
/// Frequency-limited log gain F = F_{w2}[A] - F_{w1}[A] where
///
///   F_w[A] = Re( (j / 2 pi) log((jwI + A)(-jwI + A)^{-1}) ),  F_0[A] = 0.
///
/// A must be Hurwitz. Throws BranchCutProximity when a Mobius-mapped
/// eigenvalue lies within 1e-8 of the closed negative real axis.
///
Mat freq_log_gain(const Mat &A, const FrequencyBand &band);
Mat freq_log_gain(const SchurForm &A, const FrequencyBand &band);

// Scalar version for Re(x) < 0 (complex-valued; no real part taken).
cplx freq_log_gain(cplx x, const FrequencyBand &band);
// d/dx of the scalar version.
cplx freq_log_gain_derivative(cplx x, const FrequencyBand &band);

// Frechet derivative of the principal matrix logarithm at M in direction E.
CMat logm_frechet(const CMat &M, const CMat &E);

// Frechet derivative of exp at X in direction E.
Mat expm_frechet(const Mat &X, const Mat &E);

struct SpectralFactorization
{
  CVec eigenvalues;    // ascending by (real, imag); conjugate pairs adjacent
  CMat eigenvectors;   // unit columns; pair partners are exact conjugates
  double condition = 0.0;  // 2-norm condition number of eigenvectors
};

// A = R diag(lambda) R^{-1}. Throws RepeatedPoles if two eigenvalues lie within 1e-8 ||A||.
SpectralFactorization spectral_factorization(const Mat &A);

}  // namespace limor

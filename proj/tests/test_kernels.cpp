// Copyright The limor Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "support/oracles.hpp"

namespace limor
{
namespace
{

using test::random_model;

using test::code_of;
using test::rel;

TEST(Sylvester, ResidualIsSmall)
{
  const Mat A = random_model(12, 1, 1, 1).A();
  const Mat B = random_model(5, 1, 1, 2).A();
  const Mat C = Mat::Random(12, 5);
  const Mat X = solve_sylvester(A, B, C);
  EXPECT_LT((A * X + X * B + C).norm() / C.norm(), 1e-12);
}

TEST(Sylvester, TransposedOperands)
{
  const Mat A = random_model(9, 1, 1, 3).A();
  const Mat B = random_model(4, 1, 1, 4).A();
  const Mat C = Mat::Random(9, 4);
  const Mat X = solve_sylvester(SchurForm(A), Op::Transpose, SchurForm(B), Op::None, C);
  EXPECT_LT((A.transpose() * X + X * B + C).norm() / C.norm(), 1e-12);
  const Mat Y = solve_sylvester(SchurForm(A), Op::None, SchurForm(B), Op::Transpose, C);
  EXPECT_LT((A * Y + Y * B.transpose() + C).norm() / C.norm(), 1e-12);
}

TEST(Sylvester, OverlappingSpectraAreRejected)
{
  const Mat A = random_model(4, 1, 1, 5).A();
  EXPECT_EQ(code_of([&] { solve_sylvester(A, Mat(-A), Mat::Ones(4, 4)); }), ErrorCode::SpectraOverlap);
}

TEST(Lyapunov, SymmetricSolution)
{
  const StateSpaceModel m = random_model(10, 2, 1, 6);
  const Mat rhs = m.B() * m.B().transpose();
  const Mat P = solve_lyapunov(m.A(), rhs);
  EXPECT_LT((m.A() * P + P * m.A().transpose() + rhs).norm() / rhs.norm(), 1e-12);
  EXPECT_EQ((P - P.transpose()).norm(), 0.0);
}

TEST(MatrixExponential, MatchesTaylorOracle)
{
  for (unsigned seed = 0; seed < 5; ++seed)
  {
    const Mat A = random_model(8, 1, 1, 10 + seed).A();
    for (double t : {0.0, 0.1, 1.0, 3.7})
      EXPECT_LT(rel(matrix_exponential(A, t), test::expm_taylor(A, t)), 1e-12) << seed << " " << t;
  }
}

TEST(FreqLogGain, MatchesArctanFormOnRealSpectrum)
{
  for (unsigned seed = 0; seed < 10; ++seed)
  {
    const Mat A = random_model(7, 1, 1, 20 + seed, 0.2, 5.0, 0.0, true).A();
    for (auto [w1, w2] : {std::pair{0.0, 0.5}, {0.0, 4.0}, {1.0, 3.0}, {2.5, 40.0}})
    {
      const Mat F = freq_log_gain(A, FrequencyBand{w1, w2});
      EXPECT_LT((F - test::freq_gain_closed_form(A, w1, w2)).norm(), 1e-8) << seed;
    }
  }
}

TEST(FreqLogGain, TransposeIdentityAndRealness)
{
  const Mat A = random_model(9, 1, 1, 31).A();
  const FrequencyBand band{0.3, 2.0};
  EXPECT_LT(rel(freq_log_gain(Mat(A.transpose()), band), freq_log_gain(A, band).transpose()), 1e-11);
  // F commutes with A.
  const Mat F = freq_log_gain(A, band);
  EXPECT_LT((A * F - F * A).norm() / (A.norm() * F.norm()), 1e-11);
}

TEST(FreqLogGain, AdditiveOverAdjacentBands)
{
  const Mat A = random_model(7, 1, 1, 32).A();
  const Mat whole = freq_log_gain(A, FrequencyBand{0.0, 3.0});
  EXPECT_LT(test::rel(freq_log_gain(A, FrequencyBand{0.0, 1.2}) + freq_log_gain(A, FrequencyBand{1.2, 3.0}), whole),
            1e-12);
}

TEST(FreqLogGain, ScalarFormAndDerivative)
{
  const FrequencyBand band{0.5, 2.0};
  for (double a : {0.1, 1.0, 7.0})
  {
    const double expected = (std::atan(2.0 / a) - std::atan(0.5 / a)) / std::numbers::pi;
    EXPECT_NEAR(freq_log_gain(cplx(-a, 0.0), band).real(), expected, 1e-14);
  }
  for (cplx x : {cplx(-1.0, 0.3), cplx(0.7, -2.0), cplx(-3.0, 5.0)})
  {
    const cplx h = 1e-6;
    const cplx fd = (freq_log_gain(x + h, band) - freq_log_gain(x - h, band)) / (2.0 * h);
    EXPECT_LT(std::abs(freq_log_gain_derivative(x, band) - fd), 1e-7 * std::max(1.0, std::abs(fd)));
  }
}

TEST(FreqLogGain, Errors)
{
  Mat unstable = Mat::Identity(2, 2);
  EXPECT_EQ(code_of([&] { freq_log_gain(unstable, FrequencyBand{0.0, 1.0}); }),
            ErrorCode::UnstableMatrix);
  Mat near_axis(2, 2);
  near_axis << -1e-11, 0.5, -0.5, -1e-11;
  EXPECT_EQ(code_of([&] { freq_log_gain(near_axis, FrequencyBand{0.0, 1.0}); }),
            ErrorCode::BranchCutProximity);
}

TEST(LogFrechet, MatchesFiniteDifference)
{
  const Mat A = random_model(5, 1, 1, 40).A();
  const CMat M = (cplx(0.0, 1.5) * CMat::Identity(5, 5) + A.cast<cplx>()) *
                 (cplx(0.0, -1.5) * CMat::Identity(5, 5) + A.cast<cplx>()).inverse();
  const CMat E = CMat::Random(5, 5);
  const double h = 1e-6;
  const CMat plus = (M + h * E).log(), minus = (M - h * E).log();
  const CMat fd = (plus - minus) / (2.0 * h);
  const CMat L = logm_frechet(M, E);
  EXPECT_LT((L - fd).norm() / fd.norm(), 1e-7);
}

TEST(ExpFrechet, MatchesFiniteDifference)
{
  const Mat X = random_model(6, 1, 1, 41).A();
  const Mat E = Mat::Random(6, 6);
  const double h = 1e-6;
  const Mat fd = (test::expm_taylor(X + h * E) - test::expm_taylor(X - h * E)) / (2.0 * h);
  EXPECT_LT(rel(expm_frechet(X, E), fd), 1e-8);
}

TEST(SpectralFactorization, SortedConjugateClosedAndAccurate)
{
  const Mat A = random_model(10, 1, 1, 50).A();
  const SpectralFactorization sf = spectral_factorization(A);
  EXPECT_LT((A.cast<cplx>() * sf.eigenvectors - sf.eigenvectors * sf.eigenvalues.asDiagonal()).norm(),
            1e-10 * A.norm());
  for (Eigen::Index i = 0; i + 1 < sf.eigenvalues.size(); ++i)
  {
    const cplx a = sf.eigenvalues(i), b = sf.eigenvalues(i + 1);
    EXPECT_TRUE(a.real() < b.real() + 1e-12 || (a.real() == b.real() && a.imag() <= b.imag()));
  }
  for (Eigen::Index i = 0; i < sf.eigenvalues.size(); ++i)
  {
    EXPECT_NEAR(sf.eigenvectors.col(i).norm(), 1.0, 1e-12);
    if (sf.eigenvalues(i).imag() == 0.0)
    {
      EXPECT_EQ(sf.eigenvectors.col(i).imag().norm(), 0.0);
      continue;
    }
    bool partner = false;
    for (Eigen::Index j = 0; j < sf.eigenvalues.size(); ++j)
    {
      if (sf.eigenvalues(j) == std::conj(sf.eigenvalues(i)) &&
          sf.eigenvectors.col(j) == sf.eigenvectors.col(i).conjugate())
        partner = true;
    }
    EXPECT_TRUE(partner) << i;
  }
  EXPECT_GE(sf.condition, 1.0);
}

TEST(SpectralFactorization, IllustrativeEigenvaluesAreDistinctAndStable)
{
  const SpectralFactorization sf = spectral_factorization(test::illustrative_model().A());
  ASSERT_EQ(sf.eigenvalues.size(), 6);
  for (Eigen::Index i = 0; i < 6; ++i)
  {
    EXPECT_LT(sf.eigenvalues(i).real(), 0.0);
    for (Eigen::Index j = i + 1; j < 6; ++j) EXPECT_GT(std::abs(sf.eigenvalues(i) - sf.eigenvalues(j)), 1e-3);
  }
}

TEST(SpectralFactorization, RepeatedPolesRejected)
{
  Mat A = Mat::Zero(3, 3);
  A.diagonal() << -1.0, -1.0, -2.0;
  EXPECT_EQ(code_of([&] { spectral_factorization(A); }), ErrorCode::RepeatedPoles);
}

TEST(SchurForm, ShiftedSolve)
{
  const Mat A = random_model(8, 1, 1, 60).A();
  const SchurForm sf(A);
  const CMat X = CMat::Random(8, 2);
  const cplx s(0.3, 1.2);
  const CMat Y = sf.shifted_solve(s, X);
  EXPECT_LT(((s * CMat::Identity(8, 8) - A.cast<cplx>()) * Y - X).norm(), 1e-12 * X.norm() * 10);
  const CMat Z = sf.shifted_solve(s, X, Op::Transpose);
  EXPECT_LT(((s * CMat::Identity(8, 8) - A.transpose().cast<cplx>()) * Z - X).norm(), 1e-11 * X.norm());
  EXPECT_EQ(code_of([&] { sf.shifted_solve(sf.eigenvalues()(0), X); }), ErrorCode::SingularShift);
}

}  // namespace
}  // namespace limor

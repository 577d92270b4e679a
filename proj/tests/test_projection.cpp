// Copyright The limor Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "support/oracles.hpp"

namespace limor
{
namespace
{

using test::code_of;
using test::random_model;

InterpolationData sample_data()
{
  InterpolationData d;
  d.shifts.resize(3);
  d.shifts << cplx(1.0, 2.0), cplx(1.0, -2.0), cplx(0.5, 0.0);
  d.right.resize(2, 3);
  d.right << cplx(1.0, 0.5), cplx(1.0, -0.5), 1.0, cplx(0.0, 1.0), cplx(0.0, -1.0), -2.0;
  d.left.resize(1, 3);
  d.left << cplx(0.3, 0.1), cplx(0.3, -0.1), 1.0;
  return d;
}

// Orthogonal projector onto the column span of M.
Mat span_projector(const Mat &M)
{
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeThinU);
  const Mat U = svd.matrixU();
  return U * U.transpose();
}

TEST(InterpolationData, ConjugateClosureIsChecked)
{
  InterpolationData d = sample_data();
  EXPECT_FALSE(code_of([&] { d.validate(2, 1); }));
  d.right(0, 1) = cplx(1.0, 0.5);
  EXPECT_EQ(code_of([&] { d.validate(2, 1); }), ErrorCode::NotConjugateClosed);
  EXPECT_EQ(code_of([&] { sample_data().validate(3, 1); }), ErrorCode::DimensionMismatch);
}

TEST(TangentialBasis, ColumnsSolveShiftedSystems)
{
  const StateSpaceModel m = random_model(8, 2, 1, 1);
  const InterpolationData d = sample_data();
  for (const LimitSpec &limit : {LimitSpec::frequency(0.5, 2.0), LimitSpec::time(0.2, 1.0)})
  {
    const AugmentedIO aug = augmented_io(m, limit);
    const CMat V = tangential_basis(m, aug, limit, d, Side::Input);
    const CMat W = tangential_basis(m, aug, limit, d, Side::Output);
    for (Eigen::Index i = 0; i < 3; ++i)
    {
      const cplx s = d.shifts(i);
      const CMat K = s * CMat::Identity(8, 8) - m.A().cast<cplx>();
      const CVec rv = aug.B_aug.cast<cplx>() * surrogate_weight(limit, 2, s) * d.right.col(i);
      EXPECT_LT((K * V.col(i) - rv).norm(), 1e-11 * rv.norm());
      const CVec lw = aug.C_aug.transpose().cast<cplx>() * surrogate_weight(limit, 1, s) * d.left.col(i);
      EXPECT_LT((K.transpose() * W.col(i) - lw).norm(), 1e-11 * lw.norm());
    }
  }
}

TEST(Realify, PreservesSpanAndIsReal)
{
  const StateSpaceModel m = random_model(8, 2, 1, 2);
  const LimitSpec limit = LimitSpec::frequency(0.0, 1.0);
  const CMat V = tangential_basis(m, augmented_io(m, limit), limit, sample_data(), Side::Input);
  const Mat R = realify(V);
  ASSERT_EQ(R.cols(), 3);
  const Mat P = span_projector(R);
  for (Eigen::Index i = 0; i < 3; ++i)
  {
    EXPECT_LT((P * V.col(i).real() - V.col(i).real()).norm(), 1e-12 * V.col(i).norm());
    EXPECT_LT((P * V.col(i).imag() - V.col(i).imag()).norm(), 1e-12 * V.col(i).norm());
  }
  CMat broken = V;
  broken.col(1) = V.col(0);
  EXPECT_EQ(code_of([&] { realify(broken); }), ErrorCode::NotConjugateClosed);
}

TEST(BiorthGramSchmidt, BiorthogonalWithSameSpans)
{
  const Mat V = Mat::Random(10, 4), W = Mat::Random(10, 4);
  const ProjectionPair p = biorth_gram_schmidt(V, W);
  EXPECT_LT((p.W.transpose() * p.V - Mat::Identity(4, 4)).norm(), 1e-12);
  EXPECT_LT((span_projector(p.V) - span_projector(V)).norm(), 1e-12);
  EXPECT_LT((span_projector(p.W) - span_projector(W)).norm(), 1e-12);
}

TEST(BiorthGramSchmidt, BreakdownWhenSpacesAreOrthogonal)
{
  Mat V = Mat::Zero(4, 1), W = Mat::Zero(4, 1);
  V(0, 0) = 1.0;
  W(1, 0) = 1.0;
  EXPECT_EQ(code_of([&] { biorth_gram_schmidt(V, W); }), ErrorCode::BreakdownNearZero);
}

TEST(Project, PetrovGalerkinMatrices)
{
  const StateSpaceModel m = random_model(7, 2, 2, 3);
  const ProjectionPair p = biorth_gram_schmidt(Mat::Random(7, 3), Mat::Random(7, 3));
  const StateSpaceModel r = project(m, p);
  EXPECT_LT((r.A() - p.W.transpose() * m.A() * p.V).norm(), 1e-14 * m.A().norm() * 10);
  EXPECT_LT((r.B() - p.W.transpose() * m.B()).norm(), 1e-13);
  EXPECT_LT((r.C() - m.C() * p.V).norm(), 1e-13);
}

TEST(OrthonormalBasis, RankHandling)
{
  Mat M = Mat::Random(6, 3);
  const Mat Q = orthonormal_basis(M, 3);
  EXPECT_LT((Q.transpose() * Q - Mat::Identity(3, 3)).norm(), 1e-13);
  M.col(2) = M.col(0) + M.col(1);
  EXPECT_EQ(code_of([&] { orthonormal_basis(M, 3); }), ErrorCode::RankDeficient);
}

}  // namespace
}  // namespace limor

// Copyright The limor Authors.
// SPDX-License-Identifier: Apache-2.0

#include "limor/gramians.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "limor/error.hpp"

namespace limor
{

namespace
{

constexpr double kPi = 3.14159265358979323846;

// Right-hand side X J Y^T of the limited equations for augmented blocks X = [X1, X2].
// band: X1 Y2^T + X2 Y1^T; window: X1 Y1^T - X2 Y2^T.
Mat coupled(const Mat &X, const Mat &Y, const LimitSpec &limit)
{
  const Eigen::Index k = X.cols() / 2;
  if (limit.is_frequency())
  {
    return X.leftCols(k) * Y.rightCols(k).transpose() + X.rightCols(k) * Y.leftCols(k).transpose();
  }
  return X.leftCols(k) * Y.leftCols(k).transpose() - X.rightCols(k) * Y.rightCols(k).transpose();
}

void check_pair(const StateSpaceModel &model, const StateSpaceModel &rom)
{
  if (model.inputs() != rom.inputs() || model.outputs() != rom.outputs())
  {
    std::ostringstream os;
    os << "model is " << model.outputs() << "x" << model.inputs() << ", reduced model is "
       << rom.outputs() << "x" << rom.inputs();
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
}

}  // namespace

LimitedGramians limited_gramians(const StateSpaceModel &model, const AugmentedIO &aug,
                                 const LimitSpec &limit)
{
  LimitedGramians g;
  g.P = solve_lyapunov(model.schur(), coupled(aug.B_aug, aug.B_aug, limit));
  const Mat Ct = aug.C_aug.transpose();
  Mat Q = solve_sylvester(model.schur(), Op::Transpose, model.schur(), Op::None,
                          coupled(Ct, Ct, limit));
  g.Q = 0.5 * (Q + Q.transpose());
  return g;
}

LimitedGramians limited_gramians(const StateSpaceModel &model, const LimitSpec &limit)
{
  return limited_gramians(model, augmented_io(model, limit), limit);
}

GramianSet cross_gramians(const StateSpaceModel &model, const AugmentedIO &aug,
                          const StateSpaceModel &rom, const AugmentedIO &rom_aug,
                          const LimitSpec &limit)
{
  check_pair(model, rom);
  GramianSet g;
  const Mat Ct = aug.C_aug.transpose();
  const Mat Cht = rom_aug.C_aug.transpose();
  g.P_bar = solve_sylvester(model.schur(), Op::None, rom.schur(), Op::Transpose,
                            coupled(aug.B_aug, rom_aug.B_aug, limit));
  g.Q_bar = solve_sylvester(model.schur(), Op::Transpose, rom.schur(), Op::None,
                            coupled(Ct, Cht, limit));
  g.P_hat = solve_lyapunov(rom.schur(), coupled(rom_aug.B_aug, rom_aug.B_aug, limit));
  Mat Qh = solve_sylvester(rom.schur(), Op::Transpose, rom.schur(), Op::None,
                           coupled(Cht, Cht, limit));
  g.Q_hat = 0.5 * (Qh + Qh.transpose());
  return g;
}

GramianSet cross_gramians(const StateSpaceModel &model, const StateSpaceModel &rom,
                          const LimitSpec &limit)
{
  return cross_gramians(model, augmented_io(model, limit), rom, augmented_io(rom, limit), limit);
}

UnlimitedObservability unlimited_observability(const StateSpaceModel &model,
                                               const StateSpaceModel &rom)
{
  check_pair(model, rom);
  UnlimitedObservability u;
  u.Q_bar = solve_sylvester(model.schur(), Op::Transpose, rom.schur(), Op::None,
                            model.C().transpose() * rom.C());
  Mat Qh = solve_sylvester(rom.schur(), Op::Transpose, rom.schur(), Op::None,
                           rom.C().transpose() * rom.C());
  u.Q_hat = 0.5 * (Qh + Qh.transpose());
  return u;
}

double limited_h2_norm_squared(const StateSpaceModel &model, const LimitedGramians &full)
{
  return (model.C() * full.P * model.C().transpose()).trace();
}

H2ErrorDetail limited_h2_error_detail(const StateSpaceModel &model, const AugmentedIO &aug,
                                      const LimitedGramians &full, const StateSpaceModel &rom,
                                      const LimitSpec &limit)
{
  const AugmentedIO rom_aug = augmented_io(rom, limit);
  const GramianSet g = cross_gramians(model, aug, rom, rom_aug, limit);
  const Mat &B = model.B(), &C = model.C(), &Bh = rom.B(), &Ch = rom.C();

  const double p1 = (C * full.P * C.transpose()).trace();
  const double p2 = (C * g.P_bar * Ch.transpose()).trace();
  const double p3 = (Ch * g.P_hat * Ch.transpose()).trace();
  const double q1 = (B.transpose() * full.Q * B).trace();
  const double q2 = (B.transpose() * g.Q_bar * Bh).trace();
  const double q3 = (Bh.transpose() * g.Q_hat * Bh).trace();

  H2ErrorDetail d;
  d.p_form = p1 - 2.0 * p2 + p3;
  d.q_form = q1 - 2.0 * q2 + q3;
  d.scale = std::max({std::abs(p1) + 2.0 * std::abs(p2) + std::abs(p3),
                      std::abs(q1) + 2.0 * std::abs(q2) + std::abs(q3), 1e-300});
  if (std::abs(d.p_form - d.q_form) > 1e-8 * d.scale)
  {
    std::ostringstream os;
    os << "trace forms disagree: P-form " << d.p_form << ", Q-form " << d.q_form << " (scale "
       << d.scale << ")";
    throw Error(ErrorCode::NumericalFailure, os.str());
  }
  const double sq = 0.5 * (d.p_form + d.q_form);
  if (sq < -1e-10 * std::max(1.0, d.scale))
  {
    std::ostringstream os;
    os << "squared limited H2 error is " << sq;
    throw Error(ErrorCode::NegativeTrace, os.str());
  }
  d.squared = std::max(sq, 0.0);
  d.norm = std::sqrt(d.squared);
  return d;
}

double limited_h2_error(const StateSpaceModel &model, const StateSpaceModel &rom,
                        const LimitSpec &limit)
{
  const AugmentedIO aug = augmented_io(model, limit);
  return limited_h2_error_detail(model, aug, limited_gramians(model, aug, limit), rom, limit).norm;
}

double limited_h2_error_oracle(const StateSpaceModel &model, const StateSpaceModel &rom,
                               const LimitSpec &limit, const OracleResolution &res)
{
  check_pair(model, rom);
  const StateSpaceModel err = error_system(model, rom);
  const Mat &Ce = err.C();
  const Mat &Be = err.B();

  if (limit.is_frequency())
  {
    const FrequencyBand band = limit.band();
    const CMat Bc = Be.cast<cplx>();
    const CMat Cc = Ce.cast<cplx>();
    auto f = [&](double v) {
      const CMat E = Cc * err.schur().shifted_solve(cplx(0.0, v), Bc);
      return E.squaredNorm();
    };
    std::vector<double> cuts{band.w1, band.w2};
    const CVec lam = err.schur().eigenvalues();
    for (Eigen::Index i = 0; i < lam.size(); ++i)
    {
      const double w = std::abs(lam(i).imag());
      if (w > band.w1 && w < band.w2) cuts.push_back(w);
    }
    std::sort(cuts.begin(), cuts.end());
    // Conjugate pairs give cut points that agree only to rounding.
    const double merge = 1e-10 * band.w2;
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [merge](double a, double b) { return b - a <= merge; }),
               cuts.end());
    cuts.back() = band.w2;
    double total = 0.0, err_est = 0.0, l1 = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
    {
      if (cuts[k + 1] - cuts[k] <= 0.0) continue;
      double e = 0.0, piece_l1 = 0.0;
      total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, cuts[k], cuts[k + 1], res.max_depth, res.rel_tol * 0.1, &e, &piece_l1);
      err_est += e;
      l1 += piece_l1;
    }
    if (err_est > res.rel_tol * std::max(l1, 1e-300))
    {
      std::ostringstream os;
      os << "band quadrature error estimate " << err_est << " exceeds tolerance on integral "
         << l1;
      throw Error(ErrorCode::ResolutionTooCoarse, os.str());
    }
    return total / kPi;
  }

  const TimeWindow w = limit.window();
  if (res.panels < 1) throw Error(ErrorCode::InvalidArgument, "oracle needs at least one panel");
  const double h = (w.t2 - w.t1) / res.panels;

  // Gauss-Legendre rules on [0, h] as (offset, weight) pairs.
  auto rule = [h](const auto &abscissa, const auto &weights) {
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < abscissa.size(); ++i)
    {
      const double x = abscissa[i], wt = weights[i];
      out.emplace_back(0.5 * h * (1.0 + x), 0.5 * h * wt);
      if (x != 0.0) out.emplace_back(0.5 * h * (1.0 - x), 0.5 * h * wt);
    }
    return out;
  };
  using G10 = boost::math::quadrature::gauss<double, 10>;
  using G7 = boost::math::quadrature::gauss<double, 7>;
  const auto fine = rule(G10::abscissa(), G10::weights());
  const auto coarse = rule(G7::abscissa(), G7::weights());

  auto node_maps = [&](const std::vector<std::pair<double, double>> &nodes) {
    std::vector<Mat> maps;
    for (const auto &[off, wt] : nodes) maps.push_back(Ce * matrix_exponential(err.A(), off));
    return maps;
  };
  const std::vector<Mat> fine_maps = node_maps(fine);
  const std::vector<Mat> coarse_maps = node_maps(coarse);
  const Mat step = matrix_exponential(err.A(), h);

  Mat X = matrix_exponential(err.A(), w.t1) * Be;
  double sum_fine = 0.0, sum_coarse = 0.0;
  for (int k = 0; k < res.panels; ++k)
  {
    for (std::size_t i = 0; i < fine.size(); ++i)
      sum_fine += fine[i].second * (fine_maps[i] * X).squaredNorm();
    for (std::size_t i = 0; i < coarse.size(); ++i)
      sum_coarse += coarse[i].second * (coarse_maps[i] * X).squaredNorm();
    X = step * X;
  }
  if (std::abs(sum_fine - sum_coarse) > res.rel_tol * std::max(std::abs(sum_fine), 1e-300))
  {
    std::ostringstream os;
    os << "window quadrature rules differ by " << std::abs(sum_fine - sum_coarse) << " on "
       << sum_fine << "; increase panels";
    throw Error(ErrorCode::ResolutionTooCoarse, os.str());
  }
  return sum_fine;
}

ApproxGramians approx_gramians(const Mat &P_hat, const Mat &Q_hat, const Mat &V, const Mat &W)
{
  if (V.cols() != P_hat.rows() || W.cols() != Q_hat.rows() || V.rows() != W.rows() ||
      P_hat.rows() != P_hat.cols() || Q_hat.rows() != Q_hat.cols())
  {
    throw Error(ErrorCode::DimensionMismatch, "approx_gramians shapes are inconsistent");
  }
  return ApproxGramians{FactoredGramian{V, P_hat}, FactoredGramian{W, Q_hat}};
}

}  // namespace limor

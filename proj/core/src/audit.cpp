// Copyright The limor Authors.
// SPDX-License-Identifier: Apache-2.0

#include "limor/audit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "limor/error.hpp"

namespace limor
{

namespace
{

constexpr double kPi = 3.14159265358979323846;
constexpr double kFloor = 1e-300;

double max_ratio(const std::vector<double> &num, const std::vector<double> &den)
{
  double worst = 0.0;
  for (std::size_t i = 0; i < num.size(); ++i) worst = std::max(worst, num[i] / std::max(den[i], kFloor));
  return worst;
}

struct AuditGramians
{
  GramianSet lim;
  UnlimitedObservability unlim;
  AugmentedIO rom_aug;
};

AuditGramians audit_gramians(const LimitedProblem &problem, const StateSpaceModel &rom)
{
  AuditGramians g;
  g.rom_aug = augmented_io(rom, problem.limit);
  g.lim = cross_gramians(problem.model, problem.aug, rom, g.rom_aug, problem.limit);
  g.unlim = unlimited_observability(problem.model, rom);
  return g;
}

// Z term of the (a1)/(b1) residual.
Mat z_term(const LimitedProblem &problem, const StateSpaceModel &rom, const AuditGramians &g)
{
  const Mat &B = problem.model.B();
  const Mat &Ah = rom.A(), &Bh = rom.B();
  const Mat &Qb = g.unlim.Q_bar, &Qh = g.unlim.Q_hat;
  const Eigen::Index r = rom.states(), m = problem.model.inputs();
  if (problem.limit.is_frequency())
  {
    const Mat E = (Qb.transpose() * B - Qh * Bh) * Bh.transpose();
    auto edge = [&](double w) -> Mat {
      if (w == 0.0) return Mat::Zero(r, r);
      CMat M = -Ah.transpose().cast<cplx>();
      M.diagonal().array() += cplx(0.0, w);
      const CMat L = logm_frechet(M, E.cast<cplx>());
      return (cplx(0.0, 1.0 / kPi) * L).real();
    };
    return edge(problem.limit.band().w2) - edge(problem.limit.band().w1);
  }
  const TimeWindow &w = problem.limit.window();
  // e^{A t} B from the augmented input: B_aug = [e^{A t1} B, -e^{A t2} B].
  auto edge = [&](double t, const Mat &eAtB) -> Mat {
    if (t == 0.0) return Mat::Zero(r, r);
    const Mat inner = Qh * matrix_exponential(Ah, t) * Bh * Bh.transpose() -
                      Qb.transpose() * eAtB * Bh.transpose();
    return expm_frechet(Mat(Ah.transpose() * t), Mat(t * inner));
  };
  const Mat e1 = problem.aug.B_aug.leftCols(m);
  const Mat e2 = -problem.aug.B_aug.rightCols(m);
  return edge(w.t2, e2) - edge(w.t1, e1);
}

Mat residual_a1(const LimitedProblem &problem, const StateSpaceModel &rom, const AuditGramians &g)
{
  return g.unlim.Q_bar.transpose() * g.lim.P_bar - g.unlim.Q_hat * g.lim.P_hat +
         z_term(problem, rom, g);
}

double mat_cond(const Mat &M)
{
  Eigen::JacobiSVD<Mat> svd(M);
  const Vec &s = svd.singularValues();
  return s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : std::numeric_limits<double>::infinity();
}

WilsonForm wilson_impl(const LimitedProblem &problem, const StateSpaceModel &rom,
                       const AuditGramians &g)
{
  WilsonForm out;
  out.original = residual_a1(problem, rom, g);
  const Mat Z = z_term(problem, rom, g);
  const Mat &Qb = g.unlim.Q_bar, &Qh = g.unlim.Q_hat;
  const Mat &Pb = g.lim.P_bar, &Ph = g.lim.P_hat;
  Mat expected;
  if (problem.limit.is_frequency())
  {
    const FrequencyBand &band = problem.limit.band();
    const Mat Fh = freq_log_gain(rom.A(), band);
    if (mat_cond(Fh) > 1e12)
    {
      throw Error(ErrorCode::RankDeficientF, "F[Ahat] is numerically singular");
    }
    const Mat FhT = freq_log_gain(Mat(rom.A().transpose()), band);
    out.X = FhT * Z - Qb.transpose() * (problem.limit_fn * Pb) + Qh * Fh * Ph;
    expected = FhT * out.original;
  }
  else
  {
    const TimeWindow &w = problem.limit.window();
    const Mat &Ah = rom.A();
    auto shifted = [&](double t) -> Mat {
      // e^{Ahat^T t} Qbar^T e^{A t} Pbar - e^{Ahat^T t} Qhat e^{Ahat t} Phat
      if (t == 0.0) return Qb.transpose() * Pb - Qh * Ph;
      const Mat eAh = matrix_exponential(Ah, t);
      const Mat eAPb = (t == w.t2 ? problem.limit_fn : matrix_exponential(problem.model.A(), t)) * Pb;
      return eAh.transpose() * (Qb.transpose() * eAPb) - eAh.transpose() * Qh * eAh * Ph;
    };
    out.X = Z + (Qb.transpose() * Pb - Qh * Ph) - shifted(w.t1) + shifted(w.t2);
    expected = out.original;
  }
  out.rewritten = g.lim.Q_bar.transpose() * Pb - g.lim.Q_hat * Ph + out.X;
  out.residual = out.rewritten.norm();
  out.scale = std::max((g.lim.Q_bar.transpose() * Pb).norm() + (g.lim.Q_hat * Ph).norm() +
                         out.X.norm(),
                       kFloor);
  out.identity_gap = (out.rewritten - expected).norm() / out.scale;
  return out;
}

}  // namespace

double InterpolationResiduals::max_relative_right() const { return max_ratio(right, right_scale); }
double InterpolationResiduals::max_relative_left() const { return max_ratio(left, left_scale); }
double InterpolationResiduals::max_relative_hermite() const
{
  return max_ratio(hermite, hermite_scale);
}

double OptimalityReport::relative_B() const { return res_B / std::max(scale_B, kFloor); }
double OptimalityReport::relative_C() const { return res_C / std::max(scale_C, kFloor); }
double OptimalityReport::relative_A() const { return res_A / std::max(scale_A, kFloor); }

double spectral_norm(const Mat &M)
{
  if (M.size() == 0) return 0.0;
  if (std::min(M.rows(), M.cols()) <= 300)
  {
    Eigen::BDCSVD<Mat> svd(M);
    return svd.singularValues()(0);
  }
  Vec x = Vec::Ones(M.cols()).normalized();
  double sigma = 0.0;
  for (int it = 0; it < 1000; ++it)
  {
    Vec y = M.transpose() * (M * x);
    const double ny = y.norm();
    if (ny == 0.0) return 0.0;
    const double next = std::sqrt(ny);
    x = y / ny;
    if (std::abs(next - sigma) <= 1e-12 * next) return next;
    sigma = next;
  }
  return sigma;
}

double f_deviation(const LimitedProblem &problem, const StateSpaceModel &rom,
                   const ProjectionPair &pair)
{
  const Mat fh = limit_function(rom, problem.limit);
  return spectral_norm(problem.limit_fn - pair.V * fh * pair.W.transpose());
}

Mat gradient_residual(const LimitedProblem &problem, const StateSpaceModel &rom)
{
  return residual_a1(problem, rom, audit_gramians(problem, rom));
}

WilsonForm wilson_form(const LimitedProblem &problem, const StateSpaceModel &rom)
{
  return wilson_impl(problem, rom, audit_gramians(problem, rom));
}

OptimalityReport gramian_conditions(const LimitedProblem &problem, const StateSpaceModel &rom,
                                    const ProjectionPair *pair)
{
  const StateSpaceModel &model = problem.model;
  const AuditGramians g = audit_gramians(problem, rom);
  OptimalityReport rep;
  rep.CP_bar = model.C() * g.lim.P_bar;
  rep.CP_hat = rom.C() * g.lim.P_hat;
  rep.QB_bar = g.lim.Q_bar.transpose() * model.B();
  rep.QB_hat = g.lim.Q_hat * rom.B();
  rep.res_C = (rep.CP_bar - rep.CP_hat).norm();
  rep.scale_C = rep.CP_bar.norm();
  rep.res_B = (rep.QB_bar - rep.QB_hat).norm();
  rep.scale_B = rep.QB_bar.norm();

  const WilsonForm wf = wilson_impl(problem, rom, g);
  rep.res_A = wf.original.norm();
  rep.scale_A = (g.unlim.Q_bar.transpose() * g.lim.P_bar).norm();
  rep.wilson_res = wf.residual;
  rep.scale_wilson = wf.scale;
  rep.identity_gap = wf.identity_gap;

  if (pair) rep.f_deviation = f_deviation(problem, rom, *pair);
  try
  {
    rep.interpolation = interpolation_residuals(problem, rom);
  }
  catch (const Error &e)
  {
    if (e.code() != ErrorCode::RepeatedPoles) throw;
  }
  return rep;
}

InterpolationResiduals interpolation_residuals(const LimitedProblem &problem,
                                               const StateSpaceModel &rom)
{
  const StateSpaceModel &model = problem.model;
  const PoleResidueForm pr = pole_residue(rom);
  const AugmentedIO rom_aug = augmented_io(rom, problem.limit);
  const Eigen::Index m = model.inputs(), p = model.outputs();
  InterpolationResiduals out;
  out.poles = pr.poles;
  const CMat Cm = model.C().cast<cplx>(), Cr = rom.C().cast<cplx>();
  const CMat Bm = model.B().cast<cplx>(), Br = rom.B().cast<cplx>();
  const CMat BmAug = problem.aug.B_aug.cast<cplx>(), BrAug = rom_aug.B_aug.cast<cplx>();
  const CMat CmAug = problem.aug.C_aug.cast<cplx>(), CrAug = rom_aug.C_aug.cast<cplx>();
  for (Eigen::Index i = 0; i < pr.poles.size(); ++i)
  {
    const cplx s = -pr.poles(i);
    const CVec r = pr.right.col(i);
    const CVec l = pr.left.col(i);
    const SurrogateValue T = surrogate_eval(model, problem.aug, problem.limit, s);
    const SurrogateValue Th = surrogate_eval(rom, rom_aug, problem.limit, s);
    const CVec Tr = T.value * r, Thr = Th.value * r;
    const CVec lT = T.value.transpose() * l, lTh = Th.value.transpose() * l;
    out.right.push_back((Tr - Thr).norm());
    out.right_scale.push_back(Tr.norm());
    out.left.push_back((lT - lTh).norm());
    out.left_scale.push_back(lT.norm());
    const cplx h = l.transpose() * T.derivative * r;
    const cplx hh = l.transpose() * Th.derivative * r;
    out.hermite.push_back(std::abs(h - hh));
    out.hermite_scale.push_back(std::abs(h));

    // Augmented forms: G_aug(s) rbar and (l_aug^T H_aug(s)) with the weighted directions.
    const CVec rbar = surrogate_weight(problem.limit, m, s) * r;
    const CVec lbar = surrogate_weight(problem.limit, p, s) * l;
    const CVec ga = Cm * model.schur().shifted_solve(s, BmAug * rbar);
    const CVec gha = Cr * rom.schur().shifted_solve(s, BrAug * rbar);
    out.aug_right.push_back((ga - gha).norm());
    const CVec ha = Bm.transpose() * model.schur().shifted_solve(s, CmAug.transpose() * lbar, Op::Transpose);
    const CVec hha = Br.transpose() * rom.schur().shifted_solve(s, CrAug.transpose() * lbar, Op::Transpose);
    out.aug_left.push_back((ha - hha).norm());
  }
  return out;
}

EquivalenceReport equivalence_report(const LimitedProblem &problem, const StateSpaceModel &rom)
{
  const StateSpaceModel &model = problem.model;
  const PoleResidueForm pr = pole_residue(rom);
  const AuditGramians g = audit_gramians(problem, rom);
  const CMat R = pr.eigenvectors;
  const Eigen::PartialPivLU<CMat> lu(R);
  // X R^{-T} = (R^{-1} X^T)^T
  auto times_inv_t = [&](const Mat &X) -> CMat {
    return lu.solve(X.transpose().cast<cplx>()).transpose();
  };
  const Mat CPb = model.C() * g.lim.P_bar;
  const Mat CPh = rom.C() * g.lim.P_hat;
  const CMat Mc = times_inv_t(CPb - CPh);
  const CMat Mc_minuend = times_inv_t(CPb);
  const Mat BQb = model.B().transpose() * g.lim.Q_bar;
  const Mat BQh = rom.B().transpose() * g.lim.Q_hat;
  const CMat Mb = (BQb - BQh).cast<cplx>() * R;
  const CMat Mb_minuend = BQb.cast<cplx>() * R;

  CMat Nc(Mc.rows(), Mc.cols()), Nb(Mb.rows(), Mb.cols());
  const AugmentedIO rom_aug = g.rom_aug;
  for (Eigen::Index i = 0; i < pr.poles.size(); ++i)
  {
    const cplx s = -pr.poles(i);
    const SurrogateValue T = surrogate_eval(model, problem.aug, problem.limit, s);
    const SurrogateValue Th = surrogate_eval(rom, rom_aug, problem.limit, s);
    Nc.col(i) = (T.value - Th.value) * pr.right.col(i);
    Nb.col(i) = (T.value - Th.value).transpose() * pr.left.col(i);
  }
  EquivalenceReport rep;
  rep.scale_C = std::max(Mc_minuend.norm(), kFloor);
  rep.scale_B = std::max(Mb_minuend.norm(), kFloor);
  rep.gram_C = Mc.norm();
  rep.interp_C = Nc.norm();
  rep.gram_B = Mb.norm();
  rep.interp_B = Nb.norm();
  rep.column_gap_C = (Mc - Nc).norm() / rep.scale_C;
  rep.column_gap_B = (Mb - Nb).norm() / rep.scale_B;
  rep.norm_gap_C = std::abs(rep.gram_C - rep.interp_C) / rep.scale_C;
  rep.norm_gap_B = std::abs(rep.gram_B - rep.interp_B) / rep.scale_B;
  return rep;
}

}  // namespace limor

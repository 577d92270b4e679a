// Copyright The limor Authors.
// SPDX-License-Identifier: Apache-2.0

#include "limor/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "limor/error.hpp"

namespace limor
{

namespace
{

constexpr double kCondLimit = 1e12;

double condition_number(const Mat &M)
{
  if (M.size() == 0) return 1.0;
  Eigen::JacobiSVD<Mat> svd(M);
  const Vec &s = svd.singularValues();
  return s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : std::numeric_limits<double>::infinity();
}

// Real form of tangential data: columns x_i with (sigma_i I - A) x_i = G w_i (A^T on the output
// side) become X with A X = X Sigma + G L, conjugate pairs split into real and imaginary parts.
struct RealTangential
{
  Mat X;
  Mat Sigma;
  Mat L;
};

RealTangential real_tangential(const CMat &raw, const CVec &shifts, const CMat &weighted)
{
  const Eigen::Index r = shifts.size();
  RealTangential t{Mat(raw.rows(), r), Mat::Zero(r, r), Mat(weighted.rows(), r)};
  std::vector<bool> done(r, false);
  for (Eigen::Index i = 0; i < r; ++i)
  {
    if (done[i]) continue;
    const cplx s = shifts(i);
    const double tol = 1e-8 * std::max(1.0, std::abs(s));
    done[i] = true;
    if (std::abs(s.imag()) <= tol)
    {
      t.X.col(i) = raw.col(i).real();
      t.Sigma(i, i) = s.real();
      t.L.col(i) = -weighted.col(i).real();
      continue;
    }
    Eigen::Index j = i + 1;
    while (j < r && (done[j] || std::abs(shifts(j) - std::conj(s)) > tol)) ++j;
    if (j == r) throw Error(ErrorCode::NotConjugateClosed, "shift has no conjugate partner");
    done[j] = true;
    t.X.col(i) = raw.col(i).real();
    t.X.col(j) = raw.col(i).imag();
    t.Sigma(i, i) = t.Sigma(j, j) = s.real();
    t.Sigma(i, j) = s.imag();
    t.Sigma(j, i) = -s.imag();
    t.L.col(i) = -weighted.col(i).real();
    t.L.col(j) = -weighted.col(i).imag();
  }
  return t;
}

// A reduced gramian of the tangential basis X = Xo R expressed in the orthonormal basis Xo.
Mat orthonormal_coordinates(const Mat &M, const Mat &R)
{
  const auto U = R.triangularView<Eigen::Upper>();
  const Mat left = U.transpose().solve(M);                           // R^{-T} M
  return U.transpose().solve(Mat(left.transpose())).transpose();     // R^{-T} M R^{-1}
}

CVec sorted_poles(const Mat &A)
{
  Eigen::EigenSolver<Mat> es(A, false);
  CVec lam = es.eigenvalues();
  std::sort(lam.data(), lam.data() + lam.size(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return lam;
}

double relative_change(const CVec &now, const CVec &before)
{
  if (now.size() == 0) return 0.0;
  const double scale = std::max(before.cwiseAbs().maxCoeff(), 1e-300);
  return (now - before).cwiseAbs().maxCoeff() / scale;
}

// Tracks convergence and stagnation of an iteration.
class Monitor
{
public:
  Monitor(const ConvergenceControl &c, ReductionResult &out) : c_(c), out_(out)
  {
    if (c.max_iterations < 1)
      throw Error(ErrorCode::InvalidArgument, "max_iterations must be positive");
    if (!(c.shift_tolerance >= 0.0))
      throw Error(ErrorCode::InvalidArgument, "shift_tolerance must be non-negative");
  }

  // Returns true when the iteration should stop.
  bool record(double change)
  {
    out_.iterations += 1;
    out_.shift_change = change;
    out_.change_history.push_back(change);
    if (change < c_.shift_tolerance)
    {
      out_.converged = true;
      return true;
    }
    if (change < best_)
    {
      best_ = change;
      since_best_ = 0;
    }
    else if (c_.stagnation_window > 0 && ++since_best_ >= c_.stagnation_window)
    {
      out_.stagnated = true;
      return true;
    }
    return out_.iterations >= c_.max_iterations;
  }

private:
  const ConvergenceControl &c_;
  ReductionResult &out_;
  double best_ = std::numeric_limits<double>::infinity();
  int since_best_ = 0;
};

void check_order(const LimitedProblem &problem, Eigen::Index r)
{
  if (r < 1 || r >= problem.model.states())
  {
    std::ostringstream os;
    os << "reduced order " << r << " must lie in [1, " << problem.model.states() - 1 << "]";
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
}

void check_rom(const LimitedProblem &problem, const StateSpaceModel &rom)
{
  if (rom.inputs() != problem.model.inputs() || rom.outputs() != problem.model.outputs())
  {
    throw Error(ErrorCode::DimensionMismatch, "initial ROM has different I/O sizes than the model");
  }
  check_order(problem, rom.states());
}

// e^{-S t} for the time-window weights; identity at t = 0.
Mat window_weight(const Mat &S, double t)
{
  return t == 0.0 ? Mat(Mat::Identity(S.rows(), S.cols())) : matrix_exponential(-S, t);
}

}  // namespace

const char *algorithm_name(Algorithm a)
{
  switch (a)
  {
    case Algorithm::FLITIA: return "flitia";
    case Algorithm::TLITIA: return "tlitia";
    case Algorithm::FLHMOR: return "flhmor";
    case Algorithm::TLHMOR: return "tlhmor";
    case Algorithm::FLPORK: return "flpork";
    case Algorithm::TLPORK: return "tlpork";
    case Algorithm::FLTSIA: return "fltsia";
    case Algorithm::TLIRKA: return "tlirka";
    case Algorithm::FLBT: return "flbt";
    case Algorithm::TLBT: return "tlbt";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string &name)
{
  for (Algorithm a : {Algorithm::FLITIA, Algorithm::TLITIA, Algorithm::FLHMOR, Algorithm::TLHMOR,
                      Algorithm::FLPORK, Algorithm::TLPORK, Algorithm::FLTSIA, Algorithm::TLIRKA,
                      Algorithm::FLBT, Algorithm::TLBT})
  {
    if (name == algorithm_name(a)) return a;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown algorithm '" + name + "'");
}

bool is_frequency_algorithm(Algorithm a)
{
  switch (a)
  {
    case Algorithm::FLITIA:
    case Algorithm::FLHMOR:
    case Algorithm::FLPORK:
    case Algorithm::FLTSIA:
    case Algorithm::FLBT:
      return true;
    default:
      return false;
  }
}

LimitedProblem make_problem(const StateSpaceModel &model, const LimitSpec &limit)
{
  if (!model.is_stable())
  {
    throw Error(ErrorCode::UnstableMatrix, "model to be reduced must be asymptotically stable");
  }
  Mat fn = limit_function(model, limit);
  AugmentedIO aug = augmented_io(model, limit, fn);
  return LimitedProblem{model, limit, std::move(aug), std::move(fn)};
}

InterpolationData mirrored_data(const StateSpaceModel &rom)
{
  const PoleResidueForm pr = pole_residue(rom);
  InterpolationData d;
  const Eigen::Index r = pr.poles.size();
  d.shifts.resize(r);
  d.right = pr.right;
  d.left = pr.left;
  for (Eigen::Index i = 0; i < r; ++i)
  {
    cplx lam = pr.poles(i);
    if (lam.real() >= 0.0) lam = -std::conj(lam);
    d.shifts(i) = -lam;
  }
  // Exact conjugate symmetry for pairs (adjacent after sorting).
  for (Eigen::Index i = 0; i + 1 < r; ++i)
  {
    if (pr.poles(i).imag() < 0.0 && pr.poles(i + 1) == std::conj(pr.poles(i)))
    {
      d.shifts(i + 1) = std::conj(d.shifts(i));
      d.right.col(i + 1) = d.right.col(i).conjugate();
      d.left.col(i + 1) = d.left.col(i).conjugate();
      ++i;
    }
    else if (pr.poles(i).imag() == 0.0)
    {
      d.right.col(i) = d.right.col(i).real().cast<cplx>();
      d.left.col(i) = d.left.col(i).real().cast<cplx>();
    }
  }
  if (r > 0 && pr.poles(r - 1).imag() == 0.0)
  {
    d.right.col(r - 1) = d.right.col(r - 1).real().cast<cplx>();
    d.left.col(r - 1) = d.left.col(r - 1).real().cast<cplx>();
  }
  return d;
}

StateSpaceModel random_stable_model(Eigen::Index r, Eigen::Index m, Eigen::Index p,
                                    std::uint64_t seed, double scale)
{
  if (r < 1 || m < 1 || p < 1 || !(scale > 0.0))
  {
    throw Error(ErrorCode::InvalidArgument, "random model needs positive sizes and scale");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> re(0.05, 1.0), im(0.1, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat A = Mat::Zero(r, r);
  Eigen::Index i = 0;
  if (r % 2 == 1)
  {
    A(0, 0) = -scale * re(rng);
    i = 1;
  }
  for (; i + 1 < r; i += 2)
  {
    const double a = scale * re(rng), b = scale * im(rng);
    A(i, i) = -a;
    A(i, i + 1) = b;
    A(i + 1, i) = -b;
    A(i + 1, i + 1) = -a;
  }
  Mat B(r, m), C(p, r);
  for (Eigen::Index k = 0; k < B.size(); ++k) B.data()[k] = gauss(rng);
  for (Eigen::Index k = 0; k < C.size(); ++k) C.data()[k] = gauss(rng);
  return StateSpaceModel(std::move(A), std::move(B), std::move(C), true);
}

ReductionResult itia(const LimitedProblem &problem, const InterpolationData &init,
                     const ConvergenceControl &control)
{
  const StateSpaceModel &model = problem.model;
  check_order(problem, init.size());
  ReductionResult out;
  Monitor monitor(control, out);
  InterpolationData data = init;
  CVec shifts = init.shifts;
  std::sort(shifts.data(), shifts.data() + shifts.size(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  for (;;)
  {
    const Mat Vr = realify(tangential_basis(model, problem.aug, problem.limit, data, Side::Input));
    const Mat Wr = realify(tangential_basis(model, problem.aug, problem.limit, data, Side::Output));
    out.pair = biorth_gram_schmidt(Vr, Wr);
    out.rom = project(model, out.pair);
    data = mirrored_data(out.rom);
    CVec next = data.shifts;
    std::sort(next.data(), next.data() + next.size(), [](cplx a, cplx b) {
      return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    const double change = relative_change(next, shifts);
    shifts = next;
    if (monitor.record(change)) break;
  }
  return out;
}

ReductionResult hmor(const LimitedProblem &problem, const StateSpaceModel &init,
                     const ConvergenceControl &control)
{
  check_rom(problem, init);
  ReductionResult out;
  Monitor monitor(control, out);
  StateSpaceModel rom = init;
  CVec poles = sorted_poles(rom.A());
  for (;;)
  {
    const GramianSet g =
      cross_gramians(problem.model, problem.aug, rom, augmented_io(rom, problem.limit), problem.limit);
    if (condition_number(g.P_hat) > kCondLimit || condition_number(g.Q_hat) > kCondLimit)
    {
      throw Error(ErrorCode::SingularReducedGramian,
                  "reduced limited gramian condition number exceeds 1e12");
    }
    const Mat V = g.P_hat.transpose().partialPivLu().solve(g.P_bar.transpose()).transpose();
    const Mat W = g.Q_hat.transpose().partialPivLu().solve(g.Q_bar.transpose()).transpose();
    out.pair = biorth_gram_schmidt(V, W);
    rom = project(problem.model, out.pair);
    out.rom = rom;
    const CVec next = sorted_poles(rom.A());
    const double change = relative_change(next, poles);
    poles = next;
    if (monitor.record(change)) break;
  }
  return out;
}

ReductionResult pork(const LimitedProblem &problem, const InterpolationData &data, Side side)
{
  const StateSpaceModel &model = problem.model;
  const Eigen::Index r = data.size();
  check_order(problem, r);
  const bool band = problem.limit.is_frequency();
  const bool input = side == Side::Input;

  const CMat raw = tangential_basis(model, problem.aug, problem.limit, data, side);
  const Eigen::Index k = input ? model.inputs() : model.outputs();
  CMat weighted(2 * k, r);
  for (Eigen::Index i = 0; i < r; ++i)
  {
    const CVec dir = input ? CVec(data.right.col(i)) : CVec(data.left.col(i));
    weighted.col(i) = surrogate_weight(problem.limit, k, data.shifts(i)) * dir;
  }
  const RealTangential t = real_tangential(raw, data.shifts, weighted);
  const Mat basis = orthonormal_basis(t.X, r);

  // The least-squares fit of the augmented term must be well posed.
  const Mat G = input ? problem.aug.B_aug : Mat(problem.aug.C_aug.transpose());
  const Mat Gperp = G - basis * (basis.transpose() * G);
  if (condition_number(Gperp.transpose() * Gperp) > kCondLimit)
  {
    throw Error(ErrorCode::IllConditionedNormalEquations,
                input ? "projected augmented input matrix is numerically rank deficient"
                      : "projected augmented output matrix is numerically rank deficient");
  }

  // In the tangential basis X (A X = X Sigma + G L, resp. A^T), the projected shift matrix and
  // the least-squares coefficient are the realified interpolation data exactly.
  const Mat S = input ? t.Sigma : Mat(t.Sigma.transpose());
  const Mat L = input ? t.L : Mat(t.L.transpose());

  Mat Lhat, L1, L2;
  if (band)
  {
    Lhat = input ? Mat(L.bottomRows(k)) : Mat(L.rightCols(k));
    L1 = Lhat;
    const Mat F = freq_log_gain(Mat(-S), problem.limit.band());
    L2 = input ? Mat(Lhat * F) : Mat(F * Lhat);
  }
  else
  {
    const TimeWindow &w = problem.limit.window();
    Lhat = input ? Mat(L.topRows(k)) : Mat(L.leftCols(k));
    if (w.t1 != 0.0)
    {
      const Mat E = matrix_exponential(S, w.t1);
      Lhat = input ? Mat(Lhat * E) : Mat(E * Lhat);
    }
    L1 = input ? Mat(Lhat * window_weight(S, w.t1)) : Mat(window_weight(S, w.t1) * Lhat);
    L2 = input ? Mat(Lhat * window_weight(S, w.t2)) : Mat(window_weight(S, w.t2) * Lhat);
  }

  ReductionResult out;
  out.converged = true;
  const Eigen::HouseholderQR<Mat> qr(t.X);
  const Mat R = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  const Mat Xo = qr.householderQ() * Mat::Identity(t.X.rows(), r);  // X = Xo R
  if (input)
  {
    const Mat rhs = band ? Mat(L1.transpose() * L2 + L2.transpose() * L1)
                         : Mat(L1.transpose() * L1 - L2.transpose() * L2);
    Mat Q = solve_sylvester(Mat(-S.transpose()), Mat(-S), rhs);
    Q = 0.5 * (Q + Q.transpose());
    if (condition_number(orthonormal_coordinates(Q, R)) > kCondLimit)
    {
      throw Error(ErrorCode::SingularReducedGramian, "reduced gramian is numerically singular");
    }
    // (-Q^{-1} S^T Q, -Q^{-1} Lhat^T, C X) in the realization scaled by Q: the poles are then
    // exactly -eig(S) however poorly conditioned Q is.
    const auto lu = Q.partialPivLu();
    const Mat Xq = lu.solve(t.X.transpose()).transpose();  // X Q^{-1}
    out.rom = StateSpaceModel(Mat(-S.transpose()), Mat(-Lhat.transpose()), model.C() * Xq, false);
    out.pair = ProjectionPair{Xq, Xo * R.transpose().partialPivLu().solve(Q)};
  }
  else
  {
    const Mat rhs = band ? Mat(L2 * L1.transpose() + L1 * L2.transpose())
                         : Mat(L1 * L1.transpose() - L2 * L2.transpose());
    Mat P = solve_sylvester(Mat(-S), Mat(-S.transpose()), rhs);
    P = 0.5 * (P + P.transpose());
    if (condition_number(orthonormal_coordinates(P, R)) > kCondLimit)
    {
      throw Error(ErrorCode::SingularReducedGramian, "reduced gramian is numerically singular");
    }
    // (-P S^T P^{-1}, X^T B, -Lhat^T P^{-1}) in the realization scaled by P^{-1}.
    const Mat Xp = P.partialPivLu().solve(t.X.transpose()).transpose();  // X P^{-1}
    out.rom = StateSpaceModel(Mat(-S.transpose()), Xp.transpose() * model.B(), Mat(-Lhat.transpose()), false);
    out.pair = ProjectionPair{Xo * R.transpose().partialPivLu().solve(P), Xp};
  }
  return out;
}

ReductionResult heuristic_iter(const LimitedProblem &problem, const StateSpaceModel &init,
                               const ConvergenceControl &control)
{
  check_rom(problem, init);
  const Eigen::Index r = init.states();
  ReductionResult out;
  Monitor monitor(control, out);
  StateSpaceModel rom = init;
  CVec poles = sorted_poles(rom.A());
  for (;;)
  {
    const GramianSet g =
      cross_gramians(problem.model, problem.aug, rom, augmented_io(rom, problem.limit), problem.limit);
    Mat V, W;
    if (problem.limit.is_frequency())
    {
      V = g.P_bar;
      W = g.Q_bar;
    }
    else
    {
      // Spectral weighting by the ROM eigenvectors; the realified span is kept.
      const SpectralFactorization sf = spectral_factorization(rom.A());
      const CMat Vc = g.P_bar.cast<cplx>() * sf.eigenvectors.adjoint().inverse();
      const CMat Wc = g.Q_bar.cast<cplx>() * sf.eigenvectors;
      Mat Vs(Vc.rows(), 2 * r), Ws(Wc.rows(), 2 * r);
      Vs << Vc.real(), Vc.imag();
      Ws << Wc.real(), Wc.imag();
      V = orthonormal_basis(Vs, r);
      W = orthonormal_basis(Ws, r);
    }
    const Mat VtW = V.transpose() * W;
    if (condition_number(VtW) > kCondLimit)
    {
      throw Error(ErrorCode::RankDeficient, "V^T W is numerically singular");
    }
    W = VtW.transpose().partialPivLu().solve(W.transpose()).transpose();  // W (V^T W)^{-1}
    out.pair = ProjectionPair{V, W};
    rom = project(problem.model, out.pair);
    out.rom = rom;
    const CVec next = sorted_poles(rom.A());
    const double change = relative_change(next, poles);
    poles = next;
    if (monitor.record(change)) break;
  }
  return out;
}

ReductionResult limited_bt(const LimitedProblem &problem, const LimitedGramians &gramians,
                           Eigen::Index order)
{
  check_order(problem, order);
  auto factor = [](const Mat &G) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (G + G.transpose()));
    if (es.info() != Eigen::Success)
      throw Error(ErrorCode::NumericalFailure, "symmetric eigensolver did not converge");
    // Negative eigenvalues are roundoff (the limited gramians are PSD); clip them.
    const Vec lam = es.eigenvalues().cwiseMax(0.0);
    return Mat(es.eigenvectors() * lam.cwiseSqrt().asDiagonal());
  };
  const Mat LP = factor(gramians.P);
  const Mat LQ = factor(gramians.Q);
  Eigen::JacobiSVD<Mat> svd(LQ.transpose() * LP, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec &s = svd.singularValues();
  const double tol = std::numeric_limits<double>::epsilon() * std::max(s(0), 1e-300) *
                     double(problem.model.states());
  if (order > s.size() || s(order - 1) <= tol)
  {
    std::ostringstream os;
    os << "only " << (s.array() > tol).count() << " Hankel-like singular values are nonzero, need "
       << order;
    throw Error(ErrorCode::RankCollapse, os.str());
  }
  const Vec sinv = s.head(order).cwiseSqrt().cwiseInverse();
  ReductionResult out;
  out.pair.V = LP * svd.matrixV().leftCols(order) * sinv.asDiagonal();
  out.pair.W = LQ * svd.matrixU().leftCols(order) * sinv.asDiagonal();
  out.rom = project(problem.model, out.pair);
  out.converged = true;
  return out;
}

ReductionResult limited_bt(const LimitedProblem &problem, Eigen::Index order)
{
  return limited_bt(problem, limited_gramians(problem.model, problem.aug, problem.limit), order);
}

double initial_pole_scale(const LimitedProblem &problem)
{
  if (problem.limit.is_frequency()) return std::max(problem.limit.band().w2, 1e-3);
  const CVec lam = problem.model.schur().eigenvalues();
  std::vector<double> mags(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) mags[i] = std::abs(lam(i));
  std::nth_element(mags.begin(), mags.begin() + mags.size() / 2, mags.end());
  return std::max(mags[mags.size() / 2], 1e-3);
}

ReductionResult reduce(const LimitedProblem &problem, const ReduceRequest &request)
{
  if (is_frequency_algorithm(request.algorithm) != problem.limit.is_frequency())
  {
    std::ostringstream os;
    os << algorithm_name(request.algorithm) << " needs a "
       << (is_frequency_algorithm(request.algorithm) ? "frequency band" : "time window");
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
  check_order(problem, request.order);
  auto start = [&]() {
    if (request.init)
    {
      if (request.init->states() != request.order)
      {
        std::ostringstream os;
        os << "initial ROM has order " << request.init->states() << ", requested "
           << request.order;
        throw Error(ErrorCode::DimensionMismatch, os.str());
      }
      return *request.init;
    }
    return random_stable_model(request.order, problem.model.inputs(), problem.model.outputs(),
                               request.seed, initial_pole_scale(problem));
  };
  switch (request.algorithm)
  {
    case Algorithm::FLITIA:
    case Algorithm::TLITIA:
      return itia(problem, mirrored_data(start()), request.control);
    case Algorithm::FLHMOR:
    case Algorithm::TLHMOR:
      return hmor(problem, start(), request.control);
    case Algorithm::FLPORK:
    case Algorithm::TLPORK:
      return pork(problem, mirrored_data(start()), request.pork_side);
    case Algorithm::FLTSIA:
    case Algorithm::TLIRKA:
      return heuristic_iter(problem, start(), request.control);
    case Algorithm::FLBT:
    case Algorithm::TLBT:
      return limited_bt(problem, request.order);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown algorithm");
}

}  // namespace limor

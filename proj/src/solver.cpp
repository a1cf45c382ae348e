#include "bslq/solver.hpp"

#include "bslq/oracle.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>

namespace bslq {
namespace {

double level_mean_dot(const Level& a, const Level& b) { return expect_dot(a, b); }

Eigen::PartialPivLU<Mat> lu_or_throw(const Mat& M, const std::string& what) {
  Eigen::PartialPivLU<Mat> lu(M);
  if (!(lu.rcond() > 1e-14))
    throw NumericalError(what + " numerically singular");
  return lu;
}

}  // namespace

AdaptedProcess solve_phi(const TreeProblem& tp, const TransformedCoefficients& tc,
                         const RiccatiSolution& rs) {
  AdaptedProcess phi;
  phi.dim = tp.n;
  phi.at.resize(static_cast<std::size_t>(tp.N) + 1);
  phi.at[static_cast<std::size_t>(tp.N)] = tp.xi;
  Mat I = Mat::Identity(tp.n, tp.n);
  for (int k = tp.N - 1; k >= 0; --k) {
    std::size_t ks = static_cast<std::size_t>(k);
    const Mat& Sn = rs.Sigma[ks + 1];
    auto theta_lu = lu_or_throw(rs.Theta[ks], "offset recursion: Theta_" + std::to_string(k));
    Eigen::LDLT<Mat> Rbf(tc.Rbar[ks]);
    // drift gain A (I - Sigma Theta^-1 Qbar) and offset gain A Sigma Theta^-1
    Mat drift_gain = tp.A[k] * (I - Sn * theta_lu.solve(tc.Qbar[ks]));
    Mat offset_gain = tp.A[k] * Sn * theta_lu.solve(I);
    auto [drift, mart] = cond_pair(phi.at[ks + 1]);
    Level& pk = phi.at[ks];
    pk.resize(tp.tree.atoms(k));
    for (std::size_t h = 0; h < pk.size(); ++h)
      pk[h] = drift_gain * drift[h] + tc.Cbar[ks] * mart[h] -
              offset_gain * tc.etabar[ks][h] - tp.B[k] * Rbf.solve(tc.rhobar[ks][h]) +
              tp.q[ks][h];
  }
  return phi;
}

double value_literal(const TreeProblem& tp, const TransformedCoefficients& tc,
                     const RiccatiSolution& rs, const AdaptedProcess& phi,
                     bool include_hqq) {
  Mat I = Mat::Identity(tp.n, tp.n);
  double total = 0.0;
  for (int k = 0; k < tp.N; ++k) {
    std::size_t ks = static_cast<std::size_t>(k);
    const Mat& Sn = rs.Sigma[ks + 1];
    auto theta_lu = lu_or_throw(rs.Theta[ks], "value: Theta_" + std::to_string(k));
    Eigen::LDLT<Mat> Rbf(tc.Rbar[ks]);
    Mat Qeff = tc.Qbar[ks] - tc.Qbar[ks] * Sn * theta_lu.solve(tc.Qbar[ks]);
    Mat SigTh = Sn * theta_lu.solve(I);
    const Level& p1 = phi.at[ks + 1];
    auto [p1m, p1z] = cond_pair(p1);
    (void)p1z;
    double step = 0.0;
    for (std::size_t h = 0; h < p1.size(); ++h) step += p1[h].dot(Qeff * p1[h]);
    step /= static_cast<double>(p1.size());
    double mids = 0.0;
    for (std::size_t h = 0; h < p1m.size(); ++h) {
      const Vec& eb = tc.etabar[ks][h];
      const Vec& rb = tc.rhobar[ks][h];
      mids += eb.dot(p1m[h]) - eb.dot(SigTh * eb) - rb.dot(Rbf.solve(rb));
      if (include_hqq) mids += tp.q[ks][h].dot(tc.H[ks] * tp.q[ks][h]);
    }
    total += step + mids / static_cast<double>(p1m.size());
  }
  {
    double term = 0.0;
    for (const Vec& v : tp.xi) term += v.dot(tc.H[static_cast<std::size_t>(tp.N)] * v);
    total += term / static_cast<double>(tp.xi.size());
  }
  const Vec& p0 = phi.at[0][0];
  auto g_lu = lu_or_throw(Mat(Mat::Identity(tp.n, tp.n) + tp.G0 * rs.Sigma[0]),
                          "value: I + G0 Sigma_0");
  total += p0.dot(g_lu.solve(tp.G0 * p0));
  return 0.5 * total;
}

ControlDecoupling solve_decoupling(const TreeProblem& tp) {
  ControlDecoupling cd;
  Mat I = Mat::Identity(tp.n, tp.n);
  cd.Sigma.assign(static_cast<std::size_t>(tp.N) + 1, Mat());
  cd.Sigma[static_cast<std::size_t>(tp.N)] = Mat::Zero(tp.n, tp.n);
  std::vector<Mat> Ab(static_cast<std::size_t>(tp.N));
  std::vector<Mat> Qb(static_cast<std::size_t>(tp.N));
  std::vector<Eigen::LDLT<Mat>> Rf(static_cast<std::size_t>(tp.N));
  for (int k = 0; k < tp.N; ++k) {
    std::size_t ks = static_cast<std::size_t>(k);
    Rf[ks].compute(tp.R[k]);
    if (Rf[ks].info() != Eigen::Success)
      throw NumericalError("decoupling: R_" + std::to_string(k) + " not factorizable");
    Ab[ks] = tp.A[k] - tp.B[k] * Rf[ks].solve(tp.S[k]);
    Mat q = tp.Q[k] - tp.S[k].transpose() * Rf[ks].solve(tp.S[k]);
    Qb[ks] = 0.5 * (q + q.transpose());
  }
  for (int k = tp.N - 1; k >= 0; --k) {
    std::size_t ks = static_cast<std::size_t>(k);
    const Mat& Sn = cd.Sigma[ks + 1];
    auto lu = lu_or_throw(Mat(I + Qb[ks] * Sn),
                          "decoupling: I + Qbar Sigma at step " + std::to_string(k));
    Mat Sk = Ab[ks] * Sn * lu.solve(Ab[ks].transpose()) +
             tp.B[k] * Rf[ks].solve(tp.B[k].transpose()) +
             tp.C[k] * Sn * tp.C[k].transpose();
    cd.Sigma[ks] = 0.5 * (Sk + Sk.transpose());
  }
  cd.phi.dim = tp.n;
  cd.phi.at.resize(static_cast<std::size_t>(tp.N) + 1);
  cd.phi.at[static_cast<std::size_t>(tp.N)] = tp.xi;
  for (int k = tp.N - 1; k >= 0; --k) {
    std::size_t ks = static_cast<std::size_t>(k);
    const Mat& Sn = cd.Sigma[ks + 1];
    auto w_lu = lu_or_throw(Mat(I + Sn * Qb[ks]),
                            "decoupling: I + Sigma Qbar at step " + std::to_string(k));
    auto [drift, mart] = cond_pair(cd.phi.at[ks + 1]);
    Level& pk = cd.phi.at[ks];
    pk.resize(tp.tree.atoms(k));
    for (std::size_t h = 0; h < pk.size(); ++h) {
      Vec etat = tp.eta[ks][h] - tp.S[k].transpose() * Rf[ks].solve(tp.rho[ks][h]);
      Vec c = w_lu.solve(drift[h] - Sn * etat);
      pk[h] = Ab[ks] * c + tp.C[k] * mart[h] - tp.B[k] * Rf[ks].solve(tp.rho[ks][h]) +
              tp.q[ks][h];
    }
  }
  return cd;
}

FeedbackSolution solve(const TreeProblem& tp, ValueVariant variant) {
  FeedbackSolution fs;
  fs.variant = variant;
  TransformedCoefficients tc = transform_coefficients(tp);
  RiccatiSolution rs = solve_riccati(tp, tc);
  fs.H = tc.H;
  fs.Sigma = rs.Sigma;
  fs.phi = solve_phi(tp, tc, rs);
  fs.value_theorem = value_literal(tp, tc, rs, fs.phi, false);
  fs.value_derivation = value_literal(tp, tc, rs, fs.phi, true);
  fs.diag.sigma_min_eig = rs.sigma_min_eig;
  fs.diag.max_asymmetry = tc.max_asymmetry;
  fs.diag.theta_min_rcond = 1.0;
  for (double r : rs.theta_rcond) fs.diag.theta_min_rcond = std::min(fs.diag.theta_min_rcond, r);

  // feedback gains of the rewritten problem
  fs.K.reserve(tp.N);
  fs.b.resize(static_cast<std::size_t>(tp.N));
  for (int k = 0; k < tp.N; ++k) {
    std::size_t ks = static_cast<std::size_t>(k);
    Eigen::LDLT<Mat> Rbf(tc.Rbar[ks]);
    fs.K.push_back(-Rbf.solve(Mat(tp.B[k].transpose())));
    fs.b[ks].resize(tp.tree.atoms(k));
    for (std::size_t h = 0; h < fs.b[ks].size(); ++h)
      fs.b[ks][h] = -Rbf.solve(tc.rhobar[ks][h]);
  }

  // synthesize the optimal control from the decoupling pair
  fs.ctrl = solve_decoupling(tp);
  {
    fs.diag.sigma_ctrl_min_eig = 0.0;
    for (const Mat& S : fs.ctrl.Sigma) {
      Eigen::SelfAdjointEigenSolver<Mat> es(S, Eigen::EigenvaluesOnly);
      fs.diag.sigma_ctrl_min_eig = std::min(fs.diag.sigma_ctrl_min_eig,
                                            es.eigenvalues().minCoeff());
    }
  }
  Mat I = Mat::Identity(tp.n, tp.n);
  AdaptedProcess x;
  x.dim = tp.n;
  x.at.resize(static_cast<std::size_t>(tp.N) + 1);
  {
    auto g_lu = lu_or_throw(Mat(I + tp.G0 * fs.ctrl.Sigma[0]), "solve: I + G0 Sigma_0");
    x.at[0] = Level{g_lu.solve(tp.G0 * fs.ctrl.phi.at[0][0])};
  }
  AdaptedProcess u;
  u.dim = tp.m;
  u.at.resize(static_cast<std::size_t>(tp.N));
  double V = level_mean_dot(x.at[0], fs.ctrl.phi.at[0]);
  for (int k = 0; k < tp.N; ++k) {
    std::size_t ks = static_cast<std::size_t>(k);
    const Mat& Sn = fs.ctrl.Sigma[ks + 1];
    Eigen::LDLT<Mat> Rf(tp.R[k]);
    Mat Ab = tp.A[k] - tp.B[k] * Rf.solve(tp.S[k]);
    Mat Qb0 = tp.Q[k] - tp.S[k].transpose() * Rf.solve(tp.S[k]);
    Mat Qb = 0.5 * (Qb0 + Qb0.transpose());
    auto w_lu = lu_or_throw(Mat(I + Sn * Qb), "solve: I + Sigma Qbar at step " +
                                                  std::to_string(k));
    auto [drift, mart] = cond_pair(fs.ctrl.phi.at[ks + 1]);
    u.at[ks].resize(tp.tree.atoms(k));
    x.at[ks + 1].resize(tp.tree.atoms(k + 1));
    double step = 0.0;
    for (std::size_t h = 0; h < u.at[ks].size(); ++h) {
      const Vec& xk = x.at[ks][h];
      Vec etat = tp.eta[ks][h] - tp.S[k].transpose() * Rf.solve(tp.rho[ks][h]);
      Vec c = w_lu.solve(drift[h] - Sn * etat);
      Vec d = w_lu.solve(drift[h] - Sn * (Ab.transpose() * xk + etat));
      u.at[ks][h] = -Rf.solve(tp.B[k].transpose() * xk + tp.S[k] * d + tp.rho[ks][h]);
      Vec base = tp.A[k].transpose() * xk + tp.Q[k] * d +
                 tp.S[k].transpose() * u.at[ks][h] + tp.eta[ks][h];
      Vec mix = tp.C[k].transpose() * xk;
      x.at[ks + 1][2 * h] = base + mix;
      x.at[ks + 1][2 * h + 1] = base - mix;
      step += c.dot(Qb * drift[h]) + etat.dot(drift[h] + c) -
              tp.rho[ks][h].dot(Rf.solve(tp.rho[ks][h]));
    }
    V += step / static_cast<double>(u.at[ks].size());
  }
  fs.value = 0.5 * V;
  fs.u_star = u;
  fs.x_star = x;
  fs.y_star = evaluate_bsde(tp, u);

  // control of the cross-term-free rewrite
  fs.ubar_star.dim = tp.m;
  fs.ubar_star.at.resize(static_cast<std::size_t>(tp.N));
  for (int k = 0; k < tp.N; ++k) {
    std::size_t ks = static_cast<std::size_t>(k);
    Eigen::LDLT<Mat> Rf(tp.R[k]);
    Mat gain = tp.B[k].transpose() * tc.H[ks] * tp.A[k] + tp.S[k];
    auto [drift, mart] = cond_pair(fs.y_star.at[ks + 1]);
    (void)drift;
    fs.ubar_star.at[ks].resize(tp.tree.atoms(k));
    for (std::size_t h = 0; h < mart.size(); ++h)
      fs.ubar_star.at[ks][h] = u.at[ks][h] + Rf.solve(gain * mart[h]);
  }

  fs.diag.oracle_cost = evaluate_cost(tp, u, &fs.y_star);
  fs.diag.value_vs_oracle_gap = std::abs(fs.value - fs.diag.oracle_cost);
  AdaptedProcess x_oracle = adjoint_forward(tp, u, fs.y_star);
  fs.diag.stationarity_residual = stationarity_residual(tp, u, fs.y_star, x_oracle);
  if (!(fs.diag.stationarity_residual <= 1e-9))
    throw NumericalError("solve: first-order conditions violated (residual " +
                         std::to_string(fs.diag.stationarity_residual) + ")");

  switch (variant) {
    case ValueVariant::theorem: fs.value_reported = fs.value_theorem; break;
    case ValueVariant::derivation: fs.value_reported = fs.value_derivation; break;
    case ValueVariant::automatic:
      fs.value_reported = std::abs(fs.value_theorem - fs.value) <=
                                  std::abs(fs.value_derivation - fs.value)
                              ? fs.value_theorem
                              : fs.value_derivation;
      break;
  }
  return fs;
}

}  // namespace bslq

#include "bslq/transform.hpp"

#include <Eigen/Cholesky>

namespace bslq {
namespace {

double rel_asym(const Mat& M) {
  double norm = M.norm();
  return norm == 0.0 ? 0.0 : (M - M.transpose()).norm() / norm;
}

Mat symmetrize(const Mat& M, double& worst) {
  worst = std::max(worst, rel_asym(M));
  return 0.5 * (M + M.transpose());
}

}  // namespace

std::vector<Mat> solve_H(const TreeProblem& tp) {
  std::vector<Mat> H;
  H.reserve(static_cast<std::size_t>(tp.N) + 1);
  H.push_back(tp.G0);
  for (int k = 0; k < tp.N; ++k) {
    Eigen::LDLT<Mat> Rf(tp.R[k]);
    if (Rf.info() != Eigen::Success)
      throw NumericalError("solve_H: R_" + std::to_string(k) + " not factorizable");
    Mat BtHA = tp.B[k].transpose() * H.back() * tp.A[k];
    Mat Hn = tp.A[k].transpose() * H.back() * tp.A[k] +
             BtHA.transpose() * Rf.solve(BtHA);
    H.push_back(0.5 * (Hn + Hn.transpose()));
  }
  return H;
}

TransformedCoefficients transform_coefficients(const TreeProblem& tp) {
  TransformedCoefficients tc;
  tc.H = solve_H(tp);
  tc.Cbar.reserve(tp.N);
  tc.Qbar.reserve(tp.N);
  tc.Rbar.reserve(tp.N);
  tc.Qhat.reserve(tp.N);
  tc.Shat.reserve(tp.N);
  tc.etabar.resize(static_cast<std::size_t>(tp.N));
  tc.rhobar.resize(static_cast<std::size_t>(tp.N));
  tc.etahat.resize(static_cast<std::size_t>(tp.N));
  for (int k = 0; k < tp.N; ++k) {
    const Mat &A = tp.A[k], &B = tp.B[k], &S = tp.S[k], &Hk = tc.H[static_cast<std::size_t>(k)];
    Eigen::LDLT<Mat> Rf(tp.R[k]);
    if (Rf.info() != Eigen::Success)
      throw NumericalError("transform: R_" + std::to_string(k) + " not factorizable");
    Mat BtHA = B.transpose() * Hk * A;
    Mat AtHB = BtHA.transpose();
    tc.Cbar.push_back(tp.C[k] - B * Rf.solve(BtHA + S));
    tc.Qbar.push_back(symmetrize(tp.Q[k] - S.transpose() * Rf.solve(S), tc.max_asymmetry));
    tc.Rbar.push_back(symmetrize(tp.R[k] + B.transpose() * Hk * B, tc.max_asymmetry));
    tc.Qhat.push_back(symmetrize(tc.Qbar.back() + AtHB * Rf.solve(BtHA), tc.max_asymmetry));
    tc.Shat.push_back(-BtHA);
    std::size_t atoms = tp.tree.atoms(k);
    tc.etabar[static_cast<std::size_t>(k)].resize(atoms);
    tc.rhobar[static_cast<std::size_t>(k)].resize(atoms);
    tc.etahat[static_cast<std::size_t>(k)].resize(atoms);
    Mat mix = AtHB + S.transpose();  // couples rho back into the state offset
    for (std::size_t h = 0; h < atoms; ++h) {
      const Vec &q = tp.q[static_cast<std::size_t>(k)][h],
                &eta = tp.eta[static_cast<std::size_t>(k)][h],
                &rho = tp.rho[static_cast<std::size_t>(k)][h];
      Vec etahat = eta - mix * Rf.solve(rho);
      tc.etahat[static_cast<std::size_t>(k)][h] = etahat;
      tc.etabar[static_cast<std::size_t>(k)][h] = etahat + A.transpose() * (Hk * q);
      tc.rhobar[static_cast<std::size_t>(k)][h] = rho + B.transpose() * (Hk * q);
    }
  }
  return tc;
}

}  // namespace bslq

#include "bslq/riccati.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace bslq {

RiccatiSolution solve_riccati(const TreeProblem& tp, const TransformedCoefficients& tc) {
  RiccatiSolution rs;
  rs.Sigma.assign(static_cast<std::size_t>(tp.N) + 1, Mat());
  rs.Theta.assign(static_cast<std::size_t>(tp.N), Mat());
  rs.theta_rcond.assign(static_cast<std::size_t>(tp.N), 0.0);
  Mat I = Mat::Identity(tp.n, tp.n);
  rs.Sigma[static_cast<std::size_t>(tp.N)] = Mat::Zero(tp.n, tp.n);
  for (int k = tp.N - 1; k >= 0; --k) {
    const Mat& Sn = rs.Sigma[static_cast<std::size_t>(k) + 1];
    Mat Theta = I + tc.Qbar[static_cast<std::size_t>(k)] * Sn;
    Eigen::PartialPivLU<Mat> lu(Theta);
    double rcond = lu.rcond();
    if (!(rcond > 1e-14))
      throw NumericalError("riccati: Theta_" + std::to_string(k) +
                           " numerically singular (rcond " + std::to_string(rcond) + ")");
    Eigen::LDLT<Mat> Rbf(tc.Rbar[static_cast<std::size_t>(k)]);
    if (Rbf.info() != Eigen::Success)
      throw NumericalError("riccati: Rbar_" + std::to_string(k) + " not factorizable");
    Mat Sk = tp.A[k] * Sn * lu.solve(tp.A[k].transpose()) +
             tp.B[k] * Rbf.solve(tp.B[k].transpose());
    rs.Sigma[static_cast<std::size_t>(k)] = 0.5 * (Sk + Sk.transpose());
    rs.Theta[static_cast<std::size_t>(k)] = std::move(Theta);
    rs.theta_rcond[static_cast<std::size_t>(k)] = rcond;
  }
  rs.sigma_min_eig = 0.0;
  for (const Mat& S : rs.Sigma) {
    Eigen::SelfAdjointEigenSolver<Mat> es(S, Eigen::EigenvaluesOnly);
    rs.sigma_min_eig = std::min(rs.sigma_min_eig, es.eigenvalues().minCoeff());
  }
  return rs;
}

}  // namespace bslq

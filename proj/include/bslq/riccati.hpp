#pragma once

#include "bslq/problem.hpp"
#include "bslq/transform.hpp"

namespace bslq {

struct RiccatiSolution {
  std::vector<Mat> Sigma;           // size N+1, Sigma[N] = 0
  std::vector<Mat> Theta;           // size N, Theta[k] = I + Qbar_k Sigma_{k+1}
  std::vector<double> theta_rcond;  // reciprocal condition estimate of each Theta[k]
  double sigma_min_eig = 0.0;       // most negative eigenvalue over all Sigma[k]
};

// Backward recursion Sigma_k = A Sigma_{k+1} Theta_k^-1 A^T + B Rbar_k^-1 B^T,
// Sigma_N = 0. Throws NumericalError when some Theta_k is numerically singular.
RiccatiSolution solve_riccati(const TreeProblem& tp, const TransformedCoefficients& tc);

}  // namespace bslq

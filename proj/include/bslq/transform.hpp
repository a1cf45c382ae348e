#pragma once

#include "bslq/problem.hpp"

namespace bslq {

// Coefficients of the equivalent cross-term-free problem. The auxiliary matrix
// sequence H absorbs the control's feedthrough into the state weights; the barred
// quantities are the rewritten weights/offsets, the hatted ones an intermediate
// form that satisfies exact cancellation identities against H (tested).
struct TransformedCoefficients {
  std::vector<Mat> H;           // size N+1, H[0] = G0
  std::vector<Mat> Cbar;        // size N
  std::vector<Mat> Qbar, Rbar;  // size N
  std::vector<Mat> Qhat, Shat;  // size N
  std::vector<Level> etabar, rhobar, etahat;  // adapted, [k] has 2^k entries
  double max_asymmetry = 0.0;   // worst relative asymmetry seen before symmetrizing
};

// Forward recursion H[k+1] = A^T H A + (A^T H B) R^-1 (B^T H A), H[0] = G0.
std::vector<Mat> solve_H(const TreeProblem& tp);

TransformedCoefficients transform_coefficients(const TreeProblem& tp);

}  // namespace bslq

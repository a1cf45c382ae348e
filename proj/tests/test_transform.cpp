#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bslq/transform.hpp"
#include "helpers.hpp"

using namespace bslq;
using namespace testutil;

TEST_CASE("H recursion starts at G0 and matches pinned values") {
  TreeProblem tp = example_problem();
  std::vector<Mat> H = solve_H(tp);
  REQUIRE(H.size() == 5);
  CHECK(max_abs_diff(H[0], tp.G0) == 0.0);
  CHECK(max_abs_diff(H[1], frozen::H1()) < 1e-14);
  CHECK(max_abs_diff(H[4], frozen::H4()) < 1e-12);
  for (const Mat& Hk : H) CHECK(max_abs_diff(Hk, Hk.transpose()) == 0.0);
}

TEST_CASE("transformed coefficients satisfy the cancellation identities") {
  TreeProblem tp = example_problem();
  TransformedCoefficients tc = transform_coefficients(tp);
  for (int k = 0; k < tp.N; ++k) {
    std::size_t ks = static_cast<std::size_t>(k);
    const Mat &A = tp.A[k], &B = tp.B[k];
    const Mat& Hk = tc.H[ks];
    // Qhat + A^T H A - H_{k+1} = Qbar
    CHECK(max_abs_diff(tc.Qhat[ks] + A.transpose() * Hk * A - tc.H[ks + 1],
                       tc.Qbar[ks]) < 1e-10);
    // Shat + B^T H A = 0
    CHECK(max_abs_diff(tc.Shat[ks] + B.transpose() * Hk * A, Mat::Zero(2, 3)) < 1e-10);
    // R + B^T H B = Rbar
    CHECK(max_abs_diff(tp.R[k] + B.transpose() * Hk * B, tc.Rbar[ks]) < 1e-10);
    for (std::size_t h = 0; h < tp.tree.atoms(k); ++h) {
      const Vec& q = tp.q[ks][h];
      // etahat + A^T H q = etabar, rho + B^T H q = rhobar
      CHECK((tc.etahat[ks][h] + A.transpose() * Hk * q - tc.etabar[ks][h])
                .cwiseAbs()
                .maxCoeff() < 1e-10);
      CHECK((tp.rho[ks][h] + B.transpose() * Hk * q - tc.rhobar[ks][h])
                .cwiseAbs()
                .maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("reduced weights are symmetric PSD on the benchmark") {
  TreeProblem tp = example_problem();
  TransformedCoefficients tc = transform_coefficients(tp);
  CHECK(tc.max_asymmetry < 1e-12);
  for (int k = 0; k < tp.N; ++k) {
    std::size_t ks = static_cast<std::size_t>(k);
    Eigen::SelfAdjointEigenSolver<Mat> q(tc.Qbar[ks], Eigen::EigenvaluesOnly);
    CHECK(q.eigenvalues().minCoeff() > -1e-12);
    Eigen::SelfAdjointEigenSolver<Mat> r(tc.Rbar[ks], Eigen::EigenvaluesOnly);
    CHECK(r.eigenvalues().minCoeff() > 1.0);  // R itself dominates here
  }
}

TEST_CASE("cross terms vanish in the rewritten dynamics matrix when S and H are zero") {
  TreeProblem tp = example_problem();
  tp.G0.setZero();
  for (auto& S : tp.S) S.setZero();
  TransformedCoefficients tc = transform_coefficients(tp);
  CHECK(max_abs_diff(tc.Cbar[0], tp.C[0]) == 0.0);
  CHECK(max_abs_diff(tc.Qbar[0], tp.Q[0]) == 0.0);
}

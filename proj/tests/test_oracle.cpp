#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bslq/oracle.hpp"
#include "bslq/randspec.hpp"
#include "bslq/solver.hpp"
#include "helpers.hpp"

using namespace bslq;
using namespace testutil;

namespace {

// one-step scalar-free problem for hand-checkable cases
TreeProblem one_step(const Mat& A, const Mat& B, const Mat& C, const Level& xi) {
  TreeProblem tp;
  tp.N = 1;
  tp.n = static_cast<int>(A.rows());
  tp.m = static_cast<int>(B.cols());
  tp.tree = TreeSpace(1);
  tp.A = {A};
  tp.B = {B};
  tp.C = {C};
  tp.Q = {Mat::Zero(tp.n, tp.n)};
  tp.S = {Mat::Zero(tp.m, tp.n)};
  tp.R = {Mat::Identity(tp.m, tp.m)};
  tp.G0 = Mat::Zero(tp.n, tp.n);
  tp.q = {Level{Vec::Zero(tp.n)}};
  tp.eta = {Level{Vec::Zero(tp.n)}};
  tp.rho = {Level{Vec::Zero(tp.m)}};
  tp.xi = xi;
  return tp;
}

AdaptedProcess zero_control(const TreeProblem& tp) {
  AdaptedProcess u;
  u.dim = tp.m;
  u.at.resize(static_cast<std::size_t>(tp.N));
  for (int k = 0; k < tp.N; ++k)
    u.at[static_cast<std::size_t>(k)].assign(tp.tree.atoms(k), Vec::Zero(tp.m));
  return u;
}

}  // namespace

TEST_CASE("one-step backward solve: deterministic terminal data") {
  Mat I3 = Mat::Identity(3, 3);
  Vec xi = vec3(1, 2, 3);
  TreeProblem tp = one_step(I3, Mat::Zero(3, 1), Mat::Zero(3, 3), Level(2, xi));
  AdaptedProcess y = evaluate_bsde(tp, zero_control(tp));
  CHECK((y.at[0][0] - xi).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("one-step backward solve: martingale part picked up through C") {
  Mat I3 = Mat::Identity(3, 3);
  Vec e1 = vec3(1, 0, 0);
  Level xi = {e1, -e1};  // +- e1 depending on the noise sign
  TreeProblem tp = one_step(I3, Mat::Zero(3, 1), I3, xi);
  AdaptedProcess y = evaluate_bsde(tp, zero_control(tp));
  // drift is zero, martingale coefficient is e1, so y_0 = C e1 = e1
  CHECK((y.at[0][0] - e1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("cost is zero for the zero problem and zero control") {
  TreeProblem tp = zero_offsets(example_problem());
  CHECK(evaluate_cost(tp, zero_control(tp)) == 0.0);
}

TEST_CASE("adjoint is zero when G0, Q, S, eta all vanish") {
  TreeProblem tp = example_problem();
  tp.G0.setZero();
  for (auto& Q : tp.Q) Q.setZero();
  for (auto& S : tp.S) S.setZero();
  for (auto& lv : tp.eta)
    for (auto& v : lv) v.setZero();
  AdaptedProcess u = zero_control(tp);
  AdaptedProcess y = evaluate_bsde(tp, u);
  AdaptedProcess x = adjoint_forward(tp, u, y);
  for (const auto& lv : x.at)
    for (const auto& v : lv) CHECK(v.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("one-step adjoint follows the definition") {
  TreeProblem tp = example_problem();
  AdaptedProcess u = random_control(tp, 7);
  AdaptedProcess y = evaluate_bsde(tp, u);
  AdaptedProcess x = adjoint_forward(tp, u, y);
  CHECK((x.at[0][0] - tp.G0 * y.at[0][0]).cwiseAbs().maxCoeff() == 0.0);
  auto [drift, mart] = cond_pair(y.at[1]);
  (void)mart;
  Vec base = tp.A[0].transpose() * x.at[0][0] + tp.Q[0] * drift[0] +
             tp.S[0].transpose() * u.at[0][0] + tp.eta[0][0];
  CHECK((x.at[1][0] - (base + tp.C[0].transpose() * x.at[0][0])).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK((x.at[1][1] - (base - tp.C[0].transpose() * x.at[0][0])).cwiseAbs().maxCoeff() ==
        0.0);
}

TEST_CASE("stationarity residual detects a perturbed control") {
  TreeProblem tp = example_problem();
  FeedbackSolution fs = solve(tp);
  AdaptedProcess u = fs.u_star;
  AdaptedProcess y = evaluate_bsde(tp, u);
  AdaptedProcess x = adjoint_forward(tp, u, y);
  CHECK(stationarity_residual(tp, u, y, x) <= 1e-12);
  u.at[2][1](0) += 0.1;
  y = evaluate_bsde(tp, u);
  x = adjoint_forward(tp, u, y);
  CHECK(stationarity_residual(tp, u, y, x) > 1e-3);
}

TEST_CASE("stack/unstack round trip") {
  TreeProblem tp = example_problem();
  AdaptedProcess u = random_control(tp, 11);
  Vec z = stack_control(tp, u);
  CHECK(z.size() == 2 * (16 - 1));
  AdaptedProcess r = unstack_control(tp, z);
  for (int k = 0; k < tp.N; ++k)
    for (std::size_t h = 0; h < tp.tree.atoms(k); ++h)
      CHECK((r.at[static_cast<std::size_t>(k)][h] - u.at[static_cast<std::size_t>(k)][h])
                .cwiseAbs()
                .maxCoeff() == 0.0);
}

TEST_CASE("recovered quadratic model reproduces the cost functional") {
  TreeProblem tp = example_problem();
  QpSystem qp = assemble_qp(tp);
  REQUIRE(qp.g.size() == 30);
  CHECK(max_abs_diff(qp.A, qp.A.transpose()) < 1e-12);
  Eigen::SelfAdjointEigenSolver<Mat> es(qp.A, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() ==
        doctest::Approx(frozen::qp_min_eig).epsilon(1e-10));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    AdaptedProcess u = random_control(tp, 100 + seed);
    Vec z = stack_control(tp, u);
    double model = qp.c0 + qp.g.dot(z) + 0.5 * z.dot(qp.A * z);
    CHECK(std::abs(model - evaluate_cost(tp, u)) < 1e-8);
  }
}

TEST_CASE("quadratic-program route agrees with the recursive solver") {
  TreeProblem tp = example_problem();
  FeedbackSolution fs = solve(tp);
  AdaptedProcess u_qp = qp_solve(tp, assemble_qp(tp));
  double gap = 0.0;
  for (int k = 0; k < tp.N; ++k)
    for (std::size_t h = 0; h < tp.tree.atoms(k); ++h)
      gap = std::max(gap, (u_qp.at[static_cast<std::size_t>(k)][h] -
                           fs.u_star.at[static_cast<std::size_t>(k)][h])
                              .cwiseAbs()
                              .maxCoeff());
  CHECK(gap < 1e-10);
  CHECK(std::abs(evaluate_cost(tp, u_qp) - fs.value) < 1e-10);
}

TEST_CASE("control dimension cap is enforced") {
  TreeProblem tp = example_problem();
  CHECK_THROWS_AS(assemble_qp(tp, 8), NumericalError);
}

TEST_CASE("homogeneous cost is nonnegative and scales quadratically") {
  TreeProblem tp = example_problem();
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    AdaptedProcess v = random_control(tp, 500 + seed);
    double j0 = evaluate_cost_homogeneous(tp, v);
    CHECK(j0 >= -1e-12);
    AdaptedProcess v2 = v;
    for (auto& lv : v2.at)
      for (auto& w : lv) w *= 2.0;
    CHECK(evaluate_cost_homogeneous(tp, v2) == doctest::Approx(4.0 * j0).epsilon(1e-12));
  }
}

TEST_CASE("backward map is affine: superposition and scaling") {
  TreeProblem tp = example_problem();
  AdaptedProcess u = random_control(tp, 42);
  CHECK(superposition_check(tp, u) < 1e-12);
  // doubling (xi, u, q) doubles the solution exactly
  TreeProblem tp2 = tp;
  for (auto& lv : tp2.q)
    for (auto& v : lv) v *= 2.0;
  for (auto& v : tp2.xi) v *= 2.0;
  AdaptedProcess u2 = u;
  for (auto& lv : u2.at)
    for (auto& v : lv) v *= 2.0;
  AdaptedProcess y1 = evaluate_bsde(tp, u);
  AdaptedProcess y2 = evaluate_bsde(tp2, u2);
  for (std::size_t k = 0; k < y1.at.size(); ++k)
    for (std::size_t h = 0; h < y1.at[k].size(); ++h)
      CHECK((y2.at[k][h] - 2.0 * y1.at[k][h]).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("quadratic expansion around the optimum") {
  TreeProblem tp = example_problem();
  FeedbackSolution fs = solve(tp);
  double j_star = evaluate_cost(tp, fs.u_star);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    AdaptedProcess v = random_control(tp, 900 + seed);
    for (double delta : {0.5, 1.0, 2.0})
      CHECK(quadratic_expansion_error(tp, fs.u_star, j_star, v, delta) <
            1e-8 * std::max(1.0, std::abs(j_star)));
  }
}

TEST_CASE("recovered linear term is independent of the step size") {
  TreeProblem tp = example_problem();
  AdaptedProcess u = random_control(tp, 3);
  AdaptedProcess v = random_control(tp, 4);
  double l1 = linear_term(tp, u, v, 0.5);
  double l2 = linear_term(tp, u, v, 1.0);
  double l3 = linear_term(tp, u, v, 2.0);
  CHECK(std::abs(l1 - l2) < 1e-10);
  CHECK(std::abs(l2 - l3) < 1e-10);
  // and it vanishes at the optimum
  FeedbackSolution fs = solve(tp);
  CHECK(std::abs(linear_term(tp, fs.u_star, v, 1.0)) < 1e-10);
}

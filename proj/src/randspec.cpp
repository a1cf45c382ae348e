#include "bslq/randspec.hpp"

#include <Eigen/Cholesky>

#include <random>

namespace bslq {
namespace {

Mat random_matrix(std::mt19937_64& rng, int rows, int cols, double scale) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Mat M(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) M(r, c) = dist(rng);
  return M;
}

Mat random_psd(std::mt19937_64& rng, int n, double ridge) {
  Mat L = random_matrix(rng, n, n, 1.0);
  Mat M = L.transpose() * L + ridge * Mat::Identity(n, n);
  return 0.5 * (M + M.transpose());
}

Vec random_vector(std::mt19937_64& rng, int n, double scale) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

}  // namespace

ProblemSpec random_spec(std::uint64_t seed, int max_n, int max_m, int max_horizon) {
  std::mt19937_64 rng(seed);
  ProblemSpec s;
  s.state_dim = std::uniform_int_distribution<int>(1, max_n)(rng);
  s.control_dim = std::uniform_int_distribution<int>(1, max_m)(rng);
  s.horizon = std::uniform_int_distribution<int>(1, max_horizon)(rng);
  int n = s.state_dim, m = s.control_dim, N = s.horizon;
  bool time_varying = std::bernoulli_distribution(0.5)(rng);
  bool path_dependent = std::bernoulli_distribution(0.5)(rng);

  int steps = time_varying ? N : 1;
  for (int k = 0; k < steps; ++k) {
    s.A.push_back(random_matrix(rng, n, n, 1.0));
    s.B.push_back(random_matrix(rng, n, m, 1.0));
    s.C.push_back(random_matrix(rng, n, n, 0.8));
    Mat R = random_psd(rng, m, 0.5);
    s.R.push_back(R);
    Mat S = random_matrix(rng, m, n, 0.7);
    s.S.push_back(S);
    // keeps Q - S^T R^-1 S PSD by construction
    Mat Q = random_psd(rng, n, 0.0) + S.transpose() * R.ldlt().solve(S);
    s.Q.push_back(0.5 * (Q + Q.transpose()));
  }
  if (!time_varying) {
    s.A.assign(static_cast<std::size_t>(N), s.A[0]);
    s.B.assign(static_cast<std::size_t>(N), s.B[0]);
    s.C.assign(static_cast<std::size_t>(N), s.C[0]);
    s.Q.assign(static_cast<std::size_t>(N), s.Q[0]);
    s.S.assign(static_cast<std::size_t>(N), s.S[0]);
    s.R.assign(static_cast<std::size_t>(N), s.R[0]);
  }
  s.G0 = random_psd(rng, n, 0.1);

  auto adapted = [&](int dim) {
    AdaptedInput in;
    for (int k = 0; k < N; ++k) {
      std::size_t atoms = path_dependent ? (std::size_t{1} << k) : 1;
      Level lv(atoms);
      for (Vec& v : lv) v = random_vector(rng, dim, 1.0);
      in.levels.push_back(std::move(lv));
    }
    return in;
  };
  s.q = adapted(n);
  s.eta = adapted(n);
  s.rho = adapted(m);
  std::size_t xi_atoms = path_dependent ? (std::size_t{1} << N) : 1;
  s.xi.resize(xi_atoms);
  for (Vec& v : s.xi) v = random_vector(rng, n, 1.0);
  return s;
}

AdaptedProcess random_control(const TreeProblem& tp, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  AdaptedProcess u;
  u.dim = tp.m;
  u.at.resize(static_cast<std::size_t>(tp.N));
  for (int k = 0; k < tp.N; ++k) {
    u.at[static_cast<std::size_t>(k)].resize(tp.tree.atoms(k));
    for (Vec& v : u.at[static_cast<std::size_t>(k)]) v = random_vector(rng, tp.m, 1.0);
  }
  return u;
}

}  // namespace bslq

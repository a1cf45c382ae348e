#include "bslq/oracle.hpp"

#include <Eigen/LU>

#include <cmath>

namespace bslq {
namespace {

void check_control_shape(const TreeProblem& tp, const AdaptedProcess& u) {
  if (u.dim != tp.m || static_cast<int>(u.at.size()) != tp.N)
    throw std::invalid_argument("control has wrong shape");
  for (int k = 0; k < tp.N; ++k)
    if (u.at[static_cast<std::size_t>(k)].size() != tp.tree.atoms(k))
      throw std::invalid_argument("control has wrong atom count");
}

}  // namespace

AdaptedProcess evaluate_bsde(const TreeProblem& tp, const AdaptedProcess& u) {
  check_control_shape(tp, u);
  AdaptedProcess y;
  y.dim = tp.n;
  y.at.resize(static_cast<std::size_t>(tp.N) + 1);
  y.at[static_cast<std::size_t>(tp.N)] = tp.xi;
  for (int k = tp.N - 1; k >= 0; --k) {
    auto [drift, mart] = cond_pair(y.at[static_cast<std::size_t>(k) + 1]);
    Level& yk = y.at[static_cast<std::size_t>(k)];
    yk.resize(tp.tree.atoms(k));
    for (std::size_t h = 0; h < yk.size(); ++h)
      yk[h] = tp.A[k] * drift[h] + tp.C[k] * mart[h] +
              tp.B[k] * u.at[static_cast<std::size_t>(k)][h] +
              tp.q[static_cast<std::size_t>(k)][h];
  }
  return y;
}

double evaluate_cost(const TreeProblem& tp, const AdaptedProcess& u,
                     const AdaptedProcess* y_in) {
  AdaptedProcess local;
  if (!y_in) {
    local = evaluate_bsde(tp, u);
    y_in = &local;
  }
  const AdaptedProcess& y = *y_in;
  double total = y.at[0][0].dot(tp.G0 * y.at[0][0]);
  for (int k = 0; k < tp.N; ++k) {
    auto [drift, mart] = cond_pair(y.at[static_cast<std::size_t>(k) + 1]);
    (void)mart;
    double step = 0.0;
    for (std::size_t h = 0; h < drift.size(); ++h) {
      const Vec& uk = u.at[static_cast<std::size_t>(k)][h];
      step += drift[h].dot(tp.Q[k] * drift[h]) + 2.0 * uk.dot(tp.S[k] * drift[h]) +
              uk.dot(tp.R[k] * uk) +
              2.0 * drift[h].dot(tp.eta[static_cast<std::size_t>(k)][h]) +
              2.0 * uk.dot(tp.rho[static_cast<std::size_t>(k)][h]);
    }
    total += step / static_cast<double>(drift.size());
  }
  return 0.5 * total;
}

TreeProblem zero_offsets(const TreeProblem& tp) {
  TreeProblem z = tp;
  for (int k = 0; k < tp.N; ++k) {
    for (Vec& v : z.q[static_cast<std::size_t>(k)]) v.setZero();
    for (Vec& v : z.eta[static_cast<std::size_t>(k)]) v.setZero();
    for (Vec& v : z.rho[static_cast<std::size_t>(k)]) v.setZero();
  }
  for (Vec& v : z.xi) v.setZero();
  return z;
}

AdaptedProcess adjoint_forward(const TreeProblem& tp, const AdaptedProcess& u,
                               const AdaptedProcess& y) {
  AdaptedProcess x;
  x.dim = tp.n;
  x.at.resize(static_cast<std::size_t>(tp.N) + 1);
  x.at[0] = Level{tp.G0 * y.at[0][0]};
  for (int k = 0; k < tp.N; ++k) {
    auto [drift, mart] = cond_pair(y.at[static_cast<std::size_t>(k) + 1]);
    (void)mart;
    const Level& xk = x.at[static_cast<std::size_t>(k)];
    Level& xn = x.at[static_cast<std::size_t>(k) + 1];
    xn.resize(tp.tree.atoms(k + 1));
    for (std::size_t h = 0; h < xk.size(); ++h) {
      Vec base = tp.A[k].transpose() * xk[h] + tp.Q[k] * drift[h] +
                 tp.S[k].transpose() * u.at[static_cast<std::size_t>(k)][h] +
                 tp.eta[static_cast<std::size_t>(k)][h];
      Vec mix = tp.C[k].transpose() * xk[h];
      xn[2 * h] = base + mix;      // omega = +1
      xn[2 * h + 1] = base - mix;  // omega = -1
    }
  }
  return x;
}

double stationarity_residual(const TreeProblem& tp, const AdaptedProcess& u,
                             const AdaptedProcess& y, const AdaptedProcess& x) {
  double worst = 0.0;
  for (int k = 0; k < tp.N; ++k) {
    auto [drift, mart] = cond_pair(y.at[static_cast<std::size_t>(k) + 1]);
    (void)mart;
    for (std::size_t h = 0; h < drift.size(); ++h) {
      Vec r = tp.B[k].transpose() * x.at[static_cast<std::size_t>(k)][h] +
              tp.S[k] * drift[h] + tp.R[k] * u.at[static_cast<std::size_t>(k)][h] +
              tp.rho[static_cast<std::size_t>(k)][h];
      worst = std::max(worst, r.cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

Vec stack_control(const TreeProblem& tp, const AdaptedProcess& u) {
  check_control_shape(tp, u);
  std::size_t total = static_cast<std::size_t>(tp.m) * ((std::size_t{1} << tp.N) - 1);
  Vec z(static_cast<Eigen::Index>(total));
  Eigen::Index off = 0;
  for (int k = 0; k < tp.N; ++k)
    for (const Vec& v : u.at[static_cast<std::size_t>(k)]) {
      z.segment(off, tp.m) = v;
      off += tp.m;
    }
  return z;
}

AdaptedProcess unstack_control(const TreeProblem& tp, const Vec& z) {
  std::size_t total = static_cast<std::size_t>(tp.m) * ((std::size_t{1} << tp.N) - 1);
  if (z.size() != static_cast<Eigen::Index>(total))
    throw std::invalid_argument("unstack_control: wrong length");
  AdaptedProcess u;
  u.dim = tp.m;
  u.at.resize(static_cast<std::size_t>(tp.N));
  Eigen::Index off = 0;
  for (int k = 0; k < tp.N; ++k) {
    Level& lv = u.at[static_cast<std::size_t>(k)];
    lv.resize(tp.tree.atoms(k));
    for (Vec& v : lv) {
      v = z.segment(off, tp.m);
      off += tp.m;
    }
  }
  return u;
}

QpSystem assemble_qp(const TreeProblem& tp, std::size_t qp_cap) {
  std::size_t M = static_cast<std::size_t>(tp.m) * ((std::size_t{1} << tp.N) - 1);
  if (M > qp_cap)
    throw NumericalError("assemble_qp: stacked control dimension " + std::to_string(M) +
                         " exceeds cap " + std::to_string(qp_cap));
  Eigen::Index Mi = static_cast<Eigen::Index>(M);
  auto cost_at = [&](const Vec& z) { return evaluate_cost(tp, unstack_control(tp, z)); };
  QpSystem qp;
  qp.c0 = cost_at(Vec::Zero(Mi));
  qp.g.resize(Mi);
  qp.A.resize(Mi, Mi);
  Vec cp(Mi), cm(Mi);
  for (Eigen::Index i = 0; i < Mi; ++i) {
    Vec e = Vec::Zero(Mi);
    e(i) = 1.0;
    cp(i) = cost_at(e);
    cm(i) = cost_at(-e);
    qp.g(i) = 0.5 * (cp(i) - cm(i));
    qp.A(i, i) = cp(i) + cm(i) - 2.0 * qp.c0;
  }
  for (Eigen::Index i = 0; i < Mi; ++i)
    for (Eigen::Index j = i + 1; j < Mi; ++j) {
      Vec e = Vec::Zero(Mi);
      e(i) = 1.0;
      e(j) = 1.0;
      double cij = cost_at(e);
      qp.A(i, j) = qp.A(j, i) = cij - cp(i) - cp(j) + qp.c0;
    }
  return qp;
}

AdaptedProcess qp_solve(const TreeProblem& tp, const QpSystem& qp) {
  Eigen::PartialPivLU<Mat> lu(qp.A);
  if (!(lu.rcond() > 1e-14))
    throw NumericalError("qp_solve: quadratic model is numerically singular");
  return unstack_control(tp, lu.solve(-qp.g));
}

double evaluate_cost_homogeneous(const TreeProblem& tp, const AdaptedProcess& v) {
  return evaluate_cost(zero_offsets(tp), v);
}

double superposition_check(const TreeProblem& tp, const AdaptedProcess& u) {
  AdaptedProcess zero_u;
  zero_u.dim = tp.m;
  zero_u.at.resize(static_cast<std::size_t>(tp.N));
  for (int k = 0; k < tp.N; ++k)
    zero_u.at[static_cast<std::size_t>(k)].assign(tp.tree.atoms(k), Vec::Zero(tp.m));

  TreeProblem only_xi = tp;  // xi kept, q zeroed (eta/rho never enter the dynamics)
  for (auto& lv : only_xi.q)
    for (Vec& v : lv) v.setZero();
  TreeProblem only_q = tp;  // q kept, xi zeroed
  for (Vec& v : only_q.xi) v.setZero();
  TreeProblem only_u = only_xi;  // both zeroed, driven by u alone
  for (Vec& v : only_u.xi) v.setZero();

  AdaptedProcess y_full = evaluate_bsde(tp, u);
  AdaptedProcess y_xi = evaluate_bsde(only_xi, zero_u);
  AdaptedProcess y_u = evaluate_bsde(only_u, u);
  AdaptedProcess y_q = evaluate_bsde(only_q, zero_u);
  double worst = 0.0;
  for (std::size_t k = 0; k < y_full.at.size(); ++k)
    for (std::size_t h = 0; h < y_full.at[k].size(); ++h)
      worst = std::max(worst,
                       (y_full.at[k][h] - y_xi.at[k][h] - y_u.at[k][h] - y_q.at[k][h])
                           .cwiseAbs()
                           .maxCoeff());
  return worst;
}

double quadratic_expansion_error(const TreeProblem& tp, const AdaptedProcess& u_star,
                                 double j_star, const AdaptedProcess& v, double delta) {
  AdaptedProcess perturbed = u_star;
  for (int k = 0; k < tp.N; ++k)
    for (std::size_t h = 0; h < perturbed.at[static_cast<std::size_t>(k)].size(); ++h)
      perturbed.at[static_cast<std::size_t>(k)][h] +=
          delta * v.at[static_cast<std::size_t>(k)][h];
  double j_pert = evaluate_cost(tp, perturbed);
  double j0_v = evaluate_cost_homogeneous(tp, v);
  return std::abs(j_pert - j_star - delta * delta * j0_v);
}

double linear_term(const TreeProblem& tp, const AdaptedProcess& u,
                   const AdaptedProcess& v, double delta) {
  AdaptedProcess up = u, um = u;
  for (int k = 0; k < tp.N; ++k)
    for (std::size_t h = 0; h < u.at[static_cast<std::size_t>(k)].size(); ++h) {
      up.at[static_cast<std::size_t>(k)][h] += delta * v.at[static_cast<std::size_t>(k)][h];
      um.at[static_cast<std::size_t>(k)][h] -= delta * v.at[static_cast<std::size_t>(k)][h];
    }
  return (evaluate_cost(tp, up) - evaluate_cost(tp, um)) / (2.0 * delta);
}

}  // namespace bslq

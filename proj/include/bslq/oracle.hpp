#pragma once

#include "bslq/problem.hpp"

namespace bslq {

// Exact, assumption-free reference evaluators on the finite tree. These only use
// the problem definition (backward equation, cost functional, first-order
// conditions) and serve as the ground truth the solver is checked against.

// Backward sweep for a given control; result has levels 0..N, level k on 2^k atoms.
AdaptedProcess evaluate_bsde(const TreeProblem& tp, const AdaptedProcess& u);

// Exact cost of a control; pass the precomputed trajectory to avoid re-solving.
double evaluate_cost(const TreeProblem& tp, const AdaptedProcess& u,
                     const AdaptedProcess* y = nullptr);

// Copy of the problem with q, eta, rho, xi zeroed; its cost of v is the pure
// quadratic part of the functional.
TreeProblem zero_offsets(const TreeProblem& tp);

// Cost of v on the fully homogeneous problem (xi = q = eta = rho = 0). Under
// the standing assumptions this is nonnegative for every v.
double evaluate_cost_homogeneous(const TreeProblem& tp, const AdaptedProcess& v);

// Forward adjoint recursion seeded with x_0 = G0 y_0.
AdaptedProcess adjoint_forward(const TreeProblem& tp, const AdaptedProcess& u,
                               const AdaptedProcess& y);

// max over steps and atoms of |B^T x_k + S E_{k-1}[y_{k+1}] + R u_k + rho_k|_inf.
double stationarity_residual(const TreeProblem& tp, const AdaptedProcess& u,
                             const AdaptedProcess& y, const AdaptedProcess& x);

Vec stack_control(const TreeProblem& tp, const AdaptedProcess& u);
AdaptedProcess unstack_control(const TreeProblem& tp, const Vec& z);

// Dense quadratic model J(u) = c0 + g.u + 1/2 u.A u recovered purely from cost
// evaluations (2 + 2M + M(M+1)/2 of them). Throws when M exceeds qp_cap.
struct QpSystem {
  Mat A;
  Vec g;
  double c0 = 0.0;
};
QpSystem assemble_qp(const TreeProblem& tp, std::size_t qp_cap = 512);

// Minimizer of the recovered quadratic model: solves A u = -g.
AdaptedProcess qp_solve(const TreeProblem& tp, const QpSystem& qp);

// Affinity of the backward map in (xi, u, q): solves the three sub-problems
// driven by xi alone, u alone, and q alone, and returns the largest atom-wise
// deviation of their sum from the full solution.
double superposition_check(const TreeProblem& tp, const AdaptedProcess& u);

// |J(u* + delta v) - J(u*) - delta^2 J0(v)| where J0 is the cost with all
// offsets zeroed; exact when u* is optimal.
double quadratic_expansion_error(const TreeProblem& tp, const AdaptedProcess& u_star,
                                 double j_star, const AdaptedProcess& v, double delta);

// Directional derivative of the cost at u in direction v, recovered by a
// central difference; exact for a quadratic functional, independent of delta.
double linear_term(const TreeProblem& tp, const AdaptedProcess& u,
                   const AdaptedProcess& v, double delta);

}  // namespace bslq

#pragma once

#include "bslq/riccati.hpp"
#include "bslq/transform.hpp"

namespace bslq {

// The two per-step value formulas differ by a <H_k q_k, q_k> term; both are
// reported. "automatic" reports whichever lies closer to the exact cost.
enum class ValueVariant { theorem, derivation, automatic };

// Offset recursion paired with solve_riccati:
// phi_k = A(I - Sigma Theta^-1 Qbar) E[phi_{k+1}] + Cbar mart(phi_{k+1})
//         - A Sigma Theta^-1 etabar - B Rbar^-1 rhobar + q,  phi_N = xi.
AdaptedProcess solve_phi(const TreeProblem& tp, const TransformedCoefficients& tc,
                         const RiccatiSolution& rs);

// Per-step closed-form value at a given offset process (see README for the
// formula). include_hqq toggles the extra <H_k q_k, q_k> term.
double value_literal(const TreeProblem& tp, const TransformedCoefficients& tc,
                     const RiccatiSolution& rs, const AdaptedProcess& phi,
                     bool include_hqq);

// Second Riccati/offset pair that keeps the martingale coupling C Sigma C^T and
// works in the S-absorbed variables; this is the pair the synthesized control is
// built from, and it reproduces the exact optimum (verified against the oracle).
struct ControlDecoupling {
  std::vector<Mat> Sigma;  // size N+1, Sigma[N] = 0
  AdaptedProcess phi;      // levels 0..N, phi_N = xi
};

ControlDecoupling solve_decoupling(const TreeProblem& tp);

struct SolverDiagnostics {
  double stationarity_residual = 0.0;  // first-order conditions at every atom
  double oracle_cost = 0.0;            // exact cost of the synthesized control
  double value_vs_oracle_gap = 0.0;    // |value - oracle_cost|
  double sigma_min_eig = 0.0;          // reported Riccati sequence
  double sigma_ctrl_min_eig = 0.0;     // decoupling Riccati sequence
  double theta_min_rcond = 1.0;
  double max_asymmetry = 0.0;
};

struct FeedbackSolution {
  std::vector<Mat> H;      // size N+1, H[0] = G0
  std::vector<Mat> Sigma;  // size N+1 (reported Riccati recursion)
  AdaptedProcess phi;      // reported offset recursion, levels 0..N
  std::vector<Mat> K;      // K_k = -Rbar_k^-1 B_k^T
  std::vector<Level> b;    // b_k = -Rbar_k^-1 rhobar_k, adapted
  ControlDecoupling ctrl;  // recursions the control is synthesized from
  AdaptedProcess x_star;   // adjoint trajectory, x_0 = G0 y_0
  AdaptedProcess y_star;   // optimal backward trajectory
  AdaptedProcess u_star;   // optimal control
  AdaptedProcess ubar_star;  // control of the cross-term-free rewrite:
                             // ubar = u + R^-1 (B^T H A + S) mart(y)
  double value = 0.0;            // closed-form optimal value; equals the exact cost
  double value_theorem = 0.0;    // per-step formula without the <H q, q> term
  double value_derivation = 0.0; // per-step formula including the <H q, q> term
  double value_reported = 0.0;   // selected by `variant`
  ValueVariant variant = ValueVariant::automatic;
  SolverDiagnostics diag;
};

// Full solve. Enforces the FeedbackSolution invariant that the first-order
// conditions hold to 1e-9 at every atom; throws NumericalError otherwise.
FeedbackSolution solve(const TreeProblem& tp,
                       ValueVariant variant = ValueVariant::automatic);

}  // namespace bslq

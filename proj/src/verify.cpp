#include "bslq/verify.hpp"

#include "bslq/randspec.hpp"

#include <cmath>

namespace bslq {

VerificationReport verify(const TreeProblem& tp, const FeedbackSolution& fs,
                          std::uint64_t seed, bool include_qp, std::size_t qp_cap) {
  VerificationReport vr;
  vr.seed = seed;

  AdaptedProcess y = evaluate_bsde(tp, fs.u_star);
  AdaptedProcess x = adjoint_forward(tp, fs.u_star, y);
  vr.stationarity_max_residual = stationarity_residual(tp, fs.u_star, y, x);
  vr.pass_stationarity = vr.stationarity_max_residual <= 1e-9;

  vr.boundary_error = (x.at[0][0] - tp.G0 * y.at[0][0]).cwiseAbs().maxCoeff();
  vr.pass_boundary = vr.boundary_error <= 1e-10;

  vr.oracle_cost = evaluate_cost(tp, fs.u_star, &y);
  double j_scale = std::max(1.0, std::abs(vr.oracle_cost));

  vr.homogeneous_min = 0.0;
  for (int i = 0; i < 100; ++i) {
    AdaptedProcess v = random_control(tp, seed * 1000003ULL + static_cast<std::uint64_t>(i));
    vr.homogeneous_min = std::min(vr.homogeneous_min, evaluate_cost_homogeneous(tp, v));
  }
  vr.pass_homogeneous = vr.homogeneous_min >= -1e-12;

  vr.expansion_max_error = 0.0;
  for (int i = 0; i < 20; ++i) {
    AdaptedProcess v = random_control(tp, seed * 2000003ULL + static_cast<std::uint64_t>(i));
    for (double delta : {0.5, 1.0, 2.0})
      vr.expansion_max_error = std::max(
          vr.expansion_max_error,
          quadratic_expansion_error(tp, fs.u_star, vr.oracle_cost, v, delta));
  }
  vr.pass_expansion = vr.expansion_max_error <= 1e-8 * j_scale;

  vr.superposition_error = superposition_check(tp, fs.u_star);
  vr.pass_superposition = vr.superposition_error <= 1e-10;

  vr.value_match_theorem = std::abs(fs.value_theorem - vr.oracle_cost);
  vr.value_match_derivation = std::abs(fs.value_derivation - vr.oracle_cost);
  vr.value_match_closed_form = std::abs(fs.value - vr.oracle_cost);
  vr.matched_variant = "closed_form";
  double best = vr.value_match_closed_form;
  if (vr.value_match_theorem < best) {
    best = vr.value_match_theorem;
    vr.matched_variant = "theorem";
  }
  if (vr.value_match_derivation < best) {
    best = vr.value_match_derivation;
    vr.matched_variant = "derivation";
  }
  vr.pass_value = best <= 1e-8;

  std::size_t M = static_cast<std::size_t>(tp.m) * ((std::size_t{1} << tp.N) - 1);
  if (include_qp && M <= qp_cap) {
    vr.qp_ran = true;
    QpSystem qp = assemble_qp(tp, qp_cap);
    AdaptedProcess u_qp = qp_solve(tp, qp);
    double gap = 0.0;
    for (int k = 0; k < tp.N; ++k)
      for (std::size_t h = 0; h < u_qp.at[static_cast<std::size_t>(k)].size(); ++h)
        gap = std::max(gap, (u_qp.at[static_cast<std::size_t>(k)][h] -
                             fs.u_star.at[static_cast<std::size_t>(k)][h])
                                .cwiseAbs()
                                .maxCoeff());
    vr.qp_vs_ustar = gap;
    vr.cost_gap_vs_qp = std::abs(evaluate_cost(tp, u_qp) - fs.value);
    vr.pass_qp = vr.qp_vs_ustar <= 1e-6 && vr.cost_gap_vs_qp <= 1e-6;
  }

  vr.pass = vr.pass_stationarity && vr.pass_homogeneous && vr.pass_expansion &&
            vr.pass_superposition && vr.pass_boundary && vr.pass_qp && vr.pass_value;
  return vr;
}

}  // namespace bslq

#pragma once

#include "bslq/oracle.hpp"
#include "bslq/solver.hpp"

#include <cstdint>

namespace bslq {

// Aggregate check of a solver output against the exact evaluators. Every
// threshold is recorded next to the measurement; pass is the conjunction of
// the per-check flags.
struct VerificationReport {
  std::uint64_t seed = 0;
  double stationarity_max_residual = 0.0;  // threshold 1e-9
  double homogeneous_min = 0.0;            // min J0(v) over random v; >= -1e-12
  double expansion_max_error = 0.0;        // threshold 1e-8 * max(1, |J*|)
  double superposition_error = 0.0;        // threshold 1e-10
  double boundary_error = 0.0;             // |x*_0 - G0 y*_0|, threshold 1e-10
  bool qp_ran = false;
  double qp_vs_ustar = 0.0;       // max-norm gap, threshold 1e-6
  double cost_gap_vs_qp = 0.0;    // |cost(u_qp) - value|, threshold 1e-6
  double value_match_theorem = 0.0;     // |value_theorem - oracle cost|
  double value_match_derivation = 0.0;  // |value_derivation - oracle cost|
  double value_match_closed_form = 0.0; // |value - oracle cost|, threshold 1e-8
  std::string matched_variant;          // closest of the three to the oracle cost
  double oracle_cost = 0.0;
  bool pass_stationarity = false, pass_homogeneous = false, pass_expansion = false,
       pass_superposition = false, pass_boundary = false, pass_qp = true,
       pass_value = false;
  bool pass = false;
};

VerificationReport verify(const TreeProblem& tp, const FeedbackSolution& fs,
                          std::uint64_t seed, bool include_qp,
                          std::size_t qp_cap = 512);

}  // namespace bslq

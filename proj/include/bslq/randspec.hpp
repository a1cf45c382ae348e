#pragma once

#include "bslq/problem.hpp"

#include <cstdint>

namespace bslq {

// Deterministic seeded random problem generator used by the verification
// harness and the CLI. Always produces a spec that passes validate_spec:
// R is built strictly positive and Q is Q0 + S^T R^-1 S with Q0 PSD, so the
// reduced state weight stays PSD by construction. Some seeds produce
// path-dependent offsets and per-step coefficient matrices.
ProblemSpec random_spec(std::uint64_t seed, int max_n = 4, int max_m = 3,
                        int max_horizon = 5);

// Seeded random control/perturbation on the tree of the given problem.
AdaptedProcess random_control(const TreeProblem& tp, std::uint64_t seed);

}  // namespace bslq

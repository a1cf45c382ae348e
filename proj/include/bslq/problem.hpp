#pragma once

#include "bslq/tree.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace bslq {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Per-step adapted input data. levels[k] holds either a single vector (deterministic,
// broadcast over the 2^k atoms of time k) or one vector per atom.
struct AdaptedInput {
  std::vector<Level> levels;
};

struct ProblemSpec {
  int horizon = 0;      // N; time indices 0..N-1, terminal index N
  int state_dim = 0;    // n
  int control_dim = 0;  // m
  std::vector<Mat> A, B, C;  // n x n, n x m, n x n, one per step
  std::vector<Mat> Q, S, R;  // n x n, m x n, m x m, one per step
  Mat G0;                    // n x n
  AdaptedInput q, eta;       // n-vectors per step
  AdaptedInput rho;          // m-vectors per step
  Level xi;                  // terminal data: size 1 or 2^N
};

struct Violation {
  std::string what;
  int index = -1;          // offending step, or -1 when global
  double magnitude = 0.0;  // violating eigenvalue or asymmetry measure
  bool structural = false; // dimension/shape problem rather than assumption failure
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

// Tolerances used by validation (see README). Overridable through the CLI.
struct Tolerances {
  double sym_rel = 1e-9;       // relative Frobenius asymmetry allowed on G0, Q, R
  double r_pos_rel = 1e-8;     // min eig(R) >= r_pos_rel * max(1, |R|_2)
  double psd_rel = 1e-10;      // min eig >= -psd_rel * max(1, |M|_2) counts as PSD
};

// Pure check of the standing assumptions; never mutates the spec.
ValidationReport validate_spec(const ProblemSpec& spec, const Tolerances& tol = {});

ProblemSpec load_spec(const std::string& text);
std::string save_spec(const ProblemSpec& spec);

// Fully materialized problem on a tree: every adapted input has one value per atom
// and the symmetric weight matrices are symmetrized exactly.
struct TreeProblem {
  int N = 0, n = 0, m = 0;
  std::vector<Mat> A, B, C, Q, S, R;
  Mat G0;
  std::vector<Level> q, eta, rho;  // [k] has 2^k entries
  Level xi;                        // 2^N entries
  TreeSpace tree{0};
};

TreeProblem broadcast(const ProblemSpec& spec, const TreeSpace& tree);

}  // namespace bslq

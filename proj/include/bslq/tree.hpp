#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace bslq {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Values of an adapted quantity on the atoms of one filtration level.
using Level = std::vector<Vec>;

// Binary noise tree: each step is +1 or -1 with probability 1/2. The atom index at
// level k encodes the realized path (w_0,...,w_{k-1}) as a binary number with the
// earliest step in the most significant bit and +1 mapped to bit 0, so the two
// children of atom h are 2h (+1) and 2h+1 (-1). Level k has exactly 2^k atoms and
// level 0 (the trivial sigma-algebra) has one.
struct TreeSpace {
  int depth = 0;

  explicit TreeSpace(int d) : depth(d) {}

  std::size_t atoms(int level) const { return std::size_t{1} << level; }

  // Hard cap on depth; memory is O(2^depth). Override with env BSLQ_MAX_DEPTH.
  static int path_cap();
};

// A process whose time-k value is measurable at level k, i.e. stored on 2^k atoms.
// Slot k of `at` always holds the values for time index k.
struct AdaptedProcess {
  int dim = 0;
  std::vector<Level> at;

  bool shape_equals(const AdaptedProcess& o) const;
};

// Splits values on level k+1 into the conditional mean and the coefficient of the
// last noise step, both on level k:
//   drift(h) = (v(h,+1) + v(h,-1)) / 2,   mart(h) = (v(h,+1) - v(h,-1)) / 2.
// These are exactly E[v | level k] and E[v * w | level k].
std::pair<Level, Level> cond_pair(const Level& next);

// E[<a_h, b_h>] over one level with the exact dyadic weights (all equal).
double expect_dot(const Level& a, const Level& b);

// E[ sum_k <a_k, b_k> ] over the shared time range of the two processes.
double expect_sum(const AdaptedProcess& a, const AdaptedProcess& b);

struct Path {
  std::vector<int> bits;  // 0 = +1 step, 1 = -1 step
  double probability = 0.0;
};

// All 2^depth full paths in atom-index order; probabilities are exact dyadics.
std::vector<Path> enumerate_paths(const TreeSpace& tree);

// Bit string for atom h at the given level, e.g. "010"; empty at level 0.
std::string atom_bits(std::size_t h, int level);

// Appends rows "name,time,path,component,value" for every atom and component.
// `first_time` is the time index of at[0] within the dumped process.
void append_csv(std::ostream& os, const std::string& name, const AdaptedProcess& p,
                int first_time = 0);

}  // namespace bslq

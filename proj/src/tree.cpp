#include "bslq/tree.hpp"

#include <cstdlib>
#include <ostream>
#include <stdexcept>

namespace bslq {

int TreeSpace::path_cap() {
  if (const char* env = std::getenv("BSLQ_MAX_DEPTH")) {
    int cap = std::atoi(env);
    if (cap > 0) return cap;
  }
  return 22;
}

bool AdaptedProcess::shape_equals(const AdaptedProcess& o) const {
  if (dim != o.dim || at.size() != o.at.size()) return false;
  for (std::size_t k = 0; k < at.size(); ++k)
    if (at[k].size() != o.at[k].size()) return false;
  return true;
}

std::pair<Level, Level> cond_pair(const Level& next) {
  if (next.size() < 2 || next.size() % 2 != 0)
    throw std::invalid_argument("cond_pair: level size must be even and >= 2");
  Level drift(next.size() / 2), mart(next.size() / 2);
  for (std::size_t h = 0; h < drift.size(); ++h) {
    drift[h] = 0.5 * (next[2 * h] + next[2 * h + 1]);
    mart[h] = 0.5 * (next[2 * h] - next[2 * h + 1]);
  }
  return {std::move(drift), std::move(mart)};
}

double expect_dot(const Level& a, const Level& b) {
  if (a.size() != b.size()) throw std::invalid_argument("expect_dot: size mismatch");
  double sum = 0.0;
  for (std::size_t h = 0; h < a.size(); ++h) sum += a[h].dot(b[h]);
  return sum / static_cast<double>(a.size());
}

double expect_sum(const AdaptedProcess& a, const AdaptedProcess& b) {
  if (!a.shape_equals(b)) throw std::invalid_argument("expect_sum: shape mismatch");
  double total = 0.0;
  for (std::size_t k = 0; k < a.at.size(); ++k) total += expect_dot(a.at[k], b.at[k]);
  return total;
}

std::vector<Path> enumerate_paths(const TreeSpace& tree) {
  if (tree.depth > TreeSpace::path_cap())
    throw std::length_error("enumerate_paths: depth exceeds path cap");
  std::size_t count = std::size_t{1} << tree.depth;
  double prob = 1.0 / static_cast<double>(count);
  std::vector<Path> paths(count);
  for (std::size_t h = 0; h < count; ++h) {
    paths[h].bits.resize(tree.depth);
    for (int i = 0; i < tree.depth; ++i)
      paths[h].bits[i] = static_cast<int>((h >> (tree.depth - 1 - i)) & 1u);
    paths[h].probability = prob;
  }
  return paths;
}

std::string atom_bits(std::size_t h, int level) {
  std::string s(level, '0');
  for (int i = 0; i < level; ++i)
    if ((h >> (level - 1 - i)) & 1u) s[i] = '1';
  return s;
}

void append_csv(std::ostream& os, const std::string& name, const AdaptedProcess& p,
                int first_time) {
  char buf[40];
  for (std::size_t k = 0; k < p.at.size(); ++k) {
    int level = 0;
    while ((std::size_t{1} << level) < p.at[k].size()) ++level;
    for (std::size_t h = 0; h < p.at[k].size(); ++h) {
      std::string bits = atom_bits(h, level);
      for (int c = 0; c < p.dim; ++c) {
        std::snprintf(buf, sizeof buf, "%.17g", p.at[k][h](c));
        os << name << ',' << (first_time + static_cast<int>(k)) << ',' << bits << ','
           << c << ',' << buf << '\n';
      }
    }
  }
}

}  // namespace bslq

// Generates a random, assumption-satisfying problem file for benchmarking and
// fuzzing: gen_problem SEED [MAX_N MAX_M MAX_HORIZON] > problem.json
#include "bslq/problem.hpp"
#include "bslq/randspec.hpp"

#include <cstdio>
#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
  if (argc < 2 || argc > 5) {
    std::fprintf(stderr, "usage: gen_problem SEED [MAX_N MAX_M MAX_HORIZON]\n");
    return 2;
  }
  std::uint64_t seed = std::strtoull(argv[1], nullptr, 10);
  int max_n = argc > 2 ? std::atoi(argv[2]) : 4;
  int max_m = argc > 3 ? std::atoi(argv[3]) : 3;
  int max_horizon = argc > 4 ? std::atoi(argv[4]) : 5;
  bslq::ProblemSpec s = bslq::random_spec(seed, max_n, max_m, max_horizon);
  bslq::ValidationReport rep = bslq::validate_spec(s);
  if (!rep.ok()) {
    std::fprintf(stderr, "generated spec failed validation:\n%s",
                 rep.to_string().c_str());
    return 1;
  }
  std::cout << bslq::save_spec(s);
  return 0;
}

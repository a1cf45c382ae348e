#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bslq/randspec.hpp"
#include "bslq/verify.hpp"
#include "helpers.hpp"

using namespace bslq;

TEST_CASE("random specs validate, solve, and verify across seeds") {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    CAPTURE(seed);
    ProblemSpec s = random_spec(seed);
    ValidationReport rep = validate_spec(s);
    REQUIRE_MESSAGE(rep.ok(), rep.to_string());
    TreeProblem tp = broadcast(s, TreeSpace(s.horizon));
    FeedbackSolution fs = solve(tp);
    bool small = static_cast<std::size_t>(tp.m) * ((std::size_t{1} << tp.N) - 1) <= 64;
    VerificationReport vr = verify(tp, fs, seed, small);
    CHECK_MESSAGE(vr.pass, "stationarity ", vr.stationarity_max_residual,
                  " expansion ", vr.expansion_max_error, " superposition ",
                  vr.superposition_error, " value ", vr.value_match_closed_form,
                  " qp ", vr.qp_vs_ustar);
  }
}

TEST_CASE("random spec serialization round-trips through JSON") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    CAPTURE(seed);
    ProblemSpec s = random_spec(seed);
    std::string text = save_spec(s);
    ProblemSpec r = load_spec(text);
    CHECK(save_spec(r) == text);
    TreeProblem a = broadcast(s, TreeSpace(s.horizon));
    TreeProblem b = broadcast(r, TreeSpace(r.horizon));
    CHECK(std::abs(solve(a).value - solve(b).value) == 0.0);
  }
}

TEST_CASE("random generator is deterministic in the seed") {
  ProblemSpec a = random_spec(77);
  ProblemSpec b = random_spec(77);
  CHECK(save_spec(a) == save_spec(b));
  ProblemSpec c = random_spec(78);
  CHECK(save_spec(a) != save_spec(c));
}

TEST_CASE("verification flags a corrupted solution") {
  TreeProblem tp = testutil::example_problem();
  FeedbackSolution fs = solve(tp);
  for (std::size_t k = 0; k < fs.b.size(); ++k)
    for (std::size_t h = 0; h < fs.b[k].size(); ++h) {
      fs.u_star.at[k][h] -= fs.b[k][h];
      fs.b[k][h].setZero();
    }
  VerificationReport vr = verify(tp, fs, 0, false);
  CHECK_FALSE(vr.pass);
  CHECK_FALSE(vr.pass_stationarity);
  CHECK(vr.stationarity_max_residual > 1e-3);
}

TEST_CASE("verification passes on the all-zero problem with zero residuals") {
  TreeProblem tp = zero_offsets(testutil::example_problem());
  FeedbackSolution fs = solve(tp);
  VerificationReport vr = verify(tp, fs, 0, true);
  CHECK(vr.pass);
  CHECK(vr.stationarity_max_residual == 0.0);
  CHECK(vr.oracle_cost == 0.0);
  CHECK(vr.superposition_error == 0.0);
}

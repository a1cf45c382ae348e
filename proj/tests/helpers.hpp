#pragma once

#include "bslq/problem.hpp"

namespace testutil {

using bslq::Mat;
using bslq::Vec;

// Four-period benchmark problem (same data as the CLI's built-in example).
inline bslq::ProblemSpec example_spec() {
  bslq::ProblemSpec s;
  s.horizon = 4;
  s.state_dim = 3;
  s.control_dim = 2;
  Mat A(3, 3), B(3, 2), C(3, 3), Q(3, 3), S(2, 3), R(2, 2), G0(3, 3);
  A << 0.8, 0.2, 0.1, 0.0, 0.9, 0.3, 0.0, 0.1, 0.7;
  B << 0.8, 0.2, 0.5, 0.6, 0.3, 0.1;
  C << 0.3, 0.2, 0.1, 0.2, 0.5, 0.6, 0.1, 0.4, 0.2;
  Q.setZero();
  Q.diagonal() << 5.0, 3.0, 4.0;
  S << 0.5, 0.0, 0.0, 0.0, 0.5, 0.2;
  R.setZero();
  R.diagonal() << 10.0, 5.0;
  G0.setZero();
  G0.diagonal() << 2.0, 1.0, 1.0;
  s.A.assign(4, A);
  s.B.assign(4, B);
  s.C.assign(4, C);
  s.Q.assign(4, Q);
  s.S.assign(4, S);
  s.R.assign(4, R);
  s.G0 = G0;
  Vec q(3), eta(3), rho(2), xi(3);
  q << 0.1, 0.0, 0.1;
  eta << 1.0, 0.0, 1.0;
  rho << 0.0, 1.0;
  xi << 1.0, 1.0, 1.0;
  s.q.levels.assign(4, bslq::Level{q});
  s.eta.levels.assign(4, bslq::Level{eta});
  s.rho.levels.assign(4, bslq::Level{rho});
  s.xi = bslq::Level{xi};
  return s;
}

inline bslq::TreeProblem example_problem() {
  bslq::ProblemSpec s = example_spec();
  return bslq::broadcast(s, bslq::TreeSpace(s.horizon));
}

inline Mat mat3(double a, double b, double c, double d, double e, double f, double g,
                double h, double i) {
  Mat M(3, 3);
  M << a, b, c, d, e, f, g, h, i;
  return M;
}

inline Mat sym3(double d0, double o01, double o02, double d1, double o12, double d2) {
  return mat3(d0, o01, o02, o01, d1, o12, o02, o12, d2);
}

inline Vec vec3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

inline Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

inline double max_abs_diff(const Mat& a, const Mat& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// Frozen reference values for the benchmark problem, computed by an
// independent implementation and pinned here at full precision.
namespace frozen {
inline const double optimal_cost = 14.692474009687782;
inline const double value_theorem_formula = 27.560558046587008;
inline const double value_derivation_formula = 27.624216631271977;
inline const double qp_min_eig = 0.63677873047208988;
inline Vec u0() { return vec2(-0.00855452546390739, -0.1603260797285418); }
inline Vec y0() {
  return vec3(0.08152432563333457, -0.2600744341795784, 0.18923172615744352);
}
inline Vec x0() {
  return vec3(0.16304865126666918, -0.2600744341795784, 0.18923172615744352);
}
inline Mat H1() {
  return sym3(1.4643200000000003, 0.46272000000000013, 0.24512000000000006, 1.04338,
              0.45814, 0.64386);
}
inline Mat H4() {
  return sym3(0.8848688209791183, 1.7796023623395711, 1.4199752795602265,
              4.529861915107521, 3.702312161310674, 3.0579556869393585);
}
inline Mat Sigma0() {
  return sym3(0.12066574371810851, 0.10648052311332484, 0.04402375633521763,
              0.16326642235924782, 0.04409176919349072, 0.01662346322027623);
}
inline Mat Sigma3() {
  return sym3(0.04905760423980908, 0.03607259289248503, 0.01868142212901285,
              0.06280980640903434, 0.01564640316895721, 0.00721450773723898);
}
inline Mat SigmaCtrl0() {
  return sym3(0.20677527855735223, 0.2728715556618624, 0.14411049854421898,
              0.5055663249816218, 0.2532491141659287, 0.1447342242550604);
}
inline Vec phi0() {
  return vec3(0.26657520860470985, 0.01665051782978905, 0.31949122356771675);
}
inline Vec phi1() {
  return vec3(0.5367067061634108, 0.3242889372441246, 0.4584402509695219);
}
inline Vec phi2() {
  return vec3(0.9050834677872293, 0.7555235302590529, 0.66556157151864);
}
inline Vec phi3() {
  return vec3(1.1644412442973147, 1.08599141210145, 0.8818347105281048);
}
inline Vec phi_ctrl0() {
  return vec3(0.0715421188718728, -0.29914520394825583, 0.17425343559510598);
}
}  // namespace frozen

}  // namespace testutil

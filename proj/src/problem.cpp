#include "bslq/problem.hpp"

#include "bslq/jsonio.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <set>
#include <sstream>

namespace bslq {
namespace {

double sym_violation(const Mat& M) {
  double norm = M.norm();
  if (norm == 0.0) return 0.0;
  return (M - M.transpose()).norm() / norm;
}

double min_eig(const Mat& M) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (M + M.transpose()),
                                        Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double spectral_norm_sym(const Mat& M) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (M + M.transpose()),
                                        Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// ---- JSON helpers -----------------------------------------------------------

Mat parse_matrix(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw ParseError(field + ": expected a matrix (array of rows)");
  Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  Mat M(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<Eigen::Index>(j[r].size()) != cols)
      throw ParseError(field + ": ragged matrix rows");
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!j[r][c].is_number())
        throw ParseError(field + ": matrix entry is not a number");
      M(r, c) = j[r][c].get<double>();
      if (!std::isfinite(M(r, c)))
        throw ParseError(field + ": matrix entry is not finite");
    }
  }
  return M;
}

Vec parse_vector(const Json& j, const std::string& field) {
  if (!j.is_array())
    throw ParseError(field + ": expected a vector (array of numbers)");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!j[i].is_number()) throw ParseError(field + ": vector entry is not a number");
    v(i) = j[i].get<double>();
    if (!std::isfinite(v(i))) throw ParseError(field + ": vector entry is not finite");
  }
  return v;
}

// M | [M]: a single matrix broadcast over every step, or one matrix per step.
std::vector<Mat> parse_matrix_seq(const Json& j, const std::string& field, int N) {
  std::vector<Mat> out;
  if (j.is_array() && !j.empty() && j[0].is_array() && !j[0].empty() &&
      j[0][0].is_array()) {
    if (static_cast<int>(j.size()) != N)
      throw ParseError(field + ": matrix list length must equal horizon");
    for (const auto& e : j) out.push_back(parse_matrix(e, field));
  } else {
    out.assign(static_cast<std::size_t>(N), parse_matrix(j, field));
  }
  return out;
}

std::size_t parse_path(const Json& j, const std::string& field) {
  std::size_t h = 0;
  for (const auto& b : j) {
    if (!b.is_number_integer() || (b.get<int>() != 0 && b.get<int>() != 1))
      throw ParseError(field + ": path bits must be 0 or 1");
    h = (h << 1) | static_cast<unsigned>(b.get<int>());
  }
  return h;
}

// tree-table: {"atoms": [[[bits...], [vector...]], ...]}. The path length is the
// time index of the entry; every atom of every covered level must be present.
void parse_tree_table(const Json& j, const std::string& field, int dim,
                      int min_len, int max_len, std::vector<Level>& out) {
  if (!j.is_object() || !j.contains("atoms") || j.size() != 1)
    throw ParseError(field + ": tree table must be {\"atoms\": [...]}");
  out.assign(static_cast<std::size_t>(max_len - min_len + 1), Level{});
  std::vector<std::vector<bool>> seen(out.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    std::size_t count = std::size_t{1} << (min_len + static_cast<int>(k));
    out[k].assign(count, Vec());
    seen[k].assign(count, false);
  }
  for (const auto& entry : j["atoms"]) {
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_array())
      throw ParseError(field + ": atom entry must be [path, vector]");
    int len = static_cast<int>(entry[0].size());
    if (len < min_len || len > max_len)
      throw ParseError(field + ": atom path length out of range");
    std::size_t h = parse_path(entry[0], field);
    Vec v = parse_vector(entry[1], field);
    if (v.size() != dim) throw ParseError(field + ": atom vector has wrong dimension");
    std::size_t k = static_cast<std::size_t>(len - min_len);
    if (seen[k][h]) throw ParseError(field + ": duplicate atom path");
    seen[k][h] = true;
    out[k][h] = v;
  }
  for (std::size_t k = 0; k < out.size(); ++k)
    for (std::size_t h = 0; h < out[k].size(); ++h)
      if (!seen[k][h])
        throw ParseError(field + ": tree table is missing atom " +
                         atom_bits(h, min_len + static_cast<int>(k)));
}

// V | [V] | tree-table for per-step adapted inputs.
AdaptedInput parse_adapted(const Json& j, const std::string& field, int dim, int N) {
  AdaptedInput out;
  if (j.is_object()) {
    parse_tree_table(j, field, dim, 0, N - 1, out.levels);
    return out;
  }
  if (!j.is_array()) throw ParseError(field + ": expected vector, list, or tree table");
  if (!j.empty() && j[0].is_array()) {
    if (static_cast<int>(j.size()) != N)
      throw ParseError(field + ": vector list length must equal horizon");
    for (const auto& e : j) {
      Vec v = parse_vector(e, field);
      if (v.size() != dim) throw ParseError(field + ": vector has wrong dimension");
      out.levels.push_back(Level{v});
    }
  } else {
    Vec v = parse_vector(j, field);
    if (v.size() != dim) throw ParseError(field + ": vector has wrong dimension");
    out.levels.assign(static_cast<std::size_t>(N), Level{v});
  }
  return out;
}

Json matrix_json(const Mat& M) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(row);
  }
  return rows;
}

Json vector_json(const Vec& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json adapted_json(const std::vector<Level>& levels, int first_len) {
  bool single_atom = true;
  for (const Level& lv : levels)
    if (lv.size() != 1) single_atom = false;
  if (single_atom) {
    bool constant = true;
    for (const Level& lv : levels)
      if (lv[0] != levels[0][0]) constant = false;
    if (constant) return vector_json(levels[0][0]);
    Json out = Json::array();
    for (const Level& lv : levels) out.push_back(vector_json(lv[0]));
    return out;
  }
  // path-dependent: full tree table; size-1 levels are broadcast to all atoms
  Json atoms = Json::array();
  for (std::size_t k = 0; k < levels.size(); ++k) {
    int len = first_len + static_cast<int>(k);
    std::size_t want = std::size_t{1} << len;
    for (std::size_t h = 0; h < want; ++h) {
      const Vec& v = levels[k].size() == 1 ? levels[k][0] : levels[k][h];
      Json bits = Json::array();
      std::string s = atom_bits(h, len);
      for (char c : s) bits.push_back(c - '0');
      atoms.push_back(Json::array({bits, vector_json(v)}));
    }
  }
  return Json{{"atoms", atoms}};
}

}  // namespace

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& v : violations) {
    os << (v.structural ? "structural: " : "assumption: ") << v.what;
    if (v.index >= 0) os << " (k=" << v.index << ")";
    os << " [magnitude " << v.magnitude << "]\n";
  }
  return os.str();
}

ValidationReport validate_spec(const ProblemSpec& spec, const Tolerances& tol) {
  ValidationReport rep;
  auto add = [&](std::string what, int index, double mag, bool structural = false) {
    rep.violations.push_back({std::move(what), index, mag, structural});
  };
  int N = spec.horizon, n = spec.state_dim, m = spec.control_dim;
  if (N < 1) { add("horizon must be >= 1", -1, N, true); return rep; }
  if (n < 1 || m < 1) { add("state/control dimension must be >= 1", -1, 0, true); return rep; }

  auto check_seq = [&](const std::vector<Mat>& seq, const char* name, int rows, int cols) {
    if (static_cast<int>(seq.size()) != N) {
      add(std::string(name) + " sequence length mismatch", -1,
          static_cast<double>(seq.size()), true);
      return false;
    }
    for (int k = 0; k < N; ++k)
      if (seq[k].rows() != rows || seq[k].cols() != cols) {
        add(std::string(name) + " has wrong dimensions", k, 0, true);
        return false;
      }
    return true;
  };
  bool shapes = true;
  shapes &= check_seq(spec.A, "A", n, n);
  shapes &= check_seq(spec.B, "B", n, m);
  shapes &= check_seq(spec.C, "C", n, n);
  shapes &= check_seq(spec.Q, "Q", n, n);
  shapes &= check_seq(spec.S, "S", m, n);
  shapes &= check_seq(spec.R, "R", m, m);
  if (spec.G0.rows() != n || spec.G0.cols() != n) {
    add("G0 has wrong dimensions", -1, 0, true);
    shapes = false;
  }
  auto check_adapted = [&](const AdaptedInput& in, const char* name, int dim) {
    if (static_cast<int>(in.levels.size()) != N) {
      add(std::string(name) + " level count mismatch", -1,
          static_cast<double>(in.levels.size()), true);
      return;
    }
    for (int k = 0; k < N; ++k) {
      std::size_t want = std::size_t{1} << k;
      if (in.levels[k].size() != 1 && in.levels[k].size() != want)
        add(std::string(name) + " atom count mismatch", k,
            static_cast<double>(in.levels[k].size()), true);
      for (const Vec& v : in.levels[k])
        if (v.size() != dim)
          add(std::string(name) + " entry has wrong dimension", k,
              static_cast<double>(v.size()), true);
    }
  };
  check_adapted(spec.q, "q", n);
  check_adapted(spec.eta, "eta", n);
  check_adapted(spec.rho, "rho", m);
  {
    std::size_t want = std::size_t{1} << N;
    if (spec.xi.size() != 1 && spec.xi.size() != want)
      add("xi atom count mismatch", -1, static_cast<double>(spec.xi.size()), true);
    for (const Vec& v : spec.xi)
      if (v.size() != n) add("xi entry has wrong dimension", -1, v.size(), true);
  }
  if (!shapes || !rep.ok()) return rep;

  // standing assumptions: symmetry, G0 >= 0, R strictly positive, Q - S^T R^-1 S >= 0
  double a = sym_violation(spec.G0);
  if (a > tol.sym_rel) add("G0 not symmetric", -1, a);
  for (int k = 0; k < N; ++k) {
    a = sym_violation(spec.Q[k]);
    if (a > tol.sym_rel) add("Q_" + std::to_string(k) + " not symmetric", k, a);
    a = sym_violation(spec.R[k]);
    if (a > tol.sym_rel) add("R_" + std::to_string(k) + " not symmetric", k, a);
  }
  if (!rep.ok()) return rep;

  double e = min_eig(spec.G0);
  if (e < -tol.psd_rel * std::max(1.0, spectral_norm_sym(spec.G0)))
    add("G0 not PSD", -1, e);
  for (int k = 0; k < N; ++k) {
    Mat Rs = 0.5 * (spec.R[k] + spec.R[k].transpose());
    double re = min_eig(Rs);
    if (re < tol.r_pos_rel * std::max(1.0, spectral_norm_sym(Rs))) {
      add("R_" + std::to_string(k) + " not uniformly positive", k, re);
      continue;  // Qbar needs R^-1
    }
    Mat Qbar = spec.Q[k] - spec.S[k].transpose() * Rs.ldlt().solve(spec.S[k]);
    double qe = min_eig(Qbar);
    if (qe < -tol.psd_rel * std::max(1.0, spectral_norm_sym(Qbar)))
      add("Q_" + std::to_string(k) + " - S_" + std::to_string(k) + "^T R_" +
              std::to_string(k) + "^-1 S_" + std::to_string(k) + " not PSD",
          k, qe);
  }
  return rep;
}

ProblemSpec load_spec(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("top level must be a JSON object");
  static const std::set<std::string> known = {
      "horizon", "state_dim", "control_dim", "A", "B", "C", "Q", "S", "R",
      "G0", "q", "eta", "rho", "xi"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw ParseError("unknown field \"" + it.key() + "\"");
  for (const auto& f : known)
    if (!j.contains(f)) throw ParseError("missing field \"" + f + "\"");

  ProblemSpec s;
  if (!j["horizon"].is_number_integer()) throw ParseError("horizon must be an integer");
  s.horizon = j["horizon"].get<int>();
  if (s.horizon < 1) throw ParseError("horizon must be >= 1");
  if (s.horizon > TreeSpace::path_cap())
    throw ParseError("horizon exceeds path cap (set BSLQ_MAX_DEPTH to override)");
  s.state_dim = j["state_dim"].get<int>();
  s.control_dim = j["control_dim"].get<int>();
  if (s.state_dim < 1 || s.control_dim < 1)
    throw ParseError("state_dim and control_dim must be >= 1");

  int N = s.horizon, n = s.state_dim, m = s.control_dim;
  s.A = parse_matrix_seq(j["A"], "A", N);
  s.B = parse_matrix_seq(j["B"], "B", N);
  s.C = parse_matrix_seq(j["C"], "C", N);
  s.Q = parse_matrix_seq(j["Q"], "Q", N);
  s.S = parse_matrix_seq(j["S"], "S", N);
  s.R = parse_matrix_seq(j["R"], "R", N);
  s.G0 = parse_matrix(j["G0"], "G0");
  s.q = parse_adapted(j["q"], "q", n, N);
  s.eta = parse_adapted(j["eta"], "eta", n, N);
  s.rho = parse_adapted(j["rho"], "rho", m, N);
  if (j["xi"].is_object()) {
    std::vector<Level> lv;
    parse_tree_table(j["xi"], "xi", n, N, N, lv);
    s.xi = lv[0];
  } else {
    Vec v = parse_vector(j["xi"], "xi");
    if (v.size() != n) throw ParseError("xi: vector has wrong dimension");
    s.xi = Level{v};
  }

  ValidationReport structural = validate_spec(s);
  for (const auto& v : structural.violations)
    if (v.structural) throw ParseError(v.what);
  return s;
}

std::string save_spec(const ProblemSpec& s) {
  Json j;
  j["horizon"] = s.horizon;
  j["state_dim"] = s.state_dim;
  j["control_dim"] = s.control_dim;
  auto seq_json = [](const std::vector<Mat>& seq) {
    bool constant = true;
    for (const auto& M : seq)
      if (M != seq[0]) { constant = false; break; }
    if (constant) return matrix_json(seq[0]);
    Json out = Json::array();
    for (const auto& M : seq) out.push_back(matrix_json(M));
    return out;
  };
  j["A"] = seq_json(s.A);
  j["B"] = seq_json(s.B);
  j["C"] = seq_json(s.C);
  j["Q"] = seq_json(s.Q);
  j["S"] = seq_json(s.S);
  j["R"] = seq_json(s.R);
  j["G0"] = matrix_json(s.G0);
  j["q"] = adapted_json(s.q.levels, 0);
  j["eta"] = adapted_json(s.eta.levels, 0);
  j["rho"] = adapted_json(s.rho.levels, 0);
  if (s.xi.size() == 1) {
    j["xi"] = vector_json(s.xi[0]);
  } else {
    std::vector<Level> lv{s.xi};
    j["xi"] = adapted_json(lv, s.horizon);
  }
  return dump_json(j);
}

TreeProblem broadcast(const ProblemSpec& spec, const TreeSpace& tree) {
  if (tree.depth != spec.horizon)
    throw std::invalid_argument("broadcast: tree depth must equal horizon");
  TreeProblem tp;
  tp.N = spec.horizon;
  tp.n = spec.state_dim;
  tp.m = spec.control_dim;
  tp.tree = tree;
  tp.A = spec.A;
  tp.B = spec.B;
  tp.C = spec.C;
  tp.S = spec.S;
  tp.G0 = 0.5 * (spec.G0 + spec.G0.transpose());
  tp.Q.reserve(tp.N);
  tp.R.reserve(tp.N);
  for (int k = 0; k < tp.N; ++k) {
    tp.Q.push_back(0.5 * (spec.Q[k] + spec.Q[k].transpose()));
    tp.R.push_back(0.5 * (spec.R[k] + spec.R[k].transpose()));
  }
  auto fill = [&](const AdaptedInput& in, const char* name) {
    std::vector<Level> out(static_cast<std::size_t>(tp.N));
    for (int k = 0; k < tp.N; ++k) {
      std::size_t want = tree.atoms(k);
      if (in.levels[k].size() == want) {
        out[k] = in.levels[k];
      } else if (in.levels[k].size() == 1) {
        out[k].assign(want, in.levels[k][0]);
      } else {
        throw std::invalid_argument(std::string("broadcast: ") + name +
                                    " atom count mismatch");
      }
    }
    return out;
  };
  tp.q = fill(spec.q, "q");
  tp.eta = fill(spec.eta, "eta");
  tp.rho = fill(spec.rho, "rho");
  std::size_t want = tree.atoms(tp.N);
  if (spec.xi.size() == want) {
    tp.xi = spec.xi;
  } else if (spec.xi.size() == 1) {
    tp.xi.assign(want, spec.xi[0]);
  } else {
    throw std::invalid_argument("broadcast: xi atom count mismatch");
  }
  return tp;
}

}  // namespace bslq

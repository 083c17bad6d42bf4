#include "sixwave/liouville.hpp"

#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

namespace sixwave {

namespace {

struct FrameEdge {
  int lower;
  int upper;
  double detuning;  // effective detuning at this velocity class, rad/s
};

// Rotating-frame level shifts.  Each driven or quantized transition fixes the
// frame offset between its two levels (epsilon_upper = epsilon_lower -
// detuning); a breadth-first walk over the transition graph assigns all
// connected levels.  A loop that does not close means the drive frequencies
// admit no common rotating frame (physically: the closed multi-wave loop is
// not frequency-matched), which is rejected.
std::vector<double> frame_shifts(const LevelScheme& scheme,
                                 const std::vector<FrameEdge>& edges) {
  const int d = scheme.dimension();
  std::vector<double> eps(d, 0.0);
  std::vector<char> visited(d, 0);
  std::vector<std::vector<std::pair<int, double>>> adj(d);
  double scale = 1.0;
  for (const auto& e : edges) {
    adj[e.lower].push_back({e.upper, -e.detuning});
    adj[e.upper].push_back({e.lower, +e.detuning});
    scale = std::max(scale, std::abs(e.detuning));
  }
  const double tol = 1e-9 * scale;
  for (int root = 0; root < d; ++root) {
    if (visited[root]) continue;
    visited[root] = 1;
    eps[root] = 0.0;
    std::queue<int> q;
    q.push(root);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (const auto& [v, step] : adj[u]) {
        const double candidate = eps[u] + step;
        if (!visited[v]) {
          visited[v] = 1;
          eps[v] = candidate;
          q.push(v);
        } else if (std::abs(eps[v] - candidate) > tol) {
          std::ostringstream msg;
          msg << "transition loop through levels " << u + 1 << " and " << v + 1
              << " does not close (" << std::abs(eps[v] - candidate)
              << " rad/s mismatch): drive frequencies admit no common "
                 "rotating frame";
          throw config_error(msg.str());
        }
      }
    }
  }
  return eps;
}

double effective_detuning(const DetuningExpr& expr, const DriveParameters& dr,
                          double hyperfine, double wavenumber, int sign,
                          double velocity) {
  return expr.evaluate(dr.one_photon_detuning, dr.two_photon_detuning,
                       dr.dressing_detuning, hyperfine) -
         sign * wavenumber * velocity;
}

// Heisenberg-picture coherent drift: d sigma_ij/dt = i sum_k (h_ik sigma_kj -
// h_kj sigma_ik) for a real symmetric single-atom Hamiltonian h.
void add_hamiltonian(MatrixXc& m, const Eigen::MatrixXd& h, int d) {
  const Complex iu(0.0, 1.0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const int row = i * d + j;
      for (int k = 0; k < d; ++k) {
        if (h(i, k) != 0.0) m(row, k * d + j) += iu * h(i, k);
        if (h(k, j) != 0.0) m(row, i * d + k) -= iu * h(k, j);
      }
    }
}

// Adjoint dissipator of the jump |target><source| at the given rate:
// feeds sigma_tt from sigma_ss and damps every component with a source index
// at rate/2 per side.
void add_jump(MatrixXc& m, int target, int source, double rate, int d) {
  if (rate == 0.0) return;
  m(target * d + target, source * d + source) += rate;
  for (int j = 0; j < d; ++j) {
    m(source * d + j, source * d + j) -= 0.5 * rate;
    m(j * d + source, j * d + source) -= 0.5 * rate;
  }
}

// Adjoint dissipator of the Hermitian jump sqrt(c)*K with K diagonal real:
// dephases sigma_ij at (c/2)(K_ii - K_jj)^2, populations untouched.
void add_diagonal_dephasing(MatrixXc& m, const Eigen::VectorXd& k_diag,
                            double c, int d) {
  if (c == 0.0) return;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const double diff = k_diag(i) - k_diag(j);
      m(i * d + j, i * d + j) -= 0.5 * c * diff * diff;
    }
}

std::vector<int> ground_indices(const LevelScheme& scheme) {
  std::vector<int> out;
  for (int i = 0; i < scheme.dimension(); ++i)
    if (scheme.levels[i].ground) out.push_back(i);
  return out;
}

} // namespace

VectorXc solve_pump_steady_state(const MatrixXc& drift, int dim) {
  const int n = dim * dim;
  MatrixXc b = drift;
  // Trace preservation makes the population rows linearly dependent; replace
  // one with the unit-trace constraint.
  b.row(0).setZero();
  for (int k = 0; k < dim; ++k) b(0, k * dim + k) = 1.0;
  VectorXc rhs = VectorXc::Zero(n);
  rhs(0) = 1.0;
  Eigen::PartialPivLU<MatrixXc> lu(b);
  VectorXc x = lu.solve(rhs);

  const double scale =
      drift.cwiseAbs().maxCoeff() * std::max(1.0, x.cwiseAbs().maxCoeff());
  const double residual = (drift * x).cwiseAbs().maxCoeff();
  if (!x.allFinite() || residual > 1e-10 * std::max(scale, 1.0))
    throw numerical_error(
        "pump steady state is degenerate or ill-conditioned (residual " +
        std::to_string(residual) + ")");
  return x;
}

MatrixXc solve_trace_deflated(const MatrixXc& drift, const MatrixXc& rhs,
                              int dim) {
  MatrixXc b = drift;
  b.row(0).setZero();
  for (int k = 0; k < dim; ++k) b(0, k * dim + k) = 1.0;
  MatrixXc r = rhs;
  for (int c = 0; c < r.cols(); ++c) {
    Complex pop_sum = 0.0;
    for (int k = 0; k < dim; ++k) pop_sum += rhs(k * dim + k, c);
    const double scale = std::max(1.0, rhs.col(c).cwiseAbs().maxCoeff());
    if (std::abs(pop_sum) > 1e-9 * scale)
      throw numerical_error(
          "trace-deflated solve needs trace-orthogonal right-hand sides");
    r(0, c) = 0.0;  // replaced row now encodes the trace-zero constraint
  }
  Eigen::PartialPivLU<MatrixXc> lu(b);
  MatrixXc y = lu.solve(r);
  if (!y.allFinite())
    throw numerical_error("trace-deflated solve produced non-finite values");
  return y;
}

MatrixXc build_diffusion_matrix(const MatrixXc& drift,
                                const VectorXc& steady_state, int dim,
                                DiffusionKind kind) {
  const int n = dim * dim;
  MatrixXc d_out = MatrixXc::Zero(n, n);
  if (kind == DiffusionKind::identity) {
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) d_out(i * dim + j, j * dim + i) = 1.0;
    return d_out;
  }
  // Generalized Einstein relation D = -(M S + S M^T) at the steady state,
  // with the operator-product contraction S_(mn),(kl) = delta_nk <sigma_ml>.
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      const int row = i * dim + j;
      for (int k = 0; k < dim; ++k)
        for (int l = 0; l < dim; ++l) {
          Complex ms = 0.0, smt = 0.0;
          for (int m = 0; m < dim; ++m)
            ms += drift(row, m * dim + k) * steady_state(m * dim + l);
          for (int m = 0; m < dim; ++m)
            smt += steady_state(i * dim + m) * drift(k * dim + l, j * dim + m);
          d_out(row, k * dim + l) = -(ms + smt);
        }
    }
  return d_out;
}

double diffusion_min_eigenvalue(const MatrixXc& diffusion, int dim) {
  const int n = dim * dim;
  MatrixXc h(n, n);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      h.row(i * dim + j) = diffusion.row(j * dim + i);
  // h = P D is Hermitian for a physical correlator; symmetrize the rounding.
  h = Complex(0.5, 0.0) * (h + h.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

LiouvilleSystem build_liouville_system(const LevelScheme& scheme,
                                       const DriveParameters& drives,
                                       double velocity,
                                       DiffusionKind diffusion_kind) {
  {
    auto problems = scheme.validate_structure();
    if (!problems.empty())
      throw config_error("invalid scheme '" + scheme.name +
                         "': " + problems.front());
  }
  const int d = scheme.dimension();
  const int n = d * d;

  bool has_pump = false, has_dress = false, has_a = false, has_b = false;
  for (const auto& t : scheme.classical)
    (t.role == ClassicalRole::pump ? has_pump : has_dress) = true;
  for (const auto& t : scheme.quantized)
    (t.mode == QuantizedMode::a ? has_a : has_b) = true;
  if (drives.pump_rabi != 0.0 && !has_pump)
    throw config_error("nonzero pump Rabi frequency but no pump transition");
  if (drives.dressing_rabi != 0.0 && !has_dress)
    throw config_error(
        "nonzero dressing Rabi frequency but no dressing transition");
  if (drives.coupling_a != 0.0 && !has_a)
    throw config_error("nonzero coupling for mode a but no mode-a transition");
  if (drives.coupling_b != 0.0 && !has_b)
    throw config_error("nonzero coupling for mode b but no mode-b transition");

  auto sign_of = [&](const ClassicalTransition& t) {
    if (t.role == ClassicalRole::pump && drives.pump_sign_override)
      return *drives.pump_sign_override;
    if (t.role == ClassicalRole::dressing && drives.dressing_sign_override)
      return *drives.dressing_sign_override;
    return t.propagation_sign;
  };
  auto sign_of_quantized = [&](const QuantizedTransition& t) {
    // Quantized modes co-propagate with the pump: the pump override, when
    // set, applies to them as well.
    if (drives.pump_sign_override) return *drives.pump_sign_override;
    return t.propagation_sign;
  };

  std::vector<FrameEdge> edges;
  for (const auto& t : scheme.classical)
    edges.push_back({t.lower, t.upper,
                     effective_detuning(t.detuning, drives,
                                        scheme.hyperfine_splitting,
                                        t.wavenumber, sign_of(t), velocity)});
  for (const auto& t : scheme.quantized)
    edges.push_back(
        {t.lower, t.upper,
         effective_detuning(t.detuning, drives, scheme.hyperfine_splitting,
                            t.wavenumber, sign_of_quantized(t), velocity)});
  const std::vector<double> eps = frame_shifts(scheme, edges);

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) h(i, i) = eps[i];
  for (const auto& t : scheme.classical) {
    const double rabi = t.role == ClassicalRole::pump ? drives.pump_rabi
                                                      : drives.dressing_rabi;
    // A classical drive E0 cos(wt) with Rabi frequency rabi = d.E0/hbar
    // contributes the rotating-wave matrix element rabi/2.
    h(t.lower, t.upper) += 0.5 * rabi;
    h(t.upper, t.lower) += 0.5 * rabi;
  }

  MatrixXc m = MatrixXc::Zero(n, n);
  add_hamiltonian(m, h, d);
  for (int e = 0; e < d; ++e) {
    const Level& lv = scheme.levels[e];
    for (const auto& br : lv.branches)
      add_jump(m, br.target, e, br.fraction * lv.decay_rate, d);
    if (lv.extra_dephasing > 0.0) {
      Eigen::VectorXd proj = Eigen::VectorXd::Zero(d);
      proj(e) = 1.0;
      add_diagonal_dephasing(m, proj, 2.0 * lv.extra_dephasing, d);
    }
  }
  const std::vector<int> grounds = ground_indices(scheme);
  if (scheme.ground_coherence_decay > 0.0 || scheme.ground_exchange_rate > 0.0) {
    if (grounds.size() != 2)
      throw config_error(
          "ground dephasing/exchange rates need exactly two ground levels");
    if (scheme.ground_coherence_decay > 0.0) {
      // L = sqrt(gamma/2) (|g1><g1| - |g2><g2|): rate gamma on the
      // ground-ground coherence, gamma/4 on ground-other coherences.
      Eigen::VectorXd k_diag = Eigen::VectorXd::Zero(d);
      k_diag(grounds[0]) = 1.0;
      k_diag(grounds[1]) = -1.0;
      add_diagonal_dephasing(m, k_diag, 0.5 * scheme.ground_coherence_decay, d);
    }
    if (scheme.ground_exchange_rate > 0.0) {
      add_jump(m, grounds[0], grounds[1], scheme.ground_exchange_rate, d);
      add_jump(m, grounds[1], grounds[0], scheme.ground_exchange_rate, d);
    }
  }

  LiouvilleSystem sys;
  sys.dim = d;
  sys.velocity = velocity;
  sys.drift = std::move(m);
  sys.steady_state = solve_pump_steady_state(sys.drift, d);
  sys.atom_number = drives.atom_number;
  sys.length = drives.length;
  sys.diffusion_kind = diffusion_kind;

  // Linearized coupling of the quantized modes, evaluated at the pump-only
  // steady state: column order (a, a^dag, b, b^dag).
  sys.field_coupling = MatrixXc::Zero(n, 4);
  sys.source = MatrixXc::Zero(4, n);
  const Complex iu(0.0, 1.0);
  auto fill_mode = [&](const QuantizedTransition& t, double g, int col) {
    const int l = t.lower, u = t.upper;
    const VectorXc& xs = sys.steady_state;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const int row = i * d + j;
        Complex lower_col = 0.0, raise_col = 0.0;
        if (i == l) lower_col += xs(u * d + j);
        if (j == u) lower_col -= xs(i * d + l);
        if (i == u) raise_col += xs(l * d + j);
        if (j == l) raise_col -= xs(i * d + u);
        sys.field_coupling(row, col) += iu * g * lower_col;
        sys.field_coupling(row, col + 1) += iu * g * raise_col;
      }
    sys.source(col, l * d + u) = -iu * g;
    sys.source(col + 1, u * d + l) = iu * g;
  };
  for (const auto& t : scheme.quantized) {
    const double g =
        t.mode == QuantizedMode::a ? drives.coupling_a : drives.coupling_b;
    fill_mode(t, g, t.mode == QuantizedMode::a ? 0 : 2);
  }

  sys.diffusion =
      build_diffusion_matrix(sys.drift, sys.steady_state, d, diffusion_kind);
  return sys;
}

} // namespace sixwave

#include "sixwave/noise.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "sixwave/units.hpp"

namespace sixwave {

namespace {

using RowMatrixXc =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double drift_scale(const MatrixXc& m) {
  return std::max(1.0, m.cwiseAbs().maxCoeff());
}

void check_frequency(double omega, double scale) {
  if (std::abs(omega) < 1e-12 * scale)
    throw numerical_error(
        "analysis frequency too close to zero for the fluctuation solver "
        "(the zero-frequency response is the carrier generator)");
}

// Givens QR of a shifted upper-Hessenberg matrix shift*I + H, with solve
// paths for both the matrix and its transpose.  Rotation k acts on rows
// (k, k+1) as [[c, s], [-conj(s), c]] with real c.
class HessenbergQR {
 public:
  HessenbergQR(const MatrixXc& hess, Complex shift)
      : n_(static_cast<int>(hess.rows())), r_(hess), cs_(n_ - 1), sn_(n_ - 1) {
    r_.diagonal().array() += shift;
    for (int k = 0; k + 1 < n_; ++k) {
      const Complex f = r_(k, k), g = r_(k + 1, k);
      const double denom = std::hypot(std::abs(f), std::abs(g));
      double c;
      Complex s;
      if (denom == 0.0) {
        c = 1.0;
        s = 0.0;
      } else if (std::abs(f) == 0.0) {
        c = 0.0;
        s = std::conj(g) / std::abs(g);
      } else {
        c = std::abs(f) / denom;
        s = (f / std::abs(f)) * std::conj(g) / denom;
      }
      cs_[k] = c;
      sn_[k] = s;
      for (int j = k; j < n_; ++j) {
        const Complex fj = r_(k, j), gj = r_(k + 1, j);
        r_(k, j) = c * fj + s * gj;
        r_(k + 1, j) = -std::conj(s) * fj + c * gj;
      }
      r_(k + 1, k) = 0.0;
    }
  }

  // x = (shift + H)^{-1} b
  MatrixXc solve(const MatrixXc& b) const {
    RowMatrixXc y = b;
    for (int k = 0; k + 1 < n_; ++k) {
      const auto fk = y.row(k).eval();
      const auto gk = y.row(k + 1).eval();
      y.row(k) = cs_[k] * fk + sn_[k] * gk;
      y.row(k + 1) = -std::conj(sn_[k]) * fk + cs_[k] * gk;
    }
    for (int i = n_ - 1; i >= 0; --i) {
      for (int j = i + 1; j < n_; ++j) y.row(i) -= r_(i, j) * y.row(j);
      divide_row(y, i);
    }
    return y;
  }

  // x = (shift + H)^{-T} b  via R^T u = b, then x = Omega^T u
  MatrixXc solve_transposed(const MatrixXc& b) const {
    RowMatrixXc u = b;
    for (int j = 0; j < n_; ++j) {
      divide_row(u, j);
      for (int i = j + 1; i < n_; ++i) u.row(i) -= r_(j, i) * u.row(j);
    }
    for (int k = n_ - 2; k >= 0; --k) {
      const auto uk = u.row(k).eval();
      const auto uk1 = u.row(k + 1).eval();
      u.row(k) = cs_[k] * uk - std::conj(sn_[k]) * uk1;
      u.row(k + 1) = sn_[k] * uk + cs_[k] * uk1;
    }
    return u;
  }

 private:
  void divide_row(RowMatrixXc& y, int i) const {
    const Complex d = r_(i, i);
    if (std::abs(d) == 0.0)
      throw numerical_error("fluctuation response solve hit a singular pivot");
    y.row(i) /= d;
  }

  int n_;
  RowMatrixXc r_;
  std::vector<double> cs_;
  std::vector<Complex> sn_;
};

} // namespace

ResponseMatrices response_matrices(const LiouvilleSystem& system,
                                   double omega) {
  const MatrixXc& m = system.drift;
  check_frequency(omega, drift_scale(m));
  const double nc = system.atom_number / units::c_light;
  const Complex iw(0.0, omega);

  MatrixXc a_plus = m;
  a_plus.diagonal().array() += iw;
  MatrixXc a_minus = m;
  a_minus.diagonal().array() -= iw;
  Eigen::PartialPivLU<MatrixXc> lu_plus(a_plus);
  Eigen::PartialPivLU<MatrixXc> lu_minus(a_minus);

  const MatrixXc t_t = system.source.transpose();
  const MatrixXc y_plus = lu_plus.solve(system.field_coupling);    // n x 4
  const MatrixXc y_minus = lu_minus.solve(system.field_coupling);
  const MatrixXc z_plus = lu_plus.transpose().solve(t_t);          // n x 4
  const MatrixXc z_minus = lu_minus.transpose().solve(t_t);

  const Complex phase_term(0.0, omega / units::c_light);
  ResponseMatrices out;
  out.omega = omega;
  out.generator = -nc * (system.source * y_plus);
  out.generator += phase_term * Matrix4c::Identity();
  out.generator_minus = -nc * (system.source * y_minus);
  out.generator_minus -= phase_term * Matrix4c::Identity();
  // Q(w) = (N/c) [T (iw+M)^{-1}] D [(-iw+M)^{-T} T^T]; the transposed factors
  // are exactly the z solves above.
  out.source = nc * (z_plus.transpose() * (system.diffusion * z_minus));
  out.source_minus = nc * (z_minus.transpose() * (system.diffusion * z_plus));
  return out;
}

ResponseSolver::ResponseSolver(const LiouvilleSystem& system)
    : system_(&system) {
  Eigen::HessenbergDecomposition<MatrixXc> hd(system.drift);
  hess_ = hd.matrixH();
  q_ = hd.matrixQ();
  tq_ = system.source * q_;
  rhs_g_ = q_.adjoint() * system.field_coupling;
  rhs_t_ = q_.transpose() * system.source.transpose();
}

ResponseMatrices ResponseSolver::at(double omega) const {
  const LiouvilleSystem& sys = *system_;
  check_frequency(omega, drift_scale(sys.drift));
  const double nc = sys.atom_number / units::c_light;
  const Complex iw(0.0, omega);

  const HessenbergQR qr_plus(hess_, iw);
  const HessenbergQR qr_minus(hess_, -iw);

  const MatrixXc w_plus = qr_plus.solve(rhs_g_);
  const MatrixXc w_minus = qr_minus.solve(rhs_g_);
  const MatrixXc u_plus = qr_plus.solve_transposed(rhs_t_);
  const MatrixXc u_minus = qr_minus.solve_transposed(rhs_t_);

  // Back to the original basis: (iw + M)^{-T} T^T = conj(Q) u.
  const MatrixXc a = q_.conjugate() * u_plus;
  const MatrixXc b = q_.conjugate() * u_minus;

  const Complex phase_term(0.0, omega / units::c_light);
  ResponseMatrices out;
  out.omega = omega;
  out.generator = -nc * (tq_ * w_plus);
  out.generator += phase_term * Matrix4c::Identity();
  out.generator_minus = -nc * (tq_ * w_minus);
  out.generator_minus -= phase_term * Matrix4c::Identity();
  out.source = nc * (a.transpose() * (sys.diffusion * b));
  out.source_minus = nc * (b.transpose() * (sys.diffusion * a));
  return out;
}

Matrix4c vacuum_input_covariance() {
  Matrix4c s = Matrix4c::Zero();
  s(0, 1) = 1.0;
  s(2, 3) = 1.0;
  return s;
}

Matrix4c quadrature_transform(double phase_a, double phase_b) {
  const Complex ea = std::exp(Complex(0.0, phase_a));
  const Complex eb = std::exp(Complex(0.0, phase_b));
  const Complex iu(0.0, 1.0);
  Matrix4c u = Matrix4c::Zero();
  // X = e^{-i phi} a + e^{+i phi} a^dag  (amplitude quadrature along the
  // carrier), P the conjugate one.
  u(0, 0) = 1.0 / ea;
  u(0, 1) = ea;
  u(1, 0) = -iu / ea;
  u(1, 1) = iu * ea;
  u(2, 2) = 1.0 / eb;
  u(2, 3) = eb;
  u(3, 2) = -iu / eb;
  u(3, 3) = iu * eb;
  return u;
}

namespace {

// Dormand-Prince 5(4) embedded pair on the 4x4 matrix ODE
// dS/dz = L S + S Rt + Q.
std::pair<Matrix4c, int> integrate_lyapunov(const Matrix4c& l,
                                            const Matrix4c& rt,
                                            const Matrix4c& q, double z,
                                            const Matrix4c& s0) {
  auto f = [&](const Matrix4c& s) -> Matrix4c { return l * s + s * rt + q; };

  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                   a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                   a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                   b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 35.0 / 384 - 5179.0 / 57600,
                   e3 = 500.0 / 1113 - 7571.0 / 16695,
                   e4 = 125.0 / 192 - 393.0 / 640,
                   e5 = -2187.0 / 6784 + 92097.0 / 339200,
                   e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

  const double rtol = 1e-11, atol = 1e-13;
  Matrix4c s = s0;
  double x = 0.0;
  double h = z / 16.0;
  int steps = 0;
  Matrix4c k1 = f(s);
  while (x < z) {
    if (++steps > 200000)
      throw numerical_error("spectral covariance integration stalled");
    if (x + h > z) h = z - x;
    const Matrix4c k2 = f(s + h * (a21 * k1));
    const Matrix4c k3 = f(s + h * (a31 * k1 + a32 * k2));
    const Matrix4c k4 = f(s + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Matrix4c k5 = f(s + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Matrix4c k6 =
        f(s + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Matrix4c s_new =
        s + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Matrix4c k7 = f(s_new);
    const Matrix4c err =
        h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const double scale =
        atol + rtol * std::max(s.cwiseAbs().maxCoeff(),
                               s_new.cwiseAbs().maxCoeff());
    const double ratio = err.cwiseAbs().maxCoeff() / scale;
    if (ratio <= 1.0) {
      x += h;
      s = s_new;
      k1 = k7;  // first-same-as-last
    }
    const double grow =
        ratio > 0.0 ? 0.9 * std::pow(ratio, -0.2) : 5.0;
    h *= std::min(5.0, std::max(0.2, grow));
    if (h < z * 1e-14) {
      std::ostringstream msg;
      msg << "spectral covariance step size underflow at z = " << x
          << " of " << z << " (error ratio " << ratio << ")";
      throw numerical_error(msg.str());
    }
  }
  return {s, steps};
}

} // namespace

std::pair<Matrix4c, Matrix4c> integrate_spectral_ode(
    const ResponseMatrices& response, double z, const Matrix4c& input) {
  const Matrix4c rt_minus = response.generator_minus.transpose();
  const Matrix4c rt_plus = response.generator.transpose();
  const Matrix4c s_plus =
      integrate_lyapunov(response.generator, rt_minus, response.source, z,
                         input)
          .first;
  const Matrix4c s_minus =
      integrate_lyapunov(response.generator_minus, rt_plus,
                         response.source_minus, z, input)
          .first;
  return {s_plus, s_minus};
}

SpectralCovariance assemble_covariance(double omega, const Matrix4c& s_plus,
                                       const Matrix4c& s_minus, double phase_a,
                                       double phase_b) {
  SpectralCovariance out;
  out.omega = omega;
  out.amplitude = s_plus;
  out.amplitude_minus = s_minus;
  const Matrix4c u = quadrature_transform(phase_a, phase_b);
  const Matrix4c w_plus = u * s_plus * u.transpose();
  const Matrix4c w_minus = u * s_minus * u.transpose();
  out.quadrature = 0.5 * (w_plus + w_minus.transpose());
  out.doubled.setZero();
  out.doubled.topLeftCorner<4, 4>() = out.quadrature;
  out.doubled.bottomRightCorner<4, 4>() = out.quadrature.transpose();
  return out;
}

SpectralCovariance noise_covariance(const ResponseMatrices& response, double z,
                                    double phase_a, double phase_b,
                                    const Matrix4c& input_covariance) {
  const auto [s_plus, s_minus] =
      integrate_spectral_ode(response, z, input_covariance);
  return assemble_covariance(response.omega, s_plus, s_minus, phase_a,
                             phase_b);
}

Matrix4c source_integral_quadrature(const ResponseMatrices& response, double z,
                                    int panels) {
  if (panels < 1) throw config_error("quadrature needs at least one panel");
  // 5-point Gauss-Legendre nodes/weights on [-1, 1].
  const double xs[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                        0.5384693101056831, 0.9061798459386640};
  const double ws[5] = {0.2369268850561891, 0.4786286704993665,
                        0.5688888888888889, 0.4786286704993665,
                        0.2369268850561891};
  const Matrix4c rt_minus = response.generator_minus.transpose();
  Matrix4c acc = Matrix4c::Zero();
  const double dz = z / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = p * dz;
    for (int k = 0; k < 5; ++k) {
      const double u = lo + 0.5 * dz * (xs[k] + 1.0);
      const Matrix4c left = matrix_exponential((response.generator * u).eval());
      const Matrix4c right = matrix_exponential((rt_minus * u).eval());
      acc += (0.5 * dz * ws[k]) * (left * response.source * right);
    }
  }
  return acc;
}

} // namespace sixwave

#include "sixwave/propagation.hpp"

#include <cmath>

#include "sixwave/units.hpp"

namespace sixwave {

namespace {

// Pade(13) numerator coefficients (Higham's scaling-and-squaring constants).
constexpr double kPade13[] = {64764752532480000.0,
                              32382376266240000.0,
                              7771770303897600.0,
                              1187353796428800.0,
                              129060195264000.0,
                              10559470521600.0,
                              670442572800.0,
                              33522128640.0,
                              1323241920.0,
                              40840800.0,
                              960960.0,
                              16380.0,
                              182.0,
                              1.0};
constexpr double kPade13Theta = 5.371920351148152;

} // namespace

MatrixXc matrix_exponential(const MatrixXc& m) {
  const int n = static_cast<int>(m.rows());
  if (m.cols() != n) throw numerical_error("matrix exponential needs a square matrix");
  if (!m.allFinite())
    throw numerical_error("matrix exponential of a non-finite matrix");

  const double norm = m.cwiseAbs().colwise().sum().maxCoeff();  // 1-norm
  if (norm == 0.0) return MatrixXc::Identity(n, n);
  int squarings = 0;
  if (norm > kPade13Theta) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / kPade13Theta)));
    if (squarings > 64)
      throw numerical_error("matrix exponential argument too large (norm " +
                            std::to_string(norm) + ")");
  }
  const double scale = std::ldexp(1.0, -squarings);
  MatrixXc a = m * scale;

  const MatrixXc id = MatrixXc::Identity(n, n);
  const MatrixXc a2 = a * a;
  const MatrixXc a4 = a2 * a2;
  const MatrixXc a6 = a2 * a4;
  const MatrixXc u =
      a * (a6 * (kPade13[13] * a6 + kPade13[11] * a4 + kPade13[9] * a2) +
           kPade13[7] * a6 + kPade13[5] * a4 + kPade13[3] * a2 +
           kPade13[1] * id);
  const MatrixXc v =
      a6 * (kPade13[12] * a6 + kPade13[10] * a4 + kPade13[8] * a2) +
      kPade13[6] * a6 + kPade13[4] * a4 + kPade13[2] * a2 + kPade13[0] * id;

  MatrixXc r = (v - u).partialPivLu().solve(v + u);
  for (int s = 0; s < squarings; ++s) r = (r * r).eval();
  if (!r.allFinite())
    throw numerical_error("matrix exponential overflowed");
  return r;
}

Matrix4c carrier_generator(const LiouvilleSystem& system) {
  if (system.length > 0.0 && system.atom_number <= 0.0)
    throw config_error("carrier generator needs a positive atom number");
  const MatrixXc y =
      solve_trace_deflated(system.drift, system.field_coupling, system.dim);
  const double c = units::c_light;
  Matrix4c r = (-(system.atom_number / c) * (system.source * y)).eval();
  return r;
}

FieldPropagator make_propagator(const Matrix4c& generator, double z) {
  FieldPropagator p;
  p.generator = generator;
  p.z = z;
  p.transfer = matrix_exponential((generator * z).eval());
  return p;
}

CarrierSolution solve_carrier(const Matrix4c& generator, double z,
                              Complex alpha_in) {
  const double photons = std::norm(alpha_in);
  if (photons == 0.0)
    throw config_error("carrier solve needs a nonzero probe seed");
  const Matrix4c j = make_propagator(generator, z).transfer;

  Matrix4c c0 = Matrix4c::Zero();
  c0(0, 0) = alpha_in * alpha_in;
  c0(0, 1) = photons + 1.0;
  c0(1, 0) = photons;
  c0(1, 1) = std::conj(alpha_in) * std::conj(alpha_in);
  c0(2, 3) = 1.0;
  const Matrix4c cz = j * c0 * j.transpose();

  CarrierSolution out;
  out.alpha_out = j(0, 0) * alpha_in + j(0, 1) * std::conj(alpha_in);
  out.beta_out = j(2, 0) * alpha_in + j(2, 1) * std::conj(alpha_in);
  out.gain_probe = cz(1, 0).real() / photons;
  // The conjugate mode enters in vacuum, so its gain is referenced to the
  // vacuum unit: an idle medium reads exactly 1 and an ideal two-mode
  // amplifier reads the same value on both outputs.
  out.gain_conjugate = 1.0 + cz(3, 2).real() / photons;
  out.phase_a =
      std::abs(out.alpha_out) > 0.0 ? std::arg(out.alpha_out) : 0.0;
  out.phase_b = std::abs(out.beta_out) > 0.0 ? std::arg(out.beta_out) : 0.0;
  return out;
}

std::pair<double, double> stimulated_gains(const FieldPropagator& prop,
                                           Complex alpha_in) {
  const double photons = std::norm(alpha_in);
  if (photons == 0.0)
    throw config_error("stimulated gain needs a nonzero probe seed");
  const Matrix4c& j = prop.transfer;
  const Complex a = j(0, 0) * alpha_in + j(0, 1) * std::conj(alpha_in);
  const Complex b = j(2, 0) * alpha_in + j(2, 1) * std::conj(alpha_in);
  return {std::norm(a) / photons, std::norm(b) / photons};
}

} // namespace sixwave

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sixwave/analysis.hpp"

using namespace sixwave;

namespace {

Matrix8c doubled_from(const Matrix4c& v) {
  Matrix8c d = Matrix8c::Zero();
  d.topLeftCorner<4, 4>() = v;
  d.bottomRightCorner<4, 4>() = v.transpose();
  return d;
}

Matrix4c random_hermitian_psd(std::uint32_t seed) {
  const MatrixXc a = oracle::random_matrix(4, 4, seed);
  Matrix4c v = (a * a.adjoint()).eval();
  v += Matrix4c::Identity();  // keep it comfortably positive
  return v;
}

Matrix4c tms_quadrature(double r) {
  // quadrature covariance of a two-mode squeezed state, Var_vac = 1
  Matrix4c v = Matrix4c::Identity() * std::cosh(2.0 * r);
  v(0, 2) = v(2, 0) = std::sinh(2.0 * r);
  v(1, 3) = v(3, 1) = -std::sinh(2.0 * r);
  return v;
}

} // namespace

TEST_CASE("sideband transform is exactly unitary") {
  const Matrix8c l = sideband_basis_transform();
  const Matrix8c err = l * l.adjoint() - Matrix8c::Identity();
  CHECK(err.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("vacuum covariance gives the textbook reference values") {
  const Matrix4c v = Matrix4c::Identity();
  CHECK(duan_criterion(v) == doctest::Approx(2.0).epsilon(1e-15));

  const IntensityNoise in = intensity_noise(v, 1234.0, 567.0);
  CHECK(in.sum_variance == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(in.diff_variance == doctest::Approx(1.0).epsilon(1e-14));

  const Matrix8d sb = sideband_decomposition(doubled_from(v));
  CHECK((sb - Matrix8d::Identity()).cwiseAbs().maxCoeff() < 1e-15);

  const PairCorrelations pairs = pair_correlations(sb);
  for (const PairMetrics& p : {pairs.pair1, pairs.pair2}) {
    CHECK(p.diff_variance == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(p.sum_variance == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(p.duan == doctest::Approx(2.0).epsilon(1e-14));
  }
}

TEST_CASE("two-mode squeezed covariance: Duan and intensity noise") {
  const double r = 0.8;
  const Matrix4c v = tms_quadrature(r);
  CHECK(duan_criterion(v) ==
        doctest::Approx(2.0 * std::exp(-2.0 * r)).epsilon(1e-12));

  // balanced powers: difference current squeezed, sum antisqueezed
  const IntensityNoise balanced = intensity_noise(v, 100.0, 100.0);
  CHECK(balanced.diff_variance ==
        doctest::Approx(std::exp(-2.0 * r)).epsilon(1e-12));
  CHECK(balanced.sum_variance ==
        doctest::Approx(std::exp(2.0 * r)).epsilon(1e-12));

  // unbalanced powers against the hand-evaluated formula
  const double pa = 4.0, pb = 1.0;
  const IntensityNoise unbalanced =
      intensity_noise(v, std::sqrt(pa), std::sqrt(pb));
  const double vaa = std::cosh(2.0 * r), vab = std::sinh(2.0 * r);
  const double expect_diff =
      (pa * vaa + pb * vaa - 2.0 * std::sqrt(pa * pb) * vab) / (pa + pb);
  CHECK(unbalanced.diff_variance ==
        doctest::Approx(expect_diff).epsilon(1e-12));
}

TEST_CASE("detection efficiency interpolates toward vacuum") {
  const Matrix4c v = 3.0 * Matrix4c::Identity();

  DetectionEfficiency half{0.5, 0.5};
  CHECK((apply_efficiency(v, half) - 2.0 * Matrix4c::Identity())
            .cwiseAbs()
            .maxCoeff() < 1e-14);

  DetectionEfficiency blind{0.0, 0.0};
  CHECK((apply_efficiency(v, blind) - Matrix4c::Identity())
            .cwiseAbs()
            .maxCoeff() < 1e-14);

  DetectionEfficiency perfect{1.0, 1.0};
  CHECK((apply_efficiency(v, perfect) - v).cwiseAbs().maxCoeff() < 1e-14);

  // squeezing degrades as eta*V + (1 - eta) on the squeezed eigenvalue
  const double r = 0.9;
  const double eta = 0.7;
  const Matrix4c tms = tms_quadrature(r);
  DetectionEfficiency both{eta, eta};
  CHECK(duan_criterion(tms, both) ==
        doctest::Approx(eta * 2.0 * std::exp(-2.0 * r) + 2.0 * (1.0 - eta))
            .epsilon(1e-12));

  DetectionEfficiency bad{1.2, 1.0};
  CHECK_THROWS_AS(apply_efficiency(v, bad), config_error);
}

TEST_CASE("efficiency on the doubled covariance matches the 4x4 map") {
  const Matrix4c v = random_hermitian_psd(11u);
  const DetectionEfficiency eta{0.8, 0.55};
  const Matrix8c mapped = apply_efficiency_doubled(doubled_from(v), eta);
  const Matrix4c direct = apply_efficiency(v, eta);
  CHECK((mapped.topLeftCorner<4, 4>() - direct).cwiseAbs().maxCoeff() <
        1e-14);
  CHECK((mapped.bottomRightCorner<4, 4>() - direct.transpose())
            .cwiseAbs()
            .maxCoeff() < 1e-14);
}

TEST_CASE("sideband decomposition reconstructs the direct variances") {
  const Matrix4c v = random_hermitian_psd(29u);
  const Matrix8d sb = sideband_decomposition(doubled_from(v));
  const auto [xdiff, psum] = reconstructed_diff_sum(sb);

  const double direct_x = (v(0, 0) + v(2, 2) - v(0, 2) - v(2, 0)).real();
  const double direct_p = (v(1, 1) + v(3, 3) + v(1, 3) + v(3, 1)).real();
  CHECK(xdiff == doctest::Approx(direct_x).epsilon(1e-12));
  CHECK(psum == doctest::Approx(direct_p).epsilon(1e-12));
}

TEST_CASE("label swap exchanges the two sideband pairs") {
  const Matrix4c v = random_hermitian_psd(41u);
  const Matrix8d sb = sideband_decomposition(doubled_from(v));
  const PairCorrelations normal = pair_correlations(sb, false);
  const PairCorrelations swapped = pair_correlations(sb, true);
  CHECK(normal.pair1.diff_variance ==
        doctest::Approx(swapped.pair2.diff_variance).epsilon(1e-15));
  CHECK(normal.pair1.sum_variance ==
        doctest::Approx(swapped.pair2.sum_variance).epsilon(1e-15));
  CHECK(normal.pair1.duan == doctest::Approx(swapped.pair2.duan));
  CHECK(normal.pair2.duan == doctest::Approx(swapped.pair1.duan));
}

TEST_CASE("sideband covariance is symmetric and consistent") {
  const Matrix4c v = random_hermitian_psd(53u);
  const Matrix8d sb = sideband_decomposition(doubled_from(v));
  CHECK((sb - sb.transpose()).cwiseAbs().maxCoeff() < 1e-14);
  // diagonal entries are variances of Hermitian observables: positive
  for (int i = 0; i < 8; ++i) CHECK(sb(i, i) > 0.0);
}

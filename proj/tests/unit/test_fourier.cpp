#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fgmm/design.hpp"
#include "fgmm/fourier.hpp"
#include "fgmm/model.hpp"

using namespace fgmm;
using std::numbers::pi;

namespace {

GmmModel<double> random_model(Index k, Index d, std::uint64_t seed) {
  return GmmModel<double>(dirichlet_weights<double>(k, seed), sphere_means<double>(k, d, 2.0, seed + 1), 1.0);
}

double spectral_norm(const CMatrixd& a) { return singular_values<double>(a)(0); }

}  // namespace

TEST_CASE("empirical characteristic function") {
  Matrixd x(2, 2);
  x << pi, -pi,
       0, 0;
  const SampleSet<double> s(x);
  const auto at_zero = empirical_cf(s, Vectord::Zero(2));
  CHECK(at_zero.real() == 1.0);
  CHECK(at_zero.imag() == 0.0);
  const auto v = empirical_cf(s, Vectord::Unit(2, 0));
  CHECK(std::abs(v - std::complex<double>(-1, 0)) < 1e-15);

  Vectord t(2);
  t << 0.3, -1.7;
  const SampleSet<double> one(Matrixd(x.col(0)));
  CHECK(std::abs(empirical_cf(one, t) - std::polar(1.0, x.col(0).dot(t))) < 1e-15);

  const auto model = random_model(3, 2, 4);
  const auto many = sample_gmm(model, 500, 1);
  CHECK(std::abs(empirical_cf(many, t)) <= 1.0 + 1e-15);
}

TEST_CASE("fourier_measurement compensates the Gaussian envelope") {
  const auto model = random_model(2, 3, 7);
  const auto s = sample_gmm(model, 1000, 3);
  const auto noise = NoiseCovariance<double>::isotropic(0.8, 3);
  const auto at_zero = fourier_measurement(s, Vectord::Zero(3), noise);
  CHECK(std::abs(at_zero - std::complex<double>(1, 0)) < 1e-15);
  Vectord t(3);
  t << 0.2, 0.1, -0.4;
  const auto silent = NoiseCovariance<double>::isotropic(0.0, 3);
  CHECK(fourier_measurement(s, t, silent) == empirical_cf(s, t));
  CHECK(std::abs(fourier_measurement(s, t, noise) - std::exp(0.32 * 0.21) * empirical_cf(s, t)) < 1e-14);
}

TEST_CASE("fourier_measurement converges to the latent signal") {
  // P(|y_hat - y| >= eps) <= 4 exp(-n eps^2 / (4 e^{2 t'St})); eps set for failure 1e-6.
  const auto model = random_model(3, 2, 11);
  const Index n = 1000000;
  const auto s = sample_gmm(model, n, 12);
  Vectord t(2);
  t << 0.4, -0.3;
  const double q = model.noise().quadratic(t);
  const double eps = std::sqrt(4.0 * std::exp(2.0 * q) * std::log(4.0 / 1e-6) / double(n));
  CHECK(std::abs(fourier_measurement(s, t, model.noise()) - latent_signal(model, t)) < eps);
}

TEST_CASE("steering vectors") {
  const auto design = ball_design<double>(7, 1.0, 3, 2);
  const CVectord ones = steering_vector<double>(Vectord::Zero(3), design);
  CHECK((ones.array() == std::complex<double>(1, 0)).all());
  Vectord mu(3);
  mu << 1.3, -0.2, 4.0;
  const CVectord phi = steering_vector<double>(mu, design);
  CHECK(std::abs(phi.norm() - std::sqrt(7.0)) < 1e-14);
  CHECK((phi.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-15);

  Matrixd pts(1, 2);
  pts << 1, 2;
  const CVectord toy = steering_vector<double>(Vectord::Constant(1, pi), pts);
  CHECK(std::abs(toy(0) - std::complex<double>(-1, 0)) < 1e-15);
  CHECK(std::abs(toy(1) - std::complex<double>(1, 0)) < 1e-15);
}

TEST_CASE("measurement_set entries match single evaluations") {
  const auto model = random_model(3, 4, 21);
  const auto s = sample_gmm(model, 5000, 22);
  const auto design = ball_design<double>(6, 0.5, 4, 23).with_translations(orthonormal_translations<double>(4, 5));
  const auto y = measurement_set(s, design, model.noise());
  CHECK(y.L() == 6);
  CHECK(y.translation_count() == 5);
  CHECK(y.n == 5000);
  for (Index m = 0; m < 5; ++m)
    for (Index l = 0; l < 6; ++l)
      CHECK(std::abs(y.values(l, m) - fourier_measurement(s, design.frequency(l, m), model.noise())) < 1e-12);

  const auto again = measurement_set(s, design, model.noise());
  CHECK(y.values == again.values);

  // precomputed point phasors give the same bits
  const CMatrixd phasors = point_phasors(s.data, design.points());
  CHECK(phasors.rows() == 6);
  CHECK(phasors.cols() == 5000);
  CHECK(std::abs(phasors(2, 4321) - std::polar(1.0, Vectord(design.point(2)).dot(s.sample(4321)))) < 1e-15);
  CHECK(measurement_set(s, design, model.noise(), phasors).values == y.values);
  CHECK_THROWS(measurement_set(s, design, model.noise(), CMatrixd(phasors.leftCols(10))));
}

TEST_CASE("measurement_set on noiseless atoms equals Phi w") {
  Matrixd means(2, 3);
  means << 0.0, 1.5, -2.0,
           1.0, 0.3, 0.7;
  // counts 1, 2, 1 give empirical weights (1/4, 1/2, 1/4)
  Matrixd x(2, 4);
  x << means.col(0), means.col(1), means.col(1), means.col(2);
  const SampleSet<double> s(x);
  const auto design = ball_design<double>(5, 2.0, 2, 5).with_translations(orthonormal_translations<double>(2, 3));
  const auto y = measurement_set(s, design, NoiseCovariance<double>::isotropic(0.0, 2));
  Vectord w(3);
  w << 0.25, 0.5, 0.25;
  const CVectord expected = steering_matrix<double>(means, design.points()) * w.cast<std::complex<double>>();
  CHECK((y.column(0) - expected).cwiseAbs().maxCoeff() < 1e-14);

  const GmmModel<double> model(w, means, 0.0);
  CHECK((y.values - latent_measurements(model, design)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("measurement_set with a single zero frequency") {
  const auto s = sample_gmm(random_model(2, 2, 1), 10, 2);
  const FrequencyDesign<double> design(Matrixd::Zero(2, 1));
  const auto y = measurement_set(s, design, NoiseCovariance<double>::isotropic(1.0, 2));
  CHECK(y.values.rows() == 1);
  CHECK(y.values.cols() == 1);
  CHECK(y.values(0, 0) == std::complex<double>(1, 0));
}

TEST_CASE("empirical covariance") {
  CVectord v(3);
  v << std::complex<double>(1, 2), std::complex<double>(0, -1), std::complex<double>(3, 0.5);
  const CMatrixd single = empirical_covariance<double>(CMatrixd(v));
  CHECK((single - v * v.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(empirical_covariance<double>(CMatrixd::Zero(4, 3)).isZero(0.0));

  const auto model = random_model(3, 5, 31);
  const auto s = sample_gmm(model, 2000, 32);
  const auto design = ball_design<double>(9, 0.5, 5, 33).with_translations(orthonormal_translations<double>(5, 6));
  const auto y = measurement_set(s, design, model.noise());
  const CMatrixd c = empirical_covariance(y);
  CHECK(is_hermitian<double>(c));
  CHECK(std::abs(c.trace().real() - y.values.squaredNorm() / 6.0) < 1e-12);

  const CMatrixd latent = empirical_covariance<double>(latent_measurements(model, design));
  CHECK((latent - latent_covariance(model, design)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("spectral decomposition") {
  const auto id = spectral_decomposition<double>(CMatrixd::Identity(3, 3));
  CHECK((id.singular_values.array() - 1.0).abs().maxCoeff() < 1e-14);

  CVectord y(4);
  y << std::complex<double>(1, 1), std::complex<double>(0, 1), std::complex<double>(1, 0), std::complex<double>(0, 1);
  const auto r1 = spectral_decomposition<double>(y * y.adjoint());
  CHECK(r1.singular_values(0) == doctest::Approx(5.0));
  CHECK(r1.singular_values.tail(3).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((r1.singular_values.tail(3).array() >= 0.0).all());

  CMatrixd bad = CMatrixd::Identity(2, 2);
  bad(0, 1) = std::complex<double>(0.5, 0);
  CHECK_THROWS_AS(spectral_decomposition<double>(bad), std::invalid_argument);

  for (std::uint64_t trial = 0; trial < 10; ++trial) {
    const auto model = random_model(3, 10, 100 + trial);
    const auto design =
        ball_design<double>(9, 0.5, 10, 200 + trial).with_translations(orthonormal_translations<double>(10, 3));
    const CMatrixd c = latent_covariance(model, design);
    const auto spec = spectral_decomposition(c);
    CHECK(spec.singular_values(3) / spec.singular_values(0) < 1e-10);
    CHECK(spec.singular_values(2) > 0.0);
    for (Index l = 1; l < spec.size(); ++l) CHECK(spec.singular_values(l) <= spec.singular_values(l - 1));
    const CMatrixd u = spec.basis;
    CHECK((u.adjoint() * u - CMatrixd::Identity(9, 9)).cwiseAbs().maxCoeff() < 1e-10);
    const CMatrixd rebuilt = u * spec.singular_values.cast<std::complex<double>>().asDiagonal() * u.adjoint();
    CHECK(spectral_norm(c - rebuilt) <= 1e-8 * spec.singular_values(0));
  }
}

TEST_CASE("latent signal and covariance") {
  Vectord t(2);
  t << 1.2, -0.7;
  const auto single = GmmModel<double>::equal_weights(Matrixd::Constant(2, 1, 0.9), 1.0);
  CHECK(std::abs(std::abs(latent_signal(single, t)) - 1.0) < 1e-15);
  const auto model = random_model(4, 2, 9);
  CHECK(std::abs(latent_signal(model, Vectord::Zero(2)) - std::complex<double>(1, 0)) < 1e-14);

  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    const Index k = 1 + Index(trial % 4), d = 2 + Index(trial % 3);
    const auto m = random_model(k, d, 300 + trial);
    const auto design = ball_design<double>(8, 1.0, d, 400 + trial)
                            .with_translations(orthonormal_translations<double>(d, 1 + Index(trial % (d + 1))));
    const auto spec = spectral_decomposition(latent_covariance(m, design));
    CHECK((spec.singular_values.array() >= 0.0).all());
    if (k < 8) CHECK(spec.singular_values(k) <= 1e-10 * spec.singular_values(0));
  }
}

TEST_CASE("Weyl stability of the empirical spectrum") {
  const auto model = random_model(3, 3, 51);
  const auto design = ball_design<double>(9, 0.5, 3, 52).with_translations(orthonormal_translations<double>(3, 4));
  const CMatrixd c = latent_covariance(model, design);
  const Vectord sigma = spectral_decomposition(c).singular_values;
  for (Index n : {1000, 10000, 100000}) {
    const auto s = sample_gmm(model, n, 53 + std::uint64_t(n));
    const CMatrixd c_hat = empirical_covariance(measurement_set(s, design, model.noise()));
    const Vectord sigma_hat = spectral_decomposition(c_hat).singular_values;
    const double gap = spectral_norm(c_hat - c);
    CHECK((sigma_hat - sigma).cwiseAbs().maxCoeff() <= gap + 1e-12);
  }
}

TEST_CASE("relabelling the components leaves the latent covariance unchanged") {
  const auto model = random_model(4, 3, 61);
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(4);
  perm.indices() << 2, 0, 3, 1;
  const GmmModel<double> permuted(perm * model.weights(), model.means() * perm.transpose(), 1.0);
  const auto design = ball_design<double>(12, 0.5, 3, 62).with_translations(orthonormal_translations<double>(3, 4));
  const CMatrixd a = latent_covariance(model, design);
  const CMatrixd b = latent_covariance(permuted, design);
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-14);
  const Vectord sa = spectral_decomposition(a).singular_values, sb = spectral_decomposition(b).singular_values;
  CHECK((sa - sb).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("inverse Vandermonde bound on the unit circle") {
  Rng rng(71);
  for (Index k = 2; k <= 6; ++k) {
    for (int trial = 0; trial < 50; ++trial) {
      CVectord x(k);
      for (Index j = 0; j < k; ++j) x(j) = std::polar(1.0, 2 * pi * rng.uniform());
      CMatrixd v(k, k);
      for (Index i = 0; i < k; ++i)
        for (Index j = 0; j < k; ++j) v(i, j) = std::pow(x(j), double(i));
      const CMatrixd inv = v.fullPivLu().inverse();
      const double norm_inf = inv.cwiseAbs().rowwise().sum().maxCoeff();
      double bound = 0;
      for (Index j = 0; j < k; ++j) {
        double prod = 1;
        for (Index i = 0; i < k; ++i)
          if (i != j) prod *= (1.0 + std::abs(x(i))) / std::abs(x(i) - x(j));
        bound = std::max(bound, prod);
      }
      CHECK(norm_inf <= bound * (1 + 1e-9));
    }
  }
}

TEST_CASE("measurements in long double") {
  using ld = long double;
  const Matrix<ld> means = simplex_means<ld>(2, 3.0L, 2);
  const auto model = GmmModel<ld>::equal_weights(means, 0.5L);
  const auto s = sample_gmm(model, 200, 5);
  const auto design = ball_design<ld>(4, 0.5L, 2, 6).with_translations(orthonormal_translations<ld>(2, 3));
  const auto y = measurement_set(s, design, model.noise());
  const auto spec = spectral_decomposition(empirical_covariance(y));
  CHECK(spec.size() == 4);
  CHECK(spec.singular_values(0) > 0);
}

#include "doctest.h"

#include <cmath>

#include "fgmm/fgmm.hpp"

using namespace fgmm;

namespace {

FourierMeasurementSet<double> latent_measurements(const GmmModel<double>& model, const FrequencyDesign<double>& design) {
  FourierMeasurementSet<double> y{CMatrixd(design.L(), design.translation_count()), design, 0};
  for (Index m = 0; m < design.translation_count(); ++m)
    for (Index l = 0; l < design.L(); ++l) y.values(l, m) = latent_signal(model, Vectord(design.frequency(l, m)));
  return y;
}

Vectord random_simplex_point(Rng& rng, Index k) {
  Vectord w(k);
  for (Index i = 0; i < k; ++i) w(i) = rng.exponential();
  return w / w.sum();
}

}  // namespace

TEST_CASE("single component always gets unit weight") {
  Matrixd mean(2, 1);
  mean << 0.3, 0.1;
  const auto model = GmmModel<double>::equal_weights(sphere_means<double>(3, 2, 2.0, 1), 1.0);
  const auto samples = sample_gmm(model, 500, 2);
  const auto design = ball_design<double>(6, 0.5, 2, 3).with_translations(orthonormal_translations<double>(2, 3));
  const auto est = estimate_weights(mean, measurement_set(samples, design, model.noise()));
  REQUIRE(est.weights.size() == 1);
  CHECK(est.weights(0) == 1.0);
}

TEST_CASE("noiseless measurements give the true weights") {
  for (Index k = 2; k <= 5; ++k) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const Matrixd means = sphere_means<double>(k, 3, 4.0, seed * 10 + k);
      const GmmModel<double> model(dirichlet_weights<double>(k, seed), means, 1.0);
      const auto design =
          ball_design<double>(3 * k, 0.5, 3, seed).with_translations(orthonormal_translations<double>(3, 4));
      const auto est = estimate_weights(means, latent_measurements(model, design));
      CHECK((est.weights - model.weights()).cwiseAbs().maxCoeff() < 1e-8);
      CHECK(est.kkt_residual <= 1e-9);
    }
  }
}

TEST_CASE("returned weights lie on the simplex and beat random simplex points") {
  Rng rng(77);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Index k = 2 + Index(seed % 4);
    const auto model = GmmModel<double>::equal_weights(sphere_means<double>(k, 3, 4.0, seed), 1.0);
    const auto samples = sample_gmm(model, 2000, seed);
    const auto design = ball_design<double>(3 * k, 0.5, 3, seed).with_translations(orthonormal_translations<double>(3, 4));
    const auto y = measurement_set(samples, design, model.noise());
    // perturbed centers so the optimum is generally interior or on a face
    Matrixd guess = model.means();
    for (Index i = 0; i < guess.size(); ++i) guess(i) += 0.3 * rng.normal();
    const auto est = estimate_weights(guess, y);
    CHECK(std::abs(est.weights.sum() - 1.0) <= 1e-10);
    CHECK(est.weights.minCoeff() >= 0.0);
    CHECK(est.kkt_residual <= 1e-9);
    const auto problem = weight_problem(guess, y);
    const double f = weight_objective(est.weights, problem);
    for (int probe = 0; probe < 200; ++probe) CHECK(f <= weight_objective(random_simplex_point(rng, k), problem) + 1e-12);
  }
}

TEST_CASE("permuting centers permutes weights") {
  const GmmModel<double> model(dirichlet_weights<double>(4, 3), sphere_means<double>(4, 3, 4.0, 5), 1.0);
  const auto samples = sample_gmm(model, 5000, 6);
  const auto design = ball_design<double>(12, 0.5, 3, 7).with_translations(orthonormal_translations<double>(3, 4));
  const auto y = measurement_set(samples, design, model.noise());
  const auto base = estimate_weights(model.means(), y);
  const std::vector<Index> perm{2, 0, 3, 1};
  Matrixd shuffled(3, 4);
  for (Index i = 0; i < 4; ++i) shuffled.col(i) = model.means().col(perm[i]);
  const auto moved = estimate_weights(shuffled, y);
  for (Index i = 0; i < 4; ++i) CHECK(moved.weights(i) == doctest::Approx(base.weights(perm[i])).epsilon(1e-9));
}

TEST_CASE("duplicated centers split mass evenly and are flagged") {
  Matrixd means(2, 3);
  means << 1.0, 1.0, -2.0, 0.5, 0.5, 1.5;
  Vectord w(3);
  w << 0.3, 0.3, 0.4;
  const GmmModel<double> model(w, means, 1.0);
  const auto design = ball_design<double>(9, 0.5, 2, 2).with_translations(orthonormal_translations<double>(2, 3));
  const auto est = estimate_weights(means, latent_measurements(model, design));
  CHECK(est.degenerate);
  CHECK(est.weights(0) == doctest::Approx(est.weights(1)));
  CHECK(est.weights(0) + est.weights(1) == doctest::Approx(0.6).epsilon(1e-8));
  CHECK(est.ill_conditioned);
}

TEST_CASE("real Gram form reproduces the complex objective") {
  const auto model = GmmModel<double>::equal_weights(sphere_means<double>(3, 2, 3.0, 9), 1.0);
  const auto samples = sample_gmm(model, 1000, 3);
  const auto design = ball_design<double>(7, 0.6, 2, 4).with_translations(orthonormal_translations<double>(2, 3));
  const auto y = measurement_set(samples, design, model.noise());
  const auto p = weight_problem(model.means(), y);
  Rng rng(5);
  const auto direct = [&](const Vectord& w) {
    double acc = 0;
    for (Index m = 0; m < design.translation_count(); ++m)
      for (Index l = 0; l < design.L(); ++l) {
        Complex<double> s = 0;
        for (Index i = 0; i < 3; ++i) s += w(i) * std::polar(1.0, model.mean(i).dot(design.frequency(l, m)));
        acc += std::norm(s - y.values(l, m));
      }
    return acc;
  };
  const auto quadratic = [&](const Vectord& w) { return w.dot(p.gram * w) - 2 * p.linear.dot(w); };
  const Vectord w0 = random_simplex_point(rng, 3);
  const double offset = direct(w0) - quadratic(w0);
  for (int rep = 0; rep < 20; ++rep) {
    const Vectord w = random_simplex_point(rng, 3);
    CHECK(direct(w) - quadratic(w) == doctest::Approx(offset).epsilon(1e-10));
  }
  // G_ij = sum Re e^{i<mu_i - mu_j, t>}
  double g01 = 0;
  for (Index m = 0; m < design.translation_count(); ++m)
    for (Index l = 0; l < design.L(); ++l) g01 += std::cos((model.mean(0) - model.mean(1)).dot(design.frequency(l, m)));
  CHECK(p.gram(0, 1) == doctest::Approx(g01).epsilon(1e-12));
}

TEST_CASE("simplex projection") {
  Vectord v(3);
  v << 0.2, 0.3, 0.5;
  CHECK((project_to_simplex(v) - v).norm() < 1e-15);
  v << 5.0, 0.0, 0.0;
  Vectord e0(3);
  e0 << 1.0, 0.0, 0.0;
  CHECK((project_to_simplex(v) - e0).norm() < 1e-15);
  v << 1.0, 1.0, 1.0;
  CHECK((project_to_simplex(v) - Vectord::Constant(3, 1.0 / 3)).norm() < 1e-15);
}

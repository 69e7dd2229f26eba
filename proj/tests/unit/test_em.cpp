#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "fgmm/fgmm.hpp"

using namespace fgmm;

TEST_CASE("one component is the sample mean after one step") {
  const auto model = GmmModel<double>::equal_weights(sphere_means<double>(1, 4, 2.0, 3), 1.5);
  const auto samples = sample_gmm(model, 2000, 9);
  Matrixd init = Matrixd::Zero(4, 1);
  const auto r = em_fit(samples, 1, 1.5, init);
  const Vectord mean = samples.data.rowwise().mean();
  CHECK((r.means.col(0) - mean).norm() < 1e-12);
  CHECK(r.weights(0) == 1.0);
}

TEST_CASE("far-separated components lock in within three iterations") {
  Matrixd means(2, 2);
  means << 0.0, 100.0, 0.0, 0.0;
  const auto model = GmmModel<double>::equal_weights(means, 1.0);
  const auto samples = sample_gmm(model, 1000, 4);
  Matrixd init = means;
  init(0, 0) += 0.5;
  init(1, 1) -= 0.5;
  EmSettings settings;
  settings.max_iter = 3;
  const auto r = em_fit(samples, 2, 1.0, init, settings);
  // hard-assignment fixed point: cluster means of the split at x = 50
  Vectord left = Vectord::Zero(2), right = Vectord::Zero(2);
  double nl = 0, nr = 0;
  for (Index j = 0; j < samples.n(); ++j) {
    if (samples.data(0, j) < 50) left += samples.sample(j), ++nl;
    else right += samples.sample(j), ++nr;
  }
  CHECK((r.means.col(0) - left / nl).norm() < 1e-10);
  CHECK((r.means.col(1) - right / nr).norm() < 1e-10);
  CHECK(r.weights(0) == doctest::Approx(nl / 1000.0).epsilon(1e-12));
}

TEST_CASE("log-likelihood never decreases and weights stay on the simplex") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Index k = 2 + Index(seed % 4);
    const GmmModel<double> model(dirichlet_weights<double>(k, seed), sphere_means<double>(k, 3, 4.0, seed + 50), 1.0);
    const auto samples = sample_gmm(model, 3000, seed);
    const auto r = em_fit(samples, k, 1.0, em_init_random(samples, k, seed));
    for (std::size_t i = 1; i < r.loglik_trace.size(); ++i) CHECK(r.loglik_trace[i] >= r.loglik_trace[i - 1] - 1e-9);
    CHECK(std::abs(r.weights.sum() - 1.0) <= 1e-12);
    CHECK(r.weights.minCoeff() >= 0.0);
    CHECK(r.iterations <= 1000);
  }
}

TEST_CASE("stops on the likelihood tolerance") {
  const auto model = GmmModel<double>::equal_weights(sphere_means<double>(3, 2, 4.0, 1), 1.0);
  const auto samples = sample_gmm(model, 3000, 2);
  const auto r = em_fit(samples, 3, 1.0, em_init_random(samples, 3, 3));
  REQUIRE(r.converged);
  const auto n = r.loglik_trace.size();
  CHECK(r.loglik_trace[n - 1] - r.loglik_trace[n - 2] < 1e-6);
  EmSettings tight;
  tight.max_iter = 2;
  tight.loglik_tol = 0.0;
  const auto capped = em_fit(samples, 3, 1.0, em_init_random(samples, 3, 3), tight);
  CHECK(capped.iterations == 2);
  CHECK_FALSE(capped.converged);
}

TEST_CASE("a component far from every sample is frozen") {
  Matrixd means(1, 1);
  means << 0.0;
  const auto samples = sample_gmm(GmmModel<double>::equal_weights(means, 1.0), 500, 1);
  Matrixd init(1, 2);
  init << 0.0, 1e4;
  const auto r = em_fit(samples, 2, 1.0, init);
  CHECK(r.frozen[1]);
  CHECK_FALSE(r.frozen[0]);
  CHECK(r.means(0, 1) == 1e4);
  CHECK(r.weights(1) < 1e-12);
}

TEST_CASE("random initialisation") {
  const auto samples = sample_gmm(GmmModel<double>::equal_weights(sphere_means<double>(2, 2, 1.0, 1), 1.0), 5, 2);
  std::vector<Index> chosen;
  const Matrixd all = em_init_random(samples, 5, 3, &chosen);
  std::sort(chosen.begin(), chosen.end());
  CHECK(chosen == std::vector<Index>{0, 1, 2, 3, 4});
  CHECK(all == em_init_random(samples, 5, 3));
  CHECK_THROWS(em_init_random(samples, 6, 3));

  // index frequencies over many seeds against a chi-square bound
  const auto big = sample_gmm(GmmModel<double>::equal_weights(sphere_means<double>(1, 1, 0.0, 1), 1.0), 20, 4);
  std::vector<double> counts(20, 0.0);
  const int draws = 10000;
  for (int s = 0; s < draws; ++s) {
    std::vector<Index> pick;
    em_init_random(big, 3, std::uint64_t(s), &pick);
    std::sort(pick.begin(), pick.end());
    CHECK(std::adjacent_find(pick.begin(), pick.end()) == pick.end());
    for (Index p : pick) counts[p] += 1;
  }
  const double expected = 3.0 * draws / 20.0;
  double chi2 = 0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 43.8);  // chi-square(19) at p = 0.001
}

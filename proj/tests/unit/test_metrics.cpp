#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fgmm/fgmm.hpp"

using namespace fgmm;

namespace {

Matrixd random_atoms(Rng& rng, Index d, Index m, double scale) {
  Matrixd a(d, m);
  for (Index i = 0; i < a.size(); ++i) a(i) = scale * rng.normal();
  return a;
}

DiscreteDistribution<double> random_distribution(Rng& rng, Index d, Index m) {
  Vectord w(m);
  for (Index i = 0; i < m; ++i) w(i) = rng.exponential();
  return DiscreteDistribution<double>(random_atoms(rng, d, m, 2.0), w / w.sum());
}

double brute_force_uniform(const Matrixd& a, const Matrixd& b) {
  const Index k = a.cols();
  std::vector<Index> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), Index(0));
  double best = 1e300;
  do {
    double total = 0;
    for (Index i = 0; i < k; ++i) total += (a.col(i) - b.col(perm[i])).norm();
    best = std::min(best, total / double(k));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST_CASE("worked examples") {
  Matrixd a(2, 1);
  a << 0.0, 0.0;
  Matrixd b(2, 2);
  b << 0.0, 2.0, 0.0, 0.0;
  Vectord half(2);
  half << 0.5, 0.5;
  const auto delta0 = DiscreteDistribution<double>::uniform(a);
  CHECK(wasserstein1(delta0, DiscreteDistribution<double>(b, half)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(wasserstein1(delta0, delta0) == 0.0);
  Matrixd c(2, 1);
  c << 3.0, 4.0;
  CHECK(wasserstein1(delta0, DiscreteDistribution<double>::uniform(c)) == doctest::Approx(5.0).epsilon(1e-12));
  Rng rng(1);
  const auto nu = random_distribution(rng, 3, 6);
  CHECK(wasserstein1(nu, nu) < 1e-12);
}

TEST_CASE("uniform equal-count instances match the permutation minimum") {
  Rng rng(2024);
  for (int rep = 0; rep < 200; ++rep) {
    const Index k = 1 + rep % 5, d = 1 + rep % 4;
    const Matrixd a = random_atoms(rng, d, k, 3.0), b = random_atoms(rng, d, k, 3.0);
    const double w = wasserstein1(DiscreteDistribution<double>::uniform(a), DiscreteDistribution<double>::uniform(b));
    CHECK(w == doctest::Approx(brute_force_uniform(a, b)).epsilon(1e-10));
  }
}

TEST_CASE("metric axioms on random triples") {
  Rng rng(3);
  for (int rep = 0; rep < 100; ++rep) {
    const Index d = 1 + rep % 3;
    const auto x = random_distribution(rng, d, 1 + rep % 5);
    const auto y = random_distribution(rng, d, 1 + (rep + 2) % 6);
    const auto z = random_distribution(rng, d, 1 + (rep + 4) % 4);
    const double xy = wasserstein1(x, y), yx = wasserstein1(y, x);
    CHECK(xy >= 0.0);
    CHECK(xy == doctest::Approx(yx).epsilon(1e-10));
    CHECK(xy <= wasserstein1(x, z) + wasserstein1(z, y) + 1e-10);
  }
}

TEST_CASE("invariant under a common rotation") {
  Rng rng(4);
  for (int rep = 0; rep < 20; ++rep) {
    const auto x = random_distribution(rng, 3, 4), y = random_distribution(rng, 3, 5);
    const Matrixd q = random_rotation<double>(3, std::uint64_t(rep));
    const DiscreteDistribution<double> rx(q * x.atoms, x.masses), ry(q * y.atoms, y.masses);
    CHECK(std::abs(wasserstein1(x, y) - wasserstein1(rx, ry)) < 1e-10);
  }
}

TEST_CASE("optimal plan is feasible and certified by its dual") {
  Rng rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    const auto x = random_distribution(rng, 2, 1 + rep % 10), y = random_distribution(rng, 2, 1 + (rep * 7) % 12);
    const auto plan = wasserstein1_plan(x, y);
    CHECK((plan.plan.rowwise().sum() - x.masses).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((plan.plan.colwise().sum().transpose() - y.masses).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(plan.plan.minCoeff() >= -1e-15);
    CHECK(plan.duality_gap() <= 1e-10 * (1.0 + plan.cost));
  }
}

TEST_CASE("large supports stay exact") {
  Rng rng(6);
  const auto x = random_distribution(rng, 3, 64), y = random_distribution(rng, 3, 64);
  const auto plan = wasserstein1_plan(x, y);
  CHECK(plan.duality_gap() <= 1e-10 * (1.0 + plan.cost));
}

TEST_CASE("zero-mass atoms are ignored") {
  Matrixd a(1, 3);
  a << 0.0, 100.0, 1.0;
  Vectord m(3);
  m << 0.5, 0.0, 0.5;
  Matrixd b(1, 2);
  b << 0.0, 1.0;
  const auto plan = wasserstein1_plan(DiscreteDistribution<double>(a, m), DiscreteDistribution<double>::uniform(b));
  CHECK(plan.cost < 1e-12);
  CHECK(plan.source_atoms == std::vector<Index>{0, 2});
}

TEST_CASE("rejects mismatched inputs") {
  Matrixd a = Matrixd::Zero(2, 2), b = Matrixd::Zero(3, 2);
  CHECK_THROWS(wasserstein1(DiscreteDistribution<double>::uniform(a), DiscreteDistribution<double>::uniform(b)));
  Vectord bad(2);
  bad << 0.7, 0.7;
  CHECK_THROWS(DiscreteDistribution<double>(a, bad));
  CHECK_THROWS(matched_mean_error(a, Matrixd(Matrixd::Zero(2, 3))));
}

TEST_CASE("matched mean error") {
  Rng rng(7);
  const Matrixd truth = random_atoms(rng, 3, 4, 5.0);
  Matrixd shuffled(3, 4);
  const std::vector<Index> perm{3, 1, 0, 2};
  for (Index i = 0; i < 4; ++i) shuffled.col(i) = truth.col(perm[i]);
  CHECK(matched_mean_error(truth, shuffled) == 0.0);
  const Matrixd one = random_atoms(rng, 3, 1, 1.0), other = random_atoms(rng, 3, 1, 1.0);
  CHECK(matched_mean_error(one, other) == doctest::Approx((one - other).norm()));
  // small perturbations keep the optimal coupling a unique permutation
  Matrixd noisy = shuffled;
  for (Index i = 0; i < noisy.size(); ++i) noisy(i) += 0.01 * rng.normal();
  const auto plan =
      wasserstein1_plan(DiscreteDistribution<double>::uniform(truth), DiscreteDistribution<double>::uniform(noisy));
  double max_leg = 0;
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 4; ++j)
      if (plan.plan(i, j) > 1e-9) max_leg = std::max(max_leg, (truth.col(i) - noisy.col(j)).norm());
  CHECK(matched_mean_error(truth, noisy) == doctest::Approx(max_leg).epsilon(1e-12));
}

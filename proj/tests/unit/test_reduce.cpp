#include "doctest.h"

#include <cmath>

#include "fgmm/fgmm.hpp"

using namespace fgmm;

namespace {

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("noiseless data span the mean subspace") {
  const Matrixd means = sphere_means<double>(3, 8, 2.0, 4);
  const auto samples = sample_gmm(GmmModel<double>::equal_weights(means, 0.0), 300, 1);
  const auto sub = pca_subspace(samples, 3, false);
  CHECK((sub.basis.transpose() * sub.basis - Matrixd::Identity(3, 3)).norm() < 1e-10);
  const Matrixd p = sub.basis * sub.basis.transpose();
  for (Index i = 0; i < 3; ++i) CHECK((means.col(i) - p * means.col(i)).norm() <= 1e-8);
  CHECK(sub.mean_shift.norm() == 0.0);
}

TEST_CASE("k = d gives the full basis") {
  const auto samples = sample_gmm(GmmModel<double>::equal_weights(sphere_means<double>(2, 4, 1.0, 2), 1.0), 200, 3);
  const auto sub = pca_subspace(samples, 4);
  CHECK((sub.basis * sub.basis.transpose() - Matrixd::Identity(4, 4)).norm() < 1e-10);
}

TEST_CASE("rank-deficient data are rejected") {
  const auto samples = sample_gmm(GmmModel<double>::equal_weights(sphere_means<double>(2, 5, 1.0, 2), 0.0), 100, 3);
  CHECK_THROWS(pca_subspace(samples, 3, false));
  CHECK_THROWS(pca_subspace(samples, 6, false));
}

TEST_CASE("wide data take the thin SVD route") {
  // n < d forces the SVD branch; it must agree with the Gram branch on the same span
  const Matrixd means = sphere_means<double>(2, 30, 5.0, 6);
  const auto model = GmmModel<double>::equal_weights(means, 0.1);
  const auto wide = sample_gmm(model, 20, 2);
  const auto sub = pca_subspace(wide, 2, false);
  const Matrixd x = wide.data;
  Eigen::SelfAdjointEigenSolver<Matrixd> eig(x * x.transpose());
  const Matrixd top = eig.eigenvectors().rightCols(2);
  CHECK((sub.basis * sub.basis.transpose() - top * top.transpose()).norm() < 1e-8);
}

TEST_CASE("projection and back-projection") {
  const auto samples = sample_gmm(GmmModel<double>::equal_weights(sphere_means<double>(3, 6, 3.0, 1), 1.0), 2000, 5);
  for (bool centered : {false, true}) {
    const auto sub = pca_subspace(samples, 3, centered);
    Rng rng(7);
    Vectord coeff(3);
    for (Index i = 0; i < 3; ++i) coeff(i) = rng.normal();
    const Vectord inside = sub.basis * coeff + sub.mean_shift;
    Matrixd single(6, 1);
    single.col(0) = inside;
    Matrixd reduced(3, 1);
    reduced.col(0) = project(inside, sub);
    CHECK((back_project(reduced, sub).col(0) - inside).norm() < 1e-10);
    for (int rep = 0; rep < 20; ++rep) {
      Vectord x(6);
      for (Index i = 0; i < 6; ++i) x(i) = 3 * rng.normal();
      CHECK(project(x, sub).norm() <= (x - sub.mean_shift).norm() + 1e-12);
    }
  }
  const auto sub = pca_subspace(samples, 3, false);
  Eigen::FullPivHouseholderQR<Matrixd> qr(sub.basis);
  const Matrixd q = qr.matrixQ();
  CHECK(project(Vectord(q.col(4)), sub).norm() < 1e-10);
}

TEST_CASE("second moment matches the mixture formula") {
  const Index d = 4;
  Matrixd means(d, 2);
  means << 2, -1, 0, 1, 1, 0, -1, 2;
  Vectord w(2);
  w << 0.3, 0.7;
  const GmmModel<double> model(w, means, 0.8);
  const Index n = 1000000;
  const auto samples = sample_gmm(model, n, 11);
  const Matrixd m2 = samples.data * samples.data.transpose() / double(n);
  Matrixd expected = 0.64 * Matrixd::Identity(d, d);
  for (Index i = 0; i < 2; ++i) expected += w(i) * means.col(i) * means.col(i).transpose();
  // entrywise standard error of the mean of x_a x_b, estimated from the data
  double se2 = 0;
  for (Index a = 0; a < d; ++a)
    for (Index b = 0; b < d; ++b) {
      const Eigen::ArrayXd prod = (samples.data.row(a).array() * samples.data.row(b).array()).transpose();
      const double var = (prod - prod.mean()).square().mean();
      se2 += var / double(n);
    }
  CHECK((m2 - expected).norm() <= 5 * std::sqrt(se2));
}

TEST_CASE("projected samples follow the projected mixture") {
  const Matrixd means = sphere_means<double>(3, 12, 4.0, 8);
  const auto model = GmmModel<double>::equal_weights(means, 1.0);
  const Index n = 200000;
  const auto samples = sample_gmm(model, n, 12);
  const auto sub = pca_subspace(samples, 3, false);
  const auto reduced = project(samples, sub);
  const Matrixd cov = reduced.data * reduced.data.transpose() / double(n);
  Matrixd expected = Matrixd::Identity(3, 3);
  for (Index i = 0; i < 3; ++i) {
    const Vectord m = sub.basis.transpose() * means.col(i);
    expected += m * m.transpose() / 3.0;
  }
  CHECK((cov - expected).norm() / expected.norm() < 0.02);
}

TEST_CASE("noiseless high-dimensional pipeline is exact") {
  const Matrixd means = sphere_means<double>(2, 50, 3.0, 21);
  const auto model = GmmModel<double>::equal_weights(means, 0.0);
  const auto samples = sample_gmm(model, 400, 4);
  const auto design = ball_design<double>(10, 0.5, 2, 5).with_translations(orthonormal_translations<double>(2, 3));
  GdSettings settings;
  settings.max_steps = 2000;
  settings.grad_tol = 1e-12;
  const auto out =
      estimate_means_highdim(samples, 2, design, NoiseCovariance<double>::isotropic(0.0, 50), settings, false);
  REQUIRE(out.estimate.count() == 2);
  CHECK(matched_mean_error(means, out.estimate.centers) < 1e-6);
}

TEST_CASE("back-projection error splits into subspace and in-frame parts") {
  const Matrixd means = sphere_means<double>(3, 20, 4.0, 2);
  const auto model = GmmModel<double>::equal_weights(means, 1.0);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto samples = sample_gmm(model, 30000, seed);
    const auto design = ball_design<double>(15, 0.5, 3, seed).with_translations(orthonormal_translations<double>(3, 4));
    const auto out = estimate_means_highdim(samples, 3, design, model.noise(), GdSettings{}, false);
    const auto& sub = out.subspace;
    const Matrixd p = sub.basis * sub.basis.transpose();
    for (Index j = 0; j < 3; ++j) {
      Index best = 0;
      double best_d = 1e300;
      for (Index i = 0; i < 3; ++i) {
        const double dist = (means.col(i) - out.estimate.centers.col(j)).norm();
        if (dist < best_d) best_d = dist, best = i;
      }
      const Vectord mu = means.col(best);
      const double lhs = (mu - sub.basis * out.reduced_centers.col(j)).norm();
      const double rhs = (mu - p * mu).norm() + (sub.basis.transpose() * mu - out.reduced_centers.col(j)).norm();
      CHECK(lhs <= rhs + 1e-12);
    }
  }
}

TEST_CASE("PCA residual shrinks at the square-root rate") {
  // The unsquared residual ||mu - V V^T mu|| decays like n^{-1/2}, so its
  // square sits well inside the O(sqrt(d / n)) bound.
  const Matrixd means = sphere_means<double>(5, 50, 4.0, 3);
  const auto model = GmmModel<double>::equal_weights(means, 1.0);
  std::vector<double> logn, logr, logr2;
  for (Index n : {10000, 100000, 1000000}) {
    double acc = 0, acc2 = 0;
    const int reps = 3;
    for (int s = 0; s < reps; ++s) {
      const auto sub = pca_subspace(sample_gmm(model, n, 100 + s), 5, false);
      const Matrixd p = sub.basis * sub.basis.transpose();
      double r2 = 0;
      for (Index i = 0; i < 5; ++i) r2 += 0.2 * (means.col(i) - p * means.col(i)).squaredNorm();
      acc += std::sqrt(r2);
      acc2 += r2;
    }
    logn.push_back(std::log10(double(n)));
    logr.push_back(std::log10(acc / reps));
    logr2.push_back(std::log10(acc2 / reps));
  }
  CHECK(slope(logn, logr) == doctest::Approx(-0.5).epsilon(0.4));
  CHECK(slope(logn, logr2) <= -0.5 + 0.2);
}

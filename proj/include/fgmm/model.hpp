#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fgmm/random.hpp"
#include "fgmm/types.hpp"

namespace fgmm {

/// Shared component covariance: either sigma^2 I_d or a general SPD matrix
/// carried by its lower Cholesky factor.
template <typename Scalar>
class NoiseCovariance {
 public:
  static NoiseCovariance isotropic(Scalar sigma, Index d) {
    require(d >= 1, "NoiseCovariance: dimension must be >= 1");
    require(sigma >= Scalar(0) && std::isfinite(double(sigma)), "NoiseCovariance: sigma must be finite and >= 0");
    NoiseCovariance c;
    c.dim_ = d;
    c.sigma_ = sigma;
    return c;
  }

  static NoiseCovariance from_cholesky(Matrix<Scalar> lower) {
    require(lower.rows() == lower.cols() && lower.rows() >= 1, "NoiseCovariance: Cholesky factor must be square");
    for (Index i = 0; i < lower.rows(); ++i)
      require(lower(i, i) > Scalar(0), "NoiseCovariance: Cholesky factor must have a positive diagonal");
    NoiseCovariance c;
    c.dim_ = lower.rows();
    c.factor_ = lower.template triangularView<Eigen::Lower>();
    return c;
  }

  static NoiseCovariance full(const Matrix<Scalar>& sigma) {
    require(sigma.rows() == sigma.cols(), "NoiseCovariance: covariance must be square");
    require((sigma - sigma.transpose()).cwiseAbs().maxCoeff() <= scaled_tol<Scalar>(1e-12) * sigma.cwiseAbs().maxCoeff(),
            "NoiseCovariance: covariance must be symmetric");
    Eigen::LLT<Matrix<Scalar>> llt(sigma);
    require(llt.info() == Eigen::Success, "NoiseCovariance: covariance must be positive definite");
    return from_cholesky(llt.matrixL());
  }

  Index dim() const { return dim_; }
  bool is_isotropic() const { return !factor_.has_value(); }
  Scalar sigma() const {
    require(is_isotropic(), "NoiseCovariance: sigma() is only defined for isotropic covariance");
    return sigma_;
  }
  const Matrix<Scalar>& cholesky_factor() const { return *factor_; }

  Matrix<Scalar> matrix() const {
    if (is_isotropic()) return Matrix<Scalar>::Identity(dim_, dim_) * (sigma_ * sigma_);
    return *factor_ * factor_->transpose();
  }

  /// t^T Sigma t.
  template <typename Derived>
  Scalar quadratic(const Eigen::MatrixBase<Derived>& t) const {
    if (is_isotropic()) return sigma_ * sigma_ * t.squaredNorm();
    return (factor_->transpose() * t).squaredNorm();
  }

  /// Covariance of V^T x for x with this covariance, V (d x r) with orthonormal columns.
  NoiseCovariance projected(const Matrix<Scalar>& basis) const {
    if (is_isotropic()) return isotropic(sigma_, basis.cols());
    return full(basis.transpose() * matrix() * basis);
  }

  /// Maps a standard normal vector z to Sigma^{1/2} z (Cholesky convention).
  template <typename Derived>
  Vector<Scalar> colour(const Eigen::MatrixBase<Derived>& z) const {
    if (is_isotropic()) return sigma_ * z;
    return *factor_ * z;
  }

 private:
  NoiseCovariance() = default;
  Index dim_ = 0;
  Scalar sigma_ = Scalar(0);
  std::optional<Matrix<Scalar>> factor_;
};

/// Finite Gaussian location mixture sum_i w_i N(mu_i, Sigma). Means are stored
/// column-wise (d x k).
template <typename Scalar>
class GmmModel {
 public:
  GmmModel(Vector<Scalar> weights, Matrix<Scalar> means, NoiseCovariance<Scalar> noise)
      : weights_(std::move(weights)), means_(std::move(means)), noise_(std::move(noise)) {
    require(means_.cols() >= 1 && means_.rows() >= 1, "GmmModel: need k >= 1 and d >= 1");
    require(weights_.size() == means_.cols(), "GmmModel: weights and means disagree on k");
    require(noise_.dim() == means_.rows(), "GmmModel: covariance dimension mismatch");
    require(means_.allFinite(), "GmmModel: means must be finite");
    for (Index i = 0; i < weights_.size(); ++i) require(weights_(i) > Scalar(0), "GmmModel: weights must be positive");
    require(std::abs(weights_.sum() - Scalar(1)) <= scaled_tol<Scalar>(1e-12), "GmmModel: weights must sum to 1");
  }

  GmmModel(Vector<Scalar> weights, Matrix<Scalar> means, Scalar sigma)
      : GmmModel(std::move(weights), means, NoiseCovariance<Scalar>::isotropic(sigma, means.rows())) {}

  static GmmModel equal_weights(Matrix<Scalar> means, Scalar sigma) {
    const Index k = means.cols();
    return GmmModel(Vector<Scalar>::Constant(k, Scalar(1) / Scalar(k)), std::move(means), sigma);
  }

  Index k() const { return means_.cols(); }
  Index d() const { return means_.rows(); }
  const Vector<Scalar>& weights() const { return weights_; }
  const Matrix<Scalar>& means() const { return means_; }
  auto mean(Index i) const { return means_.col(i); }
  const NoiseCovariance<Scalar>& noise() const { return noise_; }

  /// Minimum pairwise distance between means; +inf for k = 1.
  Scalar separation() const {
    Scalar best = std::numeric_limits<Scalar>::infinity();
    for (Index i = 0; i < k(); ++i)
      for (Index j = i + 1; j < k(); ++j) best = std::min(best, (means_.col(i) - means_.col(j)).norm());
    return best;
  }

  Scalar min_weight() const { return weights_.minCoeff(); }

  /// Throws unless all means are pairwise distinct.
  void require_separated() const {
    require(k() == 1 || separation() > Scalar(0), "GmmModel: means are not pairwise distinct");
  }

 private:
  Vector<Scalar> weights_;
  Matrix<Scalar> means_;
  NoiseCovariance<Scalar> noise_;
};

/// i.i.d. draws stored column-wise (d x n).
template <typename Scalar>
struct SampleSet {
  Matrix<Scalar> data;
  std::uint64_t seed = 0;

  SampleSet() = default;
  explicit SampleSet(Matrix<Scalar> values, std::uint64_t seed_used = 0) : data(std::move(values)), seed(seed_used) {
    require(data.cols() >= 1 && data.rows() >= 1, "SampleSet: need n >= 1 samples of dimension >= 1");
  }

  Index n() const { return data.cols(); }
  Index d() const { return data.rows(); }
  auto sample(Index j) const { return data.col(j); }
};

/// Component index I ~ Categorical(w) by inverse CDF on one uniform, then
/// x = mu_I + Sigma^{1/2} Z with Z drawn by Box-Muller.
template <typename Scalar>
SampleSet<Scalar> sample_gmm(const GmmModel<Scalar>& model, Index n, std::uint64_t seed) {
  require(n >= 1, "sample_gmm: n must be >= 1");
  const Index k = model.k();
  const Index d = model.d();
  std::vector<double> cumulative(static_cast<std::size_t>(k));
  double running = 0.0;
  for (Index i = 0; i < k; ++i) {
    running += double(model.weights()(i));
    cumulative[static_cast<std::size_t>(i)] = running;
  }
  Rng rng(seed);
  Matrix<Scalar> data(d, n);
  Vector<Scalar> z(d);
  for (Index j = 0; j < n; ++j) {
    const double u = rng.uniform() * running;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const Index comp = std::min<Index>(static_cast<Index>(it - cumulative.begin()), k - 1);
    for (Index a = 0; a < d; ++a) z(a) = Scalar(rng.normal());
    data.col(j) = model.mean(comp) + model.noise().colour(z);
  }
  return SampleSet<Scalar>(std::move(data), seed);
}

/// Regular simplex means with edge `delta`: segment (k=2), equilateral
/// triangle (k=3) or regular tetrahedron (k=4) in the first k-1 coordinates,
/// centroid at the origin.
template <typename Scalar = double>
Matrix<Scalar> simplex_means(Index k, Scalar delta, Index d) {
  require(k >= 2 && k <= 4, "simplex_means: k must be 2, 3 or 4");
  require(d >= k - 1, "simplex_means: need d >= k - 1");
  require(delta >= Scalar(0), "simplex_means: delta must be >= 0");
  Matrix<Scalar> means = Matrix<Scalar>::Zero(d, k);
  using std::sqrt;
  if (k == 2) {
    means(0, 0) = delta / 2;
    means(0, 1) = -delta / 2;
  } else if (k == 3) {
    const Scalar circumradius = delta / sqrt(Scalar(3));
    for (Index i = 0; i < 3; ++i) {
      const Scalar angle = Scalar(std::numbers::pi) / 2 + Scalar(i) * Scalar(2 * std::numbers::pi / 3);
      means(0, i) = circumradius * std::cos(angle);
      means(1, i) = circumradius * std::sin(angle);
    }
  } else {
    const Scalar s = delta / (2 * sqrt(Scalar(2)));
    const int signs[4][3] = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
    for (Index i = 0; i < 4; ++i)
      for (Index a = 0; a < 3; ++a) means(a, i) = s * Scalar(signs[i][a]);
  }
  return means;
}

/// k i.i.d. points uniform on the radius-R sphere in R^d.
template <typename Scalar = double>
Matrix<Scalar> sphere_means(Index k, Index d, Scalar radius, std::uint64_t seed) {
  require(k >= 1 && d >= 1, "sphere_means: need k >= 1 and d >= 1");
  require(radius >= Scalar(0), "sphere_means: radius must be >= 0");
  Rng rng(seed);
  Matrix<Scalar> means(d, k);
  for (Index i = 0; i < k; ++i) {
    Vector<Scalar> g(d);
    Scalar norm = 0;
    do {
      for (Index a = 0; a < d; ++a) g(a) = Scalar(rng.normal());
      norm = g.norm();
    } while (norm == Scalar(0));
    means.col(i) = (radius / norm) * g;
  }
  return means;
}

/// Haar-distributed orthogonal d x d matrix (QR of a Gaussian matrix with
/// the sign of R's diagonal folded into Q).
template <typename Scalar = double>
Matrix<Scalar> random_rotation(Index d, std::uint64_t seed) {
  require(d >= 1, "random_rotation: d must be >= 1");
  Rng rng(seed);
  Matrix<Scalar> g(d, d);
  for (Index i = 0; i < g.size(); ++i) g(i) = Scalar(rng.normal());
  Eigen::HouseholderQR<Matrix<Scalar>> qr(g);
  Matrix<Scalar> q = qr.householderQ();
  const Matrix<Scalar> r = qr.matrixQR();
  for (Index j = 0; j < d; ++j)
    if (r(j, j) < Scalar(0)) q.col(j) = -q.col(j);
  return q;
}

/// Dirichlet(1, ..., 1) weights via normalised exponentials.
template <typename Scalar = double>
Vector<Scalar> dirichlet_weights(Index k, std::uint64_t seed) {
  require(k >= 1, "dirichlet_weights: k must be >= 1");
  Rng rng(seed);
  Vector<Scalar> w(k);
  for (Index i = 0; i < k; ++i) w(i) = Scalar(rng.exponential());
  return w / w.sum();
}

}  // namespace fgmm

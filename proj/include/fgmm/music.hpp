#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fgmm/fourier.hpp"
#include "fgmm/random.hpp"
#include "fgmm/types.hpp"

namespace fgmm {

/// Orthonormal basis U1 (L x k) of the estimated spectral subspace together
/// with the measurement points that define the steering vectors.
template <typename Scalar>
class SubspaceProjector {
 public:
  SubspaceProjector(CMatrix<Scalar> basis, Matrix<Scalar> points)
      : basis_(std::move(basis)), points_(std::move(points)) {
    require(basis_.rows() == points_.cols(), "SubspaceProjector: basis rows must equal L");
    require(basis_.cols() >= 1 && basis_.cols() <= basis_.rows(), "SubspaceProjector: need 1 <= k <= L");
    const CMatrix<Scalar> gram = basis_.adjoint() * basis_;
    const Scalar err = (gram - CMatrix<Scalar>::Identity(k(), k())).cwiseAbs().maxCoeff();
    require(err <= scaled_tol<Scalar>(1e-10), "SubspaceProjector: basis columns are not orthonormal");
  }

  static SubspaceProjector from_spectrum(const SpectralDecomposition<Scalar>& spec, Index k,
                                         const FrequencyDesign<Scalar>& design) {
    return SubspaceProjector(spec.leading(k), design.points());
  }

  Index L() const { return basis_.rows(); }
  Index k() const { return basis_.cols(); }
  Index dim() const { return points_.rows(); }
  const CMatrix<Scalar>& basis() const { return basis_; }
  const Matrix<Scalar>& points() const { return points_; }

  template <typename Derived>
  CVector<Scalar> steering(const Eigen::MatrixBase<Derived>& mu) const {
    return steering_vector<Scalar>(mu, points_);
  }

 private:
  CMatrix<Scalar> basis_;
  Matrix<Scalar> points_;
};

template <typename Scalar>
struct ObjectiveValue {
  Scalar J;  // ||(I - U1 U1^*) phi(mu)||
  Scalar f;  // J^2 = L - ||U1^* phi(mu)||^2
};

/// Residual of phi_L(mu) after projecting onto span(U1).
template <typename Scalar, typename Derived>
ObjectiveValue<Scalar> objective(const Eigen::MatrixBase<Derived>& mu, const SubspaceProjector<Scalar>& proj) {
  require(mu.size() == proj.dim(), "objective: dimension mismatch");
  const CVector<Scalar> phi = proj.steering(mu);
  const Scalar captured = (proj.basis().adjoint() * phi).squaredNorm();
  const Scalar f = std::clamp(Scalar(proj.L()) - captured, Scalar(0), Scalar(proj.L()));
  return {std::sqrt(f), f};
}

/// s(x) = ||U1^* phi_L(x)||^2, in [0, L].
template <typename Scalar, typename Derived>
Scalar score(const Eigen::MatrixBase<Derived>& x, const SubspaceProjector<Scalar>& proj) {
  require(x.size() == proj.dim(), "score: dimension mismatch");
  return (proj.basis().adjoint() * proj.steering(x)).squaredNorm();
}

/// Scores of every sample, computed block-wise.
template <typename Scalar>
Vector<Scalar> scores(const Matrix<Scalar>& samples, const SubspaceProjector<Scalar>& proj) {
  require(samples.rows() == proj.dim(), "scores: dimension mismatch");
  constexpr Index block = 2048;
  const Index n = samples.cols();
  Vector<Scalar> out(n);
  for (Index start = 0; start < n; start += block) {
    const Index width = std::min(block, n - start);
    const CMatrix<Scalar> phi = unit_phasors<Scalar>(proj.points().transpose() * samples.middleCols(start, width));
    out.segment(start, width) = (proj.basis().adjoint() * phi).colwise().squaredNorm().transpose();
  }
  return out;
}

/// Scores from precomputed steering columns (point_phasors of the samples).
template <typename Scalar>
Vector<Scalar> scores(const CMatrix<Scalar>& phasors, const SubspaceProjector<Scalar>& proj) {
  require(phasors.rows() == proj.L(), "scores: phasor rows must equal L");
  constexpr Index block = 2048;
  const Index n = phasors.cols();
  Vector<Scalar> out(n);
  for (Index start = 0; start < n; start += block) {
    const Index width = std::min(block, n - start);
    out.segment(start, width) =
        (proj.basis().adjoint() * phasors.middleCols(start, width)).colwise().squaredNorm().transpose();
  }
  return out;
}

/// Gradient of f(mu) = L - ||U1^* phi(mu)||^2. With q = U1 U1^* phi and
/// d phi_l / d mu = i t_l phi_l this is -2 sum_l t_l Im(conj(phi_l) q_l).
template <typename Scalar, typename Derived>
Vector<Scalar> gradient(const Eigen::MatrixBase<Derived>& mu, const SubspaceProjector<Scalar>& proj) {
  require(mu.size() == proj.dim(), "gradient: dimension mismatch");
  const CVector<Scalar> phi = proj.steering(mu);
  const CVector<Scalar> q = proj.basis() * (proj.basis().adjoint() * phi);
  const Vector<Scalar> im = (phi.conjugate().cwiseProduct(q)).imag();
  return Scalar(-2) * (proj.points() * im);
}

/// Same gradient from the pairwise expansion
///   Re( i sum_{m,l} (delta_ml - r_m r_l^*) e^{i<mu, t_l - t_m>} (t_l - t_m) ),
/// r_m the rows of U1. O(L^2 d); kept as an independent route for checks.
template <typename Scalar, typename Derived>
Vector<Scalar> gradient_double_sum(const Eigen::MatrixBase<Derived>& mu, const SubspaceProjector<Scalar>& proj) {
  require(mu.size() == proj.dim(), "gradient_double_sum: dimension mismatch");
  const Index L = proj.L();
  const CMatrix<Scalar>& u = proj.basis();
  const Matrix<Scalar>& t = proj.points();
  const Complex<Scalar> iota(0, 1);
  Vector<Scalar> g = Vector<Scalar>::Zero(proj.dim());
  for (Index m = 0; m < L; ++m) {
    for (Index l = 0; l < L; ++l) {
      if (l == m) continue;  // t_l - t_m = 0
      const Complex<Scalar> coeff = -u.row(l).dot(u.row(m));  // -(r_m r_l^*); dot conjugates its first argument
      const Vector<Scalar> diff = t.col(l) - t.col(m);
      const Complex<Scalar> term = iota * coeff * std::polar(Scalar(1), mu.dot(diff));
      g += term.real() * diff;
    }
  }
  return g;
}

struct GdSettings {
  double gamma = 0.5;
  int max_steps = 50;
  double grad_tol = 1e-8;
  double dedup_delta = 1.0;
  /// Cap on descent starts in estimate_means; 0 means every sample.
  Index max_starts = 0;

  void validate() const {
    require(gamma > 0, "GdSettings: gamma must be > 0");
    require(max_steps >= 1, "GdSettings: max_steps must be >= 1");
    require(grad_tol >= 0, "GdSettings: grad_tol must be >= 0");
    require(dedup_delta >= 0, "GdSettings: dedup_delta must be >= 0");
    require(max_starts >= 0, "GdSettings: max_starts must be >= 0");
  }
};

class NonFiniteDescentError : public std::runtime_error {
 public:
  explicit NonFiniteDescentError(int step)
      : std::runtime_error("gradient descent produced a non-finite value at step " + std::to_string(step)),
        step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

template <typename Scalar>
struct DescentResult {
  Vector<Scalar> mu;
  std::vector<Scalar> trace;  // f at every iterate, starting point included
  int steps = 0;
  bool converged = false;
};

/// mu <- mu - gamma grad f(mu) until ||grad f|| < grad_tol or max_steps updates.
template <typename Scalar, typename Derived>
DescentResult<Scalar> gradient_descent(const Eigen::MatrixBase<Derived>& mu0, const SubspaceProjector<Scalar>& proj,
                                       const GdSettings& settings) {
  settings.validate();
  DescentResult<Scalar> r;
  r.mu = mu0;
  for (int step = 0;; ++step) {
    const ObjectiveValue<Scalar> obj = objective(r.mu, proj);
    const Vector<Scalar> g = gradient(r.mu, proj);
    if (!std::isfinite(double(obj.f)) || !g.allFinite() || !r.mu.allFinite()) throw NonFiniteDescentError(step);
    r.trace.push_back(obj.f);
    if (g.norm() < Scalar(settings.grad_tol)) {
      r.converged = true;
      break;
    }
    if (step == settings.max_steps) break;
    r.mu -= Scalar(settings.gamma) * g;
    ++r.steps;
  }
  return r;
}

template <typename Scalar>
struct MeanEstimate {
  Matrix<Scalar> centers;               // d x (#accepted)
  std::vector<Scalar> objective_values;  // J at each accepted center
  std::vector<Index> init_indices;       // sample index each accepted descent started from
  Index starts_tried = 0;
  std::optional<Scalar> kappa;

  Index count() const { return centers.cols(); }
};

/// Thrown when the starts run out before k distinct centers are accepted.
template <typename Scalar>
class StartsExhaustedError : public std::runtime_error {
 public:
  StartsExhaustedError(MeanEstimate<Scalar> partial, Index wanted)
      : std::runtime_error("mean estimation exhausted its starts with " + std::to_string(partial.count()) + " of " +
                           std::to_string(wanted) + " centers"),
        partial_(std::move(partial)) {}
  const MeanEstimate<Scalar>& partial() const { return partial_; }

 private:
  MeanEstimate<Scalar> partial_;
};

/// Score-initialised multi-start descent: samples are visited in descending
/// score (ties by index); a descent endpoint is accepted when it is farther
/// than dedup_delta from every accepted center, until k are accepted. `s`
/// holds the score of every sample.
template <typename Scalar>
MeanEstimate<Scalar> estimate_means(const SampleSet<Scalar>& samples, const SubspaceProjector<Scalar>& proj, Index k,
                                    const GdSettings& settings, const Vector<Scalar>& s) {
  settings.validate();
  require(k >= 1, "estimate_means: k must be >= 1");
  require(samples.d() == proj.dim(), "estimate_means: dimension mismatch");
  require(s.size() == samples.n(), "estimate_means: one score per sample");
  std::vector<Index> order(static_cast<std::size_t>(samples.n()));
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return s(a) > s(b); });

  const Index limit = settings.max_starts > 0 ? std::min(settings.max_starts, samples.n()) : samples.n();
  MeanEstimate<Scalar> est;
  std::vector<Vector<Scalar>> accepted;
  for (Index j = 0; j < limit && Index(accepted.size()) < k; ++j) {
    const Index idx = order[static_cast<std::size_t>(j)];
    const DescentResult<Scalar> run = gradient_descent(samples.sample(idx), proj, settings);
    ++est.starts_tried;
    const bool distinct = std::all_of(accepted.begin(), accepted.end(), [&](const Vector<Scalar>& c) {
      return (run.mu - c).norm() > Scalar(settings.dedup_delta);
    });
    if (!distinct) continue;
    accepted.push_back(run.mu);
    est.objective_values.push_back(std::sqrt(run.trace.back()));
    est.init_indices.push_back(idx);
  }
  est.centers.resize(samples.d(), Index(accepted.size()));
  for (Index i = 0; i < Index(accepted.size()); ++i) est.centers.col(i) = accepted[static_cast<std::size_t>(i)];
  if (Index(accepted.size()) < k) throw StartsExhaustedError<Scalar>(std::move(est), k);
  return est;
}

template <typename Scalar>
MeanEstimate<Scalar> estimate_means(const SampleSet<Scalar>& samples, const SubspaceProjector<Scalar>& proj, Index k,
                                    const GdSettings& settings) {
  require(samples.d() == proj.dim(), "estimate_means: dimension mismatch");
  return estimate_means(samples, proj, k, settings, scores(samples.data, proj));
}

template <typename Scalar>
struct CoercivityEstimate {
  Scalar kappa;
  bool hypotheses_violated;  // kappa <= 1e-12
};

/// min over sampled unit directions u and radii rho in (0, radius] of
/// J(mu* + rho u) / rho.
template <typename Scalar, typename Derived>
CoercivityEstimate<Scalar> coercivity_estimate(const SubspaceProjector<Scalar>& proj,
                                               const Eigen::MatrixBase<Derived>& mu_star, Scalar radius,
                                               Index directions = 64, Index radii = 8, std::uint64_t seed = 0) {
  require(radius > Scalar(0), "coercivity_estimate: radius must be > 0");
  require(directions >= 1 && radii >= 1, "coercivity_estimate: need at least one direction and radius");
  require(mu_star.size() == proj.dim(), "coercivity_estimate: dimension mismatch");
  Rng rng(seed);
  Scalar kappa = std::numeric_limits<Scalar>::infinity();
  for (Index a = 0; a < directions; ++a) {
    const Vector<Scalar> u = detail::random_unit_vector<Scalar>(rng, proj.dim());
    for (Index b = 1; b <= radii; ++b) {
      const Scalar rho = radius * Scalar(b) / Scalar(radii);
      const Vector<Scalar> mu = mu_star + rho * u;
      kappa = std::min(kappa, objective(mu, proj).J / rho);
    }
  }
  return {kappa, kappa <= Scalar(1e-12)};
}

}  // namespace fgmm

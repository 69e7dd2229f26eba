#pragma once

#include <utility>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "fgmm/fourier.hpp"
#include "fgmm/music.hpp"
#include "fgmm/types.hpp"

namespace fgmm {

/// Top-k principal subspace of the (optionally centered) data.
template <typename Scalar>
struct PcaSubspace {
  Matrix<Scalar> basis;       // d x k, orthonormal columns
  bool centered = false;
  Vector<Scalar> mean_shift;  // subtracted before projecting; zero when uncentered
  Vector<Scalar> variances;   // top-k eigenvalues of X^T X / n, descending

  Index dim() const { return basis.rows(); }
  Index k() const { return basis.cols(); }
};

/// V_hat = top-k right singular vectors of X (n x d). Uses the d x d Gram
/// matrix when d <= n, a thin SVD of X otherwise. Column signs are fixed so the
/// largest-magnitude entry of each column is positive.
template <typename Scalar>
PcaSubspace<Scalar> pca_subspace(const SampleSet<Scalar>& samples, Index k, bool centered = true) {
  const Index d = samples.d();
  const Index n = samples.n();
  require(k >= 1 && k <= d, "pca_subspace: need 1 <= k <= d");
  require(n >= k, "pca_subspace: need n >= k");
  PcaSubspace<Scalar> out;
  out.centered = centered;
  out.mean_shift = centered ? Vector<Scalar>(samples.data.rowwise().mean()) : Vector<Scalar>::Zero(d);
  const Matrix<Scalar> x = samples.data.colwise() - out.mean_shift;

  Vector<Scalar> eig;  // descending eigenvalues of X^T X
  Matrix<Scalar> vecs;
  if (d <= n) {
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(x * x.transpose());
    require(solver.info() == Eigen::Success, "pca_subspace: eigensolver failed");
    eig = solver.eigenvalues().reverse();
    vecs = solver.eigenvectors().rowwise().reverse();
  } else {
    Eigen::JacobiSVD<Matrix<Scalar>> svd(x.transpose(), Eigen::ComputeThinV);
    eig = svd.singularValues().array().square();
    vecs = svd.matrixV();
  }
  const Scalar top = eig(0);
  require(top > Scalar(0) && eig(k - 1) > scaled_tol<Scalar>(1e-12) * top, "pca_subspace: data matrix has rank < k");
  out.basis = vecs.leftCols(k);
  for (Index c = 0; c < k; ++c) {
    Index arg = 0;
    out.basis.col(c).cwiseAbs().maxCoeff(&arg);
    if (out.basis(arg, c) < Scalar(0)) out.basis.col(c) *= Scalar(-1);
  }
  out.variances = eig.head(k) / Scalar(n);
  return out;
}

/// V_hat^T (x - shift) for a single vector.
template <typename Scalar, typename Derived>
Vector<Scalar> project(const Eigen::MatrixBase<Derived>& x, const PcaSubspace<Scalar>& sub) {
  require(x.rows() == sub.dim() && x.cols() == 1, "project: dimension mismatch");
  return sub.basis.transpose() * (x - sub.mean_shift);
}

template <typename Scalar>
SampleSet<Scalar> project(const SampleSet<Scalar>& samples, const PcaSubspace<Scalar>& sub) {
  require(samples.d() == sub.dim(), "project: dimension mismatch");
  return SampleSet<Scalar>(sub.basis.transpose() * (samples.data.colwise() - sub.mean_shift), samples.seed);
}

/// V_hat kappa + shift, column-wise.
template <typename Scalar>
Matrix<Scalar> back_project(const Matrix<Scalar>& reduced, const PcaSubspace<Scalar>& sub) {
  require(reduced.rows() == sub.k(), "back_project: dimension mismatch");
  return (sub.basis * reduced).colwise() + sub.mean_shift;
}

template <typename Scalar>
struct HighDimEstimate {
  MeanEstimate<Scalar> estimate;  // centers in R^d
  Matrix<Scalar> reduced_centers;  // k x k centers in the PCA frame
  PcaSubspace<Scalar> subspace;
  FourierMeasurementSet<Scalar> reduced_measurements;
};

/// PCA to R^k, score-initialised descent there, then back-projection.
/// `design_k` lives in R^k; `noise` is the full d-dimensional covariance.
template <typename Scalar>
HighDimEstimate<Scalar> estimate_means_highdim(const SampleSet<Scalar>& samples, Index k,
                                               const FrequencyDesign<Scalar>& design_k,
                                               const NoiseCovariance<Scalar>& noise, const GdSettings& settings,
                                               bool centered = true) {
  require(k < samples.d(), "estimate_means_highdim: requires k < d");
  require(design_k.dim() == k, "estimate_means_highdim: design must live in R^k");
  PcaSubspace<Scalar> sub = pca_subspace(samples, k, centered);
  const SampleSet<Scalar> reduced = project(samples, sub);
  const NoiseCovariance<Scalar> reduced_noise = noise.projected(sub.basis);
  FourierMeasurementSet<Scalar> y = measurement_set(reduced, design_k, reduced_noise);
  const SpectralDecomposition<Scalar> spec = spectral_decomposition(empirical_covariance(y));
  const auto proj = SubspaceProjector<Scalar>::from_spectrum(spec, k, design_k);
  try {
    MeanEstimate<Scalar> est = estimate_means(reduced, proj, k, settings);
    Matrix<Scalar> reduced_centers = est.centers;
    est.centers = back_project(reduced_centers, sub);
    return {std::move(est), std::move(reduced_centers), std::move(sub), std::move(y)};
  } catch (const StartsExhaustedError<Scalar>& e) {
    MeanEstimate<Scalar> partial = e.partial();
    partial.centers = back_project(partial.centers, sub);
    throw StartsExhaustedError<Scalar>(std::move(partial), k);
  }
}

}  // namespace fgmm

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

#include <Eigen/Eigenvalues>

#include "fgmm/design.hpp"
#include "fgmm/model.hpp"
#include "fgmm/types.hpp"

namespace fgmm {

/// (1/n) sum_j exp(i <x_j, t>).
template <typename Scalar, typename Derived>
Complex<Scalar> empirical_cf(const SampleSet<Scalar>& samples, const Eigen::MatrixBase<Derived>& t) {
  require(t.size() == samples.d(), "empirical_cf: dimension mismatch");
  const Vector<Scalar> phases = samples.data.transpose() * t;
  Scalar re = 0, im = 0;
  for (Index j = 0; j < phases.size(); ++j) {
    re += std::cos(phases(j));
    im += std::sin(phases(j));
  }
  const Scalar n = Scalar(samples.n());
  return {re / n, im / n};
}

/// Covariance-compensated measurement exp(t^T Sigma t / 2) * empirical_cf(t).
template <typename Scalar, typename Derived>
Complex<Scalar> fourier_measurement(const SampleSet<Scalar>& samples, const Eigen::MatrixBase<Derived>& t,
                                    const NoiseCovariance<Scalar>& noise) {
  require(noise.dim() == samples.d(), "fourier_measurement: covariance dimension mismatch");
  return std::exp(noise.quadratic(t) / Scalar(2)) * empirical_cf(samples, t);
}

/// Entrywise exp(i p).
template <typename Scalar>
CMatrix<Scalar> unit_phasors(const Matrix<Scalar>& phases) {
  return phases.unaryExpr([](Scalar p) { return std::polar(Scalar(1), p); });
}

/// phi_L(mu): entry l is exp(i <mu, t_l>).
template <typename Scalar, typename Derived>
CVector<Scalar> steering_vector(const Eigen::MatrixBase<Derived>& mu, const Matrix<Scalar>& points) {
  require(mu.size() == points.rows(), "steering_vector: dimension mismatch");
  return unit_phasors<Scalar>(points.transpose() * mu);
}

template <typename Scalar, typename Derived>
CVector<Scalar> steering_vector(const Eigen::MatrixBase<Derived>& mu, const FrequencyDesign<Scalar>& design) {
  return steering_vector<Scalar>(mu, design.points());
}

/// Phi = [phi_L(mu_1) ... phi_L(mu_k)], L x k.
template <typename Scalar>
CMatrix<Scalar> steering_matrix(const Matrix<Scalar>& means, const Matrix<Scalar>& points) {
  require(means.rows() == points.rows(), "steering_matrix: dimension mismatch");
  return unit_phasors<Scalar>(points.transpose() * means);
}

/// L x (M+1) array; column m holds y_hat(t_l + v_m) for l = 1..L.
template <typename Scalar>
struct FourierMeasurementSet {
  CMatrix<Scalar> values;
  FrequencyDesign<Scalar> design;
  Index n = 0;

  Index L() const { return values.rows(); }
  Index translation_count() const { return values.cols(); }
  auto column(Index m) const { return values.col(m); }
};

/// exp(i <x_j, t_l>) for every sample and point, L x n. Shared by the
/// measurement pass and the score pass, which see the same points.
template <typename Scalar>
CMatrix<Scalar> point_phasors(const Matrix<Scalar>& data, const Matrix<Scalar>& points) {
  require(points.rows() == data.rows(), "point_phasors: dimension mismatch");
  constexpr Index block = 2048;
  CMatrix<Scalar> out(points.cols(), data.cols());
  for (Index start = 0; start < data.cols(); start += block) {
    const Index width = std::min(block, data.cols() - start);
    out.middleCols(start, width) = unit_phasors<Scalar>(points.transpose() * data.middleCols(start, width));
  }
  return out;
}

namespace detail {
inline constexpr Index measurement_block = 2048;

template <typename Scalar, typename PointPhasors>
FourierMeasurementSet<Scalar> accumulate_measurements(const SampleSet<Scalar>& samples,
                                                      const FrequencyDesign<Scalar>& design,
                                                      const NoiseCovariance<Scalar>& noise, PointPhasors&& phasors) {
  require(design.dim() == samples.d(), "measurement_set: design dimension mismatch");
  require(noise.dim() == samples.d(), "measurement_set: covariance dimension mismatch");
  const Index L = design.L();
  const Index cols = design.translation_count();
  const Index n = samples.n();
  CMatrix<Scalar> acc = CMatrix<Scalar>::Zero(L, cols);
  for (Index start = 0; start < n; start += measurement_block) {
    const Index width = std::min(measurement_block, n - start);
    const CMatrix<Scalar> b = unit_phasors<Scalar>(design.translations().transpose() * samples.data.middleCols(start, width));
    acc.noalias() += phasors(start, width) * b.transpose();
  }
  for (Index m = 0; m < cols; ++m)
    for (Index l = 0; l < L; ++l)
      acc(l, m) *= std::exp(noise.quadratic(design.frequency(l, m)) / Scalar(2)) / Scalar(n);
  return {std::move(acc), design, n};
}
}  // namespace detail

/// All measurements in one streaming pass over the samples. Uses
/// exp(i<x, t_l + v_m>) = exp(i<x, t_l>) exp(i<x, v_m>), so each sample costs
/// L + M + 1 complex exponentials. Blocks are fixed-size and processed in data
/// order, so the result is bitwise reproducible.
template <typename Scalar>
FourierMeasurementSet<Scalar> measurement_set(const SampleSet<Scalar>& samples, const FrequencyDesign<Scalar>& design,
                                              const NoiseCovariance<Scalar>& noise) {
  return detail::accumulate_measurements(samples, design, noise, [&](Index start, Index width) {
    return unit_phasors<Scalar>(design.points().transpose() * samples.data.middleCols(start, width));
  });
}

/// Same, reusing point_phasors(samples.data, design.points()). Bitwise equal
/// to the streaming form.
template <typename Scalar>
FourierMeasurementSet<Scalar> measurement_set(const SampleSet<Scalar>& samples, const FrequencyDesign<Scalar>& design,
                                              const NoiseCovariance<Scalar>& noise, const CMatrix<Scalar>& phasors) {
  require(phasors.rows() == design.L() && phasors.cols() == samples.n(), "measurement_set: phasor shape mismatch");
  return detail::accumulate_measurements(samples, design, noise,
                                         [&](Index start, Index width) { return phasors.middleCols(start, width); });
}

/// C_hat = (1/(M+1)) sum_m y_m y_m^*, symmetrised to be exactly Hermitian.
template <typename Scalar>
CMatrix<Scalar> empirical_covariance(const CMatrix<Scalar>& columns) {
  require(columns.cols() >= 1, "empirical_covariance: need at least one column");
  CMatrix<Scalar> c = columns * columns.adjoint() / Scalar(columns.cols());
  return (c + c.adjoint()) / Scalar(2);
}

template <typename Scalar>
CMatrix<Scalar> empirical_covariance(const FourierMeasurementSet<Scalar>& y) {
  return empirical_covariance<Scalar>(y.values);
}

/// Descending spectrum and unitary basis of a Hermitian PSD matrix.
template <typename Scalar>
struct SpectralDecomposition {
  Vector<Scalar> singular_values;
  CMatrix<Scalar> basis;
  std::optional<Index> k_hint;

  Index size() const { return singular_values.size(); }
  CMatrix<Scalar> leading(Index k) const {
    require(k >= 1 && k <= basis.cols(), "SpectralDecomposition: leading block out of range");
    return basis.leftCols(k);
  }
};

template <typename Scalar>
bool is_hermitian(const CMatrix<Scalar>& a, Scalar rel_tol = scaled_tol<Scalar>(1e-12)) {
  if (a.rows() != a.cols()) return false;
  const Scalar scale = a.cwiseAbs().maxCoeff();
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

/// Hermitian eigendecomposition, eigenvalues sorted descending. For Hermitian
/// PSD input these are the singular values; roundoff negatives down to
/// -1e-12 sigma_1 are clamped to zero.
template <typename Scalar>
SpectralDecomposition<Scalar> spectral_decomposition(const CMatrix<Scalar>& c) {
  require(c.rows() == c.cols() && c.rows() >= 1, "spectral_decomposition: matrix must be square");
  require(c.allFinite(), "spectral_decomposition: non-finite entries");
  require(is_hermitian<Scalar>(c), "spectral_decomposition: matrix is not Hermitian");
  const CMatrix<Scalar> h = (c + c.adjoint()) / Scalar(2);
  Eigen::SelfAdjointEigenSolver<CMatrix<Scalar>> solver(h);
  require(solver.info() == Eigen::Success, "spectral_decomposition: eigensolver failed");
  const Index L = c.rows();
  SpectralDecomposition<Scalar> out;
  out.singular_values = solver.eigenvalues().reverse();
  out.basis = solver.eigenvectors().rowwise().reverse();
  const Scalar top = std::max(out.singular_values(0), Scalar(0));
  const Scalar floor = -scaled_tol<Scalar>(1e-12) * top;
  for (Index l = 0; l < L; ++l) {
    Scalar& s = out.singular_values(l);
    if (s < Scalar(0)) {
      require(s >= floor, "spectral_decomposition: matrix is not positive semidefinite");
      s = Scalar(0);
    }
  }
  return out;
}

/// y(t) = sum_i w_i exp(i <mu_i, t>).
template <typename Scalar, typename Derived>
Complex<Scalar> latent_signal(const GmmModel<Scalar>& model, const Eigen::MatrixBase<Derived>& t) {
  require(t.size() == model.d(), "latent_signal: dimension mismatch");
  Complex<Scalar> y(0, 0);
  for (Index i = 0; i < model.k(); ++i) y += model.weights()(i) * std::polar(Scalar(1), model.mean(i).dot(t));
  return y;
}

/// k x (M+1) matrix whose column m is w_m.
template <typename Scalar>
CMatrix<Scalar> latent_weight_columns(const GmmModel<Scalar>& model, const FrequencyDesign<Scalar>& design) {
  const Matrix<Scalar> phases = model.means().transpose() * design.translations();
  CMatrix<Scalar> wm(model.k(), design.translation_count());
  for (Index m = 0; m < wm.cols(); ++m)
    for (Index i = 0; i < wm.rows(); ++i) wm(i, m) = model.weights()(i) * std::polar(Scalar(1), phases(i, m));
  return wm;
}

/// Noiseless columns y_m = Phi w_m, with (w_m)_i = w_i exp(i <mu_i, v_m>).
template <typename Scalar>
CMatrix<Scalar> latent_measurements(const GmmModel<Scalar>& model, const FrequencyDesign<Scalar>& design) {
  require(design.dim() == model.d(), "latent_measurements: dimension mismatch");
  const CMatrix<Scalar> phi = steering_matrix<Scalar>(model.means(), design.points());
  return phi * latent_weight_columns(model, design);
}

/// W = (1/(M+1)) sum_m w_m w_m^*.
template <typename Scalar>
CMatrix<Scalar> latent_weight_matrix(const GmmModel<Scalar>& model, const FrequencyDesign<Scalar>& design) {
  const CMatrix<Scalar> wm = latent_weight_columns(model, design);
  return wm * wm.adjoint() / Scalar(wm.cols());
}

/// C = Phi W Phi^*.
template <typename Scalar>
CMatrix<Scalar> latent_covariance(const GmmModel<Scalar>& model, const FrequencyDesign<Scalar>& design) {
  const CMatrix<Scalar> phi = steering_matrix<Scalar>(model.means(), design.points());
  const CMatrix<Scalar> c = phi * latent_weight_matrix(model, design) * phi.adjoint();
  return (c + c.adjoint()) / Scalar(2);
}

/// Singular values of a general complex matrix, descending.
template <typename Scalar>
Vector<Scalar> singular_values(const CMatrix<Scalar>& a) {
  Eigen::JacobiSVD<CMatrix<Scalar>> svd(a);
  return svd.singularValues();
}

}  // namespace fgmm

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <cstdint>
#include <string>
#include <utility>

#include "fgmm/random.hpp"
#include "fgmm/types.hpp"

namespace fgmm {

enum class DesignKind { ball, directional, explicit_points };

inline std::string to_string(DesignKind kind) {
  switch (kind) {
    case DesignKind::ball: return "ball";
    case DesignKind::directional: return "directional";
    case DesignKind::explicit_points: return "explicit";
  }
  return "explicit";
}

/// Construction parameters kept for reporting; only the fields relevant to
/// `kind` are meaningful.
struct DesignMeta {
  DesignKind kind = DesignKind::explicit_points;
  double ball_radius = 0.0;
  Index directions = 0;  // J
  Index steps = 0;       // S
  double tau = 0.0;
};

/// Fourier measurement points t_1..t_L (columns of a d x L matrix) and
/// translations v_0..v_M (columns of a d x (M+1) matrix, v_0 = 0).
template <typename Scalar>
class FrequencyDesign {
 public:
  FrequencyDesign(Matrix<Scalar> points, Matrix<Scalar> translations, DesignMeta meta = {})
      : points_(std::move(points)), translations_(std::move(translations)), meta_(meta) {
    require(points_.cols() >= 1 && points_.rows() >= 1, "FrequencyDesign: need L >= 1 points");
    require(translations_.cols() >= 1, "FrequencyDesign: need at least the zero translation");
    require(translations_.rows() == points_.rows(), "FrequencyDesign: translation dimension mismatch");
    require(points_.allFinite() && translations_.allFinite(), "FrequencyDesign: non-finite entries");
    require((translations_.col(0).array() == Scalar(0)).all(), "FrequencyDesign: v_0 must be exactly zero");
    radius_bound_ = compute_radius_bound(points_, translations_);
  }

  /// Points only, with the single translation v_0 = 0.
  explicit FrequencyDesign(Matrix<Scalar> points, DesignMeta meta = {})
      : FrequencyDesign(points, Matrix<Scalar>::Zero(points.rows(), 1), meta) {}

  FrequencyDesign with_translations(Matrix<Scalar> translations) const {
    return FrequencyDesign(points_, std::move(translations), meta_);
  }

  Index dim() const { return points_.rows(); }
  Index L() const { return points_.cols(); }
  /// Number of non-trivial translations M (so there are M+1 columns).
  Index M() const { return translations_.cols() - 1; }
  Index translation_count() const { return translations_.cols(); }

  const Matrix<Scalar>& points() const { return points_; }
  const Matrix<Scalar>& translations() const { return translations_; }
  auto point(Index l) const { return points_.col(l); }
  auto translation(Index m) const { return translations_.col(m); }
  Vector<Scalar> frequency(Index l, Index m) const { return points_.col(l) + translations_.col(m); }

  /// max_{l,m} ||t_l + v_m||_2, recomputed from the stored vectors.
  Scalar radius_bound() const { return radius_bound_; }
  const DesignMeta& meta() const { return meta_; }

  static Scalar compute_radius_bound(const Matrix<Scalar>& points, const Matrix<Scalar>& translations) {
    Scalar r = 0;
    for (Index m = 0; m < translations.cols(); ++m)
      r = std::max(r, (points.colwise() + translations.col(m)).colwise().norm().maxCoeff());
    return r;
  }

 private:
  Matrix<Scalar> points_;
  Matrix<Scalar> translations_;
  DesignMeta meta_;
  Scalar radius_bound_ = 0;
};

namespace detail {
template <typename Scalar>
Vector<Scalar> random_unit_vector(Rng& rng, Index d) {
  Vector<Scalar> g(d);
  Scalar norm = 0;
  do {
    for (Index a = 0; a < d; ++a) g(a) = Scalar(rng.normal());
    norm = g.norm();
  } while (norm == Scalar(0));
  return g / norm;
}
}  // namespace detail

/// L i.i.d. points uniform in the radius-rho ball: uniform direction scaled by rho U^{1/d}.
template <typename Scalar = double>
FrequencyDesign<Scalar> ball_design(Index L, Scalar radius, Index d, std::uint64_t seed) {
  require(L >= 1 && d >= 1, "ball_design: need L >= 1 and d >= 1");
  require(radius >= Scalar(0), "ball_design: radius must be >= 0");
  Rng rng(seed);
  Matrix<Scalar> points(d, L);
  for (Index l = 0; l < L; ++l) {
    const Vector<Scalar> dir = detail::random_unit_vector<Scalar>(rng, d);
    const Scalar scale = radius * Scalar(std::pow(rng.uniform(), 1.0 / double(d)));
    points.col(l) = scale * dir;
  }
  DesignMeta meta;
  meta.kind = DesignKind::ball;
  meta.ball_radius = double(radius);
  return FrequencyDesign<Scalar>(std::move(points), meta);
}

/// Colinear groups t_{j,s} = s tau u_j (s = 1..S) along the given unit
/// directions u_j (columns). Points are ordered direction-major.
template <typename Scalar>
FrequencyDesign<Scalar> directional_design(const Matrix<Scalar>& directions, Index S, Scalar tau) {
  require(directions.cols() >= 1 && S >= 1, "directional_design: need J >= 1 and S >= 1");
  require(tau > Scalar(0), "directional_design: tau must be > 0");
  const Index J = directions.cols();
  const Index d = directions.rows();
  Matrix<Scalar> points(d, J * S);
  for (Index j = 0; j < J; ++j)
    for (Index s = 1; s <= S; ++s) points.col(j * S + (s - 1)) = (Scalar(s) * tau) * directions.col(j);
  DesignMeta meta;
  meta.kind = DesignKind::directional;
  meta.directions = J;
  meta.steps = S;
  meta.tau = double(tau);
  return FrequencyDesign<Scalar>(std::move(points), meta);
}

/// Same, with J directions drawn uniformly on the sphere.
template <typename Scalar = double>
FrequencyDesign<Scalar> directional_design(Index J, Index S, Scalar tau, Index d, std::uint64_t seed) {
  require(J >= 1 && d >= 1, "directional_design: need J >= 1 and d >= 1");
  Rng rng(seed);
  Matrix<Scalar> dirs(d, J);
  for (Index j = 0; j < J; ++j) dirs.col(j) = detail::random_unit_vector<Scalar>(rng, d);
  return directional_design<Scalar>(dirs, S, tau);
}

/// Smallest direction count with failure probability <= delta for the
/// projected-separation guarantee: ceil(log2(1/delta)).
inline Index directions_for_confidence(double delta) {
  require(delta > 0.0 && delta < 1.0, "directions_for_confidence: delta must be in (0, 1)");
  return std::max<Index>(1, static_cast<Index>(std::ceil(std::log2(1.0 / delta) - 1e-12)));
}

/// Step tau = pi / (2 * separation_guess). Keeps tau within pi / Delta for any
/// true separation down to half the guess.
inline double default_tau(double separation_guess) {
  require(separation_guess > 0.0, "default_tau: separation guess must be > 0");
  return std::numbers::pi / (2.0 * separation_guess);
}

/// v_0 = 0 followed by the first M standard basis vectors.
template <typename Scalar = double>
Matrix<Scalar> orthonormal_translations(Index d, Index count) {
  require(count >= 1, "orthonormal_translations: need M+1 >= 1");
  require(count <= d + 1, "orthonormal_translations: M+1 exceeds d+1");
  Matrix<Scalar> v = Matrix<Scalar>::Zero(d, count);
  for (Index m = 1; m < count; ++m) v(m - 1, m) = Scalar(1);
  return v;
}

}  // namespace fgmm

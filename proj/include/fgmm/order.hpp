#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include "fgmm/fourier.hpp"
#include "fgmm/types.hpp"

namespace fgmm {

enum class OrderRule { ratio, ratio_thresholded, threshold };

inline std::string to_string(OrderRule rule) {
  switch (rule) {
    case OrderRule::ratio: return "ratio";
    case OrderRule::ratio_thresholded: return "ratio_thresholded";
    case OrderRule::threshold: return "threshold";
  }
  return "ratio";
}

inline OrderRule parse_order_rule(const std::string& name) {
  if (name == "ratio") return OrderRule::ratio;
  if (name == "ratio_thresholded") return OrderRule::ratio_thresholded;
  if (name == "threshold") return OrderRule::threshold;
  throw std::invalid_argument("unknown order rule '" + name + "'");
}

class DegenerateSpectrumError : public std::runtime_error {
 public:
  DegenerateSpectrumError() : std::runtime_error("degenerate spectrum: all singular values are zero") {}
};

/// k_hat = 0 together with below_floor = true records "no index above the floor".
template <typename Scalar>
struct OrderSelection {
  Index k_hat = 0;
  OrderRule rule = OrderRule::ratio;
  Scalar epsilon = 0;
  bool below_floor = false;
  /// ratios(l-1) = sigma_l / sigma_{l+1}; +inf when only the denominator is
  /// zero, NaN when both are.
  Vector<Scalar> ratios;
  Vector<Scalar> singular_values;
};

/// Consecutive ratios of a descending spectrum.
template <typename Scalar>
Vector<Scalar> spectral_ratios(const Vector<Scalar>& sigma) {
  const Index L = sigma.size();
  Vector<Scalar> r(std::max<Index>(L - 1, 0));
  for (Index l = 0; l + 1 < L; ++l) {
    const Scalar num = sigma(l), den = sigma(l + 1);
    if (den == Scalar(0))
      r(l) = num == Scalar(0) ? std::numeric_limits<Scalar>::quiet_NaN() : std::numeric_limits<Scalar>::infinity();
    else
      r(l) = num / den;
  }
  return r;
}

namespace detail {
// argmax over l in [0, last) with sigma(l) > floor (when floor is set); the
// earliest index wins ties, NaN ratios never win. Returns -1 if no candidate.
template <typename Scalar>
Index ratio_argmax(const Vector<Scalar>& ratios, const Vector<Scalar>& sigma, std::optional<Scalar> floor) {
  Index best = -1;
  Scalar best_ratio = -std::numeric_limits<Scalar>::infinity();
  for (Index l = 0; l < ratios.size(); ++l) {
    if (floor && !(sigma(l) > *floor)) continue;
    const Scalar r = ratios(l);
    if (std::isnan(double(r))) continue;
    if (best < 0 || r > best_ratio) {
      best = l;
      best_ratio = r;
    }
  }
  return best;
}
}  // namespace detail

/// k_hat = argmax_{1 <= l <= L-1} sigma_l / sigma_{l+1}.
template <typename Scalar>
OrderSelection<Scalar> select_ratio(const Vector<Scalar>& sigma) {
  require(sigma.size() >= 2, "select_ratio: need L >= 2 singular values");
  if (!(sigma.maxCoeff() > Scalar(0))) throw DegenerateSpectrumError();
  OrderSelection<Scalar> out;
  out.rule = OrderRule::ratio;
  out.singular_values = sigma;
  out.ratios = spectral_ratios(sigma);
  out.k_hat = detail::ratio_argmax<Scalar>(out.ratios, sigma, std::nullopt) + 1;
  return out;
}

/// Ratio rule restricted to indices with sigma_i > eps.
template <typename Scalar>
OrderSelection<Scalar> select_ratio_thresholded(const Vector<Scalar>& sigma, Scalar eps) {
  require(sigma.size() >= 2, "select_ratio_thresholded: need L >= 2 singular values");
  require(eps > Scalar(0), "select_ratio_thresholded: eps must be > 0");
  OrderSelection<Scalar> out;
  out.rule = OrderRule::ratio_thresholded;
  out.epsilon = eps;
  out.singular_values = sigma;
  out.ratios = spectral_ratios(sigma);
  const Index best = detail::ratio_argmax<Scalar>(out.ratios, sigma, eps);
  out.below_floor = best < 0;
  out.k_hat = best + 1;
  return out;
}

/// k_hat = max{l : sigma_l >= eps}, 0 if none.
template <typename Scalar>
OrderSelection<Scalar> select_threshold(const Vector<Scalar>& sigma, Scalar eps) {
  require(sigma.size() >= 1, "select_threshold: empty spectrum");
  require(eps > Scalar(0), "select_threshold: eps must be > 0");
  OrderSelection<Scalar> out;
  out.rule = OrderRule::threshold;
  out.epsilon = eps;
  out.singular_values = sigma;
  out.ratios = spectral_ratios(sigma);
  for (Index l = 0; l < sigma.size(); ++l)
    if (sigma(l) >= eps) out.k_hat = l + 1;
  out.below_floor = out.k_hat == 0;
  return out;
}

template <typename Scalar>
OrderSelection<Scalar> select_ratio(const SpectralDecomposition<Scalar>& spec) {
  return select_ratio(spec.singular_values);
}
template <typename Scalar>
OrderSelection<Scalar> select_ratio_thresholded(const SpectralDecomposition<Scalar>& spec, Scalar eps) {
  return select_ratio_thresholded(spec.singular_values, eps);
}
template <typename Scalar>
OrderSelection<Scalar> select_threshold(const SpectralDecomposition<Scalar>& spec, Scalar eps) {
  return select_threshold(spec.singular_values, eps);
}

template <typename Scalar>
OrderSelection<Scalar> select_order(const Vector<Scalar>& sigma, OrderRule rule, Scalar eps) {
  switch (rule) {
    case OrderRule::ratio: return select_ratio(sigma);
    case OrderRule::ratio_thresholded: return select_ratio_thresholded(sigma, eps);
    case OrderRule::threshold: return select_threshold(sigma, eps);
  }
  return select_ratio(sigma);
}

// Sample-size calculators. M counts the non-zero translations (M+1 columns).

/// 36 L^3 e^{2 r^2 sigma^2} eps^{-2} ln(4 L (M+1) / delta): above this n the
/// thresholding rule keeps sigma_{k+1..L} below eps with probability 1 - delta.
inline double sufficient_n_threshold(double L, double M, double r, double sigma, double eps, double delta) {
  require(L > 0 && M >= 0 && r >= 0 && sigma >= 0, "sufficient_n_threshold: invalid sizes");
  require(eps > 0, "sufficient_n_threshold: eps must be > 0");
  require(delta > 0 && delta < 1, "sufficient_n_threshold: delta must be in (0, 1)");
  return 36.0 * L * L * L * std::exp(2.0 * r * r * sigma * sigma) / (eps * eps) *
         std::log(4.0 * L * (M + 1.0) / delta);
}

/// 324 (k+1)^5 e^{2 r^2 sigma^2} (sigma_1^2 / sigma_k^4) ln(4 (M+1)(k+1) / delta):
/// sample size for the ratio rule with L = k + 1.
inline double sufficient_n_ratio(double k, double M, double r, double sigma, double sigma1, double sigmak,
                                 double delta) {
  require(sigmak > 0, "sufficient_n_ratio: sigma_k must be > 0");
  require(delta > 0, "sufficient_n_ratio: delta must be > 0");
  return 324.0 * std::pow(k + 1.0, 5) * std::exp(2.0 * r * r * sigma * sigma) * (sigma1 * sigma1) /
         std::pow(sigmak, 4) * std::log(4.0 * (M + 1.0) * (k + 1.0) / delta);
}

struct SigmaKBounds {
  double steering;    // lower bound on sigma_k(Phi)
  double covariance;  // lower bound on sigma_k(C)
};

/// Lower bounds under directional sampling with tau <= pi / Delta:
/// (1/sqrt k) q^{k-1} and (w_min^2 / k) q^{2k-2}, q = tau Delta / (pi k^2 sqrt d).
inline SigmaKBounds sigma_k_lower_bounds(Index k, Index d, double tau, double delta, double w_min) {
  require(k >= 1 && d >= 1, "sigma_k_lower_bounds: need k >= 1 and d >= 1");
  require(tau > 0 && delta >= 0, "sigma_k_lower_bounds: invalid tau or separation");
  require(tau * delta <= std::numbers::pi * (1.0 + 1e-12), "sigma_k_lower_bounds: tau must satisfy tau <= pi / Delta");
  const double kk = double(k);
  const double q = tau * delta / (std::numbers::pi * kk * kk * std::sqrt(double(d)));
  return {std::pow(q, kk - 1.0) / std::sqrt(kk), w_min * w_min / kk * std::pow(q, 2.0 * kk - 2.0)};
}

}  // namespace fgmm

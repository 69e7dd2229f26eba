#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include "fgmm/model.hpp"
#include "fgmm/random.hpp"
#include "fgmm/types.hpp"

namespace fgmm {

struct EmSettings {
  int max_iter = 1000;
  /// Stop once the mean per-sample log-likelihood improves by less than this.
  double loglik_tol = 1e-6;
};

template <typename Scalar>
struct EmResult {
  Matrix<Scalar> means;              // d x k
  Vector<Scalar> weights;
  std::vector<Scalar> loglik_trace;  // mean log-likelihood before each M-step, then at the final parameters
  int iterations = 0;                // M-steps performed
  bool converged = false;
  std::vector<bool> frozen;          // component lost all responsibility mass at some iteration
};

/// EM for sum_i w_i N(mu_i, sigma^2 I) with sigma fixed. Responsibilities use
/// log-sum-exp; a component whose total responsibility falls below 1e-12 of
/// the sample mass keeps its mean and is flagged as frozen.
template <typename Scalar>
EmResult<Scalar> em_fit(const SampleSet<Scalar>& samples, Index k, Scalar sigma, const Matrix<Scalar>& init_means,
                        const EmSettings& settings = {}, const Vector<Scalar>* init_weights = nullptr) {
  require(k >= 1, "em_fit: k must be >= 1");
  require(sigma > Scalar(0), "em_fit: sigma must be > 0");
  require(init_means.rows() == samples.d() && init_means.cols() == k, "em_fit: init_means must be d x k");
  require(settings.max_iter >= 1, "em_fit: max_iter must be >= 1");
  const Index n = samples.n();
  const Index d = samples.d();
  const Matrix<Scalar>& x = samples.data;
  const Scalar inv_two_var = Scalar(1) / (Scalar(2) * sigma * sigma);
  const Scalar log_norm = -Scalar(d) / Scalar(2) * std::log(Scalar(2) * Scalar(std::numbers::pi) * sigma * sigma);
  const Vector<Scalar> x_sq = x.colwise().squaredNorm().transpose();

  EmResult<Scalar> r;
  r.means = init_means;
  r.weights = init_weights ? *init_weights : Vector<Scalar>::Constant(k, Scalar(1) / Scalar(k));
  require(r.weights.size() == k, "em_fit: init_weights must have length k");
  r.frozen.assign(static_cast<std::size_t>(k), false);

  Matrix<Scalar> logp(n, k);
  // E-step in place: logp becomes responsibilities; returns the mean log-likelihood.
  const auto e_step = [&]() {
    const Vector<Scalar> mu_sq = r.means.colwise().squaredNorm().transpose();
    logp.noalias() = x.transpose() * r.means;  // n x k cross terms
    for (Index i = 0; i < k; ++i) {
      const Scalar lw = r.weights(i) > Scalar(0) ? std::log(r.weights(i)) : -std::numeric_limits<Scalar>::infinity();
      logp.col(i) = (Scalar(2) * logp.col(i).array() - x_sq.array() - mu_sq(i)) * inv_two_var + (lw + log_norm);
    }
    Scalar total = 0;
    for (Index j = 0; j < n; ++j) {
      const Scalar top = logp.row(j).maxCoeff();
      const Scalar sum = (logp.row(j).array() - top).exp().sum();
      const Scalar lse = top + std::log(sum);
      total += lse;
      logp.row(j) = (logp.row(j).array() - lse).exp();
    }
    return total / Scalar(n);
  };

  Scalar ll = e_step();
  r.loglik_trace.push_back(ll);
  while (r.iterations < settings.max_iter) {
    const Vector<Scalar> mass = logp.colwise().sum().transpose();
    const Matrix<Scalar> weighted = x * logp;  // d x k
    for (Index i = 0; i < k; ++i) {
      if (mass(i) < Scalar(1e-12) * Scalar(n)) {
        r.frozen[static_cast<std::size_t>(i)] = true;
      } else {
        r.means.col(i) = weighted.col(i) / mass(i);
      }
      r.weights(i) = mass(i) / Scalar(n);
    }
    r.weights /= r.weights.sum();
    ++r.iterations;
    const Scalar next = e_step();
    r.loglik_trace.push_back(next);
    const Scalar gain = next - ll;
    ll = next;
    if (gain < Scalar(settings.loglik_tol)) {
      r.converged = true;
      break;
    }
  }
  return r;
}

/// k distinct samples chosen uniformly without replacement (partial Fisher-Yates).
template <typename Scalar>
Matrix<Scalar> em_init_random(const SampleSet<Scalar>& samples, Index k, std::uint64_t seed,
                              std::vector<Index>* chosen = nullptr) {
  require(k >= 1, "em_init_random: k must be >= 1");
  require(samples.n() >= k, "em_init_random: need n >= k");
  const Index n = samples.n();
  std::vector<Index> perm(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) perm[j] = j;
  Rng rng(seed);
  Matrix<Scalar> out(samples.d(), k);
  for (Index i = 0; i < k; ++i) {
    const Index pick = i + Index(rng.index(std::uint64_t(n - i)));
    std::swap(perm[i], perm[pick]);
    out.col(i) = samples.sample(perm[i]);
  }
  if (chosen) chosen->assign(perm.begin(), perm.begin() + k);
  return out;
}

}  // namespace fgmm

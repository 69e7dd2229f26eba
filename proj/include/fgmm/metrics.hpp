#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "fgmm/types.hpp"

namespace fgmm {

/// sum_i masses_i delta_{atoms_i}; atoms are columns.
template <typename Scalar>
struct DiscreteDistribution {
  Matrix<Scalar> atoms;
  Vector<Scalar> masses;

  DiscreteDistribution(Matrix<Scalar> a, Vector<Scalar> m) : atoms(std::move(a)), masses(std::move(m)) {
    require(atoms.cols() == masses.size() && atoms.cols() >= 1, "DiscreteDistribution: atoms and masses disagree");
    require((masses.array() >= Scalar(0)).all(), "DiscreteDistribution: masses must be >= 0");
    require(std::abs(masses.sum() - Scalar(1)) <= scaled_tol<Scalar>(1e-12), "DiscreteDistribution: masses must sum to 1");
  }

  static DiscreteDistribution uniform(Matrix<Scalar> a) {
    const Index m = a.cols();
    return DiscreteDistribution(std::move(a), Vector<Scalar>::Constant(m, Scalar(1) / Scalar(m)));
  }

  Index size() const { return atoms.cols(); }
  Index dim() const { return atoms.rows(); }
};

template <typename Scalar>
struct TransportPlan {
  Scalar cost = 0;
  Matrix<Scalar> plan;  // rows: atoms of the first distribution (after dropping zero masses)
  Scalar dual_value = 0;
  std::vector<Index> source_atoms;  // original indices kept
  std::vector<Index> target_atoms;

  Scalar duality_gap() const { return std::abs(cost - dual_value); }
};

namespace detail {

// Successive shortest paths on the bipartite transport graph with node
// potentials, so every search is a dense Dijkstra on nonnegative reduced
// costs. Residual arcs: source i -> target j (cost c_ij, unbounded) and
// j -> i (cost -c_ij) while f_ij > 0. Each augmentation empties a supply, a
// demand or a backward arc, and the final potentials are the dual solution.
template <typename Scalar>
TransportPlan<Scalar> transport_ssp(const Matrix<Scalar>& cost, Vector<Scalar> supply, Vector<Scalar> demand,
                                    Scalar eps) {
  const Index m = cost.rows(), p = cost.cols();
  const Index nodes = m + p;
  const Scalar inf = std::numeric_limits<Scalar>::infinity();
  Matrix<Scalar> flow = Matrix<Scalar>::Zero(m, p);
  std::vector<Scalar> pot(static_cast<std::size_t>(nodes), Scalar(0));
  std::vector<Scalar> dist(static_cast<std::size_t>(nodes));
  std::vector<Index> pred(static_cast<std::size_t>(nodes));
  std::vector<char> done(static_cast<std::size_t>(nodes));

  while (supply.maxCoeff() > eps && demand.maxCoeff() > eps) {
    for (Index v = 0; v < nodes; ++v) {
      dist[v] = v < m && supply(v) > eps ? Scalar(0) : inf;
      pred[v] = -1;
      done[v] = 0;
    }
    Index sink = -1;
    for (;;) {
      Index u = -1;
      for (Index v = 0; v < nodes; ++v)
        if (!done[v] && dist[v] < inf && (u < 0 || dist[v] < dist[u])) u = v;
      if (u < 0) break;
      done[u] = 1;
      if (u >= m && demand(u - m) > eps) {
        sink = u - m;
        break;
      }
      if (u < m) {
        for (Index j = 0; j < p; ++j) {
          const Index v = m + j;
          const Scalar nd = dist[u] + std::max(Scalar(0), cost(u, j) + pot[u] - pot[v]);
          if (!done[v] && nd < dist[v]) dist[v] = nd, pred[v] = u;
        }
      } else {
        const Index j = u - m;
        for (Index i = 0; i < m; ++i) {
          if (flow(i, j) <= Scalar(0)) continue;
          const Scalar nd = dist[u] + std::max(Scalar(0), -cost(i, j) + pot[u] - pot[i]);
          if (!done[i] && nd < dist[i]) dist[i] = nd, pred[i] = u;
        }
      }
    }
    if (sink < 0) break;
    const Scalar reach = dist[m + sink];
    for (Index v = 0; v < nodes; ++v) pot[v] += std::min(dist[v], reach);

    Scalar amount = demand(sink);
    Index v = m + sink;
    while (pred[v] >= 0) {
      const Index u = pred[v];
      if (u >= m) amount = std::min(amount, flow(v, u - m));
      v = u;
    }
    const Index origin = v;
    amount = std::min(amount, supply(origin));
    v = m + sink;
    while (pred[v] >= 0) {
      const Index u = pred[v];
      if (u < m) {
        flow(u, v - m) += amount;
      } else {
        flow(v, u - m) -= amount;
        if (flow(v, u - m) <= eps) flow(v, u - m) = 0;
      }
      v = u;
    }
    supply(origin) -= amount;
    demand(sink) -= amount;
    if (supply(origin) <= eps) supply(origin) = 0;
    if (demand(sink) <= eps) demand(sink) = 0;
  }

  TransportPlan<Scalar> out;
  out.plan = flow;
  out.cost = (flow.array() * cost.array()).sum();
  const Vector<Scalar> a = flow.rowwise().sum();
  const Vector<Scalar> b = flow.colwise().sum().transpose();
  Scalar dual = 0;
  for (Index j = 0; j < p; ++j) dual += b(j) * pot[m + j];
  for (Index i = 0; i < m; ++i) dual -= a(i) * pot[i];
  out.dual_value = dual;
  return out;
}

}  // namespace detail

/// Exact 1-Wasserstein distance with Euclidean ground cost, with the optimal
/// coupling and its dual certificate. Zero-mass atoms are dropped first.
template <typename Scalar>
TransportPlan<Scalar> wasserstein1_plan(const DiscreteDistribution<Scalar>& nu, const DiscreteDistribution<Scalar>& nu_hat) {
  require(nu.dim() == nu_hat.dim(), "wasserstein1: dimension mismatch");
  std::vector<Index> src, dst;
  for (Index i = 0; i < nu.size(); ++i)
    if (nu.masses(i) > Scalar(0)) src.push_back(i);
  for (Index j = 0; j < nu_hat.size(); ++j)
    if (nu_hat.masses(j) > Scalar(0)) dst.push_back(j);
  const Index m = Index(src.size()), p = Index(dst.size());
  Matrix<Scalar> cost(m, p);
  Vector<Scalar> supply(m), demand(p);
  for (Index a = 0; a < m; ++a) {
    supply(a) = nu.masses(src[a]);
    for (Index b = 0; b < p; ++b) cost(a, b) = (nu.atoms.col(src[a]) - nu_hat.atoms.col(dst[b])).norm();
  }
  for (Index b = 0; b < p; ++b) demand(b) = nu_hat.masses(dst[b]);
  supply /= supply.sum();
  demand /= demand.sum();
  TransportPlan<Scalar> out =
      detail::transport_ssp<Scalar>(cost, supply, demand, scaled_tol<Scalar>(1e-15));
  out.source_atoms = std::move(src);
  out.target_atoms = std::move(dst);
  return out;
}

template <typename Scalar>
Scalar wasserstein1(const DiscreteDistribution<Scalar>& nu, const DiscreteDistribution<Scalar>& nu_hat) {
  return wasserstein1_plan(nu, nu_hat).cost;
}

/// min over permutations pi of max_i ||mu_i - mu_hat_pi(i)||, by enumeration.
template <typename Scalar>
Scalar matched_mean_error(const Matrix<Scalar>& truth, const Matrix<Scalar>& estimate) {
  require(truth.cols() == estimate.cols(), "matched_mean_error: counts differ");
  require(truth.rows() == estimate.rows(), "matched_mean_error: dimension mismatch");
  require(truth.cols() >= 1 && truth.cols() <= 8, "matched_mean_error: need 1 <= k <= 8");
  const Index k = truth.cols();
  Matrix<Scalar> dist(k, k);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j) dist(i, j) = (truth.col(i) - estimate.col(j)).norm();
  std::vector<Index> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), Index(0));
  Scalar best = std::numeric_limits<Scalar>::infinity();
  do {
    Scalar worst = 0;
    for (Index i = 0; i < k; ++i) worst = std::max(worst, dist(i, perm[i]));
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace fgmm

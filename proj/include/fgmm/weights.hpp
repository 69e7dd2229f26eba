#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "fgmm/fourier.hpp"
#include "fgmm/types.hpp"

namespace fgmm {

/// ||A w - y||^2 = w^T G w - 2 b^T w + c for real w, where A stacks
/// exp(i <mu_i, t_l + v_m>) over all (l, m).
template <typename Scalar>
struct WeightProblem {
  CMatrix<Scalar> design_matrix;  // A, L(M+1) x k
  CVector<Scalar> target;         // y, stacked column-major like A's rows
  Matrix<Scalar> gram;            // G = Re(A^* A)
  Vector<Scalar> linear;          // b = Re(A^* y)
  Scalar constant = 0;            // ||y||^2
};

template <typename Scalar>
WeightProblem<Scalar> weight_problem(const Matrix<Scalar>& means, const FourierMeasurementSet<Scalar>& y) {
  const FrequencyDesign<Scalar>& design = y.design;
  require(means.rows() == design.dim(), "weight_problem: dimension mismatch");
  require(means.cols() >= 1, "weight_problem: need k >= 1");
  const Index L = design.L();
  const Index cols = design.translation_count();
  WeightProblem<Scalar> p;
  p.design_matrix.resize(L * cols, means.cols());
  p.target.resize(L * cols);
  for (Index m = 0; m < cols; ++m) {
    const Matrix<Scalar> freqs = design.points().colwise() + design.translation(m);
    const Matrix<Scalar> phases = freqs.transpose() * means;
    p.design_matrix.middleRows(m * L, L) = phases.unaryExpr([](Scalar v) { return std::polar(Scalar(1), v); });
    p.target.segment(m * L, L) = y.values.col(m);
  }
  p.gram = (p.design_matrix.adjoint() * p.design_matrix).real();
  p.gram = (p.gram + p.gram.transpose()) / Scalar(2);
  p.linear = (p.design_matrix.adjoint() * p.target).real();
  p.constant = p.target.squaredNorm();
  return p;
}

/// Direct complex evaluation of sum_{l,m} |sum_i w_i e^{i<mu_i, t_l+v_m>} - y(t_l+v_m)|^2.
template <typename Scalar>
Scalar weight_objective(const Vector<Scalar>& w, const WeightProblem<Scalar>& p) {
  return (p.design_matrix * w.template cast<Complex<Scalar>>() - p.target).squaredNorm();
}

/// Euclidean projection onto the probability simplex (sort-based).
template <typename Scalar>
Vector<Scalar> project_to_simplex(const Vector<Scalar>& v) {
  const Index k = v.size();
  std::vector<Scalar> sorted(v.data(), v.data() + k);
  std::sort(sorted.begin(), sorted.end(), std::greater<Scalar>());
  Scalar running = 0, theta = 0;
  for (Index i = 0; i < k; ++i) {
    running += sorted[static_cast<std::size_t>(i)];
    const Scalar candidate = (running - Scalar(1)) / Scalar(i + 1);
    if (sorted[static_cast<std::size_t>(i)] - candidate > Scalar(0)) theta = candidate;
  }
  return (v.array() - theta).cwiseMax(Scalar(0)).matrix();
}

/// ||w - P_simplex(w - (G w - b))||_inf; zero exactly at a minimiser.
template <typename Scalar>
Scalar simplex_kkt_residual(const Matrix<Scalar>& gram, const Vector<Scalar>& linear, const Vector<Scalar>& w) {
  const Vector<Scalar> g = gram * w - linear;
  return (w - project_to_simplex<Scalar>(w - g)).cwiseAbs().maxCoeff();
}

template <typename Scalar>
struct WeightEstimate {
  Vector<Scalar> weights;
  Scalar objective = 0;
  Scalar kkt_residual = 0;
  Scalar gram_condition = 1;
  bool ill_conditioned = false;  // condition number of G above 1e12
  bool degenerate = false;       // some estimated atoms are indistinguishable on the design
  int iterations = 0;
};

namespace detail {

// Primal active-set method for min 1/2 w^T G w - b^T w on the simplex,
// started from the barycentre. Equality-constrained subproblems use a
// complete orthogonal decomposition so singular G still yields the
// minimum-norm step.
template <typename Scalar>
Vector<Scalar> simplex_qp_active_set(const Matrix<Scalar>& gram, const Vector<Scalar>& linear, int& iterations) {
  const Index k = gram.rows();
  Vector<Scalar> w = Vector<Scalar>::Constant(k, Scalar(1) / Scalar(k));
  std::vector<bool> free(static_cast<std::size_t>(k), true);
  const Scalar scale = std::max({Scalar(1), gram.cwiseAbs().maxCoeff(), linear.cwiseAbs().maxCoeff()});
  const Scalar step_tol = scaled_tol<Scalar>(1e-14);
  const Scalar mult_tol = scaled_tol<Scalar>(1e-13) * scale;
  const int cap = int(50 * k + 100);
  for (iterations = 0; iterations < cap; ++iterations) {
    std::vector<Index> f;
    for (Index i = 0; i < k; ++i)
      if (free[static_cast<std::size_t>(i)]) f.push_back(i);
    const Index nf = Index(f.size());
    const Vector<Scalar> g = gram * w - linear;

    Matrix<Scalar> kkt = Matrix<Scalar>::Zero(nf + 1, nf + 1);
    Vector<Scalar> rhs = Vector<Scalar>::Zero(nf + 1);
    for (Index a = 0; a < nf; ++a) {
      for (Index b = 0; b < nf; ++b) kkt(a, b) = gram(f[a], f[b]);
      kkt(a, nf) = kkt(nf, a) = Scalar(1);
      rhs(a) = -g(f[a]);
    }
    const Vector<Scalar> sol = kkt.completeOrthogonalDecomposition().solve(rhs);
    Vector<Scalar> p = Vector<Scalar>::Zero(k);
    for (Index a = 0; a < nf; ++a) p(f[a]) = sol(a);

    if (p.cwiseAbs().maxCoeff() <= step_tol) {
      Scalar nu = 0;
      for (Index i : f) nu -= g(i);
      nu /= Scalar(nf);
      Index release = -1;
      Scalar worst = -mult_tol;
      for (Index j = 0; j < k; ++j) {
        if (free[static_cast<std::size_t>(j)]) continue;
        const Scalar z = g(j) + nu;
        if (z < worst) {
          worst = z;
          release = j;
        }
      }
      if (release < 0) break;
      free[static_cast<std::size_t>(release)] = true;
      continue;
    }

    Scalar alpha = 1;
    Index blocking = -1;
    for (Index i : f) {
      if (p(i) < Scalar(0)) {
        const Scalar a = -w(i) / p(i);
        if (a < alpha) {
          alpha = a;
          blocking = i;
        }
      }
    }
    w += alpha * p;
    if (blocking >= 0) {
      w(blocking) = Scalar(0);
      free[static_cast<std::size_t>(blocking)] = false;
    }
  }
  return w;
}

// Fixed-step projected gradient polish (step 1 / lambda_max(G)).
template <typename Scalar>
Vector<Scalar> simplex_qp_projected_gradient(const Matrix<Scalar>& gram, const Vector<Scalar>& linear,
                                             Vector<Scalar> w, Scalar lambda_max, int max_iter, Scalar tol) {
  if (!(lambda_max > Scalar(0))) return w;
  const Scalar step = Scalar(1) / lambda_max;
  for (int it = 0; it < max_iter; ++it) {
    if (simplex_kkt_residual(gram, linear, w) <= tol) break;
    w = project_to_simplex<Scalar>(w - step * (gram * w - linear));
  }
  return w;
}

}  // namespace detail

/// Simplex-constrained least squares for the mixing weights given estimated
/// means. Atoms whose steering columns coincide share their combined mass
/// equally (the minimum-norm optimum) and set `degenerate`.
template <typename Scalar>
WeightEstimate<Scalar> estimate_weights(const Matrix<Scalar>& means, const FourierMeasurementSet<Scalar>& y) {
  const WeightProblem<Scalar> p = weight_problem(means, y);
  const Index k = means.cols();
  WeightEstimate<Scalar> out;

  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> eig(p.gram, Eigen::EigenvaluesOnly);
  const Scalar lmax = eig.eigenvalues().maxCoeff();
  const Scalar lmin = eig.eigenvalues().minCoeff();
  out.gram_condition = lmin > Scalar(0) ? lmax / lmin : std::numeric_limits<Scalar>::infinity();
  out.ill_conditioned = out.gram_condition > Scalar(1e12);

  if (k == 1) {
    out.weights = Vector<Scalar>::Ones(1);
  } else {
    out.weights = detail::simplex_qp_active_set(p.gram, p.linear, out.iterations);
    const Scalar tol = scaled_tol<Scalar>(1e-10);
    if (simplex_kkt_residual(p.gram, p.linear, out.weights) > tol)
      out.weights = detail::simplex_qp_projected_gradient(p.gram, p.linear, out.weights, lmax, 100000, tol);
  }

  // Equalise mass within groups of identical columns.
  std::vector<Index> group(static_cast<std::size_t>(k), -1);
  for (Index i = 0; i < k; ++i) {
    if (group[i] >= 0) continue;
    group[i] = i;
    std::vector<Index> members{i};
    for (Index j = i + 1; j < k; ++j) {
      if (group[j] < 0 &&
          (p.design_matrix.col(i) - p.design_matrix.col(j)).cwiseAbs().maxCoeff() <= scaled_tol<Scalar>(1e-12)) {
        group[j] = i;
        members.push_back(j);
      }
    }
    if (members.size() > 1) {
      out.degenerate = true;
      Scalar mass = 0;
      for (Index j : members) mass += out.weights(j);
      for (Index j : members) out.weights(j) = mass / Scalar(members.size());
    }
  }

  out.weights = out.weights.cwiseMax(Scalar(0));
  out.weights /= out.weights.sum();
  out.objective = weight_objective(out.weights, p);
  out.kkt_residual = simplex_kkt_residual(p.gram, p.linear, out.weights);
  return out;
}

}  // namespace fgmm

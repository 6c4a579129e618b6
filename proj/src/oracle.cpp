#include "splr/oracle.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <utility>

namespace splr::oracle {

namespace {

bool column_support_feasible(unsigned bits, Index rows, const SparsityPattern& pattern) {
  if (std::holds_alternative<Dense>(pattern)) return true;
  if (const auto* u = std::get_if<Unstructured>(&pattern)) {
    int count = 0;
    for (Index i = 0; i < rows; ++i) count += (bits >> i) & 1u;
    return count <= u->k;
  }
  const auto& nm = std::get<SemiStructured>(pattern);
  for (Index g = 0; g < rows; g += nm.m) {
    int count = 0;
    for (Index i = g; i < g + nm.m; ++i) count += (bits >> i) & 1u;
    if (count > nm.n) return false;
  }
  return true;
}

double column_objective(const MatrixXd& h, const VectorXd& delta) {
  double total = 0.0;
  for (Index a = 0; a < delta.size(); ++a)
    for (Index b = 0; b < delta.size(); ++b) total += delta(a) * h(a, b) * delta(b);
  return total;
}

MatrixXd matmul(const MatrixXd& a, const MatrixXd& b) {
  MatrixXd c = MatrixXd::Zero(a.rows(), b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index k = 0; k < a.cols(); ++k)
      for (Index j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
  return c;
}

MatrixXd gaussian(Index rows, Index cols, std::mt19937_64& rng, double stddev) {
  std::normal_distribution<double> normal(0.0, stddev);
  MatrixXd m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

// Gram-Schmidt on the columns of a square Gaussian matrix.
MatrixXd random_orthogonal(Index n, std::mt19937_64& rng) {
  MatrixXd q = gaussian(n, n, rng, 1.0);
  for (Index j = 0; j < n; ++j) {
    for (Index k = 0; k < j; ++k) {
      double dot = 0.0;
      for (Index i = 0; i < n; ++i) dot += q(i, j) * q(i, k);
      for (Index i = 0; i < n; ++i) q(i, j) -= dot * q(i, k);
    }
    double norm = 0.0;
    for (Index i = 0; i < n; ++i) norm += q(i, j) * q(i, j);
    norm = std::sqrt(norm);
    for (Index i = 0; i < n; ++i) q(i, j) /= norm;
  }
  return q;
}

// V^T = (U^T H U)^{-1} U^T H W
MatrixXd refit_v(const MatrixXd& h, const MatrixXd& w, const MatrixXd& u) {
  const MatrixXd uth = matmul(u.transpose(), h);
  return solve_naive(matmul(uth, u), matmul(uth, w)).transpose();
}

// U = W V (V^T V)^{-1}
MatrixXd refit_u(const MatrixXd& w, const MatrixXd& v) {
  const MatrixXd vtv = matmul(v.transpose(), v);
  return solve_naive(vtv, matmul(w, v).transpose()).transpose();
}

}  // namespace

MatrixXd solve_naive(MatrixXd a, MatrixXd b) {
  const Index n = a.rows();
  if (a.cols() != n || b.rows() != n) throw ContractError("solve_naive: shape mismatch");
  for (Index col = 0; col < n; ++col) {
    Index pivot = col;
    for (Index i = col + 1; i < n; ++i)
      if (std::abs(a(i, col)) > std::abs(a(pivot, col))) pivot = i;
    if (a(pivot, col) == 0.0) throw NumericError("solve_naive: singular system");
    if (pivot != col) {
      a.row(col).swap(a.row(pivot));
      b.row(col).swap(b.row(pivot));
    }
    for (Index i = col + 1; i < n; ++i) {
      const double f = a(i, col) / a(col, col);
      for (Index k = col; k < n; ++k) a(i, k) -= f * a(col, k);
      for (Index k = 0; k < b.cols(); ++k) b(i, k) -= f * b(col, k);
    }
  }
  MatrixXd x(n, b.cols());
  for (Index i = n - 1; i >= 0; --i) {
    for (Index k = 0; k < b.cols(); ++k) {
      double s = b(i, k);
      for (Index j = i + 1; j < n; ++j) s -= a(i, j) * x(j, k);
      x(i, k) = s / a(i, i);
    }
  }
  return x;
}

double trace_objective_naive(const MatrixXd& h, const MatrixXd& delta) {
  double total = 0.0;
  for (Index j = 0; j < delta.cols(); ++j) total += column_objective(h, delta.col(j));
  return total;
}

VectorXd restricted_weights(const MatrixXd& h, const VectorXd& w_tilde, const std::vector<Index>& support) {
  const auto s = static_cast<Index>(support.size());
  VectorXd full = VectorXd::Zero(w_tilde.size());
  if (s == 0) return full;
  MatrixXd h_ss(s, s);
  MatrixXd rhs(s, 1);
  for (Index a = 0; a < s; ++a) {
    for (Index b = 0; b < s; ++b) h_ss(a, b) = h(support[a], support[b]);
    double acc = 0.0;
    for (Index k = 0; k < w_tilde.size(); ++k) acc += h(support[a], k) * w_tilde(k);
    rhs(a, 0) = acc;
  }
  const MatrixXd ws = solve_naive(h_ss, rhs);
  for (Index a = 0; a < s; ++a) full(support[a]) = ws(a, 0);
  return full;
}

SparseOptimum exhaustive_sparse(const MatrixXd& w_tilde, const MatrixXd& h, const SparsityPattern& pattern) {
  const Index rows = w_tilde.rows();
  const Index cols = w_tilde.cols();
  if (rows > kMaxExhaustiveRows)
    throw ContractError("exhaustive_sparse: N_in=" + std::to_string(rows) + " exceeds the enumeration limit of " +
                        std::to_string(kMaxExhaustiveRows));
  if (h.rows() != rows || h.cols() != rows) throw ContractError("exhaustive_sparse: Hessian shape mismatch");
  if (const auto* u = std::get_if<Unstructured>(&pattern); u != nullptr && u->granularity == Granularity::PerMatrix)
    throw ContractError("exhaustive_sparse: a per-matrix budget couples the columns; use per-column or N:M");
  if (const auto* nm = std::get_if<SemiStructured>(&pattern); nm != nullptr && rows % nm->m != 0)
    throw ContractError("exhaustive_sparse: N_in not divisible by M");

  SparseOptimum best;
  best.component.values = MatrixXd::Zero(rows, cols);
  best.component.mask = Mask::Constant(rows, cols, false);
  for (Index j = 0; j < cols; ++j) {
    const VectorXd target = w_tilde.col(j);
    double best_col = std::numeric_limits<double>::infinity();
    unsigned best_bits = 0;
    VectorXd best_w = VectorXd::Zero(rows);
    for (unsigned bits = 0; bits < (1u << rows); ++bits) {
      if (!column_support_feasible(bits, rows, pattern)) continue;
      std::vector<Index> support;
      for (Index i = 0; i < rows; ++i)
        if ((bits >> i) & 1u) support.push_back(i);
      const VectorXd ws = restricted_weights(h, target, support);
      const double obj = column_objective(h, target - ws);
      if (obj < best_col) {
        best_col = obj;
        best_bits = bits;
        best_w = ws;
      }
    }
    best.objective += best_col;
    best.component.values.col(j) = best_w;
    for (Index i = 0; i < rows; ++i) best.component.mask(i, j) = ((best_bits >> i) & 1u) != 0;
  }
  return best;
}

double random_search_lowrank(const MatrixXd& w_bar, const MatrixXd& h, Index r, int trials, std::uint64_t seed,
                             const MatrixXd& anchor_u) {
  if (trials <= 0) return std::numeric_limits<double>::infinity();
  const Index n_in = w_bar.rows();
  if (r < 1 || r > std::min(n_in, w_bar.cols())) throw ContractError("random_search_lowrank: bad rank");
  const bool anchored = anchor_u.size() > 0;
  if (anchored && (anchor_u.rows() != n_in || anchor_u.cols() != r))
    throw ContractError("random_search_lowrank: anchor shape mismatch");

  double scale = 0.0;
  for (Index i = 0; i < w_bar.size(); ++i) scale += w_bar.data()[i] * w_bar.data()[i];
  scale = std::sqrt(scale / static_cast<double>(w_bar.size())) + 1e-12;

  std::mt19937_64 rng(seed);
  double best = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    MatrixXd u;
    if (anchored && t % 2 == 1) {
      u = matmul(anchor_u, random_orthogonal(r, rng)) + gaussian(n_in, r, rng, 0.05 * scale);
    } else {
      u = gaussian(n_in, r, rng, scale);
    }
    MatrixXd v;
    double obj = std::numeric_limits<double>::infinity();
    try {
      v = refit_v(h, w_bar, u);
      u = refit_u(w_bar, v);
      v = refit_v(h, w_bar, u);
      obj = trace_objective_naive(h, w_bar - matmul(u, v.transpose()));
    } catch (const NumericError&) {
      continue;
    }
    if (std::isfinite(obj) && obj < best) best = obj;
  }
  return best;
}

MatrixXd finite_difference_gradient(const std::function<double(const MatrixXd&)>& f, const MatrixXd& point,
                                    double epsilon) {
  if (!(epsilon > 0.0)) throw ContractError("finite_difference_gradient: epsilon must be > 0");
  MatrixXd grad(point.rows(), point.cols());
  MatrixXd probe = point;
  for (Index j = 0; j < point.cols(); ++j) {
    for (Index i = 0; i < point.rows(); ++i) {
      const double x = point(i, j);
      probe(i, j) = x + epsilon;
      const double up = f(probe);
      probe(i, j) = x - epsilon;
      const double down = f(probe);
      probe(i, j) = x;
      grad(i, j) = (up - down) / (2.0 * epsilon);
    }
  }
  return grad;
}

}  // namespace splr::oracle

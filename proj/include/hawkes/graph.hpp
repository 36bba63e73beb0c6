#pragma once

// Bernoulli(p) interaction graph theta, its scaled matrix A = theta/N, the
// norm/positivity gates used before spectral work, resolvent row/column sums,
// Perron data, and the graph-only limit predictions for the two regimes.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "hawkes/errors.hpp"
#include "hawkes/inversion.hpp"
#include "hawkes/rng.hpp"

namespace hawkes {

enum class graph_mode { independent, symmetric };

struct interaction_graph {
  int n = 0;
  graph_mode mode = graph_mode::independent;
  double p_nominal = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::uint8_t> adj;  // row-major bits, adj[i*n+j] = theta_ij

  std::uint8_t operator()(int i, int j) const { return adj[static_cast<std::size_t>(i) * n + j]; }
};

// Reproducible from (seed, n, p, mode): independent mode consumes n^2 draws in
// row-major order, symmetric mode n(n+1)/2 draws over the upper triangle
// (diagonal included) mirrored below.
inline interaction_graph sample_graph(int n, double p, graph_mode mode, std::uint64_t seed) {
  if (n < 1) throw domain_error("graph size must be at least 1");
  if (!(p >= 0.0 && p <= 1.0)) throw domain_error("edge probability must lie in [0,1]");
  interaction_graph g;
  g.n = n;
  g.mode = mode;
  g.p_nominal = p;
  g.seed = seed;
  g.adj.assign(static_cast<std::size_t>(n) * n, 0);
  rng gen(seed);
  if (mode == graph_mode::independent) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g.adj[static_cast<std::size_t>(i) * n + j] = gen.bernoulli(p);
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        std::uint8_t bit = gen.bernoulli(p);
        g.adj[static_cast<std::size_t>(i) * n + j] = bit;
        g.adj[static_cast<std::size_t>(j) * n + i] = bit;
      }
  }
  return g;
}

// Hand-built graphs for tests and tools.
inline interaction_graph graph_from_adjacency(int n, std::vector<std::uint8_t> adj,
                                              graph_mode mode = graph_mode::independent,
                                              double p_nominal = 0.0) {
  if (n < 1 || adj.size() != static_cast<std::size_t>(n) * n)
    throw domain_error("adjacency size does not match graph size");
  for (std::uint8_t b : adj)
    if (b > 1) throw domain_error("adjacency entries must be 0 or 1");
  if (mode == graph_mode::symmetric)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (adj[static_cast<std::size_t>(i) * n + j] != adj[static_cast<std::size_t>(j) * n + i])
          throw domain_error("symmetric mode requires a symmetric adjacency");
  interaction_graph g;
  g.n = n;
  g.mode = mode;
  g.p_nominal = p_nominal;
  g.adj = std::move(adj);
  return g;
}

inline void dump_adjacency(const interaction_graph& g, std::ostream& os) {
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) os.put(g(i, j) ? '1' : '0');
    os.put('\n');
  }
}

namespace detail {

// theta rows (bits over the column index) packed into 64-bit words
inline std::vector<std::uint64_t> pack_rows(const interaction_graph& g) {
  int words = (g.n + 63) / 64;
  std::vector<std::uint64_t> rows(static_cast<std::size_t>(g.n) * words, 0);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      if (g(i, j)) rows[static_cast<std::size_t>(i) * words + j / 64] |= 1ull << (j % 64);
  return rows;
}

// theta columns (bits over the row index) packed into 64-bit words
inline std::vector<std::uint64_t> pack_cols(const interaction_graph& g) {
  int words = (g.n + 63) / 64;
  std::vector<std::uint64_t> cols(static_cast<std::size_t>(g.n) * words, 0);
  for (int j = 0; j < g.n; ++j)
    for (int i = 0; i < g.n; ++i)
      if (g(i, j)) cols[static_cast<std::size_t>(j) * words + i / 64] |= 1ull << (i % 64);
  return cols;
}

inline int popcount_and(const std::uint64_t* a, const std::uint64_t* b, int words) {
  int s = 0;
  for (int w = 0; w < words; ++w) s += std::popcount(a[w] & b[w]);
  return s;
}

inline Eigen::MatrixXd scaled_matrix(const interaction_graph& g) {
  Eigen::MatrixXd a(g.n, g.n);
  double inv_n = 1.0 / g.n;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) a(i, j) = g(i, j) ? inv_n : 0.0;
  return a;
}

// One LU of (I - Lambda A), reused for plain and transposed right-hand sides.
struct resolvent_solver {
  Eigen::MatrixXd m;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;

  resolvent_solver(const interaction_graph& g, double lambda)
      : m(Eigen::MatrixXd::Identity(g.n, g.n) - lambda * scaled_matrix(g)), lu(m) {}

  // x solving m x = rhs, with the residual verified by the caller
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
    Eigen::VectorXd x = lu.solve(rhs);
    if (!((m * x - rhs).lpNorm<Eigen::Infinity>() < 1e-10))
      throw convergence_error("resolvent solve residual too large");
    return x;
  }
  Eigen::VectorXd solve_transposed(const Eigen::VectorXd& rhs) const {
    Eigen::VectorXd x = lu.transpose().solve(rhs);
    if (!((m.transpose() * x - rhs).lpNorm<Eigen::Infinity>() < 1e-10))
      throw convergence_error("transposed resolvent solve residual too large");
    return x;
  }
};

// Q = sum_n Lambda^n A^n has nonnegative entries and unit diagonal, so row and
// column sums are >= 1; a violation means Lambda A fails to contract for this
// draw and the resolvent expansion is meaningless.
inline void require_dominating(const Eigen::VectorXd& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (!(x(i) >= 1.0 - 1e-9))
      throw domain_error("sampled interaction too strong for resolvent expansion");
}

}  // namespace detail

// Norm gate: Lambda * |||A|||_r <= (1 + Lambda p)/2 for r in {1, inf}; the
// intermediate r follow by interpolation, so row and column sums suffice.
inline bool check_omega1(const interaction_graph& g, double lambda, double p) {
  if (!(lambda * p < 1.0)) throw domain_error("lambda*p must be below 1 for the norm gate");
  double a = 0.5 * (1.0 + lambda * p);
  std::vector<int> row(g.n, 0), col(g.n, 0);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      if (g(i, j)) {
        ++row[i];
        ++col[j];
      }
  int max_row = *std::max_element(row.begin(), row.end());
  int max_col = *std::max_element(col.begin(), col.end());
  double scale = lambda / g.n;
  return scale * max_row <= a && scale * max_col <= a;
}

// Concentration gate: mean(theta) > p/2 and every entry of theta^2/N within
// p^2 (1 +/- 1/(2 N^{3/8})). Strict at moderate N; callers treat the flag as
// a diagnostic rather than as a hard precondition.
inline bool check_omega2(const interaction_graph& g, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw domain_error("edge probability must lie in (0,1]");
  long long total = 0;
  for (std::uint8_t b : g.adj) total += b;
  double n = g.n;
  if (!(total / (n * n) > 0.5 * p)) return false;
  auto rows = detail::pack_rows(g);
  auto cols = detail::pack_cols(g);
  int words = (g.n + 63) / 64;
  double band = 0.5 * p * p / std::pow(n, 0.375);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      double sq = detail::popcount_and(&rows[static_cast<std::size_t>(i) * words],
                                       &cols[static_cast<std::size_t>(j) * words], words) /
                  n;
      if (!(std::abs(sq - p * p) < band)) return false;
    }
  return true;
}

struct resolvent_data {
  std::vector<double> ell;   // row sums of (I - Lambda A)^{-1}
  std::vector<double> col;   // column sums of (I - Lambda A)^{-1}
  double lambda_used = 0.0;
  double threshold_a = 0.0;  // (1 + Lambda p)/2
  bool omega1 = false;       // norm-gate flag, diagnostic
};

// Solves (I - Lambda A) ell = 1 and the transposed system with one dense LU.
// The norm-gate flag is recorded but the solve proceeds whenever the result is
// a valid resolvent; a contraction-violating draw throws instead.
inline resolvent_data resolvent_vectors(const interaction_graph& g, double lambda, double p) {
  if (!(lambda > 0.0)) throw domain_error("lambda must be positive");
  if (!(lambda * p < 1.0)) throw domain_error("lambda*p must be below 1 for resolvent vectors");
  resolvent_data out;
  out.lambda_used = lambda;
  out.threshold_a = 0.5 * (1.0 + lambda * p);
  out.omega1 = check_omega1(g, lambda, p);

  detail::resolvent_solver solver(g, lambda);
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(g.n);
  Eigen::VectorXd ell = solver.solve(ones);
  Eigen::VectorXd col = solver.solve_transposed(ones);
  detail::require_dominating(ell);
  detail::require_dominating(col);

  out.ell.assign(ell.data(), ell.data() + g.n);
  out.col.assign(col.data(), col.data() + g.n);
  return out;
}

struct spectral_data {
  double rho = 0.0;
  std::vector<double> v;  // Perron vector, positive, ||v||_2 = sqrt(n)
  bool omega2 = false;    // concentration-gate flag, diagnostic
  double residual = 0.0;  // ||A v - rho v||_2 / sqrt(n)
};

// Power iteration on A^2, which is entrywise positive exactly when every pair
// (i,j) has a length-2 path; positivity gives a geometric convergence rate.
inline spectral_data perron(const interaction_graph& g) {
  auto rows = detail::pack_rows(g);
  auto cols = detail::pack_cols(g);
  int words = (g.n + 63) / 64;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      if (detail::popcount_and(&rows[static_cast<std::size_t>(i) * words],
                               &cols[static_cast<std::size_t>(j) * words], words) == 0)
        throw domain_error("interaction matrix is not irreducible: theta^2 has a zero entry");

  spectral_data out;
  out.omega2 = (g.p_nominal > 0.0 && g.p_nominal <= 1.0) ? check_omega2(g, g.p_nominal) : false;

  Eigen::MatrixXd a = detail::scaled_matrix(g);
  Eigen::VectorXd v = Eigen::VectorXd::Ones(g.n) / std::sqrt(static_cast<double>(g.n));
  for (int iter = 0;; ++iter) {
    if (iter >= 10000) throw convergence_error("power iteration did not converge");
    Eigen::VectorXd w = a * (a * v);
    w /= w.norm();
    double dist = (w - v).norm();
    v = w;
    if (dist < 1e-12) break;
  }
  double rayleigh = v.dot(a * (a * v));  // v is unit, so this is the A^2 quotient
  out.rho = std::sqrt(rayleigh);
  Eigen::VectorXd big_v = v * std::sqrt(static_cast<double>(g.n));
  out.residual = (a * big_v - out.rho * big_v).norm() / std::sqrt(static_cast<double>(g.n));
  out.v.assign(big_v.data(), big_v.data() + g.n);
  return out;
}

// Predicted large-time value of the subcritical estimator, from the graph
// alone: u = mu * mean_K(ell), v = mu^2 (N/K) sum_{i<=K} (ell_i - mean)^2,
// w = mu (N/K^2) sum_j (sum_{i<=K} Q(i,j))^2 ell_j, then Phi3(u, v, |w - corr|)
// with corr = (N-K)/K * u.
inline double conjectured_sub_limit(const interaction_graph& g, double lambda, double mu, int k) {
  if (!(k >= 1 && k <= g.n)) throw domain_error("observed count must lie in [1, n]");
  if (!(mu > 0.0)) throw domain_error("baseline intensity must be positive");
  if (!(lambda > 0.0)) throw domain_error("lambda must be positive");
  if (!(lambda * g.p_nominal < 1.0))
    throw domain_error("lambda*p must be below 1 for the subcritical limit");

  detail::resolvent_solver solver(g, lambda);
  Eigen::VectorXd ell = solver.solve(Eigen::VectorXd::Ones(g.n));
  detail::require_dominating(ell);
  Eigen::VectorXd indicator = Eigen::VectorXd::Zero(g.n);
  for (int i = 0; i < k; ++i) indicator(i) = 1.0;
  Eigen::VectorXd y = solver.solve_transposed(indicator);  // y_j = sum_{i<=K} Q(i,j)

  double n = g.n;
  double ell_bar = 0.0;
  for (int i = 0; i < k; ++i) ell_bar += ell(i);
  ell_bar /= k;
  double u = mu * ell_bar;
  double v = 0.0;
  for (int i = 0; i < k; ++i) v += (ell(i) - ell_bar) * (ell(i) - ell_bar);
  v *= mu * mu * n / k;
  double w = 0.0;
  for (int j = 0; j < g.n; ++j) w += y(j) * y(j) * ell(j);
  w *= mu * n / (static_cast<double>(k) * k);

  double w_arg = std::abs(w - (n - k) / k * u);
  if (w_arg == 0.0) throw domain_error("graph limit degenerate: dispersion argument vanished");
  double d = u - u * std::sqrt(u / w_arg);
  if (v + d * d == 0.0)
    throw domain_error("graph limit degenerate: resolvent sums carry no dispersion");
  return phi3(u, v, w_arg);
}

// Predicted large-time value of the supercritical estimator:
// 1 / (1 + (N/(K vbar^2)) sum_{i<=K} (V_i - vbar)^2).
inline double conjectured_sup_limit(const interaction_graph& g, int k) {
  if (!(k >= 1 && k <= g.n)) throw domain_error("observed count must lie in [1, n]");
  spectral_data spec = perron(g);
  double vbar = 0.0;
  for (int i = 0; i < k; ++i) vbar += spec.v[i];
  vbar /= k;
  double s = 0.0;
  for (int i = 0; i < k; ++i) s += (spec.v[i] - vbar) * (spec.v[i] - vbar);
  double u_inf = static_cast<double>(g.n) / (k * vbar * vbar) * s;
  return 1.0 / (1.0 + u_inf);
}

}  // namespace hawkes

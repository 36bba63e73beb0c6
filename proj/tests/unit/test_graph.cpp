#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "hawkes/graph.hpp"
#include "support/oracles.hpp"

using hawkes::graph_from_adjacency;
using hawkes::graph_mode;
using hawkes::interaction_graph;
using hawkes::sample_graph;

namespace {

interaction_graph all_ones(int n, double p_nominal = 1.0) {
  return graph_from_adjacency(n, std::vector<std::uint8_t>(static_cast<std::size_t>(n) * n, 1),
                              graph_mode::independent, p_nominal);
}

interaction_graph zero(int n) {
  return graph_from_adjacency(n, std::vector<std::uint8_t>(static_cast<std::size_t>(n) * n, 0));
}

interaction_graph identity(int n, double p_nominal = 1.0) {
  std::vector<std::uint8_t> adj(static_cast<std::size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i) adj[static_cast<std::size_t>(i) * n + i] = 1;
  return graph_from_adjacency(n, std::move(adj), graph_mode::independent, p_nominal);
}

// explicit adjugate inverse of a 3x3 matrix
Eigen::Matrix3d inverse3(const Eigen::Matrix3d& m) {
  double det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
               m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
               m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
  Eigen::Matrix3d adj;
  adj(0, 0) = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  adj(0, 1) = m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2);
  adj(0, 2) = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
  adj(1, 0) = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
  adj(1, 1) = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
  adj(1, 2) = m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2);
  adj(2, 0) = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
  adj(2, 1) = m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1);
  adj(2, 2) = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  return adj / det;
}

}  // namespace

TEST_CASE("sampling hits the deterministic corners", "[graph]") {
  auto ones = sample_graph(4, 1.0, graph_mode::independent, 7);
  CHECK(std::count(ones.adj.begin(), ones.adj.end(), 1) == 16);
  auto none = sample_graph(4, 0.0, graph_mode::symmetric, 7);
  CHECK(std::count(none.adj.begin(), none.adj.end(), 0) == 16);
}

TEST_CASE("sampling is reproducible from the seed", "[graph]") {
  auto g1 = sample_graph(60, 0.35, graph_mode::independent, 123);
  auto g2 = sample_graph(60, 0.35, graph_mode::independent, 123);
  auto g3 = sample_graph(60, 0.35, graph_mode::independent, 124);
  CHECK(g1.adj == g2.adj);
  CHECK(g1.adj != g3.adj);
}

TEST_CASE("symmetric mode mirrors the upper triangle", "[graph]") {
  auto g = sample_graph(50, 0.5, graph_mode::symmetric, 99);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) CHECK(g(i, j) == g(j, i));
}

TEST_CASE("sampled edge frequency concentrates at p", "[graph]") {
  auto g = sample_graph(1000, 0.35, graph_mode::independent, 2024);
  double mean = std::accumulate(g.adj.begin(), g.adj.end(), 0.0) / (1000.0 * 1000.0);
  // three-sigma band of the binomial mean over 10^6 draws
  CHECK_THAT(mean, Catch::Matchers::WithinAbs(0.35, 0.0015));
}

TEST_CASE("norm gate accepts and rejects by row and column sums", "[graph]") {
  CHECK_FALSE(hawkes::check_omega1(all_ones(2), 2.0, 0.35));
  CHECK(hawkes::check_omega1(zero(4), 2.0, 0.35));
  CHECK(hawkes::check_omega1(identity(4), 2.0, 0.35));
  CHECK_THROWS_AS(hawkes::check_omega1(zero(4), 2.0, 0.5), hawkes::domain_error);
}

TEST_CASE("concentration gate on hand graphs", "[graph]") {
  CHECK(hawkes::check_omega2(all_ones(5), 1.0));
  CHECK_FALSE(hawkes::check_omega2(zero(4), 0.5));
  CHECK_FALSE(hawkes::check_omega2(identity(2), 1.0));
  CHECK_THROWS_AS(hawkes::check_omega2(zero(4), 0.0), hawkes::domain_error);
}

TEST_CASE("resolvent vectors on hand graphs", "[graph]") {
  auto res = hawkes::resolvent_vectors(zero(4), 2.0, 0.35);
  for (double x : res.ell) CHECK(x == 1.0);
  for (double x : res.col) CHECK(x == 1.0);
  CHECK(res.threshold_a == 0.85);

  auto fixed = hawkes::resolvent_vectors(all_ones(2, 0.5), 0.5, 0.5);
  for (double x : fixed.ell) CHECK_THAT(x, Catch::Matchers::WithinAbs(2.0, 1e-12));
  for (double x : fixed.col) CHECK_THAT(x, Catch::Matchers::WithinAbs(2.0, 1e-12));
}

TEST_CASE("resolvent vectors match an explicit 3x3 inverse", "[graph]") {
  auto g = graph_from_adjacency(3, {1, 0, 1, 1, 1, 0, 0, 1, 1}, graph_mode::independent, 0.5);
  double lambda = 0.5;
  auto res = hawkes::resolvent_vectors(g, lambda, 0.5);

  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) -= lambda * g(i, j) / 3.0;
  Eigen::Matrix3d q = inverse3(m);
  for (int i = 0; i < 3; ++i) {
    CHECK_THAT(res.ell[i], Catch::Matchers::WithinAbs(q.row(i).sum(), 1e-12));
    CHECK_THAT(res.col[i], Catch::Matchers::WithinAbs(q.col(i).sum(), 1e-12));
  }
}

TEST_CASE("resolvent entries stay in the diagonal-dominant band", "[graph]") {
  // seed picked so the norm gate holds for this draw
  double lambda = 1.2, p = 0.3;
  auto g = sample_graph(50, p, graph_mode::independent, 11);
  REQUIRE(hawkes::check_omega1(g, lambda, p));
  auto res = hawkes::resolvent_vectors(g, lambda, p);
  CHECK(res.omega1);

  double a = res.threshold_a;
  double cap = 1.0 / (1.0 - a);
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(50, 50);
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 50; ++j) m(i, j) -= lambda * g(i, j) / 50.0;
  Eigen::MatrixXd q = m.inverse();
  for (int i = 0; i < 50; ++i) {
    CHECK(res.ell[i] >= 1.0);
    CHECK(res.ell[i] <= cap + 1e-10);
    for (int j = 0; j < 50; ++j) {
      double base = i == j ? 1.0 : 0.0;
      CHECK(q(i, j) >= base - 1e-12);
      CHECK(q(i, j) <= base + lambda * cap / 50.0 + 1e-12);
    }
  }
}

TEST_CASE("perron data on hand graphs", "[graph]") {
  auto spec = hawkes::perron(all_ones(5));
  CHECK_THAT(spec.rho, Catch::Matchers::WithinAbs(1.0, 1e-12));
  for (double x : spec.v) CHECK_THAT(x, Catch::Matchers::WithinAbs(1.0, 1e-10));
  CHECK(spec.residual < 1e-10);
  CHECK(spec.omega2);

  CHECK_THROWS_AS(hawkes::perron(identity(2)), hawkes::domain_error);
  CHECK_THROWS_AS(hawkes::perron(zero(3)), hawkes::domain_error);
}

TEST_CASE("perron radius matches a dense eigensolver", "[graph]") {
  auto g = sample_graph(40, 0.6, graph_mode::independent, 5);
  auto spec = hawkes::perron(g);

  Eigen::MatrixXd a(40, 40);
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 40; ++j) a(i, j) = g(i, j) / 40.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(a);
  double rho = 0.0;
  for (int i = 0; i < 40; ++i) rho = std::max(rho, std::abs(es.eigenvalues()(i)));
  CHECK_THAT(spec.rho, Catch::Matchers::WithinAbs(rho, 1e-9));

  double norm2 = 0.0;
  for (double x : spec.v) norm2 += x * x;
  CHECK_THAT(std::sqrt(norm2), Catch::Matchers::WithinAbs(std::sqrt(40.0), 1e-10));
}

TEST_CASE("perron radius concentrates near p with positive bounded vector", "[graph]") {
  double p = 0.85;
  auto g = sample_graph(200, p, graph_mode::independent, 31);
  auto spec = hawkes::perron(g);
  double band = p / (2.0 * std::pow(200.0, 0.375));
  CHECK(spec.rho >= p - band);
  CHECK(spec.rho <= p + band);
  CHECK(spec.residual < 1e-10);
  for (double x : spec.v) {
    CHECK(x >= 0.5);
    CHECK(x <= 2.0);
  }
}

TEST_CASE("subcritical graph limit on hand graphs", "[graph]") {
  CHECK_THAT(hawkes::conjectured_sub_limit(all_ones(6, 0.5), 0.5, 1.0, 6),
             Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK_THROWS_AS(hawkes::conjectured_sub_limit(zero(5), 0.5, 1.0, 5), hawkes::domain_error);
}

TEST_CASE("subcritical graph limit concentrates at p", "[graph]") {
  std::vector<double> vals;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto g = sample_graph(250, 0.35, graph_mode::independent, 1000 + seed);
    vals.push_back(hawkes::conjectured_sub_limit(g, 2.0, 1.0, 250));
  }
  for (double v : vals) CHECK_THAT(v, Catch::Matchers::WithinAbs(0.35, 0.1));
  std::nth_element(vals.begin(), vals.begin() + 20, vals.end());
  CHECK_THAT(vals[20], Catch::Matchers::WithinAbs(0.35, 0.015));
}

TEST_CASE("subcritical graph limit is permutation invariant when fully observed", "[graph]") {
  auto g = sample_graph(30, 0.4, graph_mode::independent, 77);
  double base = hawkes::conjectured_sub_limit(g, 1.5, 2.0, 30);

  std::vector<int> perm(30);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 shuffler(4);
  std::shuffle(perm.begin(), perm.end(), shuffler);
  std::vector<std::uint8_t> adj(30 * 30);
  for (int i = 0; i < 30; ++i)
    for (int j = 0; j < 30; ++j) adj[static_cast<std::size_t>(i) * 30 + j] = g(perm[i], perm[j]);
  auto h = graph_from_adjacency(30, std::move(adj), graph_mode::independent, g.p_nominal);
  CHECK_THAT(hawkes::conjectured_sub_limit(h, 1.5, 2.0, 30),
             Catch::Matchers::WithinAbs(base, 1e-10));
}

TEST_CASE("supercritical graph limit on hand and sampled graphs", "[graph]") {
  CHECK_THAT(hawkes::conjectured_sup_limit(all_ones(7), 7),
             Catch::Matchers::WithinAbs(1.0, 1e-12));

  std::vector<double> vals;
  for (std::uint64_t seed = 0; seed < 24; ++seed) {
    auto g = sample_graph(250, 0.85, graph_mode::independent, 500 + seed);
    vals.push_back(hawkes::conjectured_sup_limit(g, 250));
  }
  for (double v : vals) CHECK_THAT(v, Catch::Matchers::WithinAbs(0.85, 0.05));
  std::nth_element(vals.begin(), vals.begin() + 12, vals.end());
  CHECK_THAT(vals[12], Catch::Matchers::WithinAbs(0.85, 0.01));
}

TEST_CASE("adjacency dump and hand-built graph validation", "[graph]") {
  std::ostringstream os;
  hawkes::dump_adjacency(identity(3), os);
  CHECK(os.str() == "100\n010\n001\n");

  CHECK_THROWS_AS(graph_from_adjacency(2, {1, 0, 0}), hawkes::domain_error);
  CHECK_THROWS_AS(graph_from_adjacency(2, {2, 0, 0, 1}), hawkes::domain_error);
  CHECK_THROWS_AS(graph_from_adjacency(2, {0, 1, 0, 0}, graph_mode::symmetric),
                  hawkes::domain_error);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mm/random_graph.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace mm;

namespace {

// brute force over all unordered pairs, coded directly from the likelihood
double brute_loglik(const Graph& g, const VectorXd& p) {
  double L = 0.0;
  for (const auto& [i, j] : g.edges) L += std::log(p[i]) + std::log(p[j]);
  for (int i = 0; i < g.node_count; ++i)
    for (int j = i + 1; j < g.node_count; ++j) L -= std::log(1.0 + p[i] * p[j]);
  return L;
}

VectorXd fit_graph(const Graph& g, const StoppingRule& rule) {
  GraphProblem problem(g);
  auto [trace, report] = run_mm(problem, graph_init(problem.graph()), rule);
  REQUIRE(report.status == RunStatus::Converged);
  return report.theta_final;
}

}  // namespace

TEST_CASE("graph_loglik basics") {
  Graph empty = Graph::from_edges(3, {});
  CHECK(graph_loglik(empty, VectorXd::Zero(3)) == 0.0);

  Graph pair = Graph::from_edges(2, {{0, 1}});
  CHECK(graph_loglik(pair, VectorXd::Ones(2)) ==
        doctest::Approx(-std::log(2.0)).epsilon(1e-9));

  // observed edge with zero propensity
  VectorXd p(2);
  p << 0.0, 1.0;
  CHECK(std::isinf(graph_loglik(pair, p)));
  CHECK(graph_loglik(pair, p) < 0.0);
}

TEST_CASE("graph_loglik matches the brute-force oracle") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> unif(0.1, 2.0);
  VectorXd p_true(10);
  for (int i = 0; i < 10; ++i) p_true[i] = unif(rng);
  Graph g = graph_simulate(p_true, 99);
  for (int rep = 0; rep < 10; ++rep) {
    VectorXd p(10);
    for (int i = 0; i < 10; ++i) p[i] = unif(rng);
    CHECK(std::abs(graph_loglik(g, p) - brute_loglik(g, p)) < 1e-12 * 50);
  }
}

TEST_CASE("graph_mm_update basics") {
  // isolated node stays at zero
  Graph g = Graph::from_edges(3, {{0, 1}});
  VectorXd p(3);
  p << 1.0, 1.0, 0.5;
  const VectorXd next = graph_mm_update(g, p);
  CHECK(next[2] == 0.0);

  // two nodes, one edge: update is sqrt(2), iterates diverge monotonically
  // (the MLE does not exist for this graph)
  Graph pair = Graph::from_edges(2, {{0, 1}});
  VectorXd q = VectorXd::Ones(2);
  VectorXd q1 = graph_mm_update(pair, q);
  CHECK(q1[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(q1[1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  double prev = 1.0;
  for (int it = 0; it < 50; ++it) {
    q = graph_mm_update(pair, q);
    CHECK(q[0] > prev);  // monotone growth toward the nonexistent MLE
    prev = q[0];
  }
}

TEST_CASE("runaway propensities trip the divergence guard") {
  // with a tiny partner propensity the update p+ = sqrt(p d / (p_j/(1+p p_j)))
  // overshoots the 1e8 bound in one step
  Graph pair = Graph::from_edges(2, {{0, 1}});
  VectorXd p(2);
  p << 1e-10, 1e7;
  CHECK_THROWS_AS(graph_mm_update(pair, p), DomainError);
}

TEST_CASE("3-node path: saturated hub, MLE does not exist") {
  // middle node has degree m-1, so the likelihood has no stationary point;
  // the hub propensity climbs monotonically while L approaches its supremum 0
  Graph path = Graph::from_edges(3, {{0, 1}, {1, 2}});
  GraphProblem problem(path);
  VectorXd p = graph_init(path);
  double prev_hub = p[1];
  double prev_L = graph_loglik(path, p);
  for (int it = 0; it < 500; ++it) {
    p = graph_mm_update(path, p);
    const double L = graph_loglik(path, p);
    CHECK(p[1] > prev_hub);
    CHECK(L >= prev_L - 1e-12);
    prev_hub = p[1];
    prev_L = L;
  }
  CHECK(prev_L < 0.0);
}

TEST_CASE("degenerate configuration is rejected") {
  Graph g = Graph::from_edges(3, {{0, 1}});
  VectorXd p(3);
  p << 1.0, 0.0, 0.0;  // node 0 has degree 1 but every neighbor propensity is 0
  CHECK_THROWS_AS(graph_mm_update(g, p), DomainError);
}

TEST_CASE("4-node path: boundary degree sequence, MLE does not exist") {
  // the iterates ride a ridge with p_end * p_interior -> 1 while the interior
  // propensities grow without bound and L climbs toward its supremum -4 ln 2
  Graph path = Graph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}});
  VectorXd p = graph_init(path);
  double prev_L = graph_loglik(path, p);
  for (int it = 0; it < 2000; ++it) {
    p = graph_mm_update(path, p);
    const double L = graph_loglik(path, p);
    CHECK(L >= prev_L - 1e-12);
    prev_L = L;
  }
  CHECK(prev_L < -4.0 * std::log(2.0));
  CHECK(p[1] > 10.0);                            // still growing
  CHECK(std::abs(p[0] * p[1] - 1.0) < 1e-2);     // approaching the ridge
}

TEST_CASE("5-node path MLE: stationarity and grid-search agreement") {
  Graph path = Graph::from_edges(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  const VectorXd p_hat = fit_graph(path, StoppingRule{20000, 1e-12, 0.0});

  CHECK(graph_stationarity_residual(path, p_hat).maxCoeff() < 1e-8);
  CHECK(std::abs(p_hat[0] - p_hat[4]) < 1e-9);  // end symmetry
  CHECK(std::abs(p_hat[1] - p_hat[3]) < 1e-9);  // off-center symmetry

  // 3-parameter grid over (p_end, p_off_center, p_center), refined in stages
  double best_a = 0.5, best_b = 0.5, best_c = 0.5, best = -1e300;
  double a_lo = 0.01, a_hi = 2.0, b_lo = 0.01, b_hi = 3.0, c_lo = 0.01, c_hi = 3.0;
  for (int stage = 0; stage < 6; ++stage) {
    for (int ia = 0; ia <= 60; ++ia)
      for (int ib = 0; ib <= 60; ++ib)
        for (int ic = 0; ic <= 60; ++ic) {
          VectorXd p(5);
          p[0] = p[4] = a_lo + (a_hi - a_lo) * ia / 60.0;
          p[1] = p[3] = b_lo + (b_hi - b_lo) * ib / 60.0;
          p[2] = c_lo + (c_hi - c_lo) * ic / 60.0;
          const double L = brute_loglik(path, p);
          if (L > best) { best = L; best_a = p[0]; best_b = p[1]; best_c = p[2]; }
        }
    const double da = (a_hi - a_lo) / 60.0, db = (b_hi - b_lo) / 60.0;
    const double dc = (c_hi - c_lo) / 60.0;
    a_lo = std::max(1e-6, best_a - 2 * da); a_hi = best_a + 2 * da;
    b_lo = std::max(1e-6, best_b - 2 * db); b_hi = best_b + 2 * db;
    c_lo = std::max(1e-6, best_c - 2 * dc); c_hi = best_c + 2 * dc;
  }
  CHECK(std::abs(p_hat[0] - best_a) < 1e-4);
  CHECK(std::abs(p_hat[1] - best_b) < 1e-4);
  CHECK(std::abs(p_hat[2] - best_c) < 1e-4);
}

TEST_CASE("graph_init") {
  CHECK(graph_init(Graph::from_edges(4, {})).isZero());
  CHECK_THROWS_AS(graph_init(Graph::from_edges(2, {{0, 1}})), DomainError);

  VectorXd p_true(200);
  for (int i = 0; i < 200; ++i) p_true[i] = (i + 0.5) / 200.0;
  Graph g = graph_simulate(p_true, 7);
  const VectorXd p0 = graph_init(g);
  for (int i = 0; i < 200; ++i) {
    if (g.degrees[i] == 0) CHECK(p0[i] == 0.0);
    else {
      CHECK(p0[i] > 0.0);
      CHECK(std::isfinite(p0[i]));
    }
  }
}

TEST_CASE("graph_simulate is seed-deterministic with correct marginals") {
  CHECK(graph_simulate(VectorXd::Zero(5), 123).edge_count() == 0);

  VectorXd p = VectorXd::Ones(2);
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed)
    hits += graph_simulate(p, seed).edge_count();
  CHECK(std::abs(hits / 10000.0 - 0.5) < 0.015);

  VectorXd p2(6);
  p2 << 0.2, 0.9, 1.4, 0.0, 0.7, 2.0;
  Graph a = graph_simulate(p2, 42);
  Graph b = graph_simulate(p2, 42);
  CHECK(a.edges == b.edges);
}

TEST_CASE("edge validation") {
  CHECK_THROWS_AS(Graph::from_edges(3, {{1, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph::from_edges(3, {{0, 3}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph::from_edges(3, {{0, 1}, {1, 0}}), std::invalid_argument);
  Graph g = Graph::from_edges(3, {{2, 0}, {1, 2}});
  CHECK(g.degrees[2] == 2);
  CHECK(g.edges == std::vector<std::pair<int, int>>{{0, 2}, {1, 2}});
}

TEST_CASE("permutation equivariance of the fit") {
  VectorXd p_true(12);
  for (int i = 0; i < 12; ++i) p_true[i] = 0.2 + 0.1 * i;
  Graph g = graph_simulate(p_true, 17);
  const StoppingRule rule{5000, 1e-11, 0.0};
  const VectorXd p_hat = fit_graph(g, rule);

  // relabel via a fixed permutation
  std::vector<int> perm(12);
  for (int i = 0; i < 12; ++i) perm[i] = (i * 5 + 3) % 12;
  std::vector<std::pair<int, int>> edges;
  for (auto [i, j] : g.edges) edges.emplace_back(perm[i], perm[j]);
  Graph g2 = Graph::from_edges(12, std::move(edges));
  const VectorXd p_hat2 = fit_graph(g2, rule);
  for (int i = 0; i < 12; ++i) CHECK(std::abs(p_hat2[perm[i]] - p_hat[i]) < 1e-8);
}

TEST_CASE("ascent on seeded graphs") {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> unif(0.1, 1.2);
  for (int rep = 0; rep < 25; ++rep) {
    VectorXd p_true(30);
    for (int i = 0; i < 30; ++i) p_true[i] = unif(rng);
    GraphProblem problem(graph_simulate(p_true, 1000 + rep));
    auto [trace, report] =
        run_mm(problem, graph_init(problem.graph()), StoppingRule{2000, 1e-10, 0.0});
    REQUIRE(report.status == RunStatus::Converged);
    for (size_t s = 1; s < trace.steps.size(); ++s)
      CHECK(trace.steps[s].f >= trace.steps[s - 1].f - 1e-9);
    CHECK(graph_stationarity_residual(problem.graph(), report.theta_final)
              .maxCoeff() < 1e-6);
  }
}

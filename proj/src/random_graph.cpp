#include "mm/random_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace mm {

namespace {
constexpr double kDivergenceBound = 1e8;
}

Graph Graph::from_edges(int node_count, std::vector<std::pair<int, int>> edges) {
  if (node_count <= 0) throw std::invalid_argument("Graph: node_count must be positive");
  Graph g;
  g.node_count = node_count;
  g.degrees = Eigen::VectorXi::Zero(node_count);
  for (auto& [a, b] : edges) {
    if (a == b) throw std::invalid_argument("Graph: self-loop");
    if (a > b) std::swap(a, b);
    if (a < 0 || b >= node_count) throw std::invalid_argument("Graph: node index out of range");
    ++g.degrees[a];
    ++g.degrees[b];
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
    throw std::invalid_argument("Graph: duplicate edge");
  g.edges = std::move(edges);
  return g;
}

double graph_loglik(const Graph& graph, const VectorXd& p) {
  const int m = graph.node_count;
  if (p.size() != m) throw std::invalid_argument("graph_loglik: dimension mismatch");

  // edge term: sum over edges of ln p_i + ln p_j == sum_i d_i ln p_i
  double edge_term = 0.0;
  for (int i = 0; i < m; ++i) {
    if (graph.degrees[i] == 0) continue;
    if (!(p[i] > 0.0)) return -std::numeric_limits<double>::infinity();
    edge_term += graph.degrees[i] * std::log(p[i]);
  }
  double pair_term = 0.0;
  for (int i = 0; i + 1 < m; ++i)
    pair_term += (1.0 + p[i] * p.tail(m - i - 1).array()).log().sum();
  return edge_term - pair_term;
}

VectorXd graph_mm_update(const Graph& graph, const VectorXd& p) {
  const int m = graph.node_count;
  if (p.size() != m) throw std::invalid_argument("graph_mm_update: dimension mismatch");
  VectorXd next = VectorXd::Zero(m);
  for (int i = 0; i < m; ++i) {
    if (graph.degrees[i] == 0) continue;  // absorbing zero, denominator untouched
    double denom = (p.array() / (1.0 + p[i] * p.array())).sum() -
                   p[i] / (1.0 + p[i] * p[i]);
    if (!(denom > 0.0)) throw DomainError("graph_mm_update: degenerate configuration");
    next[i] = std::sqrt(p[i] * graph.degrees[i] / denom);
    if (next[i] > kDivergenceBound)
      throw DomainError("graph_mm_update: MLE may not exist (propensity above 1e8)");
  }
  return next;
}

VectorXd graph_init(const Graph& graph) {
  const int m = graph.node_count;
  VectorXd p = VectorXd::Zero(m);
  if (graph.edge_count() == 0) return p;
  const double density =
      graph.edge_count() / (0.5 * static_cast<double>(m) * (m - 1));
  if (density >= 1.0) throw DomainError("graph_init: saturated graph");
  const double q = std::sqrt(density / (1.0 - density));
  for (int i = 0; i < m; ++i) {
    const int d = graph.degrees[i];
    if (d == 0) continue;
    if (d >= m) throw DomainError("graph_init: saturated node");
    p[i] = d / (q * (m - d));
  }
  return p;
}

Graph graph_simulate(const VectorXd& propensities, std::uint64_t seed) {
  const int m = static_cast<int>(propensities.size());
  if ((propensities.array() < 0.0).any())
    throw std::invalid_argument("graph_simulate: propensities must be nonnegative");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < m; ++i) {
    const double pi = propensities[i];
    if (pi == 0.0) {
      // still consume the draws so edge patterns stay seed-stable
      for (int j = i + 1; j < m; ++j) unif(rng);
      continue;
    }
    for (int j = i + 1; j < m; ++j) {
      const double prod = pi * propensities[j];
      if (unif(rng) < prod / (1.0 + prod)) edges.emplace_back(i, j);
    }
  }
  return Graph::from_edges(m, std::move(edges));
}

VectorXd graph_stationarity_residual(const Graph& graph, const VectorXd& p) {
  const int m = graph.node_count;
  VectorXd r = VectorXd::Zero(m);
  for (int i = 0; i < m; ++i) {
    if (graph.degrees[i] == 0) continue;
    const double denom = (p.array() / (1.0 + p[i] * p.array())).sum() -
                         p[i] / (1.0 + p[i] * p[i]);
    r[i] = std::abs(graph.degrees[i] / p[i] - denom);
  }
  return r;
}

}  // namespace mm

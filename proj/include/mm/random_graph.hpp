#pragma once

#include "mm/core.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace mm {

// Simple undirected graph; edges stored as i < j pairs, 0-based.
struct Graph {
  int node_count = 0;
  std::vector<std::pair<int, int>> edges;
  Eigen::VectorXi degrees;

  static Graph from_edges(int node_count, std::vector<std::pair<int, int>> edges);
  int edge_count() const { return static_cast<int>(edges.size()); }
};

// Eq.-style log-likelihood over all unordered pairs; -inf when an observed
// edge touches a zero propensity.
double graph_loglik(const Graph& graph, const VectorXd& p);

// Jacobi sweep of the separated-surrogate update; p_i = 0 stays 0 when
// d_i = 0. Throws DomainError on degenerate denominators or when a
// propensity exceeds 1e8 (MLE may not exist).
VectorXd graph_mm_update(const Graph& graph, const VectorXd& p);

// Background-propensity initialization: q^2/(1+q^2) = edge density, then
// p_i q/(1+p_i q) = d_i/m per node.
VectorXd graph_init(const Graph& graph);

// Each pair {i,j} drawn independently with probability p_i p_j/(1+p_i p_j).
Graph graph_simulate(const VectorXd& propensities, std::uint64_t seed);

// |d_i/p_i - sum_j p_j/(1+p_i p_j)| per node with d_i > 0, else 0.
VectorXd graph_stationarity_residual(const Graph& graph, const VectorXd& p);

class GraphProblem : public MMProblem {
 public:
  explicit GraphProblem(Graph graph) : graph_(std::move(graph)) {}

  int dimension() const override { return graph_.node_count; }
  Sense sense() const override { return Sense::Maximize; }
  bool feasible(const VectorXd& p) const override {
    return (p.array() >= 0.0).all();
  }
  double objective(const VectorXd& p) const override {
    return graph_loglik(graph_, p);
  }
  VectorXd mm_map(const VectorXd& p) const override {
    return graph_mm_update(graph_, p);
  }
  const Graph& graph() const { return graph_; }

 private:
  Graph graph_;
};

}  // namespace mm

#pragma once

// Sub-elliptic distance on the nilmanifold grid (Dijkstra over horizontal
// stencil moves) and exact 2-Wasserstein distances on small instances
// (successive-shortest-path min-cost flow with a dual certificate).

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

#include "folia/heat.hpp"

namespace folia::metrics {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using heat::NilGrid;

struct DistanceField {
  int source = 0;
  VectorXd d;         // graph distance per node
  VectorXd rounding;  // accumulated z-plane rounding radius along the path
  double max_rounding = 0.0;
};

namespace detail {

struct GraphEdge {
  int to;
  double len;
  double rounding;
};

// Horizontal stencil moves: +-X1 along the x-axis, +-X2 along the flow
// (x, y +- h, z +- x h) with the z-offset rounded to the nearest plane.
// `include_vertical` adds +-Z edges (Riemannian comparison graph).
inline std::vector<std::vector<GraphEdge>> build_edges(const NilGrid& grid,
                                                       bool include_vertical) {
  const int N = grid.N;
  const double h = grid.h;
  std::vector<std::vector<GraphEdge>> adj(grid.size());
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) {
        const int from = grid.index(i, j, k);
        auto& edges = adj[from];
        edges.push_back({grid.index(i + 1, j, k), h, 0.0});
        edges.push_back({grid.index(i - 1, j, k), h, 0.0});
        const double theta = static_cast<double>(i) / N;
        const int shift = theta <= 0.5 ? 0 : 1;
        const double rr = std::abs(theta - shift) * h;
        edges.push_back({grid.index(i, j + 1, k + shift), h, rr});
        edges.push_back({grid.index(i, j - 1, k - shift), h, rr});
        if (include_vertical) {
          edges.push_back({grid.index(i, j, k + 1), h, 0.0});
          edges.push_back({grid.index(i, j, k - 1), h, 0.0});
        }
      }
  return adj;
}

inline DistanceField dijkstra(const NilGrid& grid, int source,
                              const std::vector<std::vector<GraphEdge>>& adj) {
  const double inf = std::numeric_limits<double>::infinity();
  DistanceField out;
  out.source = source;
  out.d = VectorXd::Constant(grid.size(), inf);
  out.rounding = VectorXd::Zero(grid.size());
  out.d[source] = 0.0;
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  pq.push({0.0, source});
  while (!pq.empty()) {
    auto [dist, u] = pq.top();
    pq.pop();
    if (dist > out.d[u]) continue;
    for (const auto& e : adj[u]) {
      double nd = dist + e.len;
      if (nd < out.d[e.to] - 1e-15) {
        out.d[e.to] = nd;
        out.rounding[e.to] = out.rounding[u] + e.rounding;
        pq.push({nd, e.to});
      }
    }
  }
  out.max_rounding = out.rounding.maxCoeff();
  return out;
}

}  // namespace detail

inline DistanceField cc_distance(const NilGrid& grid, int source) {
  return detail::dijkstra(grid, source, detail::build_edges(grid, false));
}

// Graph distance using all frame edges (horizontal and vertical); lower
// bounds the sub-elliptic distance pointwise.
inline DistanceField riemannian_distance(const NilGrid& grid, int source) {
  return detail::dijkstra(grid, source, detail::build_edges(grid, true));
}

// All-pairs CC distance for Wasserstein costs on small grids.
inline MatrixXd cc_distance_matrix(const NilGrid& grid) {
  auto adj = detail::build_edges(grid, false);
  MatrixXd D(grid.size(), grid.size());
  for (int s = 0; s < grid.size(); ++s) D.row(s) = detail::dijkstra(grid, s, adj).d;
  return D;
}

struct TransportPlan {
  double cost = 0.0;           // sum pi * c
  double w2 = 0.0;             // sqrt(cost) for c = d^2
  double dual_value = 0.0;     // sum a_i u_i + sum b_j v_j
  double dual_violation = 0.0; // max (u_i + v_j - c_ij)_+
  std::vector<std::tuple<int, int, double>> coupling;  // (i, j, mass)
};

// Exact optimal transport between probability vectors mu0, mu1 with cost
// matrix c (row: mu0 support, column: mu1 support). Successive shortest
// paths with Johnson potentials; exact LP optimum, certified by the duals.
inline TransportPlan optimal_transport(const MatrixXd& cost, const VectorXd& mu0,
                                       const VectorXd& mu1, double mass_tol = 1e-12) {
  const int n0 = static_cast<int>(mu0.size());
  const int n1 = static_cast<int>(mu1.size());
  if (cost.rows() != n0 || cost.cols() != n1)
    throw std::invalid_argument("optimal_transport: cost shape mismatch");
  if (mu0.minCoeff() < -mass_tol || mu1.minCoeff() < -mass_tol)
    throw std::invalid_argument("optimal_transport: negative mass");
  if (std::abs(mu0.sum() - mu1.sum()) > mass_tol)
    throw std::invalid_argument("optimal_transport: marginal mass mismatch");

  std::vector<int> src, dst;
  for (int i = 0; i < n0; ++i)
    if (mu0[i] > 0.0) src.push_back(i);
  for (int j = 0; j < n1; ++j)
    if (mu1[j] > 0.0) dst.push_back(j);
  const int ns = static_cast<int>(src.size());
  const int nd = static_cast<int>(dst.size());

  std::vector<double> supply(ns), demand(nd);
  for (int a = 0; a < ns; ++a) supply[a] = mu0[src[a]];
  for (int b = 0; b < nd; ++b) demand[b] = mu1[dst[b]];
  MatrixXd flow = MatrixXd::Zero(ns, nd);
  std::vector<double> pot_s(ns, 0.0), pot_d(nd, 0.0);
  const double inf = std::numeric_limits<double>::infinity();

  const int max_rounds = 20 * (ns + nd) + 100;
  for (int round = 0; ; ++round) {
    double remaining = 0.0;
    for (double s : supply) remaining += s;
    if (remaining <= mass_tol) break;
    if (round >= max_rounds)
      throw std::runtime_error("optimal_transport: augmentation did not converge");

    // Dijkstra over the residual graph with reduced costs. Node layout:
    // 0..ns-1 = sources, ns..ns+nd-1 = sinks.
    std::vector<double> dist(ns + nd, inf);
    std::vector<int> prev(ns + nd, -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    for (int a = 0; a < ns; ++a)
      if (supply[a] > mass_tol) {
        dist[a] = 0.0;
        pq.push({0.0, a});
      }
    while (!pq.empty()) {
      auto [du, u] = pq.top();
      pq.pop();
      if (du > dist[u] + 1e-15) continue;
      if (u < ns) {
        const int a = u;
        for (int b = 0; b < nd; ++b) {
          double rc = cost(src[a], dst[b]) - pot_s[a] - pot_d[b];
          if (rc < 0.0) rc = 0.0;  // guard fp noise; optimal arcs have rc = 0
          if (du + rc < dist[ns + b] - 1e-15) {
            dist[ns + b] = du + rc;
            prev[ns + b] = a;
            pq.push({dist[ns + b], ns + b});
          }
        }
      } else {
        const int b = u - ns;
        for (int a = 0; a < ns; ++a)
          if (flow(a, b) > mass_tol) {
            double rc = -(cost(src[a], dst[b]) - pot_s[a] - pot_d[b]);
            if (rc < 0.0) rc = 0.0;
            if (du + rc < dist[a] - 1e-15) {
              dist[a] = du + rc;
              prev[a] = ns + b;
              pq.push({dist[a], a});
            }
          }
      }
    }

    // Closest unsaturated sink.
    int best = -1;
    for (int b = 0; b < nd; ++b)
      if (demand[b] > mass_tol && dist[ns + b] < inf && (best < 0 || dist[ns + b] < dist[ns + best]))
        best = b;
    if (best < 0) break;

    // Update potentials: pi_v += min(dist_v, dist_sink) keeps all reduced
    // costs nonnegative and zero along the shortest-path tree.
    const double dbest = dist[ns + best];
    for (int a = 0; a < ns; ++a)
      if (dist[a] < inf) pot_s[a] -= std::min(dist[a], dbest);
    for (int b = 0; b < nd; ++b)
      if (dist[ns + b] < inf) pot_d[b] += std::min(dist[ns + b], dbest);

    // Walk the predecessor chain sink -> ... -> seed source, collecting the
    // bottleneck, then augment. Alternates sink (>= ns) and source nodes.
    double bottleneck = demand[best];
    for (int node = ns + best; prev[node] != -1; node = prev[node]) {
      int p = prev[node];
      if (node >= ns) {
        if (prev[p] == -1) bottleneck = std::min(bottleneck, supply[p]);
      } else {
        bottleneck = std::min(bottleneck, flow(node, p - ns));
      }
    }
    int seed = -1;
    for (int node = ns + best; ; node = prev[node]) {
      int p = prev[node];
      if (p == -1) {
        seed = node;
        break;
      }
      if (node >= ns)
        flow(p, node - ns) += bottleneck;  // forward arc source -> sink
      else
        flow(node, p - ns) -= bottleneck;  // residual arc sink -> source
    }
    supply[seed] -= bottleneck;
    demand[best] -= bottleneck;
  }

  TransportPlan plan;
  for (int a = 0; a < ns; ++a)
    for (int b = 0; b < nd; ++b)
      if (flow(a, b) > mass_tol) {
        plan.cost += flow(a, b) * cost(src[a], dst[b]);
        plan.coupling.emplace_back(src[a], dst[b], flow(a, b));
      }
  plan.w2 = std::sqrt(std::max(0.0, plan.cost));
  for (int a = 0; a < ns; ++a) plan.dual_value += mu0[src[a]] * pot_s[a];
  for (int b = 0; b < nd; ++b) plan.dual_value += mu1[dst[b]] * pot_d[b];
  for (int a = 0; a < ns; ++a)
    for (int b = 0; b < nd; ++b)
      plan.dual_violation =
          std::max(plan.dual_violation, pot_s[a] + pot_d[b] - cost(src[a], dst[b]));
  return plan;
}

// 2-Wasserstein distance between probability vectors on a grid whose
// all-pairs d_H matrix is given; cost = d_H^2.
inline double wasserstein2(const MatrixXd& dH, const VectorXd& mu0, const VectorXd& mu1) {
  if (mu0.size() > 1024 || mu1.size() > 1024)
    throw std::invalid_argument("wasserstein2: instance too large for the exact LP");
  MatrixXd cost = dH.array().square();
  return optimal_transport(cost, mu0, mu1).w2;
}

}  // namespace folia::metrics

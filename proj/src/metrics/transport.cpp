/* Copyright 2026 The captrans Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "captrans/metrics/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "captrans/errors.hpp"

namespace captrans::metrics {
namespace {

struct Edge {
  std::size_t to;
  std::int64_t cap;
  double cost;
};

class FlowNetwork {
 public:
  explicit FlowNetwork(std::size_t n) : adj_(n) {}

  std::size_t add_edge(std::size_t from, std::size_t to, std::int64_t cap, double cost) {
    adj_[from].push_back(edges_.size());
    edges_.push_back(Edge{to, cap, cost});
    adj_[to].push_back(edges_.size());
    edges_.push_back(Edge{from, 0, -cost});
    return edges_.size() - 2;
  }

  // Bellman-Ford queue variant; residual costs may be negative on reverse
  // edges, and the residual graph never holds a negative cycle.
  double min_cost_flow(std::size_t s, std::size_t t, std::int64_t required) {
    const std::size_t n = adj_.size();
    double total = 0.0;
    std::int64_t sent = 0;
    while (sent < required) {
      std::vector<double> dist(n, std::numeric_limits<double>::infinity());
      std::vector<std::size_t> via(n, SIZE_MAX);
      std::vector<bool> queued(n, false);
      std::vector<std::size_t> queue{s};
      dist[s] = 0.0;
      queued[s] = true;
      for (std::size_t head = 0; head < queue.size(); ++head) {
        const std::size_t u = queue[head];
        queued[u] = false;
        for (std::size_t e : adj_[u]) {
          const Edge& edge = edges_[e];
          if (edge.cap <= 0) continue;
          const double nd = dist[u] + edge.cost;
          // Tolerance keeps round-off from cycling through zero-cost loops.
          if (nd < dist[edge.to] - 1e-12) {
            dist[edge.to] = nd;
            via[edge.to] = e;
            if (!queued[edge.to]) {
              queued[edge.to] = true;
              queue.push_back(edge.to);
            }
          }
        }
      }
      if (via[t] == SIZE_MAX) throw std::logic_error("transport network is infeasible");
      std::int64_t push = required - sent;
      for (std::size_t v = t; v != s; v = edges_[via[v] ^ 1].to) push = std::min(push, edges_[via[v]].cap);
      for (std::size_t v = t; v != s; v = edges_[via[v] ^ 1].to) {
        edges_[via[v]].cap -= push;
        edges_[via[v] ^ 1].cap += push;
        total += static_cast<double>(push) * edges_[via[v]].cost;
      }
      sent += push;
    }
    return total;
  }

  std::int64_t flow_on(std::size_t edge) const { return edges_[edge ^ 1].cap; }

 private:
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<Edge> edges_;
};

}  // namespace

TransportPlan solve_transport(const std::vector<std::int64_t>& supply, const std::vector<std::int64_t>& demand,
                              const std::vector<std::vector<double>>& cost) {
  const std::size_t m = supply.size();
  const std::size_t k = demand.size();
  if (m == 0 || k == 0) throw ConfigError("transport problem needs at least one source and one sink");
  if (cost.size() != m) throw ShapeError("cost matrix row count must equal the number of sources");
  for (const auto& row : cost) {
    if (row.size() != k) throw ShapeError("cost matrix column count must equal the number of sinks");
    for (double c : row) {
      if (!(c >= 0.0) || !std::isfinite(c)) throw ConfigError("transport costs must be finite and non-negative");
    }
  }
  for (auto v : supply) if (v <= 0) throw ConfigError("supplies must be positive");
  for (auto v : demand) if (v <= 0) throw ConfigError("demands must be positive");
  const std::int64_t total = std::accumulate(supply.begin(), supply.end(), std::int64_t{0});
  if (total != std::accumulate(demand.begin(), demand.end(), std::int64_t{0})) {
    throw ConfigError("supply and demand totals differ");
  }

  // Nodes: source, m suppliers, k consumers, sink.
  const std::size_t s = 0;
  const std::size_t t = m + k + 1;
  FlowNetwork net(m + k + 2);
  for (std::size_t i = 0; i < m; ++i) net.add_edge(s, 1 + i, supply[i], 0.0);
  for (std::size_t j = 0; j < k; ++j) net.add_edge(1 + m + j, t, demand[j], 0.0);
  std::vector<std::vector<std::size_t>> ids(m, std::vector<std::size_t>(k));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < k; ++j) ids[i][j] = net.add_edge(1 + i, 1 + m + j, total, cost[i][j]);
  }
  net.min_cost_flow(s, t, total);

  TransportPlan plan;
  plan.flow.assign(m, std::vector<std::int64_t>(k, 0));
  // Recompute the cost from the final flow so it does not carry the
  // cancellation error of augmenting along reverse edges.
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      plan.flow[i][j] = net.flow_on(ids[i][j]);
      plan.cost += static_cast<double>(plan.flow[i][j]) * cost[i][j];
    }
  }
  return plan;
}

}  // namespace captrans::metrics

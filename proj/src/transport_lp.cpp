#include "granuflow/transport_lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "granuflow/error.hpp"

namespace granuflow {

TransportSolution solve_transport(std::span<const double> supply, std::span<const double> demand,
                                  std::span<const double> cost) {
  const std::size_t n = supply.size();
  const std::size_t m = demand.size();
  if (cost.size() != n * m) {
    throw Error(ErrorKind::InvalidArgument, "transport cost matrix has wrong size");
  }
  TransportSolution solution;
  if (n == 0 || m == 0) return solution;

  const double total = std::accumulate(supply.begin(), supply.end(), 0.0);
  const double eps = 1e-14 * std::max(1.0, total);
  constexpr double kInf = std::numeric_limits<double>::infinity();

  std::vector<double> rem_supply(supply.begin(), supply.end());
  std::vector<double> rem_demand(demand.begin(), demand.end());
  std::vector<double> flow(n * m, 0.0);
  // Node ids: sources 0..n-1, sinks n..n+m-1. Potentials keep reduced costs
  // nonnegative; a source with remaining supply always has potential 0.
  std::vector<double> potential(n + m, 0.0);
  std::vector<double> dist(n + m);
  std::vector<std::size_t> parent(n + m);
  std::vector<char> done(n + m);

  auto remaining = [&] {
    double s = 0.0;
    for (double r : rem_supply) s += r > eps ? r : 0.0;
    return s;
  };

  while (remaining() > eps) {
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(done.begin(), done.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (rem_supply[i] > eps) {
        dist[i] = 0.0;
        parent[i] = i;
      }
    }
    std::size_t target = n + m;
    for (;;) {
      std::size_t u = n + m;
      double best = kInf;
      for (std::size_t v = 0; v < n + m; ++v) {
        if (!done[v] && dist[v] < best) {
          best = dist[v];
          u = v;
        }
      }
      if (u == n + m) break;
      done[u] = 1;
      if (u >= n && rem_demand[u - n] > eps) {
        target = u;
        break;
      }
      if (u < n) {
        for (std::size_t j = 0; j < m; ++j) {
          const std::size_t v = n + j;
          if (done[v]) continue;
          const double rc = std::max(0.0, cost[u * m + j] + potential[u] - potential[v]);
          if (dist[u] + rc < dist[v]) {
            dist[v] = dist[u] + rc;
            parent[v] = u;
          }
        }
      } else {
        const std::size_t j = u - n;
        for (std::size_t i = 0; i < n; ++i) {
          if (done[i] || flow[i * m + j] <= eps) continue;
          const double rc = std::max(0.0, -cost[i * m + j] + potential[u] - potential[i]);
          if (dist[u] + rc < dist[i]) {
            dist[i] = dist[u] + rc;
            parent[i] = u;
          }
        }
      }
    }
    if (target == n + m) {
      throw Error(ErrorKind::MassMismatch, "transport problem infeasible (unbalanced masses)");
    }
    const double reach = dist[target];
    for (std::size_t v = 0; v < n + m; ++v) potential[v] += std::min(dist[v], reach);

    // Bottleneck along the path.
    double push = rem_demand[target - n];
    std::size_t v = target;
    while (!(v < n && parent[v] == v)) {
      const std::size_t u = parent[v];
      if (u >= n) push = std::min(push, flow[v * m + (u - n)]);  // backward arc u(sink) -> v(source)
      v = u;
    }
    push = std::min(push, rem_supply[v]);
    rem_supply[v] -= push;
    rem_demand[target - n] -= push;
    v = target;
    while (!(v < n && parent[v] == v)) {
      const std::size_t u = parent[v];
      if (u < n) {
        flow[u * m + (v - n)] += push;
      } else {
        flow[v * m + (u - n)] -= push;
      }
      v = u;
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double g = flow[i * m + j];
      if (g > eps) {
        solution.flows.push_back({i, j, g});
        solution.cost += g * cost[i * m + j];
      }
    }
  }
  return solution;
}

}  // namespace granuflow

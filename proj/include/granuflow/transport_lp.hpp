#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace granuflow {

struct TransportFlow {
  std::size_t source;
  std::size_t target;
  double mass;
};

struct TransportSolution {
  double cost = 0.0;
  std::vector<TransportFlow> flows;
};

// Exact discrete transportation problem: min sum c_ij g_ij over g >= 0 with
// row sums `supply` and column sums `demand`. `cost` is row-major,
// supply.size() x demand.size(), entries >= 0. Successive shortest paths with
// Dijkstra on reduced costs; O((n + m) * n * m) in practice.
TransportSolution solve_transport(std::span<const double> supply, std::span<const double> demand,
                                  std::span<const double> cost);

}  // namespace granuflow

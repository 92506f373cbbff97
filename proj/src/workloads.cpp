#include "qbv/workloads.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace qbv {

void Graph::validate() const {
  if (num_vertices <= 0) {
    throw std::invalid_argument("Graph: num_vertices must be positive");
  }
  std::set<std::pair<int, int>> seen;
  for (const auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= num_vertices || v >= num_vertices) {
      throw std::invalid_argument("Graph: edge endpoint out of range");
    }
    if (u == v) throw std::invalid_argument("Graph: self-loop");
    const auto key = std::minmax(u, v);
    if (!seen.insert(key).second) {
      throw std::invalid_argument("Graph: duplicate edge");
    }
  }
}

Graph ring_graph(int n) {
  if (n < 3) throw std::invalid_argument("ring_graph: need at least 3 vertices");
  Graph g;
  g.num_vertices = n;
  g.edges.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g.edges.emplace_back(i, (i + 1) % n);
  g.validate();
  return g;
}

Circuit bell_circuit(Basis basis) {
  Circuit c{2, {Gate::h(0), Gate::cnot(0, 1)}};
  if (basis == Basis::X) {
    c.gates.push_back(Gate::h(0));
    c.gates.push_back(Gate::h(1));
  }
  return c;
}

SuccessPredicate bell_predicate() { return SuccessPredicate{2, {"00", "11"}}; }

int maxcut_value(std::string_view assignment, const Graph& graph) {
  graph.validate();
  if (static_cast<int>(assignment.size()) != graph.num_vertices) {
    throw std::invalid_argument(
        "maxcut_value: assignment width != number of vertices");
  }
  int cut = 0;
  for (const auto& [u, v] : graph.edges) {
    if (assignment[static_cast<std::size_t>(u)] !=
        assignment[static_cast<std::size_t>(v)]) {
      ++cut;
    }
  }
  return cut;
}

Circuit qaoa_circuit(const Graph& graph, const QaoaParams& params) {
  graph.validate();
  if (graph.num_vertices > kMaxQubits) {
    throw std::invalid_argument("qaoa_circuit: graph exceeds the qubit cap");
  }
  if (params.depth < 1) {
    throw std::invalid_argument("qaoa_circuit: depth must be >= 1");
  }
  Circuit c{graph.num_vertices, {}};
  for (int q = 0; q < graph.num_vertices; ++q) c.gates.push_back(Gate::h(q));
  for (int layer = 0; layer < params.depth; ++layer) {
    for (const auto& [u, v] : graph.edges) {
      c.gates.push_back(Gate::rzz(u, v, -params.gamma));
    }
    for (int q = 0; q < graph.num_vertices; ++q) {
      c.gates.push_back(Gate::rx(q, 2.0 * params.beta_angle));
    }
  }
  return c;
}

SuccessPredicate top_k_set(const OutcomeDistribution& dist, const Graph& graph,
                           int k, TopKRanking ranking) {
  dist.validate();
  graph.validate();
  if (graph.num_vertices != dist.width) {
    throw std::invalid_argument("top_k_set: graph/distribution width mismatch");
  }
  const auto n = static_cast<int>(dist.probs.size());
  if (k <= 0 || k > n) {
    throw std::invalid_argument("top_k_set: k must lie in [1, #outcomes]");
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> cuts(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    cuts[static_cast<std::size_t>(i)] = maxcut_value(dist.key(i), graph);
  }

  // Ascending index is the lexicographic tie-break in both rankings, because
  // basis-index order equals bitstring order under the global bit convention.
  if (ranking == TopKRanking::CutValueThenLex) {
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const int ca = cuts[static_cast<std::size_t>(a)];
      const int cb = cuts[static_cast<std::size_t>(b)];
      if (ca != cb) return ca > cb;
      return a < b;
    });
  } else {
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const double pa = dist.probs[a];
      const double pb = dist.probs[b];
      if (pa != pb) return pa > pb;
      const int ca = cuts[static_cast<std::size_t>(a)];
      const int cb = cuts[static_cast<std::size_t>(b)];
      if (ca != cb) return ca > cb;
      return a < b;
    });
  }

  SuccessPredicate pred;
  pred.width = dist.width;
  for (int i = 0; i < k; ++i) {
    pred.success_set.insert(dist.key(order[static_cast<std::size_t>(i)]));
  }
  return pred;
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n <= 0) throw std::invalid_argument("linspace: n must be positive");
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (int i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = lo + step * static_cast<double>(i);
  }
  out.back() = hi;
  return out;
}

QaoaParams grid_search_angles(const Graph& graph, int k,
                              const std::vector<double>& gamma_grid,
                              const std::vector<double>& beta_grid,
                              GridObjective objective, TopKRanking ranking) {
  graph.validate();
  if (gamma_grid.empty() || beta_grid.empty()) {
    throw std::invalid_argument("grid_search_angles: empty grid");
  }

  double best = -1.0;
  QaoaParams best_params{gamma_grid.front(), beta_grid.front(), 1};
  for (double gamma : gamma_grid) {
    for (double beta : beta_grid) {
      const QaoaParams params{gamma, beta, 1};
      const OutcomeDistribution dist =
          distribution(simulate(qaoa_circuit(graph, params)));
      double value = 0.0;
      if (objective == GridObjective::TopKMass) {
        const SuccessPredicate pred = top_k_set(dist, graph, k, ranking);
        for (const std::string& y : pred.success_set) value += dist.prob(y);
      } else {
        for (Eigen::Index i = 0; i < dist.probs.size(); ++i) {
          value += dist.probs[i] * maxcut_value(dist.key(i), graph);
        }
      }
      // Ties break toward the smaller gamma, then the smaller beta,
      // independent of the order the grids were supplied in.
      const bool improves =
          value > best ||
          (value == best && (gamma < best_params.gamma ||
                             (gamma == best_params.gamma &&
                              beta < best_params.beta_angle)));
      if (improves) {
        best = value;
        best_params = params;
      }
    }
  }
  return best_params;
}

DualBasisVerdict verify_bell_dual_basis(Sampler& z_sampler, Sampler& x_sampler,
                                        const PriorSpec& z_prior,
                                        const PriorSpec& x_prior,
                                        const VerifierConfig& config) {
  DualBasisVerdict verdict{
      sequential_verify(z_sampler, bell_predicate(), z_prior, config),
      sequential_verify(x_sampler, bell_predicate(), x_prior, config),
      Decision::FAIL, 0};
  verdict.decision = (verdict.z_report.decision == Decision::PASS &&
                      verdict.x_report.decision == Decision::PASS)
                         ? Decision::PASS
                         : Decision::FAIL;
  verdict.cost = std::max(verdict.z_report.n_stop, verdict.x_report.n_stop);
  return verdict;
}

}  // namespace qbv

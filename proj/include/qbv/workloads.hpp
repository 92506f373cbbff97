#pragma once

#include <string_view>
#include <utility>
#include <vector>

#include "qbv/bayes.hpp"
#include "qbv/sim.hpp"

namespace qbv {

// Undirected graph given as an explicit edge list.
struct Graph {
  int num_vertices = 0;
  std::vector<std::pair<int, int>> edges;

  void validate() const;
};

// The n-cycle 0-1-...-(n-1)-0.
Graph ring_graph(int n);

// Bell pair preparation; the X variant appends H to both qubits so that
// X-basis correlations are read out in the computational frame.
Circuit bell_circuit(Basis basis);

// Success in either basis is a correlated readout: y in {00, 11}, applied in
// the measured frame.
SuccessPredicate bell_predicate();

// Number of edges cut by the assignment (endpoints with differing bits).
int maxcut_value(std::string_view assignment, const Graph& graph);

struct QaoaParams {
  double gamma;
  double beta_angle;
  int depth = 1;
};

// Depth-p MaxCut ansatz: H on all qubits, then per layer a cost phase
// RZZ(-gamma) on every edge followed by a mixer RX(2*beta) on every qubit.
// With RZZ(t) = diag(e^{-it/2}, e^{+it/2}, e^{+it/2}, e^{-it/2}) the cost
// layer equals e^{-i*gamma*C(z)} up to a global phase and the mixer equals
// e^{-i*beta*X}, the standard phase-separation/mixer pair.
Circuit qaoa_circuit(const Graph& graph, const QaoaParams& params);

// Ranking used to pick the K "best" outcomes.
//
// CutValueThenLex ranks by MaxCut value descending with lexicographic
// (equivalently basis-index) ascending tie-break; membership then depends
// only on the graph. ProbThenCutThenLex ranks by ideal probability
// descending, tie-broken by cut value descending then lexicographic
// ascending. The two differ on the ring: the cut ranking admits
// low-probability strings among the cut ties, and it is the one whose Top-5
// mass the acceptance suite pins.
enum class TopKRanking { CutValueThenLex, ProbThenCutThenLex };

// The top-k outcomes of `dist` under the chosen ranking, as a success set.
SuccessPredicate top_k_set(const OutcomeDistribution& dist, const Graph& graph,
                           int k,
                           TopKRanking ranking = TopKRanking::CutValueThenLex);

// Objective maximized by the angle grid search. TopKMass is the ideal
// success mass of the top-k set at each grid point; ExpectedCut is the mean
// MaxCut value under the ideal distribution.
enum class GridObjective { TopKMass, ExpectedCut };

std::vector<double> linspace(double lo, double hi, int n);

// Exhaustive search over the angle grids (depth 1). Ties break toward the
// smaller gamma, then the smaller beta.
QaoaParams grid_search_angles(
    const Graph& graph, int k, const std::vector<double>& gamma_grid,
    const std::vector<double>& beta_grid,
    GridObjective objective = GridObjective::TopKMass,
    TopKRanking ranking = TopKRanking::CutValueThenLex);

struct DualBasisVerdict {
  VerdictReport z_report;
  VerdictReport x_report;
  Decision decision;  // PASS iff both basis reports PASS
  long long cost;     // max of the two stopping times
};

// Runs the sequential rule independently per basis (separate samplers,
// priors, budgets); PASS requires both bases to PASS and the per-run cost is
// max(n_Z, n_X).
DualBasisVerdict verify_bell_dual_basis(Sampler& z_sampler, Sampler& x_sampler,
                                        const PriorSpec& z_prior,
                                        const PriorSpec& x_prior,
                                        const VerifierConfig& config);

}  // namespace qbv

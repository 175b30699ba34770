#include <algorithm>

#include "manisync/runner.hpp"

namespace manisync {

namespace {

const char* const kKuramotoSync = R"(name: kuramoto_sync
description: Kuramoto oscillators on the complete graph synchronize.
manifold: circle
agents: 10
seed: 1
init: {kind: random}
graphs:
  all: {kind: complete}
flow: {kind: gradient, alpha: 1.0}
integrator: {h: 0.01, t_end: 50.0, log_stride: 10}
)";

const char* const kRingConsensus = R"(name: ring_consensus
description: A ring graph holds a regular consensus state with constant separation.
manifold: circle
agents: 7
seed: 2
init: {kind: ring, winding: 1, noise: 0.05}
graphs:
  ring: {kind: ring}
flow: {kind: gradient, alpha: 1.0}
integrator: {h: 0.01, t_end: 40.0, log_stride: 10}
)";

// Two perfect matchings whose union is a 6-ring. Neither phase graph has the
// regular ring state as an equilibrium, but their average does, and it is
// stable there; the periodic switching settles on an orbit around it.
const char* const kCircleLimitCycle = R"(name: circle_limit_cycle
description: Switching between two disconnected undirected graphs sustains a limit cycle.
manifold: circle
agents: 6
seed: 3
init: {kind: ring, winding: 1, noise: 0.3}
graphs:
  even: {kind: edges, edges: [[0, 1], [2, 3], [4, 5]], undirected: true}
  odd: {kind: edges, edges: [[1, 2], [3, 4], [5, 0]], undirected: true}
schedule:
  sequence: [[even, 1.0], [odd, 1.0]]
  periodic: true
  delta: 1.0
  horizon: 2.0
flow: {kind: gradient, alpha: 1.0}
integrator: {h: 0.01, t_end: 500.0, log_stride: 5, keep_states: false}
)";

const char* const kSonSync = R"(name: son_sync
description: Rotations in SO(3) synchronize on the complete graph.
manifold: so(3)
agents: 10
seed: 4
init: {kind: random}
graphs:
  all: {kind: complete}
flow: {kind: gradient, alpha: 1.0}
integrator: {h: 0.01, t_end: 30.0, log_stride: 10}
)";

const char* const kSonBalanceAntipodal = R"(name: son_balance_antipodal
description: Two rotations in SO(4) pushed apart reach Q2 = -Q1, a balanced pair.
manifold: so(4)
agents: 2
seed: 5
init: {kind: random}
graphs:
  pair: {kind: complete}
flow: {kind: gradient, alpha: -1.0}
integrator: {h: 0.01, t_end: 30.0, log_stride: 10}
)";

const char* const kGrassBalance = R"(name: grass_balance
description: Two lines in the plane pushed apart become orthogonal.
manifold: grass(1,2)
agents: 2
seed: 6
init: {kind: random}
graphs:
  pair: {kind: complete}
flow: {kind: gradient, alpha: -1.0}
integrator: {h: 0.01, t_end: 30.0, log_stride: 10}
)";

// Each phase graph is a directed path fragment and never strongly connected;
// over one period the union is the directed 4-cycle.
const char* const kEstimatorDirectedSwitching = R"(name: estimator_directed_switching
description: Estimator-based synchronization under a switching directed schedule.
manifold: so(3)
agents: 4
seed: 7
init: {kind: random}
graphs:
  first: {kind: edges, edges: [[0, 1], [1, 2]]}
  second: {kind: edges, edges: [[2, 3], [3, 0]]}
schedule:
  sequence: [[first, 0.5], [second, 0.5]]
  periodic: true
  delta: 0.5
  horizon: 2.0
flow: {kind: estimator_sync, beta: 1.0, gamma_s: 1.0}
integrator: {h: 0.01, t_end: 120.0, log_stride: 10}
tolerances: {sync: 1.0e-5}
)";

// Both phase graphs are balanced, so the estimator average is conserved.
const char* const kEstimatorBalancedSwitching = R"(name: estimator_balanced_switching
description: Estimator synchronization under switching balanced digraphs.
manifold: so(3)
agents: 4
seed: 8
init: {kind: random}
graphs:
  left: {kind: edges, edges: [[0, 1], [1, 2], [2, 0]]}
  right: {kind: edges, edges: [[1, 2], [2, 3], [3, 1]]}
schedule:
  sequence: [[left, 0.5], [right, 0.5]]
  periodic: true
  delta: 0.5
  horizon: 2.0
flow: {kind: estimator_sync, beta: 1.0, gamma_s: 1.0}
integrator: {h: 0.01, t_end: 80.0, log_stride: 10}
tolerances: {sync: 1.0e-5}
)";

const char* const kEstimatorBalancing = R"(name: estimator_balancing
description: Estimator-based anti-consensus on a directed 3-cycle spreads the agents out.
manifold: circle
agents: 3
seed: 9
init: {kind: random}
graphs:
  cycle: {kind: cycle}
flow: {kind: estimator_anti, beta: 1.0, gamma_b: -1.0}
integrator: {h: 0.01, t_end: 60.0, log_stride: 10}
)";

const char* const kLocalFrameEquivalence = R"(name: local_frame_equivalence
description: Estimator synchronization in SO(3) written with relative attitudes only.
manifold: so(3)
agents: 4
seed: 10
init: {kind: random}
graphs:
  all: {kind: complete}
flow: {kind: local_frame_son, beta: 1.0, gamma_s: 1.0}
integrator: {h: 0.005, t_end: 5.0, log_stride: 20}
)";

const char* const kVicsekDiscrete = R"(name: vicsek_discrete
description: Discrete-time update where each agent jumps to the mean of its neighborhood.
manifold: circle
agents: 10
seed: 11
init: {kind: random}
graphs:
  ring: {kind: ring}
flow: {kind: vicsek}
integrator: {h: 1.0, t_end: 200.0, log_stride: 1}
)";

const char* const kRandomDigraphSweep = R"(name: random_digraph_sweep
description: Gradient flow in SO(3) under randomly redrawn directed graphs.
manifold: so(3)
agents: 6
seed: 12
init: {kind: random}
graphs:
  unused: {kind: complete}
schedule:
  kind: random
  p: 0.3
  t_min: 0.5
  t_max: 2.0
  horizon: 2.0
flow: {kind: gradient, alpha: 1.0}
integrator: {h: 0.01, t_end: 100.0, log_stride: 20}
)";

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = {
      {"kuramoto_sync", kKuramotoSync},
      {"ring_consensus", kRingConsensus},
      {"circle_limit_cycle", kCircleLimitCycle},
      {"son_sync", kSonSync},
      {"son_balance_antipodal", kSonBalanceAntipodal},
      {"grass_balance", kGrassBalance},
      {"estimator_directed_switching", kEstimatorDirectedSwitching},
      {"estimator_balanced_switching", kEstimatorBalancedSwitching},
      {"estimator_balancing", kEstimatorBalancing},
      {"local_frame_equivalence", kLocalFrameEquivalence},
      {"vicsek_discrete", kVicsekDiscrete},
      {"random_digraph_sweep", kRandomDigraphSweep},
  };
  return all;
}

Scenario load_preset(const std::string& name) {
  const auto& all = presets();
  auto it = std::find_if(all.begin(), all.end(),
                         [&](const Preset& p) { return p.name == name; });
  if (it == all.end()) throw Error(ErrorCode::InvalidArgument, "unknown preset '" + name + "'");
  return parse_scenario(it->text);
}

}  // namespace manisync

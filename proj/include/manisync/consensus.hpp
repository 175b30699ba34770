#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "manisync/graph.hpp"
#include "manisync/manifold.hpp"

namespace manisync {

/// Positions of N agents plus optional estimator variables in the embedding
/// space (same matrix shape as the positions).
struct SwarmState {
  ManifoldDescriptor descriptor;
  std::vector<ManifoldPoint> positions;
  std::optional<std::vector<Eigen::MatrixXd>> estimators;

  int size() const { return static_cast<int>(positions.size()); }

  /// Throws Error(DimensionMismatch) if positions disagree with the
  /// descriptor or the estimators have the wrong count or shape.
  void validate() const;
};

/// Default tolerance for the configuration predicates (absolute, on
/// <c, b_k> values).
inline constexpr double kPredicateTol = 1e-6;

/// Unit-weight centroid of the positions.
Eigen::MatrixXd swarm_centroid(const SwarmState& s);

/// P_L = 1/(2N^2) sum_{j,k} a_jk <y_j, y_k>.
double cost_PL(const WeightedDigraph& g, const SwarmState& s);
/// Same quantity through the in-Laplacian: xi_2 - 1/(2N^2) sum l_jk <y_j, y_k>.
double cost_PL_laplacian(const WeightedDigraph& g, const SwarmState& s);
/// P = ||C_e||^2 / 2.
double cost_P(const SwarmState& s);

/// Largest pairwise chordal distance.
double sync_error(const SwarmState& s);
bool is_synchronized(const SwarmState& s, double tol);

/// Each agent maximizes <c, b_k> with b_k = sum_j a_jk y_j (consensus), or
/// minimizes it (anti-consensus), within `tol`. Agents with b_k = 0 pass.
bool is_consensus(const WeightedDigraph& g, const SwarmState& s,
                  double tol = kPredicateTol);
bool is_anti_consensus(const WeightedDigraph& g, const SwarmState& s,
                       double tol = kPredicateTol);

/// Closed-form test that <c, C_e> is constant over the manifold:
/// ||C_e|| <= tol on the circle and SO(n), ||C_e - (p/n) I|| <= tol on
/// Grass(p, n).
bool is_balanced_config(const SwarmState& s, double tol = kPredicateTol);

/// W = 1/2 sum ||x_k||^2, or 0 without estimators.
double estimator_energy(const SwarmState& s);

}  // namespace manisync

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "manisync/consensus.hpp"
#include "manisync/graph.hpp"
#include "manisync/manifold.hpp"

namespace manisync {

/// alpha > 0 drives towards consensus, alpha < 0 towards anti-consensus.
struct GradientFlow {
  double alpha = 1.0;
};
struct EstimatorSync {
  double beta = 1.0;
  double gamma_s = 1.0;
};
struct EstimatorAntiConsensus {
  double beta = 1.0;
  double gamma_b = -1.0;
};
/// SO(n) only: estimator synchronization written in body frames, using
/// relative attitudes Q_k^T Q_j along edges.
struct LocalFrameSOnSync {
  double beta = 1.0;
  double gamma_s = 1.0;
};
struct VicsekDiscrete {};

using FlowSpec = std::variant<GradientFlow, EstimatorSync, EstimatorAntiConsensus,
                              LocalFrameSOnSync, VicsekDiscrete>;

/// Throws Error(InvalidArgument) on sign-constraint violations
/// (beta > 0, gamma_s > 0, gamma_b < 0, alpha != 0).
void validate_flow(const FlowSpec& flow);
std::string flow_name(const FlowSpec& flow);

enum class Method { Euler, RK4 };

struct IntegratorConfig {
  double h = 0.01;
  double t_start = 0.0;
  double t_end = 10.0;
  Method method = Method::RK4;
  int log_stride = 1;
  std::uint64_t seed = 0;
  /// Abort threshold on the membership error after re-projection.
  double drift_tol = 1e-6;
  /// Keep a state snapshot at every logged time (the final state is always
  /// kept).
  bool keep_states = true;
  /// Continue from a saved state: estimator initialization rules are skipped.
  bool resume = false;
};

struct MetricRecord {
  double t = 0.0;
  double P_L = 0.0;
  double P = 0.0;
  double sync_error = 0.0;
  double W = 0.0;
  double centroid_norm = 0.0;
  /// Largest membership error of the step result before re-projection.
  double manifold_drift = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<SwarmState> states;
  std::vector<MetricRecord> metrics;
  std::optional<SwarmState> final_state;
  double final_time = 0.0;
  std::optional<std::string> abort_reason;

  bool aborted() const { return abort_reason.has_value(); }
};

using Tangents = std::vector<Eigen::MatrixXd>;

/// ydot_k = alpha Proj_k(sum_j (a_jk + a_kj)(y_j - y_k)).
Tangents gradient_rhs(const WeightedDigraph& g, const SwarmState& s, double alpha);
/// ydot_k = 2 alpha Proj_k(sum_j a_jk (y_j - y_k)); equals gradient_rhs on
/// undirected graphs and is what the integrator applies to directed ones.
Tangents consensus_rhs(const WeightedDigraph& g, const SwarmState& s, double alpha);

/// thetadot_k = 2 alpha sum_j a_jk sin(theta_j - theta_k).
Eigen::VectorXd circle_rhs(const WeightedDigraph& g, const Eigen::VectorXd& theta,
                           double alpha);
/// Body velocities Q_k^T Qdot_k = alpha sum_j a_jk (Q_k^T Q_j - Q_j^T Q_k).
std::vector<Eigen::MatrixXd> so_n_rhs(const WeightedDigraph& g,
                                      const std::vector<Eigen::MatrixXd>& q,
                                      double alpha);
/// Pidot_k = 2 alpha sum_j a_jk (Pi_k Pi_j Piperp_k + Piperp_k Pi_j Pi_k).
std::vector<Eigen::MatrixXd> grassmann_projector_rhs(
    const WeightedDigraph& g, const std::vector<Eigen::MatrixXd>& pi, double alpha);
/// Horizontal lift of the projector flow:
/// Ydot_k = 2 alpha sum_j a_jk (Y_j M - Y_k M^T M), M = Y_j^T Y_k.
std::vector<Eigen::MatrixXd> grassmann_basis_rhs(const WeightedDigraph& g,
                                                 const std::vector<Eigen::MatrixXd>& y,
                                                 double alpha);

struct EstimatorRates {
  std::vector<Eigen::MatrixXd> dx;
  Tangents dy;
};

/// xdot_k = beta sum_j a_jk (x_j - x_k), ydot_k = gamma_s Proj_k(x_k).
EstimatorRates estimator_sync_rhs(const WeightedDigraph& g, const SwarmState& s,
                                  double beta, double gamma_s);
/// ydot_k = gamma_b Proj_k(x_k), xdot_k = beta sum_j a_jk (x_j - x_k) + ydot_k.
EstimatorRates estimator_anti_rhs(const WeightedDigraph& g, const SwarmState& s,
                                  double beta, double gamma_b);

/// Q_k^T Q_j keyed by (k, j), one entry per edge j -> k.
using RelativePositions = std::map<std::pair<int, int>, Eigen::MatrixXd>;

RelativePositions measure_relative_positions(const WeightedDigraph& g,
                                             const std::vector<Eigen::MatrixXd>& q);

struct LocalFrameRates {
  std::vector<Eigen::MatrixXd> dz;
  /// Q_k^T Qdot_k.
  std::vector<Eigen::MatrixXd> body;
};

/// Omega_k = (gamma_s / 2)(Z_k - Z_k^T),
/// Zdot_k = Omega_k^T Z_k + beta sum_j a_jk ((Q_k^T Q_j) Z_j - Z_k).
/// Throws Error(MissingRelativePosition) if an edge has no measurement.
LocalFrameRates local_frame_son_rhs(const WeightedDigraph& g,
                                    const std::vector<Eigen::MatrixXd>& z,
                                    const RelativePositions& rel, double beta,
                                    double gamma_s);

/// Every agent jumps to the IAM of itself (weight 1) and its in-neighbors;
/// agents whose IAM is not unique stay put.
SwarmState vicsek_step(const WeightedDigraph& g, const SwarmState& s);

/// Fixed-step integration over a graph schedule. The graph active at each
/// step midpoint is used for the whole step.
Trajectory integrate(const FlowSpec& flow, const GraphSchedule& schedule,
                     const SwarmState& init, const IntegratorConfig& cfg);

/// Metrics of one state against graph g.
MetricRecord measure(const WeightedDigraph& g, const SwarmState& s, double t,
                     double drift);

/// Uniform initialization of estimators in [-r, r]^m.
std::vector<Eigen::MatrixXd> random_estimators(const ManifoldDescriptor& d, int n,
                                               std::uint64_t seed);

}  // namespace manisync

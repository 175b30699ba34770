#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "manisync/error.hpp"

namespace manisync {

/// Weighted digraph on `n` vertices. `weights()(j, k)` is the weight of the
/// edge j -> k (row = sender, column = receiver). Diagonal is zero.
class WeightedDigraph {
 public:
  /// Throws Error(InvalidArgument) on negative weights, non-zero diagonal,
  /// non-square or empty matrices.
  explicit WeightedDigraph(Eigen::MatrixXd weights);

  static WeightedDigraph empty(int n);

  int size() const noexcept { return static_cast<int>(weights_.rows()); }
  const Eigen::MatrixXd& weights() const noexcept { return weights_; }
  double weight(int from, int to) const { return weights_(from, to); }
  bool has_edge(int from, int to) const { return weights_(from, to) != 0.0; }

  bool operator==(const WeightedDigraph& other) const {
    return weights_ == other.weights_;
  }

 private:
  Eigen::MatrixXd weights_;
};

struct Degrees {
  Eigen::VectorXd in;   // column sums
  Eigen::VectorXd out;  // row sums
};

enum class LaplacianKind { In, Out };

struct GraphClass {
  bool undirected = false;
  bool bidirectional = false;
  bool balanced = false;
};

struct Connectivity {
  bool strong = false;
  bool weak = false;
};

Degrees degrees(const WeightedDigraph& g);

/// In-Laplacian D_in - A (zero column sums) or out-Laplacian D_out - A (zero
/// row sums).
Eigen::MatrixXd laplacian(const WeightedDigraph& g, LaplacianKind kind);

/// Balanced comparison is exact when every weight is an integer, otherwise
/// uses a 1e-12 relative tolerance on degree sums.
GraphClass classify(const WeightedDigraph& g);

Connectivity connectivity(const WeightedDigraph& g);

/// True iff every vertex is reachable from `root` along directed edges.
bool reaches_all(const WeightedDigraph& g, int root);

// Generators.
WeightedDigraph complete_graph(int n, double weight = 1.0);
WeightedDigraph ring_graph(int n, double weight = 1.0);
WeightedDigraph directed_cycle(int n, double weight = 1.0);
/// Independent Bernoulli(p) unit weights on every off-diagonal entry.
WeightedDigraph random_digraph(int n, double p, std::uint64_t seed);

/// Piecewise-constant time-varying graph. Segment i is active on
/// [start_i, start_{i+1}); the last one runs until `end_time`. When `periodic`
/// is set the pattern on [start_0, end_time) repeats forever.
class GraphSchedule {
 public:
  struct Segment {
    double start;
    WeightedDigraph graph;
  };

  /// Throws Error(InvalidArgument) on unsorted starts, mismatched sizes,
  /// weights below `delta`, or non-positive delta/horizon.
  GraphSchedule(std::vector<Segment> segments, double delta, double horizon,
                std::optional<double> end_time = std::nullopt,
                bool periodic = false);

  static GraphSchedule constant(WeightedDigraph g, double delta = 1e-9,
                                double horizon = 1.0);

  int size() const { return segments_.front().graph.size(); }
  double delta() const noexcept { return delta_; }
  double horizon() const noexcept { return horizon_; }
  double start_time() const { return segments_.front().start; }
  /// +infinity for open-ended or periodic schedules.
  double coverage_end() const;
  bool periodic() const noexcept { return periodic_; }
  const std::vector<Segment>& segments() const noexcept { return segments_; }
  std::optional<double> end_time() const noexcept { return end_time_; }

  /// Graph active at time t. Throws InsufficientCoverage outside coverage.
  const WeightedDigraph& at(double t) const;

  /// Entry-wise integral of the weights over [t1, t2], before thresholding.
  Eigen::MatrixXd raw_integral(double t1, double t2) const;

 private:
  std::vector<Segment> segments_;
  double delta_;
  double horizon_;
  std::optional<double> end_time_;
  bool periodic_;
};

/// Time-integrated graph over [t1, t2]: integrals below delta are dropped.
WeightedDigraph integrated_graph(const GraphSchedule& s, double t1, double t2);

struct UniformConnectivity {
  bool connected = false;
  std::optional<int> root;
};

/// Checks the window [t, t + horizon] for every t in `grid`. Returns the
/// lowest-index vertex that reaches everyone in all windows.
UniformConnectivity is_uniformly_connected(const GraphSchedule& s,
                                           const std::vector<double>& grid);

}  // namespace manisync

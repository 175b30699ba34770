#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "manisync/consensus.hpp"
#include "manisync/dynamics.hpp"
#include "manisync/graph.hpp"
#include "manisync/manifold.hpp"

namespace manisync {

struct Issue {
  int line = 0;  ///< 1-based; 0 when no location applies
  std::string message;
};

/// Parse or validation failure carrying every issue found.
class ScenarioError : public Error {
 public:
  explicit ScenarioError(std::vector<Issue> issues);
  const std::vector<Issue>& issues() const noexcept { return issues_; }

 private:
  std::vector<Issue> issues_;
};

enum class InitKind { Random, Ring, Explicit, File };
enum class EstimatorInitKind { Auto, Random, Positions, Explicit };
enum class GraphKind { Complete, Ring, Cycle, Random, Matrix, Edges };
enum class ScheduleKind { Constant, Sequence, Random };

struct InitSpec {
  InitKind kind = InitKind::Random;
  /// Ring: consecutive separation chi, or 2 pi winding / N when winding is set.
  std::optional<double> chi;
  std::optional<int> winding;
  double phase = 0.0;
  /// Gaussian perturbation of ring angles.
  double noise = 0.0;
  /// Explicit: angles on the circle, row-major matrices otherwise.
  std::vector<double> angles;
  std::vector<std::vector<double>> matrices;
  /// File: a final_state.json written by a previous run.
  std::string path;
};

struct EstimatorSpec {
  EstimatorInitKind kind = EstimatorInitKind::Auto;
  std::vector<std::vector<double>> values;
};

struct GraphSpec {
  std::string name;
  GraphKind kind = GraphKind::Complete;
  double weight = 1.0;
  double p = 0.5;
  std::optional<std::uint64_t> seed;
  std::vector<std::vector<double>> weights;
  std::vector<std::pair<int, int>> edges;
  bool undirected = false;
  int line = 0;
};

struct ScheduleSpec {
  ScheduleKind kind = ScheduleKind::Constant;
  std::string graph;
  std::vector<std::pair<std::string, double>> sequence;
  bool periodic = false;
  double delta = 1e-9;
  std::optional<double> horizon;
  /// Random switching: a_jk ~ Bernoulli(p), each graph held for a time
  /// uniform in [t_min, t_max].
  double p = 0.5;
  double t_min = 1.0;
  double t_max = 1.0;
  std::optional<std::uint64_t> seed;
  int line = 0;
};

struct Tolerances {
  double sync = 1e-6;
  double predicate = kPredicateTol;
  double drift = 1e-6;
};

struct Scenario {
  std::string name;
  std::string description;
  ManifoldDescriptor manifold;
  int agents = 0;
  std::uint64_t seed = 0;
  InitSpec init;
  EstimatorSpec estimators;
  std::vector<GraphSpec> graphs;
  ScheduleSpec schedule;
  FlowSpec flow = GradientFlow{};
  IntegratorConfig integrator;
  /// Unset: start at the schedule start, or at the saved time for file init.
  std::optional<double> t_start;
  Tolerances tolerances;
  std::string output_dir;
  /// Directory used to resolve relative init file paths.
  std::string base_dir = ".";
};

/// Parses the YAML scenario format. Throws ScenarioError listing every issue
/// with its line.
Scenario parse_scenario(const std::string& text, const std::string& base_dir = ".");
Scenario load_scenario(const std::string& path);
/// Canonical YAML text; parse_scenario(to_text(s)) reproduces s.
std::string to_text(const Scenario& s);

/// Parses "circle", "so(3)", "grass(2,4)".
ManifoldDescriptor parse_manifold(const std::string& name);

WeightedDigraph build_graph(const Scenario& s, const GraphSpec& g);
GraphSchedule build_schedule(const Scenario& s);

struct InitialState {
  SwarmState state;
  double time = 0.0;
  bool resumed = false;
};
InitialState build_initial_state(const Scenario& s);

struct SavedState {
  SwarmState state;
  double time = 0.0;
  std::uint64_t seed = 0;
};
SavedState read_final_state(const std::string& path);
SavedState parse_final_state(const std::string& json_text);

}  // namespace manisync

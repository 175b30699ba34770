#include "manisync/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace manisync {

WeightedDigraph::WeightedDigraph(Eigen::MatrixXd weights)
    : weights_(std::move(weights)) {
  if (weights_.rows() == 0 || weights_.rows() != weights_.cols()) {
    throw Error(ErrorCode::InvalidArgument,
                "adjacency matrix must be square with at least one vertex");
  }
  for (Eigen::Index j = 0; j < weights_.rows(); ++j) {
    if (weights_(j, j) != 0.0) {
      throw Error(ErrorCode::InvalidArgument,
                  "adjacency matrix must have a zero diagonal");
    }
    for (Eigen::Index k = 0; k < weights_.cols(); ++k) {
      if (!(weights_(j, k) >= 0.0) || !std::isfinite(weights_(j, k))) {
        throw Error(ErrorCode::InvalidArgument,
                    "adjacency weights must be finite and non-negative");
      }
    }
  }
}

WeightedDigraph WeightedDigraph::empty(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "graph needs n >= 1");
  return WeightedDigraph(Eigen::MatrixXd::Zero(n, n));
}

Degrees degrees(const WeightedDigraph& g) {
  return {g.weights().colwise().sum().transpose(), g.weights().rowwise().sum()};
}

Eigen::MatrixXd laplacian(const WeightedDigraph& g, LaplacianKind kind) {
  const Degrees d = degrees(g);
  const Eigen::VectorXd& diag = kind == LaplacianKind::In ? d.in : d.out;
  Eigen::MatrixXd L = -g.weights();
  L.diagonal() += diag;
  return L;
}

GraphClass classify(const WeightedDigraph& g) {
  const Eigen::MatrixXd& A = g.weights();
  const int n = g.size();
  GraphClass c;
  c.undirected = A == A.transpose();
  c.bidirectional = true;
  bool integral = true;
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if ((A(j, k) != 0.0) != (A(k, j) != 0.0)) c.bidirectional = false;
      if (A(j, k) != std::round(A(j, k))) integral = false;
    }
  }
  const Degrees d = degrees(g);
  c.balanced = true;
  for (int k = 0; k < n; ++k) {
    const double diff = std::abs(d.in(k) - d.out(k));
    const double tol =
        integral ? 0.0 : 1e-12 * std::max({1.0, d.in(k), d.out(k)});
    if (diff > tol) c.balanced = false;
  }
  return c;
}

namespace {

std::vector<bool> reachable_from(const Eigen::MatrixXd& support, int root) {
  const int n = static_cast<int>(support.rows());
  std::vector<bool> seen(n, false);
  std::vector<int> stack{root};
  seen[root] = true;
  while (!stack.empty()) {
    const int j = stack.back();
    stack.pop_back();
    for (int k = 0; k < n; ++k) {
      if (!seen[k] && support(j, k) != 0.0) {
        seen[k] = true;
        stack.push_back(k);
      }
    }
  }
  return seen;
}

bool all_true(const std::vector<bool>& v) {
  return std::all_of(v.begin(), v.end(), [](bool b) { return b; });
}

}  // namespace

bool reaches_all(const WeightedDigraph& g, int root) {
  return all_true(reachable_from(g.weights(), root));
}

Connectivity connectivity(const WeightedDigraph& g) {
  Connectivity c;
  c.strong = true;
  for (int j = 0; j < g.size() && c.strong; ++j) c.strong = reaches_all(g, j);
  const Eigen::MatrixXd sym = g.weights() + g.weights().transpose();
  c.weak = all_true(reachable_from(sym, 0));
  return c;
}

namespace {

void check_generator(int n, double weight) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "graph needs n >= 1");
  if (!(weight > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "edge weight must be positive");
  }
}

}  // namespace

WeightedDigraph complete_graph(int n, double weight) {
  check_generator(n, weight);
  Eigen::MatrixXd A = Eigen::MatrixXd::Constant(n, n, weight);
  A.diagonal().setZero();
  return WeightedDigraph(std::move(A));
}

WeightedDigraph ring_graph(int n, double weight) {
  check_generator(n, weight);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  if (n >= 2) {
    for (int k = 0; k < n; ++k) {
      const int next = (k + 1) % n;
      A(k, next) = weight;
      A(next, k) = weight;
    }
  }
  return WeightedDigraph(std::move(A));
}

WeightedDigraph directed_cycle(int n, double weight) {
  check_generator(n, weight);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  if (n >= 2) {
    for (int k = 0; k < n; ++k) A(k, (k + 1) % n) = weight;
  }
  return WeightedDigraph(std::move(A));
}

WeightedDigraph random_digraph(int n, double p, std::uint64_t seed) {
  check_generator(n, 1.0);
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "edge probability must be in [0, 1]");
  }
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if (j != k && coin(rng)) A(j, k) = 1.0;
    }
  }
  return WeightedDigraph(std::move(A));
}

// ---------------------------------------------------------------------------

GraphSchedule::GraphSchedule(std::vector<Segment> segments, double delta,
                             double horizon, std::optional<double> end_time,
                             bool periodic)
    : segments_(std::move(segments)),
      delta_(delta),
      horizon_(horizon),
      end_time_(end_time),
      periodic_(periodic) {
  if (segments_.empty()) {
    throw Error(ErrorCode::InvalidArgument, "schedule needs at least one segment");
  }
  if (!(delta_ > 0.0) || !(horizon_ > 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "schedule delta and horizon must be positive");
  }
  const int n = segments_.front().graph.size();
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const Segment& s = segments_[i];
    if (s.graph.size() != n) {
      throw Error(ErrorCode::InvalidArgument,
                  "all schedule segments must have the same vertex count");
    }
    if (i > 0 && !(s.start > segments_[i - 1].start)) {
      throw Error(ErrorCode::InvalidArgument,
                  "schedule start times must be strictly increasing");
    }
    const Eigen::MatrixXd& A = s.graph.weights();
    for (Eigen::Index j = 0; j < A.size(); ++j) {
      const double w = A.data()[j];
      if (w != 0.0 && w < delta_) {
        std::ostringstream msg;
        msg << "segment " << i << " has weight " << w << " below delta "
            << delta_;
        throw Error(ErrorCode::InvalidArgument, msg.str());
      }
    }
  }
  if (end_time_ && !(*end_time_ > segments_.back().start)) {
    throw Error(ErrorCode::InvalidArgument,
                "schedule end time must follow the last segment start");
  }
  if (periodic_ && !end_time_) {
    throw Error(ErrorCode::InvalidArgument,
                "a periodic schedule needs an end time (its period)");
  }
}

GraphSchedule GraphSchedule::constant(WeightedDigraph g, double delta,
                                      double horizon) {
  std::vector<Segment> segs;
  segs.push_back({0.0, std::move(g)});
  return GraphSchedule(std::move(segs), delta, horizon);
}

double GraphSchedule::coverage_end() const {
  if (periodic_ || !end_time_) return std::numeric_limits<double>::infinity();
  return *end_time_;
}

const WeightedDigraph& GraphSchedule::at(double t) const {
  if (t < start_time() || t > coverage_end()) {
    std::ostringstream msg;
    msg << "time " << t << " is outside the schedule coverage";
    throw Error(ErrorCode::InsufficientCoverage, msg.str());
  }
  if (periodic_) {
    const double period = *end_time_ - start_time();
    t = start_time() + std::fmod(t - start_time(), period);
  }
  auto it = std::upper_bound(
      segments_.begin(), segments_.end(), t,
      [](double value, const Segment& s) { return value < s.start; });
  return std::prev(it)->graph;
}

Eigen::MatrixXd GraphSchedule::raw_integral(double t1, double t2) const {
  if (!(t1 <= t2)) {
    throw Error(ErrorCode::InvalidArgument, "integration window must have t1 <= t2");
  }
  if (t1 < start_time() || t2 > coverage_end()) {
    std::ostringstream msg;
    msg << "window [" << t1 << ", " << t2 << "] is outside the schedule coverage";
    throw Error(ErrorCode::InsufficientCoverage, msg.str());
  }
  const int n = size();
  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(n, n);

  // Integrates one pass of the segment list over [a, b], with segment starts
  // shifted by `offset`.
  auto accumulate = [&](double a, double b, double offset, double last_end) {
    for (std::size_t i = 0; i < segments_.size(); ++i) {
      const double s0 = segments_[i].start + offset;
      const double s1 =
          i + 1 < segments_.size() ? segments_[i + 1].start + offset : last_end;
      const double lo = std::max(a, s0);
      const double hi = std::min(b, s1);
      if (hi > lo) total += (hi - lo) * segments_[i].graph.weights();
    }
  };

  if (!periodic_) {
    accumulate(t1, t2, 0.0, coverage_end());
    return total;
  }
  const double period = *end_time_ - start_time();
  double k = std::floor((t1 - start_time()) / period);
  while (start_time() + k * period < t2) {
    const double offset = k * period;
    accumulate(t1, t2, offset, *end_time_ + offset);
    k += 1.0;
  }
  return total;
}

WeightedDigraph integrated_graph(const GraphSchedule& s, double t1, double t2) {
  if (!(t1 < t2)) {
    throw Error(ErrorCode::InvalidArgument, "integration window must have t1 < t2");
  }
  Eigen::MatrixXd A = s.raw_integral(t1, t2);
  for (Eigen::Index j = 0; j < A.size(); ++j) {
    if (A.data()[j] < s.delta()) A.data()[j] = 0.0;
  }
  A.diagonal().setZero();
  return WeightedDigraph(std::move(A));
}

UniformConnectivity is_uniformly_connected(const GraphSchedule& s,
                                           const std::vector<double>& grid) {
  if (grid.empty()) {
    throw Error(ErrorCode::InvalidArgument, "uniform connectivity needs a time grid");
  }
  std::vector<WeightedDigraph> windows;
  windows.reserve(grid.size());
  for (double t : grid) windows.push_back(integrated_graph(s, t, t + s.horizon()));

  for (int root = 0; root < s.size(); ++root) {
    const bool ok = std::all_of(windows.begin(), windows.end(),
                                [&](const WeightedDigraph& g) {
                                  return reaches_all(g, root);
                                });
    if (ok) return {true, root};
  }
  return {false, std::nullopt};
}

}  // namespace manisync

#include "manisync/consensus.hpp"

#include <algorithm>
#include <sstream>

#include "manisync/means.hpp"

namespace manisync {

void SwarmState::validate() const {
  for (const ManifoldPoint& y : positions) {
    if (y.descriptor() != descriptor) {
      throw Error(ErrorCode::DimensionMismatch,
                  "swarm position does not lie on " + descriptor.name());
    }
  }
  if (estimators) {
    if (estimators->size() != positions.size()) {
      std::ostringstream msg;
      msg << "swarm has " << positions.size() << " positions but "
          << estimators->size() << " estimators";
      throw Error(ErrorCode::DimensionMismatch, msg.str());
    }
    for (const Eigen::MatrixXd& x : *estimators) {
      if (x.rows() != descriptor.rows() || x.cols() != descriptor.cols()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "estimator shape does not match the embedding");
      }
    }
  }
}

namespace {

void check_sizes(const WeightedDigraph& g, const SwarmState& s) {
  if (g.size() != s.size()) {
    std::ostringstream msg;
    msg << "graph has " << g.size() << " vertices but the swarm has " << s.size()
        << " agents";
    throw Error(ErrorCode::DimensionMismatch, msg.str());
  }
}

Eigen::MatrixXd gram(const SwarmState& s) {
  const int n = s.size();
  Eigen::MatrixXd G(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = j; k < n; ++k) {
      G(j, k) = inner(s.positions[j].matrix(), s.positions[k].matrix());
      G(k, j) = G(j, k);
    }
  }
  return G;
}

Eigen::MatrixXd neighbor_sum(const WeightedDigraph& g, const SwarmState& s, int k) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(s.descriptor.rows(), s.descriptor.cols());
  for (int j = 0; j < s.size(); ++j) {
    const double a = g.weight(j, k);
    if (a != 0.0) b += a * s.positions[j].matrix();
  }
  return b;
}

}  // namespace

Eigen::MatrixXd swarm_centroid(const SwarmState& s) {
  return centroid(s.positions).value;
}

double cost_PL(const WeightedDigraph& g, const SwarmState& s) {
  check_sizes(g, s);
  const double n = s.size();
  return inner(g.weights(), gram(s)) / (2.0 * n * n);
}

double cost_PL_laplacian(const WeightedDigraph& g, const SwarmState& s) {
  check_sizes(g, s);
  const double n = s.size();
  const double r = s.descriptor.radius();
  const double xi2 = r * r * degrees(g).in.sum() / (2.0 * n * n);
  return xi2 - inner(laplacian(g, LaplacianKind::In), gram(s)) / (2.0 * n * n);
}

double cost_P(const SwarmState& s) {
  return 0.5 * swarm_centroid(s).squaredNorm();
}

double sync_error(const SwarmState& s) {
  double worst = 0.0;
  for (int j = 0; j < s.size(); ++j) {
    for (int k = j + 1; k < s.size(); ++k) {
      worst = std::max(worst, chordal_distance(s.positions[j], s.positions[k]));
    }
  }
  return worst;
}

bool is_synchronized(const SwarmState& s, double tol) {
  return sync_error(s) <= tol;
}

bool is_consensus(const WeightedDigraph& g, const SwarmState& s, double tol) {
  check_sizes(g, s);
  for (int k = 0; k < s.size(); ++k) {
    const Eigen::MatrixXd b = neighbor_sum(g, s, k);
    if (b.norm() == 0.0) continue;
    const MeanResult best = iam(s.descriptor, b);
    if (iam_value(s.positions[k], b) < best.optimal_value - tol) return false;
  }
  return true;
}

bool is_anti_consensus(const WeightedDigraph& g, const SwarmState& s, double tol) {
  check_sizes(g, s);
  for (int k = 0; k < s.size(); ++k) {
    const Eigen::MatrixXd b = neighbor_sum(g, s, k);
    if (b.norm() == 0.0) continue;
    // min <c, b> = -max <c, -b>.
    const double minimum = -aiam(s.descriptor, b).optimal_value;
    if (iam_value(s.positions[k], b) > minimum + tol) return false;
  }
  return true;
}

bool is_balanced_config(const SwarmState& s, double tol) {
  const Eigen::MatrixXd ce = swarm_centroid(s);
  const ManifoldDescriptor& d = s.descriptor;
  if (d.kind == ManifoldKind::Grassmann) {
    const Eigen::MatrixXd target =
        (static_cast<double>(d.p) / d.n) * Eigen::MatrixXd::Identity(d.n, d.n);
    return (ce - target).norm() <= tol;
  }
  return ce.norm() <= tol;
}

double estimator_energy(const SwarmState& s) {
  if (!s.estimators) return 0.0;
  double w = 0.0;
  for (const Eigen::MatrixXd& x : *s.estimators) w += x.squaredNorm();
  return 0.5 * w;
}

}  // namespace manisync

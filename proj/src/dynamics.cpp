#include "manisync/dynamics.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "manisync/means.hpp"

namespace manisync {

void validate_flow(const FlowSpec& flow) {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorCode::InvalidArgument, msg);
  };
  if (const auto* f = std::get_if<GradientFlow>(&flow)) {
    if (!(f->alpha != 0.0) || !std::isfinite(f->alpha)) fail("alpha must be finite and nonzero");
  } else if (const auto* f = std::get_if<EstimatorSync>(&flow)) {
    if (!(f->beta > 0.0)) fail("estimator sync needs beta > 0");
    if (!(f->gamma_s > 0.0)) fail("estimator sync needs gamma_s > 0");
  } else if (const auto* f = std::get_if<EstimatorAntiConsensus>(&flow)) {
    if (!(f->beta > 0.0)) fail("estimator anti-consensus needs beta > 0");
    if (!(f->gamma_b < 0.0)) fail("estimator anti-consensus needs gamma_b < 0");
  } else if (const auto* f = std::get_if<LocalFrameSOnSync>(&flow)) {
    if (!(f->beta > 0.0)) fail("local-frame sync needs beta > 0");
    if (!(f->gamma_s > 0.0)) fail("local-frame sync needs gamma_s > 0");
  }
}

std::string flow_name(const FlowSpec& flow) {
  static const char* names[] = {"gradient", "estimator_sync", "estimator_anti",
                                "local_frame_son", "vicsek"};
  return names[flow.index()];
}

namespace {

void check_sizes(const WeightedDigraph& g, int n) {
  if (g.size() != n) {
    std::ostringstream msg;
    msg << "graph has " << g.size() << " vertices but the swarm has " << n << " agents";
    throw Error(ErrorCode::DimensionMismatch, msg.str());
  }
}

const std::vector<Eigen::MatrixXd>& estimators_of(const SwarmState& s) {
  if (!s.estimators) {
    throw Error(ErrorCode::MissingEstimators, "this flow needs estimator variables");
  }
  if (static_cast<int>(s.estimators->size()) != s.size()) {
    throw Error(ErrorCode::DimensionMismatch, "one estimator per agent is required");
  }
  return *s.estimators;
}

std::vector<Eigen::MatrixXd> linear_consensus(const WeightedDigraph& g,
                                              const std::vector<Eigen::MatrixXd>& x,
                                              double beta) {
  const int n = g.size();
  std::vector<Eigen::MatrixXd> dx(n);
  for (int k = 0; k < n; ++k) {
    dx[k] = Eigen::MatrixXd::Zero(x[k].rows(), x[k].cols());
    for (int j = 0; j < n; ++j) {
      const double a = g.weight(j, k);
      if (a != 0.0) dx[k] += a * (x[j] - x[k]);
    }
    dx[k] *= beta;
  }
  return dx;
}

}  // namespace

Tangents gradient_rhs(const WeightedDigraph& g, const SwarmState& s, double alpha) {
  check_sizes(g, s.size());
  const int n = s.size();
  Tangents out(n);
  for (int k = 0; k < n; ++k) {
    const Eigen::MatrixXd& yk = s.positions[k].matrix();
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(yk.rows(), yk.cols());
    for (int j = 0; j < n; ++j) {
      const double a = g.weight(j, k) + g.weight(k, j);
      if (a != 0.0) acc += a * (s.positions[j].matrix() - yk);
    }
    out[k] = alpha * tangent_project(s.positions[k], acc);
  }
  return out;
}

Tangents consensus_rhs(const WeightedDigraph& g, const SwarmState& s, double alpha) {
  check_sizes(g, s.size());
  const int n = s.size();
  Tangents out(n);
  for (int k = 0; k < n; ++k) {
    const Eigen::MatrixXd& yk = s.positions[k].matrix();
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(yk.rows(), yk.cols());
    for (int j = 0; j < n; ++j) {
      const double a = g.weight(j, k);
      if (a != 0.0) acc += a * (s.positions[j].matrix() - yk);
    }
    out[k] = 2.0 * alpha * tangent_project(s.positions[k], acc);
  }
  return out;
}

Eigen::VectorXd circle_rhs(const WeightedDigraph& g, const Eigen::VectorXd& theta,
                           double alpha) {
  const int n = static_cast<int>(theta.size());
  check_sizes(g, n);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      const double a = g.weight(j, k);
      if (a != 0.0) out(k) += a * std::sin(theta(j) - theta(k));
    }
  }
  return 2.0 * alpha * out;
}

std::vector<Eigen::MatrixXd> so_n_rhs(const WeightedDigraph& g,
                                      const std::vector<Eigen::MatrixXd>& q,
                                      double alpha) {
  const int n = static_cast<int>(q.size());
  check_sizes(g, n);
  std::vector<Eigen::MatrixXd> out(n);
  for (int k = 0; k < n; ++k) {
    out[k] = Eigen::MatrixXd::Zero(q[k].rows(), q[k].cols());
    for (int j = 0; j < n; ++j) {
      const double a = g.weight(j, k);
      if (a == 0.0) continue;
      const Eigen::MatrixXd rel = q[k].transpose() * q[j];
      out[k] += a * (rel - rel.transpose());
    }
    out[k] *= alpha;
  }
  return out;
}

std::vector<Eigen::MatrixXd> grassmann_projector_rhs(
    const WeightedDigraph& g, const std::vector<Eigen::MatrixXd>& pi, double alpha) {
  const int n = static_cast<int>(pi.size());
  check_sizes(g, n);
  std::vector<Eigen::MatrixXd> out(n);
  for (int k = 0; k < n; ++k) {
    const Eigen::MatrixXd perp =
        Eigen::MatrixXd::Identity(pi[k].rows(), pi[k].cols()) - pi[k];
    out[k] = Eigen::MatrixXd::Zero(pi[k].rows(), pi[k].cols());
    for (int j = 0; j < n; ++j) {
      const double a = g.weight(j, k);
      if (a == 0.0) continue;
      out[k] += a * (pi[k] * pi[j] * perp + perp * pi[j] * pi[k]);
    }
    out[k] *= 2.0 * alpha;
  }
  return out;
}

std::vector<Eigen::MatrixXd> grassmann_basis_rhs(const WeightedDigraph& g,
                                                 const std::vector<Eigen::MatrixXd>& y,
                                                 double alpha) {
  const int n = static_cast<int>(y.size());
  check_sizes(g, n);
  std::vector<Eigen::MatrixXd> out(n);
  for (int k = 0; k < n; ++k) {
    out[k] = Eigen::MatrixXd::Zero(y[k].rows(), y[k].cols());
    for (int j = 0; j < n; ++j) {
      const double a = g.weight(j, k);
      if (a == 0.0) continue;
      const Eigen::MatrixXd m = y[j].transpose() * y[k];
      out[k] += a * (y[j] * m - y[k] * (m.transpose() * m));
    }
    out[k] *= 2.0 * alpha;
  }
  return out;
}

EstimatorRates estimator_sync_rhs(const WeightedDigraph& g, const SwarmState& s,
                                  double beta, double gamma_s) {
  check_sizes(g, s.size());
  const auto& x = estimators_of(s);
  EstimatorRates r;
  r.dx = linear_consensus(g, x, beta);
  r.dy.resize(s.size());
  for (int k = 0; k < s.size(); ++k) {
    r.dy[k] = gamma_s * tangent_project(s.positions[k], x[k]);
  }
  return r;
}

EstimatorRates estimator_anti_rhs(const WeightedDigraph& g, const SwarmState& s,
                                  double beta, double gamma_b) {
  check_sizes(g, s.size());
  const auto& x = estimators_of(s);
  EstimatorRates r;
  r.dy.resize(s.size());
  for (int k = 0; k < s.size(); ++k) {
    r.dy[k] = gamma_b * tangent_project(s.positions[k], x[k]);
  }
  r.dx = linear_consensus(g, x, beta);
  for (int k = 0; k < s.size(); ++k) r.dx[k] += r.dy[k];
  return r;
}

RelativePositions measure_relative_positions(const WeightedDigraph& g,
                                             const std::vector<Eigen::MatrixXd>& q) {
  check_sizes(g, static_cast<int>(q.size()));
  RelativePositions rel;
  for (int k = 0; k < g.size(); ++k) {
    for (int j = 0; j < g.size(); ++j) {
      if (g.has_edge(j, k)) rel.emplace(std::make_pair(k, j), q[k].transpose() * q[j]);
    }
  }
  return rel;
}

LocalFrameRates local_frame_son_rhs(const WeightedDigraph& g,
                                    const std::vector<Eigen::MatrixXd>& z,
                                    const RelativePositions& rel, double beta,
                                    double gamma_s) {
  const int n = static_cast<int>(z.size());
  check_sizes(g, n);
  LocalFrameRates r;
  r.dz.resize(n);
  r.body.resize(n);
  for (int k = 0; k < n; ++k) {
    const Eigen::MatrixXd omega = 0.5 * gamma_s * (z[k] - z[k].transpose());
    r.body[k] = omega;
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(z[k].rows(), z[k].cols());
    for (int j = 0; j < n; ++j) {
      const double a = g.weight(j, k);
      if (a == 0.0) continue;
      auto it = rel.find({k, j});
      if (it == rel.end()) {
        std::ostringstream msg;
        msg << "no relative position measured for edge " << j << " -> " << k;
        throw Error(ErrorCode::MissingRelativePosition, msg.str());
      }
      acc += a * (it->second * z[j] - z[k]);
    }
    r.dz[k] = omega.transpose() * z[k] + beta * acc;
  }
  return r;
}

SwarmState vicsek_step(const WeightedDigraph& g, const SwarmState& s) {
  check_sizes(g, s.size());
  SwarmState next = s;
  for (int k = 0; k < s.size(); ++k) {
    Eigen::MatrixXd b = s.positions[k].matrix();
    bool any = false;
    for (int j = 0; j < s.size(); ++j) {
      const double a = g.weight(j, k);
      if (a == 0.0) continue;
      b += a * s.positions[j].matrix();
      any = true;
    }
    if (!any) continue;
    const MeanResult m = iam(s.descriptor, b);
    if (m.unique) next.positions[k] = m.representative;
  }
  return next;
}

MetricRecord measure(const WeightedDigraph& g, const SwarmState& s, double t,
                     double drift) {
  MetricRecord m;
  m.t = t;
  m.P_L = cost_PL(g, s);
  const Eigen::MatrixXd ce = swarm_centroid(s);
  m.centroid_norm = ce.norm();
  m.P = 0.5 * ce.squaredNorm();
  m.sync_error = sync_error(s);
  m.W = estimator_energy(s);
  m.manifold_drift = drift;
  return m;
}

std::vector<Eigen::MatrixXd> random_estimators(const ManifoldDescriptor& d, int n,
                                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double r = d.radius();
  std::uniform_real_distribution<double> box(-r, r);
  std::vector<Eigen::MatrixXd> x(n);
  for (int k = 0; k < n; ++k) {
    x[k].resize(d.rows(), d.cols());
    for (int i = 0; i < d.rows(); ++i) {
      for (int c = 0; c < d.cols(); ++c) x[k](i, c) = box(rng);
    }
  }
  return x;
}

}  // namespace manisync

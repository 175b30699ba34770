#include <cmath>
#include <functional>
#include <sstream>

#include "manisync/dynamics.hpp"

namespace manisync {

namespace {

using Mats = std::vector<Eigen::MatrixXd>;

// Internal integration variables. `pos` holds the manifold variables in the
// representation being integrated (Grassmann bases for the gradient flow,
// matrices otherwise); `est` holds estimators (X, or Z in the local-frame
// formulation).
struct Vars {
  Mats pos;
  Mats est;
};

struct Rates {
  Mats dpos;
  Mats dest;
};

enum class Repr { Matrix, GrassmannBasis };

struct Model {
  ManifoldDescriptor desc;
  Repr repr = Repr::Matrix;
  // Estimators follow the realized position displacement (anti-consensus).
  bool est_follows_pos = false;
  std::function<Rates(const WeightedDigraph&, const Vars&)> rates;
};

double max_abs(const Eigen::MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool all_finite(const Mats& ms) {
  for (const auto& m : ms) {
    if (!m.allFinite()) return false;
  }
  return true;
}

Eigen::MatrixXd polar_columns(const Eigen::MatrixXd& y) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(y, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  if (!(s(s.size() - 1) > 1e-12 * s(0))) {
    throw Error(ErrorCode::RetractionFailure, "basis lost rank during the step");
  }
  return svd.matrixU() * svd.matrixV().transpose();
}

// Projects positions onto the manifold. Returns the pre-projection drift and
// stores the post-projection residual in `after`.
double project(const Model& m, Mats& pos, double* after) {
  double before = 0.0;
  double post = 0.0;
  for (auto& p : pos) {
    if (m.repr == Repr::GrassmannBasis) {
      const Eigen::MatrixXd gram =
          p.transpose() * p - Eigen::MatrixXd::Identity(p.cols(), p.cols());
      before = std::max(before, max_abs(gram));
      p = polar_columns(p);
      post = std::max(post, max_abs(p.transpose() * p -
                                    Eigen::MatrixXd::Identity(p.cols(), p.cols())));
    } else {
      before = std::max(before, membership_error(m.desc, p));
      p = project_to_manifold(m.desc, p).matrix();
      post = std::max(post, membership_error(m.desc, p));
    }
  }
  if (after) *after = post;
  return before;
}

Mats advance_positions(const Mats& pos, const Mats& dpos, double a) {
  Mats out(pos.size());
  for (std::size_t k = 0; k < pos.size(); ++k) {
    out[k] = pos[k] + a * dpos[k];
  }
  return out;
}

Mats add_scaled(const Mats& base, const Mats& d, double a) {
  Mats out(base.size());
  for (std::size_t k = 0; k < base.size(); ++k) out[k] = base[k] + a * d[k];
  return out;
}

// Stage point base + a * rate, with positions re-projected.
Vars stage(const Model& m, const Vars& v, const Rates& r, double a) {
  Vars s;
  s.pos = advance_positions(v.pos, r.dpos, a);
  project(m, s.pos, nullptr);
  if (!v.est.empty()) {
    s.est = add_scaled(v.est, r.dest, a);
    if (m.est_follows_pos) {
      for (std::size_t k = 0; k < s.est.size(); ++k) s.est[k] += s.pos[k] - v.pos[k];
    }
  }
  return s;
}

struct StepResult {
  Vars next;
  double drift_before = 0.0;
  double drift_after = 0.0;
};

StepResult step(const Model& m, const WeightedDigraph& g, const Vars& v, double h,
                Method method) {
  Rates total;
  if (method == Method::Euler) {
    total = m.rates(g, v);
  } else {
    const Rates k1 = m.rates(g, v);
    const Rates k2 = m.rates(g, stage(m, v, k1, 0.5 * h));
    const Rates k3 = m.rates(g, stage(m, v, k2, 0.5 * h));
    const Rates k4 = m.rates(g, stage(m, v, k3, h));
    auto combine = [](const Mats& a, const Mats& b, const Mats& c, const Mats& d) {
      Mats out(a.size());
      for (std::size_t k = 0; k < a.size(); ++k) {
        out[k] = (a[k] + 2.0 * b[k] + 2.0 * c[k] + d[k]) / 6.0;
      }
      return out;
    };
    total.dpos = combine(k1.dpos, k2.dpos, k3.dpos, k4.dpos);
    if (!v.est.empty()) total.dest = combine(k1.dest, k2.dest, k3.dest, k4.dest);
  }
  StepResult out;
  out.next.pos = advance_positions(v.pos, total.dpos, h);
  if (!all_finite(out.next.pos)) {
    throw Error(ErrorCode::RetractionFailure, "non-finite state after the step");
  }
  out.drift_before = project(m, out.next.pos, &out.drift_after);
  if (!v.est.empty()) {
    out.next.est = add_scaled(v.est, total.dest, h);
    if (m.est_follows_pos) {
      for (std::size_t k = 0; k < v.est.size(); ++k) {
        out.next.est[k] += out.next.pos[k] - v.pos[k];
      }
    }
    if (!all_finite(out.next.est)) {
      throw Error(ErrorCode::RetractionFailure, "non-finite estimators after the step");
    }
  }
  return out;
}

SwarmState positions_state(const ManifoldDescriptor& d, const Mats& pos) {
  SwarmState s{d, {}, std::nullopt};
  s.positions.reserve(pos.size());
  for (const auto& p : pos) s.positions.emplace_back(d, p);
  return s;
}

bool same_matrices(const Mats& a, const std::vector<ManifoldPoint>& b) {
  for (std::size_t k = 0; k < a.size(); ++k) {
    if ((a[k] - b[k].matrix()).cwiseAbs().maxCoeff() > 1e-12) return false;
  }
  return true;
}

}  // namespace

Trajectory integrate(const FlowSpec& flow, const GraphSchedule& schedule,
                     const SwarmState& init, const IntegratorConfig& cfg) {
  validate_flow(flow);
  init.validate();
  if (!(cfg.h > 0.0) || !std::isfinite(cfg.h)) {
    throw Error(ErrorCode::InvalidArgument, "step size must be positive");
  }
  if (!(cfg.t_end - cfg.t_start >= cfg.h * (1.0 - 1e-12))) {
    throw Error(ErrorCode::InvalidArgument, "t_end must be at least one step past t_start");
  }
  if (cfg.log_stride < 1) {
    throw Error(ErrorCode::InvalidArgument, "log stride must be a positive integer");
  }
  if (schedule.size() != init.size()) {
    std::ostringstream msg;
    msg << "schedule graphs have " << schedule.size() << " vertices but the swarm has "
        << init.size() << " agents";
    throw Error(ErrorCode::DimensionMismatch, msg.str());
  }
  if (cfg.t_start < schedule.start_time() || cfg.t_end > schedule.coverage_end()) {
    std::ostringstream msg;
    msg << "schedule does not cover [" << cfg.t_start << ", " << cfg.t_end << "]";
    throw Error(ErrorCode::InsufficientCoverage, msg.str());
  }

  const ManifoldDescriptor d = init.descriptor;
  const int n = init.size();
  Model model;
  model.desc = d;
  Vars v;
  v.pos.reserve(n);
  for (const auto& p : init.positions) v.pos.push_back(p.matrix());
  bool local_frame = false;
  bool discrete = false;
  std::optional<Mats> carried;  // estimators passed through untouched

  if (const auto* f = std::get_if<GradientFlow>(&flow)) {
    const double alpha = f->alpha;
    if (d.kind == ManifoldKind::Grassmann) {
      model.repr = Repr::GrassmannBasis;
      for (int k = 0; k < n; ++k) {
        v.pos[k] = projector_to_basis(init.positions[k]).matrix();
      }
      model.rates = [alpha](const WeightedDigraph& g, const Vars& x) {
        return Rates{grassmann_basis_rhs(g, x.pos, alpha), {}};
      };
    } else {
      model.rates = [alpha, d](const WeightedDigraph& g, const Vars& x) {
        return Rates{consensus_rhs(g, positions_state(d, x.pos), alpha), {}};
      };
    }
    carried = init.estimators;
  } else if (const auto* f = std::get_if<EstimatorSync>(&flow)) {
    v.est = init.estimators ? *init.estimators : random_estimators(d, n, cfg.seed);
    const double beta = f->beta, gamma = f->gamma_s;
    model.rates = [beta, gamma, d](const WeightedDigraph& g, const Vars& x) {
      SwarmState s = positions_state(d, x.pos);
      s.estimators = x.est;
      EstimatorRates r = estimator_sync_rhs(g, s, beta, gamma);
      return Rates{std::move(r.dy), std::move(r.dx)};
    };
  } else if (const auto* f = std::get_if<EstimatorAntiConsensus>(&flow)) {
    if (!init.estimators) {
      v.est = v.pos;
    } else {
      v.est = *init.estimators;
      if (!cfg.resume && !same_matrices(v.est, init.positions)) {
        throw Error(ErrorCode::InvalidArgument,
                    "estimator anti-consensus must start with x_k = y_k");
      }
    }
    model.est_follows_pos = true;
    const double beta = f->beta, gamma = f->gamma_b;
    model.rates = [beta, gamma, d](const WeightedDigraph& g, const Vars& x) {
      SwarmState s = positions_state(d, x.pos);
      s.estimators = x.est;
      EstimatorRates r = estimator_anti_rhs(g, s, beta, gamma);
      // The integrator adds the realized displacement itself.
      for (std::size_t k = 0; k < r.dx.size(); ++k) r.dx[k] -= r.dy[k];
      return Rates{std::move(r.dy), std::move(r.dx)};
    };
  } else if (const auto* f = std::get_if<LocalFrameSOnSync>(&flow)) {
    if (d.kind != ManifoldKind::SpecialOrthogonal) {
      throw Error(ErrorCode::InvalidArgument, "the local-frame flow is defined on SO(n) only");
    }
    const Mats x = init.estimators ? *init.estimators : random_estimators(d, n, cfg.seed);
    v.est.resize(n);
    for (int k = 0; k < n; ++k) v.est[k] = v.pos[k].transpose() * x[k];
    local_frame = true;
    const double beta = f->beta, gamma = f->gamma_s;
    model.rates = [beta, gamma](const WeightedDigraph& g, const Vars& x) {
      const RelativePositions rel = measure_relative_positions(g, x.pos);
      LocalFrameRates r = local_frame_son_rhs(g, x.est, rel, beta, gamma);
      // Qdot_k = Q_k Omega_k at the stage attitude, so RK4 keeps its order.
      for (std::size_t k = 0; k < r.body.size(); ++k) r.body[k] = x.pos[k] * r.body[k];
      return Rates{std::move(r.body), std::move(r.dz)};
    };
  } else {
    discrete = true;
    carried = init.estimators;
  }

  auto to_state = [&](const Vars& x) {
    SwarmState s{d, {}, std::nullopt};
    s.positions.reserve(n);
    for (int k = 0; k < n; ++k) {
      if (model.repr == Repr::GrassmannBasis) {
        Eigen::MatrixXd pi = x.pos[k] * x.pos[k].transpose();
        s.positions.emplace_back(d, 0.5 * (pi + pi.transpose()));
      } else {
        s.positions.emplace_back(d, x.pos[k]);
      }
    }
    if (local_frame) {
      Mats xs(n);
      for (int k = 0; k < n; ++k) xs[k] = x.pos[k] * x.est[k];
      s.estimators = std::move(xs);
    } else if (!x.est.empty()) {
      s.estimators = x.est;
    } else {
      s.estimators = carried;
    }
    return s;
  };

  Trajectory traj;
  const double span = cfg.t_end - cfg.t_start;
  long long steps = static_cast<long long>(std::ceil(span / cfg.h - 1e-9));
  if (steps < 1) steps = 1;

  auto record = [&](double t, const SwarmState& s, double drift) {
    traj.times.push_back(t);
    traj.metrics.push_back(measure(schedule.at(t), s, t, drift));
    if (cfg.keep_states) traj.states.push_back(s);
  };

  SwarmState current = to_state(v);
  record(cfg.t_start, current, 0.0);
  double t = cfg.t_start;
  for (long long i = 0; i < steps; ++i) {
    const double t_next = i + 1 == steps ? cfg.t_end : cfg.t_start + (i + 1) * cfg.h;
    const double h = t_next - t;
    const WeightedDigraph& g = schedule.at(t + 0.5 * h);
    double drift = 0.0;
    try {
      if (discrete) {
        current = vicsek_step(g, current);
      } else {
        StepResult r = step(model, g, v, h, cfg.method);
        if (r.drift_after > cfg.drift_tol) {
          std::ostringstream msg;
          msg << "manifold drift " << r.drift_after << " exceeds " << cfg.drift_tol
              << " after re-projection at t = " << t_next;
          throw Error(ErrorCode::RetractionFailure, msg.str());
        }
        drift = r.drift_before;
        v = std::move(r.next);
        current = to_state(v);
      }
    } catch (const Error& e) {
      traj.abort_reason = e.what();
      break;
    }
    t = t_next;
    if ((i + 1) % cfg.log_stride == 0 || i + 1 == steps) record(t, current, drift);
  }
  traj.final_state = current;
  traj.final_time = t;
  return traj;
}

}  // namespace manisync

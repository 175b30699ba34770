// Acceptance suite: one line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "manisync/consensus.hpp"
#include "manisync/dynamics.hpp"
#include "manisync/means.hpp"
#include "manisync/runner.hpp"
#include "manisync/scenario.hpp"
#include "oracles.hpp"

using namespace manisync;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail << "first failure: " << what << "; ";
    pass = pass && ok;
  }
};

SwarmState random_state(const ManifoldDescriptor& d, int n, std::mt19937_64& rng) {
  SwarmState s{d, {}, std::nullopt};
  for (int k = 0; k < n; ++k) s.positions.push_back(random_point(d, rng));
  return s;
}

SwarmState circle_state(const std::vector<double>& angles) {
  SwarmState s{ManifoldDescriptor::circle(), {}, std::nullopt};
  for (double a : angles) s.positions.push_back(ManifoldPoint::from_angle(a));
  return s;
}

WeightedDigraph weighted_digraph(int n, double p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> w(0.5, 2.0);
  Eigen::MatrixXd a = random_digraph(n, p, rng()).weights();
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a.data()[i] != 0.0) a.data()[i] = w(rng);
  }
  return WeightedDigraph(a);
}

WeightedDigraph symmetrized(const WeightedDigraph& g) {
  return WeightedDigraph(0.5 * (g.weights() + g.weights().transpose()));
}

double max_diff(const Tangents& a, const Tangents& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, (a[k] - b[k]).norm());
  return m;
}

RunOutcome run_in_memory(const Scenario& s) { return run_scenario(s, {std::nullopt, false}); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------

Verdict mean_vs_oracle() {
  Verdict v;
  std::mt19937_64 rng(101);
  const int trials = 200;
  double worst = 0.0;
  auto record = [&](double closed, double brute, double at_rep, const std::string& where) {
    const double err = std::abs(closed - brute);
    worst = std::max(worst, err);
    v.require(err < 1e-6, where + " optimal value vs oracle");
    v.require(std::abs(at_rep - closed) < 1e-9, where + " value at representative");
  };

  const auto so2 = ManifoldDescriptor::special_orthogonal(2);
  const auto g12 = ManifoldDescriptor::grassmann(1, 2);
  for (int i = 0; i < trials; ++i) {
    const Eigen::MatrixXd c = oracle::gaussian(2, 2, rng);
    const MeanResult m = iam(so2, c);
    record(m.optimal_value, oracle::grid_max_so2(c), iam_value(m.representative, c), "so(2)");
    const Eigen::MatrixXd sym = 0.5 * (c + c.transpose());
    const MeanResult l = iam(g12, sym);
    record(l.optimal_value, oracle::grid_max_lines(sym), iam_value(l.representative, sym),
           "grass(1,2)");
  }

  const auto so3 = ManifoldDescriptor::special_orthogonal(3);
  const oracle::RotationSamples rs = oracle::rotation_samples(3, 100000, 7);
  for (int i = 0; i < trials; ++i) {
    const Eigen::MatrixXd c = oracle::gaussian(3, 3, rng);
    const MeanResult m = iam(so3, c);
    record(m.optimal_value, oracle::brute_max_rotation(rs, c), iam_value(m.representative, c),
           "so(3)");
  }

  for (auto [p, n] : {std::pair{1, 3}, std::pair{2, 4}}) {
    const auto d = ManifoldDescriptor::grassmann(p, n);
    const oracle::FrameSamples fs = oracle::frame_samples(p, n, 100000, 11 + n);
    for (int i = 0; i < trials; ++i) {
      const Eigen::MatrixXd g = oracle::gaussian(n, n, rng);
      const Eigen::MatrixXd c = 0.5 * (g + g.transpose());
      const MeanResult m = iam(d, c);
      record(m.optimal_value, oracle::brute_max_grassmann(fs, c), iam_value(m.representative, c),
             d.name());
    }
  }
  v.detail << "worst |closed - oracle| = " << worst;
  return v;
}

Verdict critical_rotation_contract() {
  Verdict v;
  std::mt19937_64 rng(202);
  double worst = 0.0;
  for (int n = 2; n <= 4; ++n) {
    int done = 0;
    while (done < 100) {
      const Eigen::MatrixXd b = oracle::gaussian(n, n, rng);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(b);
      const Eigen::VectorXd s = svd.singularValues();
      bool distinct = true;
      for (int i = 0; i + 1 < n; ++i) distinct = distinct && s(i) - s(i + 1) > 1e-3;
      if (!distinct) continue;
      ++done;
      const auto crit = critical_rotations(b);
      v.require(crit.size() == (1u << (n - 1)), "critical set size");
      for (const ManifoldPoint& q : crit) {
        const Eigen::MatrixXd m = q.matrix().transpose() * b;
        const double r = (m - m.transpose()).norm();
        worst = std::max(worst, r);
        v.require(r < 1e-8, "critical residual");
        v.require(std::abs(q.matrix().determinant() - 1.0) < 1e-10, "det +1");
      }
    }
  }

  // Converse on SO(2): every grid minimum of the residual that refines to
  // below 1e-6 is one of the enumerated points.
  int extra = 0, missing = 0;
  const int points = 200000;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::MatrixXd b = oracle::gaussian(2, 2, rng);
    auto residual = [&](double t) {
      const Eigen::MatrixXd m = oracle::rotation2(t).transpose() * b;
      return (m - m.transpose()).norm();
    };
    std::vector<double> r(points);
    for (int i = 0; i < points; ++i) r[i] = residual(2 * pi * i / points);
    std::vector<Eigen::MatrixXd> found;
    for (int i = 0; i < points; ++i) {
      const double prev = r[(i + points - 1) % points], next = r[(i + 1) % points];
      if (!(r[i] <= prev && r[i] < next)) continue;
      double a = 2 * pi * (i - 1) / points, c = 2 * pi * (i + 1) / points;
      const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
      for (int it = 0; it < 80; ++it) {
        const double x1 = c - phi * (c - a), x2 = a + phi * (c - a);
        if (residual(x1) < residual(x2)) c = x2; else a = x1;
      }
      const double t = 0.5 * (a + c);
      if (residual(t) < 1e-6) found.push_back(oracle::rotation2(t));
    }
    const auto crit = critical_rotations(b);
    for (const Eigen::MatrixXd& q : found) {
      bool known = false;
      for (const ManifoldPoint& e : crit) known = known || (q - e.matrix()).norm() < 1e-5;
      extra += known ? 0 : 1;
    }
    for (const ManifoldPoint& e : crit) {
      bool seen = false;
      for (const Eigen::MatrixXd& q : found) seen = seen || (q - e.matrix()).norm() < 1e-5;
      missing += seen ? 0 : 1;
    }
  }
  v.require(extra == 0, "grid found a critical point outside the enumerated set");
  v.require(missing == 0, "grid missed an enumerated critical point");
  v.detail << "worst residual " << worst << ", grid extra " << extra << ", missing " << missing;
  return v;
}

Verdict gradient_consistency() {
  Verdict v;
  std::mt19937_64 rng(303);
  const int n_agents = 5;
  double worst_fd = 0.0, worst_spec = 0.0;
  for (const auto& d : {ManifoldDescriptor::circle(), ManifoldDescriptor::special_orthogonal(3),
                        ManifoldDescriptor::grassmann(2, 4)}) {
    for (int trial = 0; trial < 50; ++trial) {
      const SwarmState s = random_state(d, n_agents, rng);
      const WeightedDigraph g = weighted_digraph(n_agents, 0.6, rng);
      const double alpha = 0.7;

      // Finite differences of P_L along a random tangent direction.
      const Tangents grad = gradient_rhs(g, s, alpha);
      std::vector<Eigen::MatrixXd> dir;
      double exact = 0.0;
      for (int k = 0; k < n_agents; ++k) {
        dir.push_back(tangent_project(s.positions[k], oracle::gaussian(d.rows(), d.cols(), rng)));
        exact += inner(grad[k], dir[k]);
      }
      exact /= 2.0 * n_agents * n_agents * alpha;
      auto along = [&](double t) {
        SwarmState moved = s;
        for (int k = 0; k < n_agents; ++k) moved.positions[k] = retract(s.positions[k], dir[k], t);
        return cost_PL(g, moved);
      };
      const double fd = oracle::central_difference(along, 1e-5);
      const double rel = std::abs(fd - exact) / std::abs(exact);
      worst_fd = std::max(worst_fd, rel);
      v.require(rel < 1e-4, d.name() + " finite-difference gradient");

      // Specializations on the symmetrized graph.
      const WeightedDigraph u = symmetrized(g);
      const Tangents gu = gradient_rhs(u, s, alpha);
      double spec = max_diff(gu, consensus_rhs(u, s, alpha));
      if (d.kind == ManifoldKind::Circle) {
        Eigen::VectorXd theta(n_agents);
        for (int k = 0; k < n_agents; ++k) theta(k) = s.positions[k].angle();
        const Eigen::VectorXd th = circle_rhs(u, theta, alpha);
        for (int k = 0; k < n_agents; ++k) {
          const Eigen::Vector2d e(-std::sin(theta(k)), std::cos(theta(k)));
          spec = std::max(spec, (gu[k] - th(k) * e).norm());
        }
      } else if (d.kind == ManifoldKind::SpecialOrthogonal) {
        std::vector<Eigen::MatrixXd> q;
        for (const auto& p : s.positions) q.push_back(p.matrix());
        const auto body = so_n_rhs(u, q, alpha);
        for (int k = 0; k < n_agents; ++k) spec = std::max(spec, (gu[k] - q[k] * body[k]).norm());
      } else {
        std::vector<Eigen::MatrixXd> pis, ys;
        for (const auto& p : s.positions) {
          pis.push_back(p.matrix());
          ys.push_back(projector_to_basis(p).matrix());
        }
        spec = std::max(spec, max_diff(gu, grassmann_projector_rhs(u, pis, alpha)));
        const auto dy = grassmann_basis_rhs(u, ys, alpha);
        for (int k = 0; k < n_agents; ++k) {
          const Eigen::MatrixXd lifted = dy[k] * ys[k].transpose() + ys[k] * dy[k].transpose();
          spec = std::max(spec, (gu[k] - lifted).norm());
        }
      }

      // Complete unit-weighted graph: 2 alpha N Proj(C_e - y_k).
      const WeightedDigraph k = complete_graph(n_agents);
      const Tangents gk = gradient_rhs(k, s, alpha);
      const Eigen::MatrixXd ce = swarm_centroid(s);
      for (int j = 0; j < n_agents; ++j) {
        const Eigen::MatrixXd want =
            2.0 * alpha * n_agents * tangent_project(s.positions[j], ce - s.positions[j].matrix());
        spec = std::max(spec, (gk[j] - want).norm());
      }
      worst_spec = std::max(worst_spec, spec);
      v.require(spec < 1e-9, d.name() + " specialization");
    }
  }
  v.detail << "worst FD rel " << worst_fd << ", worst specialization " << worst_spec;
  return v;
}

Verdict monotone_and_convergent() {
  Verdict v;
  const double horizon = 50.0;  // kuramoto_sync horizon
  double worst_drop = 0.0, worst_sync = 0.0;
  int runs = 0;
  for (const auto& d : {ManifoldDescriptor::special_orthogonal(3),
                        ManifoldDescriptor::grassmann(2, 4), ManifoldDescriptor::circle()}) {
    for (const bool complete : {true, false}) {
      const int n = complete ? 10 : 8;
      const WeightedDigraph g = complete ? complete_graph(n) : ring_graph(n);
      for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        std::mt19937_64 rng(seed * 7919 + n);
        IntegratorConfig cfg;
        cfg.h = 0.01;
        cfg.t_end = horizon;
        cfg.keep_states = false;
        const Trajectory t =
            integrate(GradientFlow{1.0}, GraphSchedule::constant(g), random_state(d, n, rng), cfg);
        ++runs;
        v.require(!t.aborted(), "run aborted");
        for (std::size_t i = 1; i < t.metrics.size(); ++i) {
          const double drop = t.metrics[i - 1].P_L - t.metrics[i].P_L;
          worst_drop = std::max(worst_drop, drop);
        }
        if (complete) {
          worst_sync = std::max(worst_sync, t.metrics.back().sync_error);
        }
      }
    }
  }
  v.require(worst_drop <= 1e-9, "P_L decreased along the flow");
  v.require(worst_sync < 1e-6, "complete graph did not synchronize");
  v.detail << runs << " runs, largest P_L drop " << worst_drop << ", worst final sync "
           << worst_sync;
  return v;
}

Verdict limit_cycle() {
  Verdict v;
  Scenario s = load_preset("circle_limit_cycle");
  const double horizon = load_preset("kuramoto_sync").integrator.t_end * 10.0;
  s.integrator.t_end = std::max(s.integrator.t_end, horizon);
  s.integrator.keep_states = true;
  const RunOutcome out = run_in_memory(s);
  v.require(out.exit_code == kExitOk, "run failed");
  const Trajectory& t = out.trajectory;

  // P_L against the union graph of the two phases, so the trace is
  // continuous across switches.
  const GraphSchedule sched = build_schedule(s);
  const WeightedDigraph ring(sched.at(0.5).weights() + sched.at(1.5).weights());
  std::vector<double> pl;
  double min_sync = 1e300;
  for (std::size_t i = 0; i < t.states.size(); ++i) {
    pl.push_back(cost_PL(ring, t.states[i]));
    min_sync = std::min(min_sync, t.metrics[i].sync_error);
  }
  // Skip the transient.
  const std::vector<double> tail(pl.begin() + pl.size() / 2, pl.end());
  const int extrema = oracle::alternating_extrema(tail, 1e-3);
  v.require(t.final_time >= horizon - 1e-9, "horizon too short");
  v.require(min_sync > s.tolerances.sync, "synchronized");
  v.require(extrema >= 10, "too few alternating extrema");
  v.detail << "t_end " << t.final_time << ", min sync_error " << min_sync << ", "
           << extrema << " extrema in the second half";
  return v;
}

double estimator_spread(const SwarmState& s) {
  const std::vector<Eigen::MatrixXd>& x = *s.estimators;
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(x[0].rows(), x[0].cols());
  for (const auto& m : x) mean += m;
  mean /= static_cast<double>(x.size());
  double worst = 0.0;
  for (const auto& m : x) worst = std::max(worst, (m - mean).norm());
  return worst;
}

Verdict estimator_sync() {
  Verdict v;
  Scenario s = load_preset("estimator_directed_switching");
  s.integrator.log_stride = 10;
  s.integrator.keep_states = true;
  const GraphSchedule sched = build_schedule(s);

  bool never_strong = true;
  for (double t = 0.05; t < 2.0; t += 0.1) never_strong = never_strong && !connectivity(sched.at(t)).strong;
  std::vector<double> grid;
  for (double t = 0.0; t < 4.0; t += 0.25) grid.push_back(t);
  const bool uniform = is_uniformly_connected(sched, grid).connected;
  v.require(never_strong, "schedule is strongly connected at some instant");
  v.require(uniform, "schedule is not uniformly connected");

  const RunOutcome out = run_in_memory(s);
  const Trajectory& t = out.trajectory;
  std::vector<double> times, spread;
  for (std::size_t i = 0; i < t.states.size(); ++i) {
    const double e = estimator_spread(t.states[i]);
    if (e < 1e-11) break;  // round-off floor
    times.push_back(t.times[i]);
    spread.push_back(e);
  }
  const oracle::LogLinearFit fit = oracle::log_linear_fit(times, spread);
  const double final_sync = t.metrics.back().sync_error;
  v.require(fit.r2 > 0.99, "log-linear fit");
  v.require(fit.slope < 0.0, "spread is not decaying");
  v.require(final_sync < 1e-5, "final sync_error");

  Scenario b = load_preset("estimator_balanced_switching");
  b.integrator.keep_states = false;
  const InitialState init = build_initial_state(b);
  const RunOutcome bal = run_in_memory(b);
  Eigen::MatrixXd mean0 = Eigen::MatrixXd::Zero(3, 3);
  for (const auto& x : *init.state.estimators) mean0 += x;
  mean0 /= static_cast<double>(init.state.size());
  double off = 0.0;
  for (const auto& x : *bal.trajectory.final_state->estimators) off = std::max(off, (x - mean0).norm());
  v.require(off < 1e-6, "balanced schedule does not preserve the estimator mean");
  v.detail << "R^2 " << fit.r2 << " over " << times.size() << " records, slope " << fit.slope
           << ", final sync " << final_sync << ", balanced drift " << off;
  return v;
}

Verdict anti_consensus() {
  Verdict v;
  Scenario s = load_preset("estimator_balancing");
  s.integrator.log_stride = 1;
  s.integrator.keep_states = true;
  v.require(classify(build_graph(s, s.graphs.front())).balanced, "graph not balanced");
  const RunOutcome out = run_in_memory(s);
  const Trajectory& t = out.trajectory;
  double worst_sum = 0.0, worst_rise = 0.0;
  for (std::size_t i = 0; i < t.states.size(); ++i) {
    Eigen::MatrixXd diff = Eigen::MatrixXd::Zero(2, 1);
    for (int k = 0; k < t.states[i].size(); ++k) {
      diff += (*t.states[i].estimators)[k] - t.states[i].positions[k].matrix();
    }
    worst_sum = std::max(worst_sum, diff.norm());
    if (i > 0) worst_rise = std::max(worst_rise, t.metrics[i].W - t.metrics[i - 1].W);
  }
  const SwarmState& fin = *t.final_state;
  const Eigen::MatrixXd ce = swarm_centroid(fin);
  double proj = 0.0;
  for (const auto& p : fin.positions) proj = std::max(proj, tangent_project(p, ce).norm());
  v.require(worst_sum < 1e-8, "sum x - sum y drifted");
  v.require(worst_rise <= 1e-9, "W increased");
  v.require(proj < 1e-5, "Proj_k(C_e) not zero");

  auto pair_run = [&](const std::string& manifold) {
    std::string text = "name: pair\nmanifold: " + manifold +
                       "\nagents: 2\nseed: 12\ninit: {kind: random}\n"
                       "graphs:\n  all: {kind: complete}\n"
                       "flow: {kind: estimator_anti, beta: 1.0, gamma_b: -1.0}\n"
                       "integrator: {h: 0.01, t_end: 60.0, keep_states: false}\n";
    return swarm_centroid(*run_in_memory(parse_scenario(text)).trajectory.final_state);
  };
  const double grass = (pair_run("grass(1,2)") - 0.5 * Eigen::Matrix2d::Identity()).norm();
  const double so2 = pair_run("so(2)").norm();
  v.require(grass < 1e-4, "grass(1,2) pair not balanced");
  v.require(so2 < 1e-4, "so(2) pair not balanced");
  v.detail << "max |sum x - sum y| " << worst_sum << ", max W rise " << worst_rise
           << ", max |Proj C_e| " << proj << ", grass " << grass << ", so(2) " << so2;
  return v;
}

Verdict local_frame() {
  Verdict v;
  const Scenario lf = load_preset("local_frame_equivalence");
  Scenario global = lf;
  const auto& spec = std::get<LocalFrameSOnSync>(lf.flow);
  global.flow = EstimatorSync{spec.beta, spec.gamma_s};
  const InitialState a = build_initial_state(lf);
  const InitialState b = build_initial_state(global);
  double init_gap = 0.0;
  for (int k = 0; k < a.state.size(); ++k) {
    init_gap = std::max(init_gap, ((*a.state.estimators)[k] - (*b.state.estimators)[k]).norm());
  }
  v.require(init_gap == 0.0, "initial conditions differ");

  const RunOutcome x = run_in_memory(lf);
  const RunOutcome y = run_in_memory(global);
  const Trajectory& tx = x.trajectory;
  const Trajectory& ty = y.trajectory;
  v.require(tx.states.size() == ty.states.size(), "record counts differ");
  double worst = 0.0;
  for (std::size_t i = 0; i < std::min(tx.states.size(), ty.states.size()); ++i) {
    for (int k = 0; k < tx.states[i].size(); ++k) {
      worst = std::max(worst, (tx.states[i].positions[k].matrix() -
                               ty.states[i].positions[k].matrix()).norm());
      worst = std::max(worst, ((*tx.states[i].estimators)[k] - (*ty.states[i].estimators)[k]).norm());
    }
  }
  v.require(tx.final_time == 5.0, "t_end");
  v.require(worst < 1e-6, "trajectories differ");
  v.detail << "max per-agent gap " << worst << " over " << tx.states.size() << " records";
  return v;
}

Verdict predicates() {
  Verdict v;
  auto ring = [](int n, double chi) {
    std::vector<double> a;
    for (int k = 0; k < n; ++k) a.push_back(k * chi);
    return circle_state(a);
  };
  auto rhs_norm = [](const WeightedDigraph& g, const SwarmState& s) {
    double m = 0.0;
    for (const auto& t : gradient_rhs(g, s, 1.0)) m = std::max(m, t.norm());
    return m;
  };
  const WeightedDigraph r7 = ring_graph(7);
  const SwarmState c = ring(7, 2 * pi / 7), a = ring(7, 4 * pi / 7);
  v.require(is_consensus(r7, c), "chi = 2pi/7 consensus");
  v.require(is_anti_consensus(r7, a), "chi = 4pi/7 anti-consensus");
  const double rc = rhs_norm(r7, c), ra = rhs_norm(r7, a);
  v.require(rc < 1e-10 && ra < 1e-10, "ring states are not fixed points");
  const WeightedDigraph r4 = ring_graph(4);
  const SwarmState q = ring(4, pi / 2);
  v.require(is_consensus(r4, q) && is_anti_consensus(r4, q), "N=4 quarter turn");
  v.detail << "rhs " << rc << ", " << ra << ", " << rhs_norm(r4, q);
  return v;
}

Verdict determinism_and_restart() {
  Verdict v;
  const fs::path root = fs::temp_directory_path() / "manisync_acceptance";
  fs::remove_all(root);
  int compared = 0;
  for (const char* name : {"son_sync", "estimator_directed_switching", "random_digraph_sweep"}) {
    for (std::uint64_t seed : {1u, 2u}) {
      Scenario s = load_preset(name);
      s.seed = seed;
      s.integrator.t_end = std::min(s.integrator.t_end, 10.0);
      std::vector<std::string> outputs;
      for (int rep = 0; rep < 2; ++rep) {
        const fs::path dir = root / (std::string(name) + "_" + std::to_string(seed) + "_" +
                                     std::to_string(rep));
        run_scenario(s, {dir.string(), true});
        outputs.push_back(slurp(dir / "metrics.csv") + slurp(dir / "final_state.json") +
                          slurp(dir / "summary.json"));
      }
      v.require(!outputs[0].empty() && outputs[0] == outputs[1], std::string(name) + " rerun differs");
      ++compared;
    }
  }

  double worst = 0.0;
  for (const char* name : {"son_sync", "estimator_balancing", "estimator_directed_switching",
                           "local_frame_equivalence", "circle_limit_cycle"}) {
    Scenario full = load_preset(name);
    full.integrator.t_end = 4.0;
    full.integrator.keep_states = false;
    const RunOutcome whole = run_in_memory(full);

    Scenario first = full;
    first.integrator.t_end = 2.0;
    const fs::path dir = root / (std::string("restart_") + name);
    run_scenario(first, {dir.string(), true});

    Scenario second = full;
    second.init = InitSpec{};
    second.init.kind = InitKind::File;
    second.init.path = (dir / "final_state.json").string();
    const RunOutcome resumed = run_in_memory(parse_scenario(to_text(second)));
    v.require(std::abs(resumed.trajectory.final_time - 4.0) < 1e-12, "resumed end time");
    const SwarmState& x = *whole.trajectory.final_state;
    const SwarmState& y = *resumed.trajectory.final_state;
    for (int k = 0; k < x.size(); ++k) {
      worst = std::max(worst, (x.positions[k].matrix() - y.positions[k].matrix()).norm());
      if (x.estimators) worst = std::max(worst, ((*x.estimators)[k] - (*y.estimators)[k]).norm());
    }
  }
  v.require(worst < 1e-10, "restart diverged");
  v.detail << compared << " byte-identical rerun pairs, restart gap " << worst;
  fs::remove_all(root);
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Verdict()> check;
  };
  const std::vector<Criterion> criteria = {
      {1, "induced mean matches brute-force oracle", 120, mean_vs_oracle},
      {2, "critical rotation contract", 60, critical_rotation_contract},
      {3, "gradient consistency", 60, gradient_consistency},
      {4, "monotone link cost and convergence", 300, monotone_and_convergent},
      {5, "switching limit cycle", 60, limit_cycle},
      {6, "estimator synchronization", 60, estimator_sync},
      {7, "anti-consensus conservation and energy", 120, anti_consensus},
      {8, "local-frame equivalence", 30, local_frame},
      {9, "configuration predicates", 10, predicates},
      {10, "determinism and restart", 30, determinism_and_restart},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << "exception: " << e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_s) {
      v.pass = false;
      v.detail << "; over the " << c.budget_s << " s budget";
    }
    failed += v.pass ? 0 : 1;
    std::printf("[%s] %2d %s (%.1f s): %s\n", v.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                v.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}

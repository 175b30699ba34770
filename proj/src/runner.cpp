#include "manisync/runner.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace manisync {

namespace {

nlohmann::json row_major_rows(const std::vector<Eigen::MatrixXd>& ms) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& m : ms) {
    const Eigen::VectorXd v = flatten(m);
    rows.push_back(std::vector<double>(v.data(), v.data() + v.size()));
  }
  return rows;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << text;
}

}  // namespace

std::string metrics_csv(const Trajectory& t) {
  std::ostringstream out;
  out << "t,P_L,P,sync_error,W,centroid_norm,manifold_drift\n";
  out << std::setprecision(17);
  for (const MetricRecord& m : t.metrics) {
    out << m.t << ',' << m.P_L << ',' << m.P << ',' << m.sync_error << ',' << m.W << ','
        << m.centroid_norm << ',' << m.manifold_drift << '\n';
  }
  return out.str();
}

std::string final_state_json(const Scenario& s, const SwarmState& state, double time) {
  nlohmann::ordered_json j;
  j["format"] = "manisync-state-1";
  j["time"] = time;
  j["manifold"] = state.descriptor.name();
  j["agents"] = state.size();
  std::vector<Eigen::MatrixXd> ys;
  for (const auto& p : state.positions) ys.push_back(p.matrix());
  j["positions"] = row_major_rows(ys);
  if (state.descriptor.kind == ManifoldKind::Circle) {
    std::vector<double> angles;
    for (const auto& p : state.positions) angles.push_back(p.angle());
    j["angles"] = angles;
  }
  j["estimators"] = state.estimators ? row_major_rows(*state.estimators) : nlohmann::json();
  j["seed"] = s.seed;
  j["scenario"] = s.name;
  j["flow"] = flow_name(s.flow);
  j["config"] = to_text(s);
  return j.dump(2) + "\n";
}

RunOutcome run_scenario(const Scenario& s, const RunOptions& opts) {
  const GraphSchedule schedule = build_schedule(s);
  const InitialState init = build_initial_state(s);

  IntegratorConfig cfg = s.integrator;
  cfg.t_start = s.t_start.value_or(init.resumed ? init.time : schedule.start_time());
  cfg.resume = init.resumed;
  cfg.drift_tol = s.tolerances.drift;
  cfg.seed = s.seed;
  if (!(cfg.t_end - cfg.t_start >= cfg.h * (1.0 - 1e-12))) {
    std::ostringstream msg;
    msg << "integrator.t_end = " << cfg.t_end << " is not after the start time "
        << cfg.t_start;
    throw ScenarioError({{0, msg.str()}});
  }

  RunOutcome out;
  out.trajectory = integrate(s.flow, schedule, init.state, cfg);
  const Trajectory& traj = out.trajectory;
  out.exit_code = traj.aborted() ? kExitAbort : kExitOk;

  const SwarmState& final_state = *traj.final_state;
  const WeightedDigraph& g = schedule.at(traj.final_time);
  nlohmann::ordered_json sum;
  sum["scenario"] = s.name;
  sum["manifold"] = s.manifold.name();
  sum["agents"] = s.agents;
  sum["flow"] = flow_name(s.flow);
  sum["seed"] = s.seed;
  sum["t_start"] = cfg.t_start;
  sum["t_end"] = traj.final_time;
  sum["status"] = traj.aborted() ? "aborted" : "ok";
  sum["partial"] = traj.aborted();
  sum["abort_reason"] = traj.abort_reason ? nlohmann::json(*traj.abort_reason) : nlohmann::json();
  sum["exit_code"] = out.exit_code;
  const Tolerances& tol = s.tolerances;
  sum["tolerances"] = {{"sync", tol.sync}, {"predicate", tol.predicate}, {"drift", tol.drift}};
  sum["predicates"] = {
      {"synchronized", is_synchronized(final_state, tol.sync)},
      {"consensus", is_consensus(g, final_state, tol.predicate)},
      {"anti_consensus", is_anti_consensus(g, final_state, tol.predicate)},
      {"balanced", is_balanced_config(final_state, tol.predicate)},
  };
  const MetricRecord& last = traj.metrics.back();
  sum["final"] = {{"P_L", last.P_L},
                  {"P", last.P},
                  {"sync_error", last.sync_error},
                  {"W", last.W},
                  {"centroid_norm", last.centroid_norm},
                  {"manifold_drift", last.manifold_drift}};
  double pl_min = last.P_L, pl_max = last.P_L;
  for (const MetricRecord& m : traj.metrics) {
    pl_min = std::min(pl_min, m.P_L);
    pl_max = std::max(pl_max, m.P_L);
  }
  sum["P_L_range"] = {pl_min, pl_max};
  sum["records"] = traj.metrics.size();
  out.summary_json = sum.dump(2) + "\n";

  out.output_dir = opts.output_dir.value_or(s.output_dir);
  if (opts.write_files) {
    const std::filesystem::path dir(out.output_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
    write_file(dir / "metrics.csv", metrics_csv(traj));
    write_file(dir / "final_state.json", final_state_json(s, final_state, traj.final_time));
    write_file(dir / "summary.json", out.summary_json);
  }
  return out;
}

}  // namespace manisync

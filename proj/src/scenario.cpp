#include "manisync/scenario.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

namespace manisync {

namespace {

std::string join_issues(const std::vector<Issue>& issues) {
  std::ostringstream out;
  for (std::size_t i = 0; i < issues.size(); ++i) {
    if (i) out << "\n";
    if (issues[i].line > 0) out << "line " << issues[i].line << ": ";
    out << issues[i].message;
  }
  return out.str();
}

}  // namespace

ScenarioError::ScenarioError(std::vector<Issue> issues)
    : Error(ErrorCode::Validation, join_issues(issues)), issues_(std::move(issues)) {}

ManifoldDescriptor parse_manifold(const std::string& name) {
  static const std::regex so(R"(\s*so\s*\(\s*(\d+)\s*\)\s*)", std::regex::icase);
  static const std::regex grass(R"(\s*grass\s*\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*)",
                                std::regex::icase);
  std::smatch m;
  if (name == "circle") return ManifoldDescriptor::circle();
  if (std::regex_match(name, m, so)) {
    return ManifoldDescriptor::special_orthogonal(std::stoi(m[1]));
  }
  if (std::regex_match(name, m, grass)) {
    return ManifoldDescriptor::grassmann(std::stoi(m[1]), std::stoi(m[2]));
  }
  throw Error(ErrorCode::InvalidArgument,
              "unknown manifold '" + name + "' (expected circle, so(n) or grass(p,n))");
}

namespace {

// ---------------------------------------------------------------- parsing

class Reader {
 public:
  std::vector<Issue> issues;

  static int line_of(const YAML::Node& n) {
    const YAML::Mark m = n.Mark();
    return m.line >= 0 ? m.line + 1 : 0;
  }

  void issue(const YAML::Node& at, std::string msg) {
    issues.push_back({line_of(at), std::move(msg)});
  }

  bool expect_map(const YAML::Node& n, const std::string& section) {
    if (!n.IsMap()) {
      issue(n, "'" + section + "' must be a mapping");
      return false;
    }
    return true;
  }

  void check_keys(const YAML::Node& map, const std::string& section,
                  const std::set<std::string>& allowed) {
    for (const auto& kv : map) {
      const std::string key = kv.first.as<std::string>();
      if (!allowed.count(key)) {
        issue(kv.first, "unknown key '" + key + "' in " + section);
      }
    }
  }

  template <class T>
  std::optional<T> get(const YAML::Node& map, const char* key, const std::string& section,
                       const char* what) {
    const YAML::Node n = map[key];
    if (!n) return std::nullopt;
    try {
      if (!n.IsScalar()) throw YAML::Exception(n.Mark(), "not a scalar");
      return n.as<T>();
    } catch (const YAML::Exception&) {
      issue(n, section + "." + key + " must be " + what);
      return std::nullopt;
    }
  }

  std::optional<double> number(const YAML::Node& map, const char* key,
                               const std::string& section) {
    auto v = get<double>(map, key, section, "a number");
    if (v && !std::isfinite(*v)) {
      issue(map[key], section + "." + key + " must be finite");
      return std::nullopt;
    }
    return v;
  }
  std::optional<long long> integer(const YAML::Node& map, const char* key,
                                   const std::string& section) {
    return get<long long>(map, key, section, "an integer");
  }
  std::optional<std::uint64_t> seed(const YAML::Node& map, const char* key,
                                    const std::string& section) {
    return get<std::uint64_t>(map, key, section, "a non-negative integer");
  }
  std::optional<bool> boolean(const YAML::Node& map, const char* key,
                              const std::string& section) {
    return get<bool>(map, key, section, "true or false");
  }
  std::optional<std::string> string(const YAML::Node& map, const char* key,
                                    const std::string& section) {
    return get<std::string>(map, key, section, "a string");
  }

  std::optional<std::vector<double>> numbers(const YAML::Node& n, const std::string& what) {
    if (!n.IsSequence()) {
      issue(n, what + " must be a list of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    for (const auto& item : n) {
      try {
        out.push_back(item.as<double>());
      } catch (const YAML::Exception&) {
        issue(item, what + " must be a list of numbers");
        return std::nullopt;
      }
    }
    return out;
  }

  std::optional<std::vector<std::vector<double>>> rows(const YAML::Node& n,
                                                       const std::string& what) {
    if (!n.IsSequence()) {
      issue(n, what + " must be a list of lists");
      return std::nullopt;
    }
    std::vector<std::vector<double>> out;
    for (const auto& item : n) {
      auto r = numbers(item, what);
      if (!r) return std::nullopt;
      out.push_back(std::move(*r));
    }
    return out;
  }
};

template <class E>
std::optional<E> choose(Reader& rd, const YAML::Node& map, const char* key,
                        const std::string& section,
                        const std::vector<std::pair<std::string, E>>& options) {
  auto s = rd.string(map, key, section);
  if (!s) return std::nullopt;
  for (const auto& [name, value] : options) {
    if (*s == name) return value;
  }
  std::string list;
  for (const auto& [name, value] : options) list += (list.empty() ? "" : ", ") + name;
  rd.issue(map[key], section + "." + key + " must be one of: " + list);
  return std::nullopt;
}

const std::vector<std::pair<std::string, InitKind>> kInitKinds = {
    {"random", InitKind::Random},
    {"ring", InitKind::Ring},
    {"explicit", InitKind::Explicit},
    {"file", InitKind::File}};
const std::vector<std::pair<std::string, EstimatorInitKind>> kEstimatorKinds = {
    {"auto", EstimatorInitKind::Auto},
    {"random", EstimatorInitKind::Random},
    {"positions", EstimatorInitKind::Positions},
    {"explicit", EstimatorInitKind::Explicit}};
const std::vector<std::pair<std::string, GraphKind>> kGraphKinds = {
    {"complete", GraphKind::Complete}, {"ring", GraphKind::Ring},
    {"cycle", GraphKind::Cycle},       {"random", GraphKind::Random},
    {"matrix", GraphKind::Matrix},     {"edges", GraphKind::Edges}};
const std::vector<std::pair<std::string, ScheduleKind>> kScheduleKinds = {
    {"constant", ScheduleKind::Constant},
    {"sequence", ScheduleKind::Sequence},
    {"random", ScheduleKind::Random}};
const std::vector<std::pair<std::string, Method>> kMethods = {{"rk4", Method::RK4},
                                                              {"euler", Method::Euler}};

template <class E>
std::string name_of(const std::vector<std::pair<std::string, E>>& options, E value) {
  for (const auto& [name, v] : options) {
    if (v == value) return name;
  }
  return "?";
}

void parse_init(Reader& rd, const YAML::Node& n, InitSpec& init) {
  const std::string sec = "init";
  if (!rd.expect_map(n, sec)) return;
  rd.check_keys(n, sec,
                {"kind", "chi", "winding", "phase", "noise", "angles", "matrices", "path"});
  if (auto k = choose(rd, n, "kind", sec, kInitKinds)) init.kind = *k;
  init.chi = rd.number(n, "chi", sec);
  if (auto w = rd.integer(n, "winding", sec)) init.winding = static_cast<int>(*w);
  if (auto v = rd.number(n, "phase", sec)) init.phase = *v;
  if (auto v = rd.number(n, "noise", sec)) init.noise = *v;
  if (n["angles"]) {
    if (auto v = rd.numbers(n["angles"], "init.angles")) init.angles = *v;
  }
  if (n["matrices"]) {
    if (auto v = rd.rows(n["matrices"], "init.matrices")) init.matrices = *v;
  }
  if (auto v = rd.string(n, "path", sec)) init.path = *v;
}

void parse_estimators(Reader& rd, const YAML::Node& n, EstimatorSpec& est) {
  const std::string sec = "estimators";
  if (!rd.expect_map(n, sec)) return;
  rd.check_keys(n, sec, {"kind", "values"});
  if (auto k = choose(rd, n, "kind", sec, kEstimatorKinds)) est.kind = *k;
  if (n["values"]) {
    if (auto v = rd.rows(n["values"], "estimators.values")) est.values = *v;
  }
}

void parse_graph(Reader& rd, const std::string& name, const YAML::Node& n,
                 GraphSpec& g) {
  const std::string sec = "graphs." + name;
  g.name = name;
  g.line = Reader::line_of(n);
  if (!rd.expect_map(n, sec)) return;
  rd.check_keys(n, sec, {"kind", "weight", "p", "seed", "weights", "edges", "undirected"});
  if (auto k = choose(rd, n, "kind", sec, kGraphKinds)) g.kind = *k;
  if (auto v = rd.number(n, "weight", sec)) g.weight = *v;
  if (auto v = rd.number(n, "p", sec)) g.p = *v;
  g.seed = rd.seed(n, "seed", sec);
  if (n["weights"]) {
    if (auto v = rd.rows(n["weights"], sec + ".weights")) g.weights = *v;
  }
  if (n["edges"]) {
    if (auto v = rd.rows(n["edges"], sec + ".edges")) {
      for (const auto& e : *v) {
        if (e.size() != 2 || e[0] != std::floor(e[0]) || e[1] != std::floor(e[1])) {
          rd.issue(n["edges"], sec + ".edges entries must be [from, to] index pairs");
          break;
        }
        g.edges.emplace_back(static_cast<int>(e[0]), static_cast<int>(e[1]));
      }
    }
  }
  if (auto v = rd.boolean(n, "undirected", sec)) g.undirected = *v;
}

void parse_schedule(Reader& rd, const YAML::Node& n, ScheduleSpec& s) {
  const std::string sec = "schedule";
  s.line = Reader::line_of(n);
  if (!rd.expect_map(n, sec)) return;
  rd.check_keys(n, sec,
                {"kind", "graph", "sequence", "periodic", "delta", "horizon", "p", "t_min",
                 "t_max", "seed"});
  if (n["kind"]) {
    if (auto k = choose(rd, n, "kind", sec, kScheduleKinds)) s.kind = *k;
  } else if (n["sequence"]) {
    s.kind = ScheduleKind::Sequence;
  }
  if (auto v = rd.string(n, "graph", sec)) s.graph = *v;
  if (const YAML::Node seq = n["sequence"]) {
    if (!seq.IsSequence()) {
      rd.issue(seq, "schedule.sequence must be a list of [graph, duration] pairs");
    } else {
      for (const auto& item : seq) {
        try {
          if (!item.IsSequence() || item.size() != 2) throw YAML::Exception(item.Mark(), "");
          s.sequence.emplace_back(item[0].as<std::string>(), item[1].as<double>());
        } catch (const YAML::Exception&) {
          rd.issue(item, "schedule.sequence entries must be [graph, duration]");
        }
      }
    }
  }
  if (auto v = rd.boolean(n, "periodic", sec)) s.periodic = *v;
  if (auto v = rd.number(n, "delta", sec)) s.delta = *v;
  s.horizon = rd.number(n, "horizon", sec);
  if (auto v = rd.number(n, "p", sec)) s.p = *v;
  if (auto v = rd.number(n, "t_min", sec)) s.t_min = *v;
  if (auto v = rd.number(n, "t_max", sec)) s.t_max = *v;
  s.seed = rd.seed(n, "seed", sec);
}

void parse_flow(Reader& rd, const YAML::Node& n, FlowSpec& flow, int& line) {
  const std::string sec = "flow";
  line = Reader::line_of(n);
  if (!rd.expect_map(n, sec)) return;
  const std::string kind = rd.string(n, "kind", sec).value_or("gradient");
  if (kind == "gradient") {
    rd.check_keys(n, sec + " (gradient)", {"kind", "alpha"});
    flow = GradientFlow{rd.number(n, "alpha", sec).value_or(1.0)};
  } else if (kind == "estimator_sync") {
    rd.check_keys(n, sec + " (estimator_sync)", {"kind", "beta", "gamma_s"});
    flow = EstimatorSync{rd.number(n, "beta", sec).value_or(1.0),
                         rd.number(n, "gamma_s", sec).value_or(1.0)};
  } else if (kind == "estimator_anti") {
    rd.check_keys(n, sec + " (estimator_anti)", {"kind", "beta", "gamma_b"});
    flow = EstimatorAntiConsensus{rd.number(n, "beta", sec).value_or(1.0),
                                  rd.number(n, "gamma_b", sec).value_or(-1.0)};
  } else if (kind == "local_frame_son") {
    rd.check_keys(n, sec + " (local_frame_son)", {"kind", "beta", "gamma_s"});
    flow = LocalFrameSOnSync{rd.number(n, "beta", sec).value_or(1.0),
                             rd.number(n, "gamma_s", sec).value_or(1.0)};
  } else if (kind == "vicsek") {
    rd.check_keys(n, sec + " (vicsek)", {"kind"});
    flow = VicsekDiscrete{};
  } else {
    rd.issue(n["kind"], "flow.kind must be one of: gradient, estimator_sync, "
                        "estimator_anti, local_frame_son, vicsek");
  }
}

void parse_integrator(Reader& rd, const YAML::Node& n, Scenario& s) {
  const std::string sec = "integrator";
  if (!rd.expect_map(n, sec)) return;
  rd.check_keys(n, sec, {"h", "t_start", "t_end", "method", "log_stride", "keep_states"});
  IntegratorConfig& c = s.integrator;
  if (auto v = rd.number(n, "h", sec)) c.h = *v;
  s.t_start = rd.number(n, "t_start", sec);
  if (auto v = rd.number(n, "t_end", sec)) c.t_end = *v;
  if (auto m = choose(rd, n, "method", sec, kMethods)) c.method = *m;
  if (auto v = rd.integer(n, "log_stride", sec)) c.log_stride = static_cast<int>(*v);
  if (auto v = rd.boolean(n, "keep_states", sec)) c.keep_states = *v;
}

void parse_tolerances(Reader& rd, const YAML::Node& n, Tolerances& t) {
  const std::string sec = "tolerances";
  if (!rd.expect_map(n, sec)) return;
  rd.check_keys(n, sec, {"sync", "predicate", "drift"});
  if (auto v = rd.number(n, "sync", sec)) t.sync = *v;
  if (auto v = rd.number(n, "predicate", sec)) t.predicate = *v;
  if (auto v = rd.number(n, "drift", sec)) t.drift = *v;
}

// ------------------------------------------------------------- validation

struct Lines {
  int manifold = 0, agents = 0, init = 0, estimators = 0, flow = 0, integrator = 0,
      tolerances = 0;
};

double sequence_length(const ScheduleSpec& s) {
  double total = 0.0;
  for (const auto& [g, d] : s.sequence) total += d;
  return total;
}

void validate(const Scenario& s, const Lines& at, std::vector<Issue>& issues) {
  auto add = [&](int line, std::string msg) { issues.push_back({line, std::move(msg)}); };
  const int n = s.agents;
  if (n < 1) {
    add(at.agents, "agents must be at least 1");
    return;
  }
  const ManifoldDescriptor& d = s.manifold;
  std::ostringstream nstr;
  nstr << "agents = " << n << " (line " << at.agents << ")";

  // init
  const InitSpec& in = s.init;
  if (in.kind == InitKind::Ring) {
    if (d.kind != ManifoldKind::Circle) add(at.init, "init.kind ring needs the circle");
    if (!in.chi && !in.winding) add(at.init, "init.kind ring needs chi or winding");
    if (in.chi && in.winding) add(at.init, "init: give chi or winding, not both");
    if (in.noise < 0.0) add(at.init, "init.noise must be non-negative");
  }
  if (in.kind == InitKind::Explicit) {
    if (d.kind == ManifoldKind::Circle && in.matrices.empty()) {
      if (static_cast<int>(in.angles.size()) != n) {
        std::ostringstream msg;
        msg << "init.angles has " << in.angles.size() << " entries but " << nstr.str();
        add(at.init, msg.str());
      }
    } else {
      if (static_cast<int>(in.matrices.size()) != n) {
        std::ostringstream msg;
        msg << "init.matrices has " << in.matrices.size() << " entries but " << nstr.str();
        add(at.init, msg.str());
      }
      for (const auto& m : in.matrices) {
        if (static_cast<int>(m.size()) != d.embedding_dim()) {
          std::ostringstream msg;
          msg << "init.matrices entries need " << d.embedding_dim() << " values for "
              << d.name() << ", got " << m.size();
          add(at.init, msg.str());
          break;
        }
      }
    }
  }
  if (in.kind == InitKind::File && in.path.empty()) add(at.init, "init.kind file needs a path");

  // estimators
  if (s.estimators.kind == EstimatorInitKind::Explicit) {
    if (static_cast<int>(s.estimators.values.size()) != n) {
      std::ostringstream msg;
      msg << "estimators.values has " << s.estimators.values.size() << " entries but "
          << nstr.str();
      add(at.estimators, msg.str());
    }
    for (const auto& v : s.estimators.values) {
      if (static_cast<int>(v.size()) != d.embedding_dim()) {
        add(at.estimators, "estimators.values entries must have the embedding dimension");
        break;
      }
    }
  }

  // graphs
  std::set<std::string> names;
  double min_weight = std::numeric_limits<double>::infinity();
  for (const GraphSpec& g : s.graphs) {
    names.insert(g.name);
    const std::string what = "graph '" + g.name + "'";
    if (!(g.weight > 0.0)) add(g.line, what + ": weight must be positive");
    switch (g.kind) {
      case GraphKind::Random:
        if (!(g.p >= 0.0 && g.p <= 1.0)) add(g.line, what + ": p must lie in [0, 1]");
        break;
      case GraphKind::Matrix: {
        bool square = static_cast<int>(g.weights.size()) == n;
        for (const auto& row : g.weights) square = square && static_cast<int>(row.size()) == n;
        if (!square) {
          std::ostringstream msg;
          msg << what << " has a " << g.weights.size() << "-row weight matrix but "
              << nstr.str();
          add(g.line, msg.str());
        }
        for (std::size_t r = 0; r < g.weights.size(); ++r) {
          for (std::size_t c = 0; c < g.weights[r].size(); ++c) {
            const double w = g.weights[r][c];
            if (!(w >= 0.0) || (r == c && w != 0.0)) {
              add(g.line, what + ": weights must be non-negative with a zero diagonal");
              r = g.weights.size();
              break;
            }
            if (w > 0.0) min_weight = std::min(min_weight, w);
          }
        }
        break;
      }
      case GraphKind::Edges:
        for (const auto& [a, b] : g.edges) {
          if (a < 0 || b < 0 || a >= n || b >= n || a == b) {
            std::ostringstream msg;
            msg << what << ": edge [" << a << ", " << b << "] is not valid for "
                << nstr.str();
            add(g.line, msg.str());
            break;
          }
        }
        break;
      default:
        break;
    }
    if (g.kind != GraphKind::Matrix) min_weight = std::min(min_weight, g.weight);
  }

  // schedule
  const ScheduleSpec& sc = s.schedule;
  if (sc.kind == ScheduleKind::Constant) {
    if (sc.graph.empty() && s.graphs.size() != 1) {
      add(sc.line, "schedule.graph is required unless exactly one graph is defined");
    } else if (!sc.graph.empty() && !names.count(sc.graph)) {
      add(sc.line, "schedule.graph '" + sc.graph + "' is not defined under graphs");
    }
  } else if (sc.kind == ScheduleKind::Sequence) {
    if (sc.sequence.empty()) add(sc.line, "schedule.sequence is empty");
    for (const auto& [g, dur] : sc.sequence) {
      if (!names.count(g)) add(sc.line, "schedule.sequence names undefined graph '" + g + "'");
      if (!(dur > 0.0)) add(sc.line, "schedule.sequence durations must be positive");
    }
  } else {
    if (!(sc.p >= 0.0 && sc.p <= 1.0)) add(sc.line, "schedule.p must lie in [0, 1]");
    if (!(sc.t_min > 0.0 && sc.t_max >= sc.t_min)) {
      add(sc.line, "schedule needs 0 < t_min <= t_max");
    }
  }
  if (!(sc.delta > 0.0)) add(sc.line, "schedule.delta must be positive");
  if (sc.delta > min_weight && sc.kind != ScheduleKind::Random) {
    std::ostringstream msg;
    msg << "schedule.delta = " << sc.delta << " exceeds the smallest edge weight "
        << min_weight;
    add(sc.line, msg.str());
  }
  if (sc.horizon && !(*sc.horizon > 0.0)) add(sc.line, "schedule.horizon must be positive");

  // flow
  try {
    validate_flow(s.flow);
  } catch (const Error& e) {
    add(at.flow, e.what());
  }
  if (std::holds_alternative<LocalFrameSOnSync>(s.flow) &&
      d.kind != ManifoldKind::SpecialOrthogonal) {
    add(at.flow, "flow local_frame_son needs manifold so(n), not " + d.name());
  }

  // integrator
  const IntegratorConfig& c = s.integrator;
  if (!(c.h > 0.0)) add(at.integrator, "integrator.h must be positive");
  if (c.log_stride < 1) add(at.integrator, "integrator.log_stride must be at least 1");
  const double t0 = s.t_start.value_or(0.0);
  if (!(c.t_end - t0 >= c.h)) {
    add(at.integrator, "integrator.t_end must be at least one step after the start");
  }
  if (sc.kind == ScheduleKind::Sequence && !sc.periodic && !sc.sequence.empty() &&
      c.t_end > sequence_length(sc)) {
    std::ostringstream msg;
    msg << "schedule covers [0, " << sequence_length(sc) << "] but integrator.t_end = "
        << c.t_end << " (line " << at.integrator << ")";
    add(sc.line, msg.str());
  }
  if (!(s.tolerances.sync > 0.0 && s.tolerances.predicate > 0.0 &&
        s.tolerances.drift > 0.0)) {
    add(at.tolerances, "tolerances must be positive");
  }
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ScenarioError({{e.mark.line + 1, "YAML syntax error: " + e.msg}});
  }
  Reader rd;
  Scenario s;
  s.base_dir = base_dir;
  if (!root.IsMap()) throw ScenarioError({{1, "a scenario must be a YAML mapping"}});
  rd.check_keys(root, "the scenario",
                {"name", "description", "manifold", "agents", "seed", "init", "estimators",
                 "graphs", "schedule", "flow", "integrator", "tolerances", "output"});
  Lines at;
  s.name = rd.string(root, "name", "scenario").value_or("scenario");
  s.description = rd.string(root, "description", "scenario").value_or("");
  if (root["manifold"]) {
    at.manifold = Reader::line_of(root["manifold"]);
    if (auto m = rd.string(root, "manifold", "scenario")) {
      try {
        s.manifold = parse_manifold(*m);
      } catch (const Error& e) {
        rd.issue(root["manifold"], e.what());
      }
    }
  } else {
    rd.issues.push_back({0, "missing required key 'manifold'"});
  }
  if (root["agents"]) {
    at.agents = Reader::line_of(root["agents"]);
    if (auto v = rd.integer(root, "agents", "scenario")) s.agents = static_cast<int>(*v);
  } else {
    rd.issues.push_back({0, "missing required key 'agents'"});
  }
  if (auto v = rd.seed(root, "seed", "scenario")) s.seed = *v;
  if (const YAML::Node n = root["init"]) {
    at.init = Reader::line_of(n);
    parse_init(rd, n, s.init);
  }
  if (const YAML::Node n = root["estimators"]) {
    at.estimators = Reader::line_of(n);
    parse_estimators(rd, n, s.estimators);
  }
  if (const YAML::Node n = root["graphs"]) {
    if (rd.expect_map(n, "graphs")) {
      for (const auto& kv : n) {
        GraphSpec g;
        parse_graph(rd, kv.first.as<std::string>(), kv.second, g);
        s.graphs.push_back(std::move(g));
      }
    }
  }
  if (s.graphs.empty()) rd.issues.push_back({0, "at least one graph must be defined"});
  if (const YAML::Node n = root["schedule"]) parse_schedule(rd, n, s.schedule);
  if (const YAML::Node n = root["flow"]) {
    parse_flow(rd, n, s.flow, at.flow);
  } else {
    rd.issues.push_back({0, "missing required section 'flow'"});
  }
  if (const YAML::Node n = root["integrator"]) {
    at.integrator = Reader::line_of(n);
    parse_integrator(rd, n, s);
  }
  if (const YAML::Node n = root["tolerances"]) {
    at.tolerances = Reader::line_of(n);
    parse_tolerances(rd, n, s.tolerances);
  }
  if (const YAML::Node n = root["output"]) {
    if (rd.expect_map(n, "output")) {
      rd.check_keys(n, "output", {"dir"});
      s.output_dir = rd.string(n, "dir", "output").value_or("");
    }
  }
  if (s.output_dir.empty()) s.output_dir = "out/" + s.name;
  if (!rd.issues.empty()) throw ScenarioError(std::move(rd.issues));

  std::vector<Issue> issues;
  validate(s, at, issues);
  if (!issues.empty()) throw ScenarioError(std::move(issues));
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read scenario file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::filesystem::path p(path);
  return parse_scenario(buf.str(), p.has_parent_path() ? p.parent_path().string() : ".");
}

// ---------------------------------------------------------------- emitting

namespace {

std::string num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  // Keep integral values recognizably floating for readers.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

void emit_numbers(YAML::Emitter& out, const std::vector<double>& v) {
  out << YAML::Flow << YAML::BeginSeq;
  for (double x : v) out << num(x);
  out << YAML::EndSeq;
}

void emit_rows(YAML::Emitter& out, const std::vector<std::vector<double>>& rows) {
  out << YAML::BeginSeq;
  for (const auto& r : rows) emit_numbers(out, r);
  out << YAML::EndSeq;
}

}  // namespace

std::string to_text(const Scenario& s) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << s.name;
  if (!s.description.empty()) {
    out << YAML::Key << "description" << YAML::Value << s.description;
  }
  out << YAML::Key << "manifold" << YAML::Value << s.manifold.name();
  out << YAML::Key << "agents" << YAML::Value << s.agents;
  out << YAML::Key << "seed" << YAML::Value << s.seed;

  const InitSpec& in = s.init;
  out << YAML::Key << "init" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << name_of(kInitKinds, in.kind);
  if (in.chi) out << YAML::Key << "chi" << YAML::Value << num(*in.chi);
  if (in.winding) out << YAML::Key << "winding" << YAML::Value << *in.winding;
  if (in.phase != 0.0) out << YAML::Key << "phase" << YAML::Value << num(in.phase);
  if (in.noise != 0.0) out << YAML::Key << "noise" << YAML::Value << num(in.noise);
  if (!in.angles.empty()) {
    out << YAML::Key << "angles" << YAML::Value;
    emit_numbers(out, in.angles);
  }
  if (!in.matrices.empty()) {
    out << YAML::Key << "matrices" << YAML::Value;
    emit_rows(out, in.matrices);
  }
  if (!in.path.empty()) out << YAML::Key << "path" << YAML::Value << in.path;
  out << YAML::EndMap;

  if (s.estimators.kind != EstimatorInitKind::Auto) {
    out << YAML::Key << "estimators" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "kind" << YAML::Value
        << name_of(kEstimatorKinds, s.estimators.kind);
    if (!s.estimators.values.empty()) {
      out << YAML::Key << "values" << YAML::Value;
      emit_rows(out, s.estimators.values);
    }
    out << YAML::EndMap;
  }

  out << YAML::Key << "graphs" << YAML::Value << YAML::BeginMap;
  for (const GraphSpec& g : s.graphs) {
    out << YAML::Key << g.name << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "kind" << YAML::Value << name_of(kGraphKinds, g.kind);
    if (g.weight != 1.0) out << YAML::Key << "weight" << YAML::Value << num(g.weight);
    if (g.kind == GraphKind::Random) {
      out << YAML::Key << "p" << YAML::Value << num(g.p);
    }
    if (g.seed) out << YAML::Key << "seed" << YAML::Value << *g.seed;
    if (!g.weights.empty()) {
      out << YAML::Key << "weights" << YAML::Value;
      emit_rows(out, g.weights);
    }
    if (!g.edges.empty()) {
      out << YAML::Key << "edges" << YAML::Value << YAML::Flow << YAML::BeginSeq;
      for (const auto& [a, b] : g.edges) {
        out << YAML::Flow << YAML::BeginSeq << a << b << YAML::EndSeq;
      }
      out << YAML::EndSeq;
    }
    if (g.undirected) out << YAML::Key << "undirected" << YAML::Value << true;
    out << YAML::EndMap;
  }
  out << YAML::EndMap;

  const ScheduleSpec& sc = s.schedule;
  out << YAML::Key << "schedule" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << name_of(kScheduleKinds, sc.kind);
  if (!sc.graph.empty()) out << YAML::Key << "graph" << YAML::Value << sc.graph;
  if (!sc.sequence.empty()) {
    out << YAML::Key << "sequence" << YAML::Value << YAML::BeginSeq;
    for (const auto& [g, d] : sc.sequence) {
      out << YAML::Flow << YAML::BeginSeq << g << num(d) << YAML::EndSeq;
    }
    out << YAML::EndSeq;
  }
  if (sc.periodic) out << YAML::Key << "periodic" << YAML::Value << true;
  out << YAML::Key << "delta" << YAML::Value << num(sc.delta);
  if (sc.horizon) out << YAML::Key << "horizon" << YAML::Value << num(*sc.horizon);
  if (sc.kind == ScheduleKind::Random) {
    out << YAML::Key << "p" << YAML::Value << num(sc.p);
    out << YAML::Key << "t_min" << YAML::Value << num(sc.t_min);
    out << YAML::Key << "t_max" << YAML::Value << num(sc.t_max);
  }
  if (sc.seed) out << YAML::Key << "seed" << YAML::Value << *sc.seed;
  out << YAML::EndMap;

  out << YAML::Key << "flow" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << flow_name(s.flow);
  std::visit(
      [&](const auto& f) {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, GradientFlow>) {
          out << YAML::Key << "alpha" << YAML::Value << num(f.alpha);
        } else if constexpr (std::is_same_v<F, EstimatorSync> ||
                             std::is_same_v<F, LocalFrameSOnSync>) {
          out << YAML::Key << "beta" << YAML::Value << num(f.beta);
          out << YAML::Key << "gamma_s" << YAML::Value << num(f.gamma_s);
        } else if constexpr (std::is_same_v<F, EstimatorAntiConsensus>) {
          out << YAML::Key << "beta" << YAML::Value << num(f.beta);
          out << YAML::Key << "gamma_b" << YAML::Value << num(f.gamma_b);
        }
      },
      s.flow);
  out << YAML::EndMap;

  const IntegratorConfig& c = s.integrator;
  out << YAML::Key << "integrator" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "h" << YAML::Value << num(c.h);
  if (s.t_start) out << YAML::Key << "t_start" << YAML::Value << num(*s.t_start);
  out << YAML::Key << "t_end" << YAML::Value << num(c.t_end);
  out << YAML::Key << "method" << YAML::Value << name_of(kMethods, c.method);
  out << YAML::Key << "log_stride" << YAML::Value << c.log_stride;
  if (!c.keep_states) out << YAML::Key << "keep_states" << YAML::Value << false;
  out << YAML::EndMap;

  out << YAML::Key << "tolerances" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "sync" << YAML::Value << num(s.tolerances.sync);
  out << YAML::Key << "predicate" << YAML::Value << num(s.tolerances.predicate);
  out << YAML::Key << "drift" << YAML::Value << num(s.tolerances.drift);
  out << YAML::EndMap;

  out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "dir" << YAML::Value << s.output_dir;
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

// ---------------------------------------------------------------- building

namespace {

constexpr std::uint64_t kEstimatorSeedOffset = 1;
constexpr std::uint64_t kGraphSeedOffset = 1000;
constexpr std::uint64_t kScheduleSeedOffset = 2000;

Eigen::MatrixXd row_major(const ManifoldDescriptor& d, const std::vector<double>& v) {
  return unflatten(d, Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()));
}

}  // namespace

WeightedDigraph build_graph(const Scenario& s, const GraphSpec& g) {
  const int n = s.agents;
  switch (g.kind) {
    case GraphKind::Complete: return complete_graph(n, g.weight);
    case GraphKind::Ring: return ring_graph(n, g.weight);
    case GraphKind::Cycle: return directed_cycle(n, g.weight);
    case GraphKind::Random: {
      std::uint64_t index = 0;
      for (const GraphSpec& other : s.graphs) {
        if (other.name == g.name) break;
        ++index;
      }
      const std::uint64_t seed = g.seed.value_or(s.seed + kGraphSeedOffset + index);
      return WeightedDigraph(g.weight * random_digraph(n, g.p, seed).weights());
    }
    case GraphKind::Matrix: {
      Eigen::MatrixXd a(n, n);
      for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) a(r, c) = g.weights.at(r).at(c);
      }
      return WeightedDigraph(std::move(a));
    }
    case GraphKind::Edges: {
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
      for (const auto& [from, to] : g.edges) {
        a(from, to) = g.weight;
        if (g.undirected) a(to, from) = g.weight;
      }
      return WeightedDigraph(std::move(a));
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown graph kind");
}

GraphSchedule build_schedule(const Scenario& s) {
  const ScheduleSpec& sc = s.schedule;
  auto graph_named = [&](const std::string& name) {
    for (const GraphSpec& g : s.graphs) {
      if (g.name == name) return build_graph(s, g);
    }
    throw Error(ErrorCode::Validation, "graph '" + name + "' is not defined");
  };
  std::vector<GraphSchedule::Segment> segs;
  if (sc.kind == ScheduleKind::Constant) {
    const std::string name = sc.graph.empty() ? s.graphs.front().name : sc.graph;
    segs.push_back({0.0, graph_named(name)});
    return GraphSchedule(std::move(segs), sc.delta, sc.horizon.value_or(1.0));
  }
  if (sc.kind == ScheduleKind::Sequence) {
    double t = 0.0;
    for (const auto& [name, dur] : sc.sequence) {
      segs.push_back({t, graph_named(name)});
      t += dur;
    }
    return GraphSchedule(std::move(segs), sc.delta, sc.horizon.value_or(t), t, sc.periodic);
  }
  // Random switching, generated until the integration window is covered.
  std::mt19937_64 rng(sc.seed.value_or(s.seed + kScheduleSeedOffset));
  std::uniform_real_distribution<double> dwell(sc.t_min, sc.t_max);
  std::bernoulli_distribution coin(sc.p);
  const int n = s.agents;
  double t = 0.0;
  while (t < s.integrator.t_end || segs.empty()) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        if (j != k && coin(rng)) a(j, k) = 1.0;
      }
    }
    segs.push_back({t, WeightedDigraph(std::move(a))});
    t += sc.t_max > sc.t_min ? dwell(rng) : sc.t_min;
  }
  return GraphSchedule(std::move(segs), std::min(sc.delta, 1.0),
                       sc.horizon.value_or(sc.t_max), t, false);
}

InitialState build_initial_state(const Scenario& s) {
  const ManifoldDescriptor& d = s.manifold;
  const int n = s.agents;
  InitialState out{SwarmState{d, {}, std::nullopt}, 0.0, false};
  std::vector<ManifoldPoint>& pos = out.state.positions;
  const InitSpec& in = s.init;
  switch (in.kind) {
    case InitKind::Random: {
      std::mt19937_64 rng(s.seed);
      for (int k = 0; k < n; ++k) pos.push_back(random_point(d, rng));
      break;
    }
    case InitKind::Ring: {
      std::mt19937_64 rng(s.seed);
      std::normal_distribution<double> gauss(0.0, 1.0);
      const double chi =
          in.winding ? 2.0 * std::numbers::pi * *in.winding / n : in.chi.value_or(0.0);
      for (int k = 0; k < n; ++k) {
        const double jitter = in.noise > 0.0 ? in.noise * gauss(rng) : 0.0;
        pos.push_back(ManifoldPoint::from_angle(in.phase + k * chi + jitter));
      }
      break;
    }
    case InitKind::Explicit:
      if (d.kind == ManifoldKind::Circle && in.matrices.empty()) {
        for (double a : in.angles) pos.push_back(ManifoldPoint::from_angle(a));
      } else {
        for (const auto& m : in.matrices) pos.emplace_back(d, row_major(d, m));
      }
      break;
    case InitKind::File: {
      std::filesystem::path p(in.path);
      if (p.is_relative()) p = std::filesystem::path(s.base_dir) / p;
      SavedState saved = read_final_state(p.string());
      if (saved.state.descriptor != d || saved.state.size() != n) {
        std::ostringstream msg;
        msg << "init file holds " << saved.state.size() << " agents on "
            << saved.state.descriptor.name() << " but the scenario has agents = " << n
            << " on " << d.name();
        throw ScenarioError({{0, msg.str()}});
      }
      out.state = std::move(saved.state);
      out.time = saved.time;
      out.resumed = true;
      break;
    }
  }

  const EstimatorSpec& est = s.estimators;
  const bool wants_estimators = std::holds_alternative<EstimatorSync>(s.flow) ||
                                std::holds_alternative<EstimatorAntiConsensus>(s.flow) ||
                                std::holds_alternative<LocalFrameSOnSync>(s.flow);
  switch (est.kind) {
    case EstimatorInitKind::Auto:
      if (out.resumed || !wants_estimators) break;
      if (std::holds_alternative<EstimatorAntiConsensus>(s.flow)) {
        std::vector<Eigen::MatrixXd> x;
        for (const auto& y : out.state.positions) x.push_back(y.matrix());
        out.state.estimators = std::move(x);
      } else {
        out.state.estimators = random_estimators(d, n, s.seed + kEstimatorSeedOffset);
      }
      break;
    case EstimatorInitKind::Random:
      out.state.estimators = random_estimators(d, n, s.seed + kEstimatorSeedOffset);
      break;
    case EstimatorInitKind::Positions: {
      std::vector<Eigen::MatrixXd> x;
      for (const auto& y : out.state.positions) x.push_back(y.matrix());
      out.state.estimators = std::move(x);
      break;
    }
    case EstimatorInitKind::Explicit: {
      std::vector<Eigen::MatrixXd> x;
      for (const auto& v : est.values) x.push_back(row_major(d, v));
      out.state.estimators = std::move(x);
      break;
    }
  }
  out.state.validate();
  return out;
}

// ------------------------------------------------------------- saved state

SavedState parse_final_state(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Io, std::string("final state is not valid JSON: ") + e.what());
  }
  try {
    const ManifoldDescriptor d = parse_manifold(j.at("manifold").get<std::string>());
    SavedState out{SwarmState{d, {}, std::nullopt}, j.at("time").get<double>(),
                   j.value("seed", std::uint64_t{0})};
    for (const auto& row : j.at("positions")) {
      const std::vector<double> v = row.get<std::vector<double>>();
      if (static_cast<int>(v.size()) != d.embedding_dim()) {
        throw Error(ErrorCode::DimensionMismatch, "saved position has the wrong size");
      }
      out.state.positions.emplace_back(d, row_major(d, v));
    }
    if (j.contains("estimators") && !j["estimators"].is_null()) {
      std::vector<Eigen::MatrixXd> x;
      for (const auto& row : j["estimators"]) {
        const std::vector<double> v = row.get<std::vector<double>>();
        if (static_cast<int>(v.size()) != d.embedding_dim()) {
          throw Error(ErrorCode::DimensionMismatch, "saved estimator has the wrong size");
        }
        x.push_back(row_major(d, v));
      }
      out.state.estimators = std::move(x);
    }
    out.state.validate();
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Io, std::string("malformed final state: ") + e.what());
  }
}

SavedState read_final_state(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read state file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_final_state(buf.str());
}

}  // namespace manisync

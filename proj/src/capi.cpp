#include "manisync/manisync.h"

#include <string>

#include "manisync/means.hpp"
#include "manisync/runner.hpp"
#include "manisync/scenario.hpp"

struct msync_scenario {
  manisync::Scenario scenario;
  std::string text;
};

struct msync_run {
  manisync::RunOutcome outcome;
};

namespace {

thread_local std::string last_error;

msync_status fail(msync_status code, std::string msg) {
  last_error = std::move(msg);
  return code;
}

msync_status status_of(manisync::ErrorCode code) {
  using manisync::ErrorCode;
  switch (code) {
    case ErrorCode::Validation:
    case ErrorCode::InsufficientCoverage:
    case ErrorCode::MissingEstimators:
    case ErrorCode::MissingRelativePosition:
      return MSYNC_ERR_VALIDATION;
    case ErrorCode::Io:
      return MSYNC_ERR_IO;
    case ErrorCode::Degenerate:
    case ErrorCode::RetractionFailure:
      return MSYNC_ERR_NUMERIC;
    default:
      return MSYNC_ERR_INVALID_ARGUMENT;
  }
}

template <class F>
msync_status guarded(F&& f) {
  try {
    last_error.clear();
    return f();
  } catch (const manisync::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::exception& e) {
    return fail(MSYNC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(MSYNC_ERR_INTERNAL, "unknown failure");
  }
}

msync_status wrap(manisync::Scenario s, msync_scenario** out) {
  if (!out) return fail(MSYNC_ERR_INVALID_ARGUMENT, "output pointer is null");
  *out = new msync_scenario{std::move(s), {}};
  return MSYNC_OK;
}

// Applies an override and re-validates through the text form.
template <class F>
msync_status override_with(msync_scenario* sc, F&& f) {
  if (!sc) return fail(MSYNC_ERR_INVALID_ARGUMENT, "scenario handle is null");
  return guarded([&] {
    manisync::Scenario copy = sc->scenario;
    f(copy);
    manisync::Scenario checked =
        manisync::parse_scenario(manisync::to_text(copy), copy.base_dir);
    sc->scenario = std::move(checked);
    return MSYNC_OK;
  });
}

}  // namespace

extern "C" {

const char* msync_version(void) { return "1.0.0"; }

const char* msync_last_error(void) { return last_error.c_str(); }

msync_status msync_scenario_parse(const char* text, msync_scenario** out) {
  if (!text) return fail(MSYNC_ERR_INVALID_ARGUMENT, "scenario text is null");
  return guarded([&] { return wrap(manisync::parse_scenario(text), out); });
}

msync_status msync_scenario_load(const char* path, msync_scenario** out) {
  if (!path) return fail(MSYNC_ERR_INVALID_ARGUMENT, "path is null");
  return guarded([&] { return wrap(manisync::load_scenario(path), out); });
}

msync_status msync_scenario_from_preset(const char* name, msync_scenario** out) {
  if (!name) return fail(MSYNC_ERR_INVALID_ARGUMENT, "preset name is null");
  for (const auto& p : manisync::presets()) {
    if (p.name == name) {
      return guarded([&] { return wrap(manisync::parse_scenario(p.text), out); });
    }
  }
  return fail(MSYNC_ERR_NOT_FOUND, std::string("unknown preset '") + name + "'");
}

void msync_scenario_free(msync_scenario* sc) { delete sc; }

const char* msync_scenario_name(const msync_scenario* sc) {
  return sc ? sc->scenario.name.c_str() : nullptr;
}

const char* msync_scenario_description(const msync_scenario* sc) {
  return sc ? sc->scenario.description.c_str() : nullptr;
}

const char* msync_scenario_text(msync_scenario* sc) {
  if (!sc) return nullptr;
  sc->text = manisync::to_text(sc->scenario);
  return sc->text.c_str();
}

msync_status msync_scenario_set_seed(msync_scenario* sc, uint64_t seed) {
  return override_with(sc, [&](manisync::Scenario& s) { s.seed = seed; });
}

msync_status msync_scenario_set_step(msync_scenario* sc, double h) {
  return override_with(sc, [&](manisync::Scenario& s) { s.integrator.h = h; });
}

msync_status msync_scenario_set_log_stride(msync_scenario* sc, int stride) {
  return override_with(sc, [&](manisync::Scenario& s) { s.integrator.log_stride = stride; });
}

msync_status msync_scenario_set_output_dir(msync_scenario* sc, const char* dir) {
  if (!dir || !*dir) return fail(MSYNC_ERR_INVALID_ARGUMENT, "output directory is empty");
  return override_with(sc, [&](manisync::Scenario& s) { s.output_dir = dir; });
}

msync_status msync_run_scenario(const msync_scenario* sc, int write_files, msync_run** out) {
  if (!sc || !out) return fail(MSYNC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    manisync::RunOptions opts;
    opts.write_files = write_files != 0;
    *out = new msync_run{manisync::run_scenario(sc->scenario, opts)};
    return MSYNC_OK;
  });
}

void msync_run_free(msync_run* run) { delete run; }

int msync_run_exit_code(const msync_run* run) {
  return run ? run->outcome.exit_code : MSYNC_EXIT_VALIDATION;
}

const char* msync_run_summary(const msync_run* run) {
  return run ? run->outcome.summary_json.c_str() : nullptr;
}

const char* msync_run_output_dir(const msync_run* run) {
  return run ? run->outcome.output_dir.c_str() : nullptr;
}

size_t msync_run_record_count(const msync_run* run) {
  return run ? run->outcome.trajectory.metrics.size() : 0;
}

msync_status msync_run_record(const msync_run* run, size_t index, double* out) {
  if (!run || !out) return fail(MSYNC_ERR_INVALID_ARGUMENT, "null argument");
  const auto& m = run->outcome.trajectory.metrics;
  if (index >= m.size()) return fail(MSYNC_ERR_INVALID_ARGUMENT, "record index out of range");
  const manisync::MetricRecord& r = m[index];
  const double values[MSYNC_METRIC_COLUMNS] = {r.t, r.P_L, r.P, r.sync_error,
                                               r.W, r.centroid_norm, r.manifold_drift};
  for (int i = 0; i < MSYNC_METRIC_COLUMNS; ++i) out[i] = values[i];
  return MSYNC_OK;
}

size_t msync_preset_count(void) { return manisync::presets().size(); }

const char* msync_preset_name(size_t index) {
  const auto& p = manisync::presets();
  return index < p.size() ? p[index].name.c_str() : nullptr;
}

const char* msync_preset_text(size_t index) {
  const auto& p = manisync::presets();
  return index < p.size() ? p[index].text.c_str() : nullptr;
}

msync_status msync_iam(const char* manifold, const double* centroid, size_t len,
                       double* rep, int* unique, double* optimal_value) {
  if (!manifold || !centroid || !rep) return fail(MSYNC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const manisync::ManifoldDescriptor d = manisync::parse_manifold(manifold);
    if (len != static_cast<size_t>(d.embedding_dim())) {
      return fail(MSYNC_ERR_INVALID_ARGUMENT, "centroid length does not match the manifold");
    }
    const Eigen::Map<const Eigen::VectorXd> v(centroid, static_cast<Eigen::Index>(len));
    const manisync::MeanResult m = manisync::iam(d, manisync::unflatten(d, v));
    const Eigen::VectorXd r = manisync::embed(m.representative);
    for (Eigen::Index i = 0; i < r.size(); ++i) rep[i] = r(i);
    if (unique) *unique = m.unique ? 1 : 0;
    if (optimal_value) *optimal_value = m.optimal_value;
    return MSYNC_OK;
  });
}

}  // extern "C"

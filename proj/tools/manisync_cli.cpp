#include <atomic>
#include <cstdio>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "manisync/manisync.h"

namespace {

struct Overrides {
  std::optional<std::string> out;
  std::optional<uint64_t> seed;
  std::optional<double> step;
  std::optional<int> log_stride;
  int jobs = 1;
  int sweep = 0;
  bool quiet = false;
};

using ScenarioPtr = std::unique_ptr<msync_scenario, decltype(&msync_scenario_free)>;
using RunPtr = std::unique_ptr<msync_run, decltype(&msync_run_free)>;

struct Job {
  std::string label;
  ScenarioPtr scenario{nullptr, msync_scenario_free};
};

std::mutex io_mutex;

void report(const std::string& line, bool error = false) {
  std::lock_guard<std::mutex> lock(io_mutex);
  (error ? std::cerr : std::cout) << line << std::endl;
}

int exit_for(msync_status st) {
  return st == MSYNC_ERR_NUMERIC ? MSYNC_EXIT_ABORT : MSYNC_EXIT_VALIDATION;
}

// Opens one scenario per source and expands seed sweeps. Returns the exit code
// on failure.
int prepare(const std::vector<std::string>& sources, bool presets, const Overrides& o,
            std::vector<Job>& jobs) {
  const bool many = sources.size() > 1 || o.sweep > 1;
  for (const std::string& src : sources) {
    const int copies = o.sweep > 1 ? o.sweep : 1;
    for (int i = 0; i < copies; ++i) {
      msync_scenario* raw = nullptr;
      const msync_status st = presets ? msync_scenario_from_preset(src.c_str(), &raw)
                                      : msync_scenario_load(src.c_str(), &raw);
      if (st != MSYNC_OK) {
        report(src + ": " + msync_last_error(), true);
        return MSYNC_EXIT_VALIDATION;
      }
      Job job;
      job.scenario.reset(raw);
      std::string name = msync_scenario_name(raw);
      std::string dir = o.out ? *o.out : "out";
      if (!o.out || many) dir += "/" + name;
      job.label = name;

      msync_status ov = MSYNC_OK;
      if (o.seed || o.sweep > 1) {
        const uint64_t base = o.seed.value_or(0);
        const uint64_t seed = base + static_cast<uint64_t>(i);
        ov = msync_scenario_set_seed(raw, seed);
        if (o.sweep > 1) {
          dir += "/seed_" + std::to_string(seed);
          job.label += " seed=" + std::to_string(seed);
        }
      }
      if (ov == MSYNC_OK && o.step) ov = msync_scenario_set_step(raw, *o.step);
      if (ov == MSYNC_OK && o.log_stride) ov = msync_scenario_set_log_stride(raw, *o.log_stride);
      if (ov == MSYNC_OK && (o.out || many)) ov = msync_scenario_set_output_dir(raw, dir.c_str());
      if (ov != MSYNC_OK) {
        report(src + ": " + msync_last_error(), true);
        return MSYNC_EXIT_VALIDATION;
      }
      jobs.push_back(std::move(job));
    }
  }
  return MSYNC_EXIT_OK;
}

int execute(std::vector<Job>& jobs, const Overrides& o) {
  std::atomic<std::size_t> next{0};
  std::atomic<int> worst{MSYNC_EXIT_OK};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      Job& job = jobs[i];
      msync_run* raw = nullptr;
      const msync_status st = msync_run_scenario(job.scenario.get(), 1, &raw);
      int code = MSYNC_EXIT_OK;
      if (st != MSYNC_OK) {
        code = exit_for(st);
        report(job.label + ": " + msync_last_error(), true);
      } else {
        RunPtr run(raw, msync_run_free);
        code = msync_run_exit_code(run.get());
        if (code != MSYNC_EXIT_OK) {
          report(job.label + ": integration aborted, partial output in " +
                     msync_run_output_dir(run.get()),
                 true);
        } else if (!o.quiet) {
          report(job.label + ": wrote " + msync_run_output_dir(run.get()));
        }
      }
      int prev = worst.load();
      while (code > prev && !worst.compare_exchange_weak(prev, code)) {
      }
    }
  };
  const int n = std::max(1, std::min<int>(o.jobs, static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return worst.load();
}

void add_run_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-o,--out", o.out, "Output directory");
  cmd->add_option("--seed", o.seed, "Override the scenario seed");
  cmd->add_option("--step", o.step, "Override the integrator step size")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--log-stride", o.log_stride, "Log metrics every K steps")
      ->check(CLI::PositiveNumber);
  cmd->add_option("-j,--jobs", o.jobs, "Run independent scenarios in parallel")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--sweep", o.sweep, "Run K copies with seeds S, S+1, ... where S is --seed (default 0)")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("-q,--quiet", o.quiet, "Only report failures");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Consensus and synchronization on the circle, SO(n) and Grassmann manifolds"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(msync_version()));

  Overrides o;
  std::vector<std::string> files;
  auto* run = app.add_subcommand("run", "Run scenario files");
  run->add_option("files", files, "Scenario files (YAML)")->required()->check(CLI::ExistingFile);
  add_run_flags(run, o);

  std::vector<std::string> names;
  bool print = false;
  auto* preset = app.add_subcommand("preset", "Run built-in presets");
  preset->add_option("names", names, "Preset names (see 'list')")->required();
  preset->add_flag("--print", print, "Print the preset scenario instead of running it");
  add_run_flags(preset, o);

  auto* list = app.add_subcommand("list", "List built-in presets");

  std::vector<std::string> to_check;
  auto* validate = app.add_subcommand("validate", "Check scenario files without running");
  validate->add_option("files", to_check, "Scenario files (YAML)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : MSYNC_EXIT_VALIDATION;
  }

  if (*list) {
    for (size_t i = 0; i < msync_preset_count(); ++i) {
      msync_scenario* raw = nullptr;
      if (msync_scenario_from_preset(msync_preset_name(i), &raw) != MSYNC_OK) {
        report(std::string(msync_preset_name(i)) + ": " + msync_last_error(), true);
        return MSYNC_EXIT_VALIDATION;
      }
      ScenarioPtr sc(raw, msync_scenario_free);
      std::printf("%-30s %s\n", msync_scenario_name(raw), msync_scenario_description(raw));
    }
    return MSYNC_EXIT_OK;
  }

  if (*validate) {
    int code = MSYNC_EXIT_OK;
    for (const std::string& f : to_check) {
      msync_scenario* raw = nullptr;
      if (msync_scenario_load(f.c_str(), &raw) != MSYNC_OK) {
        report(f + ":\n" + msync_last_error(), true);
        code = MSYNC_EXIT_VALIDATION;
        continue;
      }
      msync_scenario_free(raw);
      report(f + ": ok");
    }
    return code;
  }

  if (*preset && print) {
    for (const std::string& n : names) {
      msync_scenario* raw = nullptr;
      if (msync_scenario_from_preset(n.c_str(), &raw) != MSYNC_OK) {
        report(n + ": " + msync_last_error(), true);
        return MSYNC_EXIT_VALIDATION;
      }
      ScenarioPtr sc(raw, msync_scenario_free);
      std::cout << msync_scenario_text(raw);
    }
    return MSYNC_EXIT_OK;
  }

  std::vector<Job> jobs;
  const bool from_presets = preset->parsed();
  if (int code = prepare(from_presets ? names : files, from_presets, o, jobs)) return code;
  return execute(jobs, o);
}

// Copyright 2026 The macromech Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Command-line front end: `macromech run <config.ini> [options]`.
//
// Exit codes: 0 success, 1 configuration error, 2 invariant violation,
// 3 numerical failure.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <exception>

#include "macromech/errors.hpp"
#include "macromech/experiment.hpp"

namespace {

enum ExitCode { kOk = 0, kConfig = 1, kInvariant = 2, kNumerical = 3 };

int fail(int code, const char* kind, const std::exception& e) {
  fmt::print(stderr, "macromech: {}: {}\n", kind, e.what());
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional mechanical-state engineering in cavity optomechanics"};
  app.set_version_flag("--version", macromech::version());
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  bool debug_invariants = false;
  int threads = 0;

  auto* run = app.add_subcommand("run", "Run the experiment described by an INI config");
  run->add_option("config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (created if missing)");
  run->add_option("--seed", seed, "Override the config seed");
  run->add_flag("--debug-invariants", debug_invariants, "Check physical invariants on every result");
  run->add_option("--threads", threads, "Worker threads (0: OpenMP default)")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    const auto config = macromech::load_config(config_path);
    macromech::RunOptions options;
    options.out_dir = out_dir;
    options.seed = seed;
    options.debug_invariants = debug_invariants;
    options.threads = threads;
    const auto result = macromech::run_experiment(config, options);
    for (const auto& p : result.outputs) fmt::print("{}\n", p.string());
    fmt::print("{}\n", result.manifest.string());
    return kOk;
  } catch (const macromech::ConfigError& e) {
    return fail(kConfig, "config error", e);
  } catch (const std::invalid_argument& e) {
    return fail(kConfig, "config error", e);
  } catch (const macromech::InvariantViolation& e) {
    return fail(kInvariant, "invariant violation", e);
  } catch (const macromech::NonConvergence& e) {
    return fail(kNumerical, fmt::format("no convergence (achieved error {:.3e})", e.achieved_error()).c_str(), e);
  } catch (const macromech::TruncationError& e) {
    return fail(kNumerical, fmt::format("truncation (suggested cutoff {})", e.suggested_cutoff()).c_str(), e);
  } catch (const std::exception& e) {
    return fail(kNumerical, "numerical error", e);
  }
}

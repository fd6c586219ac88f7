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

// Configuration-driven experiment runner behind the `macromech` CLI.
//
// Configs are INI files. Numeric values accept arithmetic with `pi` and the
// imaginary unit (`3*pi/4`, `1.24+1.24i`), comma-separated lists and
// inclusive ranges `start:stop:step`. See README.md for the key reference.

#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "macromech/conditioning.hpp"
#include "macromech/fidelity.hpp"
#include "macromech/subtraction.hpp"
#include "macromech/trajectories.hpp"

namespace macromech {

/// Library version reported in run manifests.
std::string version();

/// Evaluates a scalar expression such as `-3*pi/4` or `1.24+1.24i`.
Complex parse_complex(const std::string& text);
double parse_real(const std::string& text);

/// Comma-separated list whose items are expressions or inclusive ranges
/// `start:stop:step` (step > 0 for ascending, < 0 for descending).
std::vector<double> parse_real_list(const std::string& text);
std::vector<Complex> parse_complex_list(const std::string& text);

struct ExperimentConfig {
  std::string kind;
  std::string name;
  std::uint64_t seed = 0;
  SystemParams system;
  double cutoff_tol = 1e-10;

  std::string measurement = "homodyne";
  std::vector<double> x{0.0};
  std::vector<double> theta{0.0};
  std::vector<Complex> sigma;

  std::vector<double> sweep_k;
  std::vector<double> sweep_x;
  double crossing_proximity = 0.05;
  std::optional<double> fit_x;
  std::vector<double> fit_theta;

  Parity parity = Parity::kEven;
  LambdaSearch search;
  std::vector<double> simplified_mu;
  std::vector<double> simplified_lambda_re;
  double simplified_lambda_im = 0.0;

  NoiseParams noise;
  std::vector<double> kappa{0.0};
  int n_max = 0;  // 0: Poisson cutoff at 1e-12
  ThermalInit thermal;

  bool wigner = false;
  std::vector<double> wigner_re;
  std::vector<double> wigner_im;

  std::string table_path;  // resolved against the config directory
  std::vector<double> synthetic_delta;
  double squeeze_rate = 0.6;
  double nbar0 = 0.02;
  double heating = 0.08;

  // Raw section -> key -> value text, echoed into the run manifest.
  std::map<std::string, std::map<std::string, std::string>> raw;
};

/// Parses and validates; every failure is a ConfigError naming the field.
ExperimentConfig parse_config(std::istream& in, const std::string& default_name,
                              const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Measurement settings of a config: x-by-theta for homodyne, the sigma list
/// for heterodyne.
std::vector<MeasurementSetting> settings_of(const ExperimentConfig& config);

struct RunOptions {
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;
  bool debug_invariants = false;
  int threads = 0;  // 0: OpenMP default
};

struct RunResult {
  std::vector<std::filesystem::path> outputs;
  std::filesystem::path manifest;
};

/// Runs the experiment and writes `<name>.csv`, `<name>.manifest.json` and
/// any kind-specific extra tables into `out_dir`.
RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options);

/// Homodyne outcome at which the gap <b^dag b> - I is smallest.
///
/// The gap is scanned on `x_grid`; an interior grid minimum is refined with
/// Brent's method to better than 1e-6. Throws NonConvergence if the minimum
/// lies on the grid boundary or its gap relative to <b^dag b> exceeds
/// `proximity`.
double find_crossing(const SystemParams& params, double theta, std::span<const double> x_grid,
                     double proximity = 0.05, double cutoff_tol = 1e-10);

struct SinusoidFit {
  double a;  // offset
  double b;  // phase, in (-pi, pi]
  double c;  // amplitude, >= 0
  double rms;
};

/// Least-squares fit of a + c sin(theta + b), solved as the linear problem
/// a + p sin(theta) + q cos(theta) with c = hypot(p, q), b = atan2(q, p).
SinusoidFit fit_sinusoid(std::span<const double> theta, std::span<const double> values);

}  // namespace macromech

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

// Quantum-jump unraveling of the cavity-damped optomechanical dynamics.
//
// Every trajectory keeps the structure sum_n c_n |n>|phi_n>: the no-jump
// evolution displaces the mechanics of sector n and damps its weight by
// e^{-kappa n dtau / 2}, and a jump sqrt(kappa) a maps sector n onto n - 1.
// Integration runs in the interaction picture of the free mechanics, where
//   H_I = -k a^dag a (b e^{-i tau} + b^dag e^{i tau}) - i (kappa / 2) a^dag a,
// and the final state is rotated back to the laboratory frame.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "macromech/conditioning.hpp"
#include "macromech/macroscopicity.hpp"
#include "macromech/rng.hpp"

namespace macromech {

struct Sector {
  int n;
  Complex coefficient;
  Complex amplitude;  // mechanical coherent amplitude
};

/// Photon numbers strictly increasing; coefficients normalized on output of
/// every operation below.
class SectorState {
 public:
  explicit SectorState(std::vector<Sector> sectors);

  const std::vector<Sector>& sectors() const { return sectors_; }
  double norm_squared() const { return norm_squared_; }
  SectorState normalized() const;

  /// <a^dag a> = sum_n n |c_n|^2 / sum_n |c_n|^2.
  double mean_photons() const;

 private:
  std::vector<Sector> sectors_;
  double norm_squared_;
};

struct NoiseParams {
  double kappa = 0.0;           // cavity decay rate / omega_m
  double dtau = 3.14159265358979323846e-5;
  int n_traj = 500;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument unless kappa >= 0, dtau > 0, n_traj >= 1
  /// and kappa dtau n_max < 0.01.
  void validate(int n_max) const;
};

struct ThermalInit {
  Complex beta{2.0, 0.0};
  double nbar = 1.0;
};

double jump_probability(const SectorState& state, double kappa, double dtau);

/// Exact no-jump propagation over [tau, tau + dtau] in the interaction
/// picture: sector n is displaced by mu_n = k n (e^{i(tau+dtau)} - e^{i tau})
/// and its coefficient picks up e^{-kappa n dtau / 2} times the displacement
/// composition phase. Output is renormalized.
SectorState no_jump_step(const SectorState& state, double tau, double dtau, double k,
                         double kappa);

/// a|psi>, renormalized. Throws std::logic_error on a field-vacuum state.
SectorState apply_jump(const SectorState& state);

/// Interaction-picture initial state |alpha>_c |beta>_m truncated at n_max.
SectorState initial_sector_state(Complex alpha, Complex beta, int n_max);

/// Smallest n_max with Poisson tail e^{-|alpha|^2} sum_{n > n_max} |alpha|^{2n}/n! < tol.
int poisson_cutoff(Complex alpha, double tol = 1e-12);

/// beta + g with g complex Gaussian, <|g|^2> = nbar.
Complex sample_thermal(const ThermalInit& init, CounterRng& rng);

struct TrajectoryResult {
  SectorState state;  // laboratory frame, normalized
  int jumps;
};

/// Evolves from tau = 0 to params.tau in round(tau / dtau) equal steps,
/// drawing epsilon in (0, 1) per step and jumping when epsilon <= dp.
TrajectoryResult run_trajectory(const SystemParams& params, const NoiseParams& noise,
                                Complex mech_init, CounterRng& rng, int n_max);

/// Trajectory i uses CounterRng(noise.seed, i); with a thermal init the
/// mechanical amplitude is drawn first from the same stream.
std::vector<TrajectoryResult> run_ensemble(const SystemParams& params, const NoiseParams& noise,
                                           const std::optional<ThermalInit>& thermal = {},
                                           int n_max = 0);

/// Projects each trajectory's field onto the measurement outcome; mixture
/// weights are the outcome probabilities ||psi_i~||^2 of each trajectory.
/// Identical components are coalesced. Throws DegenerateOutcome if every
/// conditional norm vanishes.
MixtureState ensemble_condition(const std::vector<TrajectoryResult>& trajectories,
                                const MeasurementSetting& setting);

}  // namespace macromech

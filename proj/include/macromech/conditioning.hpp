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

// Joint field-mirror evolution and conditioning of the mirror on a
// general-dyne measurement of the cavity field.

#pragma once

#include <variant>
#include <vector>

#include "macromech/core.hpp"

namespace macromech {

/// Dimensionless optomechanical parameters (frequencies in units of the
/// mechanical frequency).
struct SystemParams {
  Complex alpha{0.8, 0.0};  // initial cavity coherent amplitude
  Complex beta{2.0, 0.0};   // initial mechanical coherent amplitude
  double k = 1.0;           // coupling g / omega_m
  double r = 0.0;           // omega_o / omega_m; a field rotation, absorbed into theta
  double tau = 0.0;         // omega_m t

  void validate() const;
};

struct Homodyne {
  double x = 0.0;
  double theta = 0.0;
};

struct Heterodyne {
  Complex sigma{0.0, 0.0};
};

using MeasurementSetting = std::variant<Homodyne, Heterodyne>;

struct JointSector {
  int n;              // cavity photon number
  Complex coefficient;  // c_n, excluding the global e^{-|alpha|^2/2}
  Complex amplitude;    // mechanical coherent amplitude phi_n
};

/// e^{-|alpha|^2/2} sum_n c_n |n>_c |phi_n>_m, truncated at n_max.
struct JointState {
  SystemParams params;
  double prefactor;  // e^{-|alpha|^2/2}
  std::vector<JointSector> sectors;

  /// Probability mass carried by the retained sectors.
  double retained_probability() const;
};

/// phi_n = k eta n + beta e^{-i tau}, eta = 1 - e^{-i tau}.
Complex sector_amplitude(const SystemParams& params, int n);

/// Evolves |alpha>|beta> for time tau. Throws TruncationError when the
/// discarded Poisson tail exceeds `truncation_tol`.
JointState evolve_joint(const SystemParams& params, int n_max, double truncation_tol = 1e-8);

/// f_M(n): the projection amplitude <outcome|n> of the measured field.
Complex measurement_amplitude(const MeasurementSetting& setting, int n);

/// Conditional mirror state sum_n c_n f_M(n) |phi_n>, normalized with the
/// Gram matrix of coherent overlaps. Sectors with coincident amplitudes are
/// merged. Throws DegenerateOutcome if every d_n is below 1e-300.
CoherentSuperposition condition(const JointState& joint, const MeasurementSetting& setting);

/// Unnormalized conditional weights d_n = c_n f_M(n) e^{-|alpha|^2/2}.
std::vector<CoherentTerm> conditional_terms(const JointState& joint,
                                            const MeasurementSetting& setting);

/// Probability density of the outcome (norm of the unnormalized state).
double outcome_density(const JointState& joint, const MeasurementSetting& setting);

/// Smallest n_max whose discarded sectors carry relative squared weight
/// below `tol`. Throws TruncationError above `hard_cap`.
int choose_cutoff(const SystemParams& params, const MeasurementSetting& setting,
                  double tol = 1e-10, int hard_cap = 200);

/// evolve_joint + condition with an automatically chosen cutoff.
CoherentSuperposition conditional_state(const SystemParams& params,
                                        const MeasurementSetting& setting, double tol = 1e-10);

}  // namespace macromech

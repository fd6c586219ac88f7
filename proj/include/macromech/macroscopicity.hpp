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

// The phase-space macroscopicity measure
//
//   I(rho) = (1/2pi) int (|g|^2 - 1) |chi(g)|^2 d^2g,
//
// bounded above by <b^dag b>, for coherent superpositions and their mixtures.

#pragma once

#include <vector>

#include "macromech/core.hpp"

namespace macromech {

struct MixtureComponent {
  double probability;
  CoherentSuperposition state;
  // Number of equal-weight samples (trajectories) this component stands for;
  // used only by the jackknife in mixture_statistics.
  int multiplicity = 1;
};

/// rho = sum_i p_i |psi_i><psi_i| with normalized |psi_i>.
class MixtureState {
 public:
  /// Probabilities must be >= 0 and sum to 1 within 1e-10.
  explicit MixtureState(std::vector<MixtureComponent> components);

  /// Rescales non-negative weights to sum 1 and normalizes each state.
  static MixtureState from_weights(std::vector<MixtureComponent> components);

  const std::vector<MixtureComponent>& components() const { return components_; }
  std::size_t size() const { return components_.size(); }

  /// Merges components whose term lists agree within `tol` in both amplitude
  /// and weight; probabilities and multiplicities add.
  MixtureState coalesced(double tol = 1e-6) const;

 private:
  std::vector<MixtureComponent> components_;
};

/// Closed-form I of a pure state: (1/2pi) times the quadruple sum of
/// cross_integral over coherent pairs. Throws InvariantViolation if the
/// imaginary residue exceeds 1e-8.
double measure_I(const CoherentSuperposition& state);

/// <b^dag b> = sum_{n,l} w_n w_l* phi_n phi_l* <phi_l|phi_n>.
double mean_excitations(const CoherentSuperposition& state);

/// <b> of a pure state.
Complex mean_amplitude(const CoherentSuperposition& state);

/// I of a mixture. The quadruple sum is regrouped into per-component-pair
/// blocks G = <i|j>, A = <i|b^dag b|j>, B = <i|b^dag|j>, C = <i|b|j>:
///   I = 1/2 sum_ij p_i p_j [2 Re(A_ij G_ij*) - |B_ij|^2 - |C_ij|^2].
double measure_I_mixture(const MixtureState& mix);

double mean_excitations_mixture(const MixtureState& mix);

/// Direct 2D quadrature of the defining integral; a verification oracle.
double measure_I_quadrature(const CoherentSuperposition& state, double tol = 1e-9);
double measure_I_quadrature(const MixtureState& mix, double tol = 1e-9);

struct MixtureStatistics {
  double I;
  double mean_excitations;
  double gap;  // mean_excitations - I
  // Delete-one jackknife standard errors over the underlying samples.
  double se_I;
  double se_mean_excitations;
  double se_gap;
  int samples;
};

/// I, <b^dag b> and their jackknife errors. Each component with multiplicity
/// m is treated as m samples of weight probability / m.
MixtureStatistics mixture_statistics(const MixtureState& mix);

}  // namespace macromech

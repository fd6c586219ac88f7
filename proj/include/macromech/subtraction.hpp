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

// Single-excitation conditioning of Gaussian mechanical states.
//
// Phase-space vectors are v = (Re d, Im d). A Gaussian state with mean m and
// covariance S (vacuum: S = I/4) has
//   W(v) = exp(-(v - m)^T S^-1 (v - m) / 2) / (2 pi sqrt(det S)).
// Conditioning on one excitation multiplies W by a quadratic polynomial.
// All integrals are evaluated from exact Gaussian moments.

#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "macromech/core.hpp"

namespace macromech {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

struct GaussianState {
  Vec2 mean{0.0, 0.0};
  Mat2 cov{{{0.25, 0.0}, {0.0, 0.25}}};

  /// Symmetric, positive definite, det(cov) >= 1/16 (up to 1e-9 relative).
  void validate() const;
  double det() const;
  double mean_excitations() const;  // tr(cov) + |mean|^2 - 1/2

  static GaussianState vacuum();
  static GaussianState thermal(double nbar);
  /// Squeezed thermal state, var_x = (2 nbar + 1) e^{2s} / 4, var_p = (2 nbar + 1) e^{-2s} / 4.
  static GaussianState squeezed_thermal(double nbar, double s);
};

/// Dense polynomial in centered coordinates u = v - mean, total degree <= 8.
class Poly2 {
 public:
  static constexpr int kMaxDegree = 8;

  double& at(int i, int j) { return c_[i][j]; }
  double at(int i, int j) const { return c_[i][j]; }
  int degree() const;

  double operator()(Vec2 u) const;
  Poly2 operator+(const Poly2& o) const;
  Poly2 operator*(const Poly2& o) const;
  Poly2 operator*(double s) const;
  Poly2 dx() const;
  Poly2 dy() const;

  /// E[p(u)] for zero-mean Gaussian u with covariance `cov`.
  double expectation(const Mat2& cov) const;

 private:
  std::array<std::array<double, kMaxDegree + 1>, kMaxDegree + 1> c_{};
};

/// W(v) = norm * A(v - mean) * G(v; mean, cov), G the normalized Gaussian.
struct GaussPolyWigner {
  Poly2 poly;
  GaussianState gaussian;
  double norm = 1.0;

  double operator()(Complex delta) const;
};

/// Wigner function of b^dag rho b / Tr[b^dag rho b] for Gaussian rho. Maps
/// the vacuum onto the one-phonon Fock state. Throws std::invalid_argument
/// for invalid or near-singular covariance.
GaussPolyWigner subtract_excitation(const GaussianState& g);

/// I = (pi/2) int W (-d_d d_d* - 1) W d^2 d = (pi/8) int |grad W|^2 - (pi/2) int W^2.
double measure_I_wigner(const GaussPolyWigner& w);

/// <b^dag b> = int |d|^2 W d^2 d - 1/2.
double mean_excitations_wigner(const GaussPolyWigner& w);

/// int W d^2 d; equals 1 for a normalized Wigner function.
double integral_wigner(const GaussPolyWigner& w);

struct DetuningRow {
  double delta;
  GaussianState state;
};

struct DetuningResult {
  double delta;
  double I;
  double mean_excitations;
};

struct DetuningSweep {
  std::vector<DetuningResult> rows;
  std::size_t argmax_I;
};

DetuningSweep detuning_sweep(const std::vector<DetuningRow>& table);

/// Reads `delta,var_x,var_p[,mean_x,mean_p,cov_xp]`; throws ConfigError
/// naming the offending line.
std::vector<DetuningRow> read_detuning_table(std::istream& in);
std::vector<DetuningRow> read_detuning_table_file(const std::string& path);

/// Synthetic squeezed-thermal table: s = squeeze_rate * delta and
/// nbar = nbar0 + heating * delta^2 on a uniform grid of `count` points.
std::vector<DetuningRow> synthetic_detuning_table(double delta_min, double delta_max, int count,
                                                  double squeeze_rate = 0.6,
                                                  double nbar0 = 0.02, double heating = 0.08);

}  // namespace macromech

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


#include <doctest.h>

#include <cmath>
#include <numbers>

#include "macromech/conditioning.hpp"
#include "macromech/errors.hpp"
#include "macromech/fidelity.hpp"
#include "macromech/quadrature.hpp"
#include "oracle/fock_oracle.hpp"

using namespace macromech;
using std::numbers::pi;

namespace {

SystemParams reference_params() {
  SystemParams p;
  p.alpha = 0.8;
  p.beta = 2.0;
  p.k = 1.0;
  p.tau = pi;
  return p;
}

}  // namespace

TEST_CASE("sector amplitudes at half a mechanical period") {
  const auto p = reference_params();
  for (int n = 0; n <= 5; ++n) {
    CHECK(std::abs(sector_amplitude(p, n) - Complex(2.0 * n - 2.0, 0.0)) < 1e-14);
  }
  SystemParams free = p;
  free.k = 0.0;
  free.tau = 0.7;
  CHECK(std::abs(sector_amplitude(free, 3) - 2.0 * std::exp(Complex(0.0, -0.7))) < 1e-15);
}

TEST_CASE("joint evolution matches the Fock-space propagator sector by sector") {
  SystemParams p;
  p.alpha = Complex(0.6, 0.3);
  p.beta = Complex(0.5, -0.4);
  p.k = 0.8;
  p.r = 0.3;
  p.tau = 2.1;
  const int dim = 90;
  const auto b = fock::lowering(dim);
  const fock::Matrix number = b.adjoint() * b;
  const JointState joint = evolve_joint(p, 4, 1.0);
  for (const auto& s : joint.sectors) {
    const double n = s.n;
    const fock::Matrix H = p.r * n * fock::Matrix::Identity(dim, dim) + number - p.k * n * (b + b.adjoint());
    const fock::Matrix U = (Complex(0.0, -p.tau) * H).exp();
    const Complex field = std::exp(-0.5 * std::norm(p.alpha)) * std::pow(p.alpha, s.n) /
                          std::sqrt(std::tgamma(n + 1.0));
    const fock::Vector ref = field * (U * fock::coherent(p.beta, dim));
    const fock::Vector got = joint.prefactor * s.coefficient * fock::coherent(s.amplitude, dim);
    CHECK((ref - got).norm() < 1e-9);
  }
}

TEST_CASE("homodyne amplitudes are orthonormal quadrature wavefunctions") {
  const auto rule = gauss_legendre(200);
  const double L = 12.0;
  for (int n : {0, 1, 4}) {
    for (int m : {0, 1, 4}) {
      Complex acc = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double x = L * rule.nodes[i];
        acc += L * rule.weights[i] * measurement_amplitude(Homodyne{x, 0.3}, n) *
               std::conj(measurement_amplitude(Homodyne{x, 0.3}, m));
      }
      CHECK(std::abs(acc - (n == m ? 1.0 : 0.0)) < 1e-12);
    }
  }
  CHECK(std::abs(measurement_amplitude(Homodyne{0.0, 0.0}, 0) - std::pow(pi, -0.25)) < 1e-15);
}

TEST_CASE("heterodyne amplitudes are coherent-state overlaps") {
  const Complex sigma(0.4, 1.1);
  const fock::Vector c = fock::coherent(sigma, 30);
  for (int n = 0; n < 10; ++n) {
    CHECK(std::abs(measurement_amplitude(Heterodyne{sigma}, n) - std::conj(c(n))) < 1e-14);
  }
}

TEST_CASE("conditional state equals the projected joint state") {
  const auto p = reference_params();
  const MeasurementSetting setting = Homodyne{1.42701, 0.0};
  const JointState joint = evolve_joint(p, 6, 1.0);
  const auto state = condition(joint, setting);
  CHECK(std::abs(state.norm_squared() - 1.0) < 1e-10);
  // Project the joint Fock-space vector onto the outcome directly.
  const int dim = 250;
  fock::Vector ref = fock::Vector::Zero(dim);
  for (const auto& s : joint.sectors) {
    ref += joint.prefactor * s.coefficient * measurement_amplitude(setting, s.n) * fock::coherent(s.amplitude, dim);
  }
  ref.normalize();
  CHECK(std::abs(std::abs(ref.dot(fock::superposition(state, dim))) - 1.0) < 1e-12);
  // The automatic cutoff loses nothing visible.
  CHECK(state_fidelity(conditional_state(p, setting), condition(evolve_joint(p, 40, 1.0), setting)) >
        1.0 - 1e-9);
}

TEST_CASE("sector weights at the reference homodyne point") {
  const auto p = reference_params();
  const auto terms = conditional_terms(evolve_joint(p, 12, 1.0), Homodyne{1.42701, 0.0});
  double total = 0.0;
  std::vector<double> w;
  for (const auto& t : terms) w.push_back(std::norm(t.weight)), total += w.back();
  CHECK(w[1] > w[0]);
  CHECK(w[1] > w[2]);
  CHECK(std::abs(w[0] - w[2]) / std::max(w[0], w[2]) < 0.2);
  double tail = 0.0;
  for (std::size_t n = 3; n < w.size(); ++n) tail += w[n];
  CHECK(tail / total < 1e-2);
}

TEST_CASE("uncoupled system leaves the mirror coherent") {
  auto p = reference_params();
  p.k = 0.0;
  const auto state = conditional_state(p, Homodyne{0.4, 0.2});
  REQUIRE(state.size() == 1);
  CHECK(std::abs(state.terms()[0].amplitude + 2.0) < 1e-14);
}

TEST_CASE("truncation and degenerate outcomes") {
  SystemParams p = reference_params();
  p.alpha = 6.0;
  try {
    evolve_joint(p, 10);
    FAIL("expected TruncationError");
  } catch (const TruncationError& e) {
    CHECK(e.suggested_cutoff() > 10);
  }
  // Vacuum field and an outcome where the vacuum amplitude underflows.
  SystemParams vac = reference_params();
  vac.alpha = 0.0;
  CHECK_THROWS_AS(condition(evolve_joint(vac, 3), Homodyne{40.0, 0.0}), DegenerateOutcome);
  CHECK_THROWS_AS(choose_cutoff(p, Homodyne{0.0, 0.0}, 1e-10, 20), TruncationError);
  CHECK_THROWS_AS(choose_cutoff(p, Homodyne{0.0, 0.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(measurement_amplitude(Homodyne{}, -1), std::invalid_argument);
}

TEST_CASE("cutoff choice respects the requested tolerance") {
  const auto p = reference_params();
  const MeasurementSetting s = Heterodyne{Complex(1.24, 1.24)};
  const int n_max = choose_cutoff(p, s, 1e-10);
  CHECK(n_max >= 4);
  CHECK(n_max <= 30);
  const auto full = condition(evolve_joint(p, 40, 1.0), s);
  const auto cut = condition(evolve_joint(p, n_max, 1.0), s);
  CHECK(state_fidelity(full, cut) > 1.0 - 1e-9);
}

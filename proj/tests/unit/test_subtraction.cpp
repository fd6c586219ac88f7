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
#include <random>
#include <sstream>

#include "macromech/errors.hpp"
#include "macromech/quadrature.hpp"
#include "macromech/subtraction.hpp"
#include "oracle/fock_oracle.hpp"

using namespace macromech;
using std::numbers::pi;

TEST_CASE("Gaussian moments through the polynomial expectation") {
  const Mat2 cov{{{0.7, 0.2}, {0.2, 0.3}}};
  Poly2 x2, xy, x4;
  x2.at(2, 0) = 1.0;
  xy.at(1, 1) = 1.0;
  x4.at(4, 0) = 1.0;
  CHECK(x2.expectation(cov) == doctest::Approx(0.7));
  CHECK(xy.expectation(cov) == doctest::Approx(0.2));
  CHECK(x4.expectation(cov) == doctest::Approx(3 * 0.49));
  CHECK((x2 * xy).degree() == 4);
  CHECK(x4.dx().at(3, 0) == 4.0);
}

TEST_CASE("vacuum subtraction gives the one-phonon Fock state") {
  const auto w = subtract_excitation(GaussianState::vacuum());
  double worst = 0.0;
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= 20; ++j) {
      const Complex d(-2.0 + 0.2 * i, -2.0 + 0.2 * j);
      const double r2 = std::norm(d);
      const double fock1 = (2.0 / pi) * (4.0 * r2 - 1.0) * std::exp(-2.0 * r2);
      worst = std::max(worst, std::abs(w(d) - fock1));
    }
  }
  CHECK(worst < 1e-8);
  CHECK(measure_I_wigner(w) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mean_excitations_wigner(w) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("thermal input") {
  for (double nbar : {0.0, 0.3, 1.0, 2.5}) {
    const auto th = GaussianState::thermal(nbar);
    CHECK(th.mean_excitations() == doctest::Approx(nbar).epsilon(1e-12));
    GaussPolyWigner plain;
    plain.gaussian = th;
    plain.poly.at(0, 0) = 1.0;
    CHECK(std::abs(mean_excitations_wigner(plain) - nbar) < 1e-8);
    const auto w = subtract_excitation(th);
    CHECK(integral_wigner(w) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(mean_excitations_wigner(w) == doctest::Approx(2.0 * nbar + 1.0).epsilon(1e-12));
  }
}

TEST_CASE("phase-space integrals agree with direct quadrature") {
  GaussianState g;
  g.mean = {0.4, -0.3};
  g.cov = {{{0.6, 0.1}, {0.1, 0.35}}};
  const auto w = subtract_excitation(g);
  Quad2dOptions opt;
  opt.center = Complex(g.mean[0], g.mean[1]);
  const auto norm = quad2d([&](Complex d) { return Complex(w(d), 0.0); }, 7.0, 1e-11, opt);
  CHECK(std::abs(norm.value.real() - 1.0) < 1e-9);
  const auto n = quad2d([&](Complex d) { return Complex(std::norm(d) * w(d), 0.0); }, 7.0, 1e-11, opt);
  CHECK(std::abs(n.value.real() - 0.5 - mean_excitations_wigner(w)) < 1e-9);
}

TEST_CASE("random Gaussian inputs against the Fock oracle") {
  std::mt19937_64 gen(2026);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Complex d(u(gen) - 0.5, u(gen) - 0.5);
    const Complex zeta = std::polar(0.5 * u(gen), 2.0 * pi * u(gen));
    const double nbar = 0.4 * u(gen);
    const fock::Matrix rho = fock::gaussian(d, zeta, nbar, 60, 120);
    const GaussianState g = fock::moments(rho);
    const fock::Matrix out = fock::subtract(rho);
    const auto w = subtract_excitation(g);
    CHECK(std::abs(mean_excitations_wigner(w) - fock::mean_excitations(out)) < 1e-6);
    CHECK(std::abs(measure_I_wigner(w) - fock::measure_I(out)) < 1e-5);
  }
}

TEST_CASE("invalid covariances are rejected") {
  GaussianState bad;
  bad.cov = {{{0.1, 0.0}, {0.0, 0.1}}};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_THROWS_AS(subtract_excitation(bad), std::invalid_argument);
  bad.cov = {{{0.3, 0.1}, {0.2, 0.3}}};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("detuning table parsing") {
  std::istringstream good("# comment\ndelta,var_x,var_p\n0,0.25,0.25\n1, 0.5 ,0.3\n");
  const auto rows = read_detuning_table(good);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].state.cov[0][0] == 0.5);

  auto message = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_detuning_table(in);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("delta,var_x,var_p\n0,0.25\n").find("line 2") != std::string::npos);
  CHECK(message("delta,var_x,var_p\n0,0.25,abc\n").find("var_p") != std::string::npos);
  CHECK(message("delta,var_x,var_p\n0,0.1,0.1\n").find("line 2") != std::string::npos);
  CHECK(message("delta,var_x,bogus\n").find("bogus") != std::string::npos);
  CHECK(message("delta,var_x\n0,1\n").find("var_p") != std::string::npos);
  CHECK(message("").find("header") != std::string::npos);
}

TEST_CASE("synthetic detuning sweep peaks in the interior") {
  const auto sweep = detuning_sweep(synthetic_detuning_table(0.0, 3.0, 61));
  CHECK(sweep.argmax_I > 0);
  CHECK(sweep.argmax_I + 1 < sweep.rows.size());
  for (const auto& r : sweep.rows) CHECK(r.I < r.mean_excitations);
}

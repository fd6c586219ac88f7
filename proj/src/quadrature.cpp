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

#include "macromech/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include "macromech/errors.hpp"

namespace macromech {

namespace {

// Returns (P_n(z), P_n'(z)) by the Bonnet recurrence.
std::pair<double, double> legendre_with_derivative(int n, double z) {
  double p0 = 1.0;
  double p1 = z;
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  return {p1, n * (z * p1 - p0) / (z * z - 1.0)};
}

}  // namespace

GaussLegendreRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre_with_derivative(n, z);
      const double dz = p / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double dp = legendre_with_derivative(n, z).second;
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

namespace {

Complex tensor_pass(const std::function<Complex(Complex)>& f, double radius, Complex center,
                    int n) {
  const GaussLegendreRule rule = gauss_legendre(n);
  CompensatedSum<Complex> total;
  for (int i = 0; i < n; ++i) {
    const double x = center.real() + radius * rule.nodes[i];
    CompensatedSum<Complex> row;
    for (int j = 0; j < n; ++j) {
      const double y = center.imag() + radius * rule.nodes[j];
      row.add(rule.weights[j] * f(Complex(x, y)));
    }
    total.add(rule.weights[i] * row.value());
  }
  return total.value() * (radius * radius);
}

}  // namespace

Quad2dResult quad2d(const std::function<Complex(Complex)>& f, double radius, double tol,
                    const Quad2dOptions& options) {
  if (!(radius > 0.0)) throw std::invalid_argument("quad2d: radius must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("quad2d: tol must be positive");
  int n = std::max(options.nodes, 2);
  Complex coarse = tensor_pass(f, radius, options.center, n);
  double estimate = 0.0;
  while (true) {
    const int refined_n = 2 * n;
    if (refined_n > std::max(options.max_nodes, options.nodes)) break;
    const Complex refined = tensor_pass(f, radius, options.center, refined_n);
    estimate = std::abs(refined - coarse);
    if (estimate <= tol) return {refined, estimate, refined_n};
    coarse = refined;
    n = refined_n;
  }
  throw NonConvergence("quad2d: refinement cap of " + std::to_string(options.max_nodes) +
                           " nodes per axis reached with error estimate " +
                           std::to_string(estimate),
                       estimate);
}

}  // namespace macromech

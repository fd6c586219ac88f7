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

#pragma once

#include <functional>
#include <vector>

#include "macromech/core.hpp"

namespace macromech {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(int n);

struct Quad2dOptions {
  Complex center{0.0, 0.0};
  int nodes = 200;       // per axis, first pass
  int max_nodes = 1600;  // per axis, refinement cap
};

struct Quad2dResult {
  Complex value;
  double error_estimate;
  int nodes;  // per axis, last pass
};

/// Tensor-product Gauss-Legendre quadrature of f over the square
/// [center - R, center + R] x [center - iR, center + iR].
///
/// The node count doubles until two successive passes agree within `tol`;
/// throws NonConvergence carrying the last difference otherwise. The
/// integrand must decay fast enough that the mass outside the box is below
/// `tol`. Summation is compensated and in fixed order.
Quad2dResult quad2d(const std::function<Complex(Complex)>& f, double radius, double tol,
                    const Quad2dOptions& options = {});

}  // namespace macromech

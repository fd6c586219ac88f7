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

#include <array>
#include <functional>

#include "macromech/core.hpp"

namespace macromech {

enum class Parity { kEven, kOdd };

struct CatSpec {
  Complex lambda;
  Parity parity = Parity::kEven;
};

/// (|lambda> +- |-lambda>) / sqrt(2 +- 2 e^{-2|lambda|^2}). Throws
/// std::invalid_argument for an odd cat at lambda = 0.
CoherentSuperposition cat_state(const CatSpec& spec);

/// |<a|b>|^2 for normalized pure states.
double state_fidelity(const CoherentSuperposition& a, const CoherentSuperposition& b);

/// Fidelity with cat(lambda) without building the cat explicitly.
double cat_fidelity(const CoherentSuperposition& state, Complex lambda, Parity parity);

struct CatOptimum {
  Complex lambda;  // canonical: Re >= 0, then Im >= 0
  double fidelity;
};

struct LambdaSearch {
  double half_width = 4.0;
  double step = 0.05;
  double tol = 1e-8;
};

/// Grid search over Re, Im lambda in [-w, w], then Nelder-Mead refinement of
/// the best grid point. Grid ties are broken lexicographically on (Re, Im).
CatOptimum optimize_lambda(const CoherentSuperposition& state, Parity parity,
                           const LambdaSearch& search = {});

struct NelderMeadResult {
  std::array<double, 2> x;
  double value;
  int iterations;
  bool converged;
};

/// Minimizes f over R^2 from `start` with initial simplex edge `scale`,
/// stopping when the simplex diameter and value spread fall below `tol`.
NelderMeadResult nelder_mead(const std::function<double(std::array<double, 2>)>& f,
                             std::array<double, 2> start, double scale, double tol,
                             int max_iterations = 5000);

/// d0 |a0> + mu d1 |a1> + d2 |a2>, normalized. Throws std::invalid_argument
/// if mu is outside [0, 1] or all weights vanish.
CoherentSuperposition simplified_state(Complex d0, Complex d1, Complex d2, double mu,
                                       const std::array<Complex, 3>& amplitudes);

}  // namespace macromech

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

#include "macromech/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace macromech {

namespace {

double sign_of(Parity p) { return p == Parity::kEven ? 1.0 : -1.0; }

Complex project(const CoherentSuperposition& state, Complex amplitude) {
  CompensatedSum<Complex> acc;
  for (const auto& t : state.terms()) acc.add(t.weight * coherent_overlap(amplitude, t.amplitude));
  return acc.value();
}

// Re >= 0, then Im >= 0; a real part at optimizer noise level counts as zero.
Complex canonical(Complex z) {
  const bool on_axis = std::abs(z.real()) <= 1e-7 * std::max(1.0, std::abs(z));
  if (on_axis ? z.imag() < 0.0 : z.real() < 0.0) return -z;
  return z;
}

}  // namespace

CoherentSuperposition cat_state(const CatSpec& spec) {
  if (spec.parity == Parity::kOdd && std::abs(spec.lambda) == 0.0) {
    throw std::invalid_argument("cat_state: odd cat undefined at lambda = 0");
  }
  const double s = sign_of(spec.parity);
  const double norm = 1.0 / std::sqrt(2.0 + 2.0 * s * std::exp(-2.0 * std::norm(spec.lambda)));
  return CoherentSuperposition({{norm, spec.lambda}, {s * norm, -spec.lambda}});
}

double state_fidelity(const CoherentSuperposition& a, const CoherentSuperposition& b) {
  CompensatedSum<Complex> acc;
  for (const auto& x : a.terms()) {
    for (const auto& y : b.terms()) {
      acc.add(std::conj(x.weight) * y.weight * coherent_overlap(x.amplitude, y.amplitude));
    }
  }
  return std::norm(acc.value());
}

double cat_fidelity(const CoherentSuperposition& state, Complex lambda, Parity parity) {
  const double s = sign_of(parity);
  const double denom = 2.0 + 2.0 * s * std::exp(-2.0 * std::norm(lambda));
  if (!(denom > 0.0)) return 0.0;
  return std::norm(project(state, lambda) + s * project(state, -lambda)) / denom;
}

NelderMeadResult nelder_mead(const std::function<double(std::array<double, 2>)>& f,
                             std::array<double, 2> start, double scale, double tol,
                             int max_iterations) {
  using P = std::array<double, 2>;
  std::array<P, 3> x{start, P{start[0] + scale, start[1]}, P{start[0], start[1] + scale}};
  std::array<double, 3> fx{f(x[0]), f(x[1]), f(x[2])};
  auto lerp = [](const P& a, const P& b, double t) {
    return P{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
  };
  int it = 0;
  bool converged = false;
  for (; it < max_iterations; ++it) {
    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return fx[a] < fx[b] || (fx[a] == fx[b] && a < b);
    });
    std::array<P, 3> xs{x[order[0]], x[order[1]], x[order[2]]};
    std::array<double, 3> fs{fx[order[0]], fx[order[1]], fx[order[2]]};
    x = xs;
    fx = fs;

    double diameter = 0.0;
    for (int i = 1; i < 3; ++i) {
      diameter = std::max(diameter, std::hypot(x[i][0] - x[0][0], x[i][1] - x[0][1]));
    }
    if (diameter < tol && fx[2] - fx[0] < tol * tol) {
      converged = true;
      break;
    }

    const P centroid{(x[0][0] + x[1][0]) / 2.0, (x[0][1] + x[1][1]) / 2.0};
    const P xr = lerp(centroid, x[2], -1.0);
    const double fr = f(xr);
    if (fr < fx[0]) {
      const P xe = lerp(centroid, x[2], -2.0);
      const double fe = f(xe);
      if (fe < fr) {
        x[2] = xe;
        fx[2] = fe;
      } else {
        x[2] = xr;
        fx[2] = fr;
      }
    } else if (fr < fx[1]) {
      x[2] = xr;
      fx[2] = fr;
    } else {
      const bool outside = fr < fx[2];
      const P xc = outside ? lerp(centroid, xr, 0.5) : lerp(centroid, x[2], 0.5);
      const double fc = f(xc);
      if (fc < (outside ? fr : fx[2])) {
        x[2] = xc;
        fx[2] = fc;
      } else {
        for (int i = 1; i < 3; ++i) {
          x[i] = lerp(x[0], x[i], 0.5);
          fx[i] = f(x[i]);
        }
      }
    }
  }
  const int best = static_cast<int>(std::min_element(fx.begin(), fx.end()) - fx.begin());
  return {x[best], fx[best], it, converged};
}

CatOptimum optimize_lambda(const CoherentSuperposition& state, Parity parity,
                           const LambdaSearch& search) {
  const int per_axis = static_cast<int>(std::lround(2.0 * search.half_width / search.step)) + 1;
  std::vector<double> values(static_cast<std::size_t>(per_axis) * per_axis, -1.0);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < per_axis; ++i) {
    const double re = -search.half_width + i * search.step;
    for (int j = 0; j < per_axis; ++j) {
      const double im = -search.half_width + j * search.step;
      const Complex lambda(re, im);
      if (parity == Parity::kOdd && std::abs(lambda) < 1e-12) continue;
      values[static_cast<std::size_t>(i) * per_axis + j] = cat_fidelity(state, lambda, parity);
    }
  }
  // Row-major scan visits (Re, Im) in lexicographic order; strict > keeps the first.
  std::size_t best = 0;
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (values[k] > values[best]) best = k;
  }
  const Complex grid_best(-search.half_width + static_cast<double>(best / per_axis) * search.step,
                          -search.half_width + static_cast<double>(best % per_axis) * search.step);

  const auto result = nelder_mead(
      [&](std::array<double, 2> p) { return -cat_fidelity(state, Complex(p[0], p[1]), parity); },
      {grid_best.real(), grid_best.imag()}, search.step / 2.0, search.tol);
  CatOptimum out{Complex(result.x[0], result.x[1]), -result.value};
  if (out.fidelity < values[best]) out = {grid_best, values[best]};
  out.lambda = canonical(out.lambda);
  return out;
}

CoherentSuperposition simplified_state(Complex d0, Complex d1, Complex d2, double mu,
                                       const std::array<Complex, 3>& amplitudes) {
  if (!(mu >= 0.0 && mu <= 1.0)) throw std::invalid_argument("simplified_state: mu must be in [0, 1]");
  if (std::abs(d0) == 0.0 && std::abs(mu * d1) == 0.0 && std::abs(d2) == 0.0) {
    throw std::invalid_argument("simplified_state: all weights vanish");
  }
  std::vector<CoherentTerm> terms;
  const std::array<Complex, 3> w{d0, mu * d1, d2};
  for (int i = 0; i < 3; ++i) {
    if (std::abs(w[i]) > 0.0) terms.push_back({w[i], amplitudes[i]});
  }
  return CoherentSuperposition::normalized(std::move(terms));
}

}  // namespace macromech

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

// Phase-space primitives for superpositions of coherent states.
//
// Conventions used throughout the library:
//   D(g)       = exp(g b^dag - g* b)
//   chi(g)     = Tr[rho D(g)]
//   W(d)       = (1/pi^2) int exp(g* d - g d*) chi(g) d^2g,   int W d^2d = 1
// so the vacuum Wigner function is (2/pi) exp(-2|d|^2) and Re d, Im d each
// have variance 1/4 in the vacuum.

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace macromech {

using Complex = std::complex<double>;

/// Neumaier-compensated accumulator; summation order is the call order.
template <typename T>
class CompensatedSum {
 public:
  void add(T value) {
    T t = sum_ + value;
    comp_ += compensation(sum_, value, t);
    sum_ = t;
  }
  T value() const { return sum_ + comp_; }

 private:
  static double compensation(double s, double v, double t) {
    return (std::abs(s) >= std::abs(v)) ? (s - t) + v : (v - t) + s;
  }
  static Complex compensation(Complex s, Complex v, Complex t) {
    return {compensation(s.real(), v.real(), t.real()),
            compensation(s.imag(), v.imag(), t.imag())};
  }

  T sum_{};
  T comp_{};
};

struct CoherentTerm {
  Complex weight;
  Complex amplitude;
};

/// A pure oscillator state sum_n w_n |phi_n> with coherent |phi_n>.
///
/// Terms are non-orthogonal, so the norm is the Gram quadratic form
/// sum_{n,l} w_n w_l* <phi_l|phi_n>. It is computed once at construction;
/// `is_normalized()` reports whether that norm is 1 within 1e-12.
class CoherentSuperposition {
 public:
  explicit CoherentSuperposition(std::vector<CoherentTerm> terms);

  /// Rescales the weights so that <psi|psi> = 1.
  static CoherentSuperposition normalized(std::vector<CoherentTerm> terms);
  static CoherentSuperposition coherent(Complex amplitude);

  std::span<const CoherentTerm> terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  double norm_squared() const { return norm_squared_; }
  bool is_normalized() const;

  CoherentSuperposition normalize() const;

  /// Coalesces terms whose amplitudes agree within `tolerance` (weights add).
  CoherentSuperposition merged(double tolerance) const;

 private:
  std::vector<CoherentTerm> terms_;
  double norm_squared_;
};

/// <a|b> = exp(-|a|^2/2 - |b|^2/2 + a* b).
Complex coherent_overlap(Complex a, Complex b);

/// <b|D(gamma)|a> = <b|a> exp(-|gamma|^2/2 + b* gamma - a gamma*).
Complex displaced_element(Complex a, Complex b, Complex gamma);

/// int (|g|^2 - 1) <b|D(g)|a> <d|D(g)|c>* d^2g over the whole plane.
///
/// Completing the square gives pi (b - c)* (d - a) <b|d> <c|a>.
Complex cross_integral(Complex a, Complex b, Complex c, Complex d);

/// Physicists' Hermite polynomial H_n(x) by the three-term recurrence.
/// Throws std::range_error if the value leaves the double range and
/// std::domain_error if n exceeds `cutoff`.
double hermite(int n, double x, int cutoff = 200);

/// H_n(x) / sqrt(2^n n!), by the normalized recurrence (no overflow).
double hermite_normalized(int n, double x);

/// Weyl characteristic function chi(gamma) of a normalized superposition.
Complex char_function(const CoherentSuperposition& state, Complex gamma);

/// Wigner function at delta, from the closed form for each coherent pair:
/// W_{|a><b|}(d) = (2/pi) <b|a> exp(-2 (d - a)(d* - b*)).
double wigner(const CoherentSuperposition& state, Complex delta);

/// Complex-valued Wigner sum before taking the real part; its imaginary part
/// is a numerical-consistency diagnostic.
Complex wigner_complex(const CoherentSuperposition& state, Complex delta);

}  // namespace macromech

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

#include "macromech/core.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace macromech {

namespace {

double gram_norm_squared(std::span<const CoherentTerm> terms) {
  CompensatedSum<Complex> acc;
  for (const auto& ket : terms) {
    for (const auto& bra : terms) {
      acc.add(std::conj(bra.weight) * ket.weight * coherent_overlap(bra.amplitude, ket.amplitude));
    }
  }
  return acc.value().real();
}

}  // namespace

CoherentSuperposition::CoherentSuperposition(std::vector<CoherentTerm> terms)
    : terms_(std::move(terms)) {
  if (terms_.empty()) {
    throw std::invalid_argument("CoherentSuperposition: empty term list");
  }
  for (const auto& t : terms_) {
    if (!std::isfinite(t.weight.real()) || !std::isfinite(t.weight.imag()) ||
        !std::isfinite(t.amplitude.real()) || !std::isfinite(t.amplitude.imag())) {
      throw std::invalid_argument("CoherentSuperposition: non-finite weight or amplitude");
    }
  }
  norm_squared_ = gram_norm_squared(terms_);
}

CoherentSuperposition CoherentSuperposition::normalized(std::vector<CoherentTerm> terms) {
  return CoherentSuperposition(std::move(terms)).normalize();
}

CoherentSuperposition CoherentSuperposition::coherent(Complex amplitude) {
  return CoherentSuperposition({{Complex(1.0, 0.0), amplitude}});
}

bool CoherentSuperposition::is_normalized() const {
  return std::abs(norm_squared_ - 1.0) <= 1e-12;
}

CoherentSuperposition CoherentSuperposition::normalize() const {
  if (!(norm_squared_ > 0.0)) {
    throw std::domain_error("CoherentSuperposition: zero-norm state cannot be normalized");
  }
  const double scale = 1.0 / std::sqrt(norm_squared_);
  std::vector<CoherentTerm> out(terms_);
  for (auto& t : out) t.weight *= scale;
  return CoherentSuperposition(std::move(out));
}

CoherentSuperposition CoherentSuperposition::merged(double tolerance) const {
  std::vector<CoherentTerm> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) {
    bool absorbed = false;
    for (auto& o : out) {
      if (std::abs(o.amplitude - t.amplitude) <= tolerance) {
        o.weight += t.weight;
        absorbed = true;
        break;
      }
    }
    if (!absorbed) out.push_back(t);
  }
  return CoherentSuperposition(std::move(out));
}

Complex coherent_overlap(Complex a, Complex b) {
  return std::exp(-0.5 * std::norm(a) - 0.5 * std::norm(b) + std::conj(a) * b);
}

Complex displaced_element(Complex a, Complex b, Complex gamma) {
  return std::exp(-0.5 * std::norm(a) - 0.5 * std::norm(b) + std::conj(b) * a -
                  0.5 * std::norm(gamma) + std::conj(b) * gamma - a * std::conj(gamma));
}

Complex cross_integral(Complex a, Complex b, Complex c, Complex d) {
  return std::numbers::pi * std::conj(b - c) * (d - a) * coherent_overlap(b, d) *
         coherent_overlap(c, a);
}

double hermite(int n, double x, int cutoff) {
  if (n < 0) throw std::domain_error("hermite: negative order");
  if (n > cutoff) {
    throw std::domain_error("hermite: order " + std::to_string(n) + " exceeds cutoff " +
                            std::to_string(cutoff));
  }
  long double prev = 1.0L;
  if (n == 0) return 1.0;
  long double cur = 2.0L * x;
  for (int m = 1; m < n; ++m) {
    const long double next = 2.0L * x * cur - 2.0L * m * prev;
    prev = cur;
    cur = next;
  }
  if (!std::isfinite(static_cast<double>(cur))) {
    throw std::range_error("hermite: H_" + std::to_string(n) + "(" + std::to_string(x) +
                           ") overflows double");
  }
  return static_cast<double>(cur);
}

double hermite_normalized(int n, double x) {
  if (n < 0) throw std::domain_error("hermite_normalized: negative order");
  // psi_n = H_n / sqrt(2^n n!) obeys
  // psi_{n+1} = sqrt(2/(n+1)) x psi_n - sqrt(n/(n+1)) psi_{n-1}.
  long double prev = 1.0L;
  if (n == 0) return 1.0;
  long double cur = std::sqrt(2.0L) * x;
  for (int m = 1; m < n; ++m) {
    const long double next =
        std::sqrt(2.0L / (m + 1)) * x * cur - std::sqrt(static_cast<long double>(m) / (m + 1)) * prev;
    prev = cur;
    cur = next;
  }
  return static_cast<double>(cur);
}

Complex char_function(const CoherentSuperposition& state, Complex gamma) {
  CompensatedSum<Complex> acc;
  for (const auto& ket : state.terms()) {
    for (const auto& bra : state.terms()) {
      acc.add(ket.weight * std::conj(bra.weight) *
              displaced_element(ket.amplitude, bra.amplitude, gamma));
    }
  }
  return acc.value();
}

Complex wigner_complex(const CoherentSuperposition& state, Complex delta) {
  CompensatedSum<Complex> acc;
  for (const auto& ket : state.terms()) {
    for (const auto& bra : state.terms()) {
      const Complex pair = coherent_overlap(bra.amplitude, ket.amplitude) *
                           std::exp(-2.0 * (delta - ket.amplitude) * std::conj(delta - bra.amplitude));
      acc.add(ket.weight * std::conj(bra.weight) * pair);
    }
  }
  return acc.value() * (2.0 / std::numbers::pi);
}

double wigner(const CoherentSuperposition& state, Complex delta) {
  return wigner_complex(state, delta).real();
}

}  // namespace macromech

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

#include "macromech/conditioning.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "macromech/errors.hpp"

namespace macromech {

namespace {

constexpr Complex kI{0.0, 1.0};

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Squared sector weights |e^{-|alpha|^2/2} c_n f_M(n)|^2 for n = 0..n_last.
std::vector<double> sector_weights(const SystemParams& params, const MeasurementSetting& setting,
                                   int n_last);

Complex log_coefficient(const SystemParams& p, int n) {
  // log c_n = n log(alpha e^phi) - lgamma(n+1)/2 + i [k^2 n^2 (tau - sin tau) - r tau n]
  const Complex eta = 1.0 - std::exp(-kI * p.tau);
  const Complex phase_exponent =
      p.k * (eta * std::conj(p.beta) * std::exp(kI * p.tau) -
             std::conj(eta) * p.beta * std::exp(-kI * p.tau)) /
      2.0;
  const double nn = static_cast<double>(n);
  return nn * (std::log(p.alpha) + phase_exponent) - 0.5 * std::lgamma(nn + 1.0) +
         kI * (p.k * p.k * nn * nn * (p.tau - std::sin(p.tau)) - p.r * p.tau * nn);
}

Complex coefficient(const SystemParams& p, int n) {
  if (n == 0) return {1.0, 0.0};
  if (p.alpha == Complex(0.0, 0.0)) return {0.0, 0.0};
  return std::exp(log_coefficient(p, n));
}

std::vector<double> sector_weights(const SystemParams& params, const MeasurementSetting& setting,
                                   int n_last) {
  std::vector<double> w(n_last + 1);
  const double prefactor_sq = std::exp(-std::norm(params.alpha));
  for (int n = 0; n <= n_last; ++n) {
    w[n] = prefactor_sq * std::norm(coefficient(params, n) * measurement_amplitude(setting, n));
  }
  return w;
}

}  // namespace

void SystemParams::validate() const {
  if (!finite(alpha) || !finite(beta) || !std::isfinite(k) || !std::isfinite(r) ||
      !std::isfinite(tau)) {
    throw std::invalid_argument("SystemParams: non-finite parameter");
  }
  if (k < 0.0) throw std::invalid_argument("SystemParams: k must be >= 0");
  if (tau < 0.0) throw std::invalid_argument("SystemParams: tau must be >= 0");
}

double JointState::retained_probability() const {
  CompensatedSum<double> acc;
  for (const auto& s : sectors) acc.add(std::norm(prefactor * s.coefficient));
  return acc.value();
}

Complex sector_amplitude(const SystemParams& params, int n) {
  const Complex eta = 1.0 - std::exp(-kI * params.tau);
  return params.k * eta * static_cast<double>(n) + params.beta * std::exp(-kI * params.tau);
}

JointState evolve_joint(const SystemParams& params, int n_max, double truncation_tol) {
  params.validate();
  if (n_max < 1) throw std::invalid_argument("evolve_joint: n_max must be >= 1");
  JointState joint;
  joint.params = params;
  joint.prefactor = std::exp(-0.5 * std::norm(params.alpha));
  joint.sectors.reserve(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    joint.sectors.push_back({n, coefficient(params, n), sector_amplitude(params, n)});
  }

  // Poisson tail of the discarded photon numbers.
  const double mean = std::norm(params.alpha);
  auto tail_beyond = [&](int cut) {
    if (mean == 0.0) return 0.0;
    CompensatedSum<double> tail;
    for (int n = cut + 1; n <= cut + 400; ++n) {
      const double term = std::exp(-mean + n * std::log(mean) - std::lgamma(n + 1.0));
      tail.add(term);
      if (n > mean && term < 1e-30) break;
    }
    return tail.value();
  };
  if (tail_beyond(n_max) > truncation_tol) {
    int suggested = n_max;
    while (tail_beyond(suggested) > truncation_tol && suggested < n_max + 1000) ++suggested;
    throw TruncationError("evolve_joint: discarded photon-number tail " +
                              std::to_string(tail_beyond(n_max)) + " exceeds tolerance " +
                              std::to_string(truncation_tol) + "; use n_max >= " +
                              std::to_string(suggested),
                          suggested);
  }
  return joint;
}

Complex measurement_amplitude(const MeasurementSetting& setting, int n) {
  if (n < 0) throw std::invalid_argument("measurement_amplitude: negative photon number");
  const double nn = static_cast<double>(n);
  if (const auto* het = std::get_if<Heterodyne>(&setting)) {
    const double base = -0.5 * std::norm(het->sigma);
    if (n == 0) return std::exp(base);
    if (het->sigma == Complex(0.0, 0.0)) return {0.0, 0.0};
    return std::exp(nn * std::log(std::conj(het->sigma)) + base - 0.5 * std::lgamma(nn + 1.0));
  }
  const auto& hom = std::get<Homodyne>(setting);
  const double envelope = std::exp(-0.5 * hom.x * hom.x) / std::pow(std::numbers::pi, 0.25);
  return envelope * hermite_normalized(n, hom.x) * std::exp(-kI * hom.theta * nn);
}

std::vector<CoherentTerm> conditional_terms(const JointState& joint,
                                            const MeasurementSetting& setting) {
  std::vector<CoherentTerm> terms;
  terms.reserve(joint.sectors.size());
  for (const auto& s : joint.sectors) {
    terms.push_back(
        {joint.prefactor * s.coefficient * measurement_amplitude(setting, s.n), s.amplitude});
  }
  return terms;
}

double outcome_density(const JointState& joint, const MeasurementSetting& setting) {
  return CoherentSuperposition(conditional_terms(joint, setting)).norm_squared();
}

CoherentSuperposition condition(const JointState& joint, const MeasurementSetting& setting) {
  std::vector<CoherentTerm> terms;
  for (const auto& t : conditional_terms(joint, setting)) {
    if (std::abs(t.weight) >= 1e-300) terms.push_back(t);
  }
  if (terms.empty()) {
    throw DegenerateOutcome("condition: measurement record has zero probability");
  }
  return CoherentSuperposition(std::move(terms)).merged(1e-12).normalize();
}

int choose_cutoff(const SystemParams& params, const MeasurementSetting& setting, double tol,
                  int hard_cap) {
  params.validate();
  if (!(tol > 0.0 && tol <= 1.0)) throw std::invalid_argument("choose_cutoff: tol must be in (0, 1]");
  const int n_last = hard_cap + 60;
  const std::vector<double> w = sector_weights(params, setting, n_last);
  std::vector<double> suffix(n_last + 2, 0.0);
  for (int n = n_last; n >= 0; --n) suffix[n] = suffix[n + 1] + w[n];
  const double total = suffix[0];
  if (!(total > 0.0)) throw DegenerateOutcome("choose_cutoff: all sector weights vanish");
  for (int n_max = 1; n_max <= hard_cap; ++n_max) {
    if (suffix[n_max + 1] < tol * total) return n_max;
  }
  int suggested = hard_cap;
  while (suggested < n_last && suffix[suggested + 1] >= tol * total) ++suggested;
  throw TruncationError("choose_cutoff: cutoff exceeds hard cap " + std::to_string(hard_cap),
                        suggested);
}

CoherentSuperposition conditional_state(const SystemParams& params,
                                        const MeasurementSetting& setting, double tol) {
  const int n_max = choose_cutoff(params, setting, tol);
  return condition(evolve_joint(params, n_max, 1.0), setting);
}

}  // namespace macromech

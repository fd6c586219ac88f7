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

#include "macromech/macroscopicity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "macromech/errors.hpp"
#include "macromech/quadrature.hpp"

namespace macromech {

namespace {

void check_residue(Complex value, const char* what) {
  if (std::abs(value.imag()) > 1e-8 * std::max(1.0, std::abs(value.real()))) {
    throw InvariantViolation(std::string(what) + ": imaginary residue " +
                             std::to_string(value.imag()) + " exceeds 1e-8");
  }
}

struct PairBlock {
  Complex G, A, B, C;
};

PairBlock pair_block(const CoherentSuperposition& bra, const CoherentSuperposition& ket) {
  CompensatedSum<Complex> g, a, b, c;
  for (const auto& x : bra.terms()) {
    const Complex xa = std::conj(x.amplitude);
    for (const auto& y : ket.terms()) {
      const Complex t = std::conj(x.weight) * y.weight * coherent_overlap(x.amplitude, y.amplitude);
      g.add(t);
      a.add(t * xa * y.amplitude);
      b.add(t * xa);
      c.add(t * y.amplitude);
    }
  }
  return {g.value(), a.value(), b.value(), c.value()};
}

// Symmetric kernel K_ij with I = 1/2 sum_ij p_i p_j K_ij.
std::vector<double> kernel_matrix(const MixtureState& mix) {
  const auto& comps = mix.components();
  const std::size_t n = comps.size();
  std::vector<double> K(n * n);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    for (std::size_t j = i; j < n; ++j) {
      const PairBlock p = pair_block(comps[i].state, comps[j].state);
      const double k =
          2.0 * (p.A * std::conj(p.G)).real() - std::norm(p.B) - std::norm(p.C);
      K[i * n + j] = k;
      K[j * n + i] = k;
    }
  }
  return K;
}

bool same_state(const CoherentSuperposition& a, const CoherentSuperposition& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t t = 0; t < a.size(); ++t) {
    if (std::abs(a.terms()[t].amplitude - b.terms()[t].amplitude) > tol) return false;
    if (std::abs(a.terms()[t].weight - b.terms()[t].weight) > tol) return false;
  }
  return true;
}

double jackknife_se(const std::vector<double>& replicates, const std::vector<int>& counts) {
  double total = 0.0;
  for (int c : counts) total += c;
  if (total < 2.0) return 0.0;
  CompensatedSum<double> mean;
  for (std::size_t g = 0; g < replicates.size(); ++g) mean.add(counts[g] * replicates[g]);
  const double bar = mean.value() / total;
  CompensatedSum<double> ss;
  for (std::size_t g = 0; g < replicates.size(); ++g) {
    const double d = replicates[g] - bar;
    ss.add(counts[g] * d * d);
  }
  return std::sqrt((total - 1.0) / total * ss.value());
}

}  // namespace

MixtureState::MixtureState(std::vector<MixtureComponent> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw std::invalid_argument("MixtureState: no components");
  CompensatedSum<double> total;
  for (const auto& c : components_) {
    if (!(c.probability >= 0.0) || !std::isfinite(c.probability)) {
      throw std::invalid_argument("MixtureState: probabilities must be finite and >= 0");
    }
    if (c.multiplicity < 1) throw std::invalid_argument("MixtureState: multiplicity must be >= 1");
    total.add(c.probability);
  }
  if (std::abs(total.value() - 1.0) > 1e-10) {
    throw std::invalid_argument("MixtureState: probabilities sum to " +
                                std::to_string(total.value()) + ", expected 1");
  }
}

MixtureState MixtureState::from_weights(std::vector<MixtureComponent> components) {
  CompensatedSum<double> total;
  for (const auto& c : components) total.add(c.probability);
  if (!(total.value() > 0.0)) throw std::invalid_argument("MixtureState: all weights vanish");
  const double scale = 1.0 / total.value();
  for (auto& c : components) {
    c.probability *= scale;
    if (!c.state.is_normalized()) c.state = c.state.normalize();
  }
  return MixtureState(std::move(components));
}

MixtureState MixtureState::coalesced(double tol) const {
  std::vector<MixtureComponent> out;
  for (const auto& c : components_) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const MixtureComponent& o) { return same_state(o.state, c.state, tol); });
    if (it == out.end()) {
      out.push_back(c);
    } else {
      it->probability += c.probability;
      it->multiplicity += c.multiplicity;
    }
  }
  return MixtureState(std::move(out));
}

double measure_I(const CoherentSuperposition& state) {
  const auto terms = state.terms();
  const std::size_t m = terms.size();
  std::vector<Complex> overlap(m * m);
  for (std::size_t l = 0; l < m; ++l) {
    for (std::size_t p = 0; p < m; ++p) {
      overlap[l * m + p] = coherent_overlap(terms[l].amplitude, terms[p].amplitude);
    }
  }
  // (1/2pi) sum w_n w_l* w_q* w_p cross_integral(phi_n, phi_l, phi_q, phi_p), with
  // cross_integral = pi (phi_l - phi_q)* (phi_p - phi_n) <phi_l|phi_p> <phi_q|phi_n>.
  CompensatedSum<Complex> acc;
  for (std::size_t n = 0; n < m; ++n) {
    for (std::size_t l = 0; l < m; ++l) {
      const Complex wnl = terms[n].weight * std::conj(terms[l].weight);
      for (std::size_t q = 0; q < m; ++q) {
        const Complex wnlq = wnl * std::conj(terms[q].weight) * overlap[q * m + n];
        const Complex dlq = std::conj(terms[l].amplitude - terms[q].amplitude);
        for (std::size_t p = 0; p < m; ++p) {
          acc.add(wnlq * terms[p].weight * overlap[l * m + p] * dlq *
                  (terms[p].amplitude - terms[n].amplitude));
        }
      }
    }
  }
  const Complex value = 0.5 * acc.value();
  check_residue(value, "measure_I");
  return value.real();
}

double mean_excitations(const CoherentSuperposition& state) {
  CompensatedSum<Complex> acc;
  for (const auto& ket : state.terms()) {
    for (const auto& bra : state.terms()) {
      acc.add(ket.weight * std::conj(bra.weight) * ket.amplitude * std::conj(bra.amplitude) *
              coherent_overlap(bra.amplitude, ket.amplitude));
    }
  }
  check_residue(acc.value(), "mean_excitations");
  return std::max(acc.value().real(), 0.0);
}

Complex mean_amplitude(const CoherentSuperposition& state) {
  CompensatedSum<Complex> acc;
  for (const auto& ket : state.terms()) {
    for (const auto& bra : state.terms()) {
      acc.add(ket.weight * std::conj(bra.weight) * ket.amplitude *
              coherent_overlap(bra.amplitude, ket.amplitude));
    }
  }
  return acc.value();
}

double measure_I_mixture(const MixtureState& mix) {
  const auto& comps = mix.components();
  const std::size_t n = comps.size();
  const std::vector<double> K = kernel_matrix(mix);
  CompensatedSum<double> acc;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      acc.add(comps[i].probability * comps[j].probability * K[i * n + j]);
    }
  }
  return 0.5 * acc.value();
}

double mean_excitations_mixture(const MixtureState& mix) {
  CompensatedSum<double> acc;
  for (const auto& c : mix.components()) acc.add(c.probability * mean_excitations(c.state));
  return acc.value();
}

namespace {

double quadrature_I(const std::function<Complex(Complex)>& chi, double spread, double tol) {
  // chi is concentrated within unit width of the pairwise amplitude
  // differences, so |chi|^2 < e^-49 beyond spread + 7.
  const double radius = spread + 7.0;
  Quad2dOptions opts;
  opts.nodes = std::max(200, static_cast<int>(std::ceil(12.0 * radius)));
  opts.max_nodes = 8 * opts.nodes;
  const auto result = quad2d(
      [&](Complex g) { return Complex((std::norm(g) - 1.0) * std::norm(chi(g)), 0.0); }, radius,
      tol * 2.0 * std::numbers::pi, opts);
  return result.value.real() / (2.0 * std::numbers::pi);
}

double max_spread(const std::vector<Complex>& amplitudes) {
  double spread = 0.0;
  for (const auto& a : amplitudes) {
    for (const auto& b : amplitudes) spread = std::max(spread, std::abs(a - b));
  }
  return spread;
}

}  // namespace

double measure_I_quadrature(const CoherentSuperposition& state, double tol) {
  std::vector<Complex> amps;
  for (const auto& t : state.terms()) amps.push_back(t.amplitude);
  return quadrature_I([&](Complex g) { return char_function(state, g); }, max_spread(amps), tol);
}

double measure_I_quadrature(const MixtureState& mix, double tol) {
  std::vector<Complex> amps;
  for (const auto& c : mix.components()) {
    for (const auto& t : c.state.terms()) amps.push_back(t.amplitude);
  }
  return quadrature_I(
      [&](Complex g) {
        CompensatedSum<Complex> chi;
        for (const auto& c : mix.components()) chi.add(c.probability * char_function(c.state, g));
        return chi.value();
      },
      max_spread(amps), tol);
}

MixtureStatistics mixture_statistics(const MixtureState& mix) {
  const auto& comps = mix.components();
  const std::size_t n = comps.size();
  const std::vector<double> K = kernel_matrix(mix);

  std::vector<double> N(n), row(n);
  CompensatedSum<double> quad, lin;
  for (std::size_t i = 0; i < n; ++i) {
    N[i] = mean_excitations(comps[i].state);
    CompensatedSum<double> r;
    for (std::size_t j = 0; j < n; ++j) r.add(comps[j].probability * K[i * n + j]);
    row[i] = r.value();
    quad.add(comps[i].probability * row[i]);
    lin.add(comps[i].probability * N[i]);
  }
  const double S = quad.value();
  const double NS = lin.value();

  MixtureStatistics out{};
  out.I = 0.5 * S;
  out.mean_excitations = NS;
  out.gap = NS - out.I;

  // Deleting one sample of component g lowers its weight by q = p_g / m_g.
  std::vector<double> rep_I(n), rep_N(n), rep_gap(n);
  std::vector<int> counts(n);
  int samples = 0;
  for (std::size_t g = 0; g < n; ++g) {
    counts[g] = comps[g].multiplicity;
    samples += counts[g];
    const double q = comps[g].probability / comps[g].multiplicity;
    const double rest = 1.0 - q;
    if (rest <= 0.0) {
      rep_I[g] = out.I;
      rep_N[g] = NS;
    } else {
      rep_I[g] = 0.5 * (S - 2.0 * q * row[g] + q * q * K[g * n + g]) / (rest * rest);
      rep_N[g] = (NS - q * N[g]) / rest;
    }
    rep_gap[g] = rep_N[g] - rep_I[g];
  }
  out.samples = samples;
  out.se_I = jackknife_se(rep_I, counts);
  out.se_mean_excitations = jackknife_se(rep_N, counts);
  out.se_gap = jackknife_se(rep_gap, counts);
  return out;
}

}  // namespace macromech

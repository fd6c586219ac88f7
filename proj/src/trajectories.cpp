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

#include "macromech/trajectories.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "macromech/errors.hpp"
#include "macromech/parallel.hpp"

namespace macromech {

namespace {

constexpr Complex kI{0.0, 1.0};

// h - sin(h) without cancellation for small steps.
double h_minus_sin(double h) {
  if (std::abs(h) < 1e-3) {
    const double h2 = h * h;
    return h * h2 / 6.0 * (1.0 - h2 / 20.0 * (1.0 - h2 / 42.0));
  }
  return h - std::sin(h);
}

double sum_norms(const std::vector<Sector>& sectors) {
  CompensatedSum<double> acc;
  for (const auto& s : sectors) acc.add(std::norm(s.coefficient));
  return acc.value();
}

}  // namespace

SectorState::SectorState(std::vector<Sector> sectors) : sectors_(std::move(sectors)) {
  if (sectors_.empty()) throw std::invalid_argument("SectorState: no sectors");
  for (std::size_t i = 0; i < sectors_.size(); ++i) {
    if (sectors_[i].n < 0 || (i > 0 && sectors_[i].n <= sectors_[i - 1].n)) {
      throw std::invalid_argument("SectorState: photon numbers must be >= 0 and strictly increasing");
    }
  }
  norm_squared_ = sum_norms(sectors_);
}

SectorState SectorState::normalized() const {
  if (!(norm_squared_ > 0.0)) throw std::domain_error("SectorState: zero norm");
  std::vector<Sector> out(sectors_);
  const double scale = 1.0 / std::sqrt(norm_squared_);
  for (auto& s : out) s.coefficient *= scale;
  return SectorState(std::move(out));
}

double SectorState::mean_photons() const {
  CompensatedSum<double> acc;
  for (const auto& s : sectors_) acc.add(s.n * std::norm(s.coefficient));
  return acc.value() / norm_squared_;
}

void NoiseParams::validate(int n_max) const {
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw std::invalid_argument("NoiseParams: kappa must be >= 0");
  if (!(dtau > 0.0) || !std::isfinite(dtau)) throw std::invalid_argument("NoiseParams: dtau must be > 0");
  if (n_traj < 1) throw std::invalid_argument("NoiseParams: n_traj must be >= 1");
  if (kappa * dtau * n_max >= 0.01) {
    throw std::invalid_argument("NoiseParams: kappa * dtau * n_max = " +
                                std::to_string(kappa * dtau * n_max) +
                                " violates the first-order step bound 0.01");
  }
}

double jump_probability(const SectorState& state, double kappa, double dtau) {
  return kappa * dtau * state.mean_photons();
}

SectorState no_jump_step(const SectorState& state, double tau, double dtau, double k,
                         double kappa) {
  const Complex shift = std::exp(kI * tau) * 2.0 * kI * std::sin(0.5 * dtau) * std::exp(0.5 * kI * dtau);
  const double curvature = k * k * h_minus_sin(dtau);
  std::vector<Sector> out(state.sectors());
  for (auto& s : out) {
    const double n = s.n;
    const Complex mu = k * n * shift;
    const double phase = (mu * std::conj(s.amplitude)).imag() + n * n * curvature;
    s.coefficient *= std::exp(-0.5 * kappa * n * dtau) * std::exp(kI * phase);
    s.amplitude += mu;
  }
  return SectorState(std::move(out)).normalized();
}

SectorState apply_jump(const SectorState& state) {
  std::vector<Sector> out;
  out.reserve(state.sectors().size());
  for (const auto& s : state.sectors()) {
    if (s.n == 0) continue;
    out.push_back({s.n - 1, std::sqrt(static_cast<double>(s.n)) * s.coefficient, s.amplitude});
  }
  if (out.empty() || !(sum_norms(out) > 0.0)) {
    throw std::logic_error("apply_jump: jump on a field-vacuum state");
  }
  return SectorState(std::move(out)).normalized();
}

int poisson_cutoff(Complex alpha, double tol) {
  const double mean = std::norm(alpha);
  if (mean == 0.0) return 1;
  for (int cut = 1; cut < 10000; ++cut) {
    CompensatedSum<double> tail;
    for (int n = cut + 1;; ++n) {
      const double term = std::exp(-mean + n * std::log(mean) - std::lgamma(n + 1.0));
      tail.add(term);
      if (n > mean && term < 1e-30) break;
    }
    if (tail.value() < tol) return cut;
  }
  throw TruncationError("poisson_cutoff: |alpha| too large", 10000);
}

SectorState initial_sector_state(Complex alpha, Complex beta, int n_max) {
  if (n_max < 0) throw std::invalid_argument("initial_sector_state: n_max must be >= 0");
  std::vector<Sector> sectors;
  for (int n = 0; n <= n_max; ++n) {
    Complex c = 1.0;
    if (n > 0) {
      c = alpha == Complex(0.0, 0.0)
              ? Complex(0.0, 0.0)
              : std::exp(static_cast<double>(n) * std::log(alpha) - 0.5 * std::lgamma(n + 1.0));
    }
    sectors.push_back({n, c, beta});
  }
  return SectorState(std::move(sectors)).normalized();
}

Complex sample_thermal(const ThermalInit& init, CounterRng& rng) {
  if (!(init.nbar >= 0.0)) throw std::invalid_argument("sample_thermal: nbar must be >= 0");
  if (init.nbar == 0.0) return init.beta;
  const double s = std::sqrt(init.nbar / 2.0);
  const double re = rng.normal();
  const double im = rng.normal();
  return init.beta + Complex(s * re, s * im);
}

TrajectoryResult run_trajectory(const SystemParams& params, const NoiseParams& noise,
                                 Complex mech_init, CounterRng& rng, int n_max) {
  params.validate();
  noise.validate(n_max);
  const long steps = params.tau > 0.0 ? std::lround(params.tau / noise.dtau) : 0;
  const double h = steps > 0 ? params.tau / static_cast<double>(steps) : 0.0;

  // Per sector: unnormalized probability, accumulated phase, amplitude. The
  // magnitude only changes by e^{-kappa n h} per step, so probabilities are
  // tracked directly and rescaled now and then to stay in range.
  struct Track {
    int n;
    double prob;
    double phase;
    Complex amp;
  };
  std::vector<Track> tracks;
  const SectorState initial = initial_sector_state(params.alpha, mech_init, n_max);
  for (const auto& s : initial.sectors()) {
    tracks.push_back({s.n, std::norm(s.coefficient), std::arg(s.coefficient), s.amplitude});
  }
  std::vector<double> decay(tracks.size());
  // e^{ih} - 1 written without cancellation.
  const Complex rotor = 2.0 * kI * std::sin(0.5 * h) * std::exp(0.5 * kI * h);
  const double curvature = params.k * params.k * h_minus_sin(h);
  int jumps = 0;

  auto refresh_decay = [&] {
    decay.resize(tracks.size());
    for (std::size_t i = 0; i < tracks.size(); ++i) decay[i] = std::exp(-noise.kappa * tracks[i].n * h);
  };
  refresh_decay();

  for (long j = 0; j < steps; ++j) {
    const double eps = rng.uniform();
    double dp = 0.0;
    if (noise.kappa > 0.0) {
      double total = 0.0, weighted = 0.0;
      for (const auto& t : tracks) {
        total += t.prob;
        weighted += t.n * t.prob;
      }
      dp = noise.kappa * h * weighted / total;
      if ((j & 1023) == 0) {
        for (auto& t : tracks) t.prob /= total;
      }
    }
    // Drift every step; a jump drawn against the pre-step dp then acts on the
    // drifted state, so the mechanics never skips a step.
    const Complex shift = std::exp(kI * (static_cast<double>(j) * h)) * rotor;
    for (std::size_t i = 0; i < tracks.size(); ++i) {
      auto& t = tracks[i];
      const double n = t.n;
      const Complex mu = params.k * n * shift;
      t.phase += (mu * std::conj(t.amp)).imag() + n * n * curvature;
      t.amp += mu;
      t.prob *= decay[i];
    }
    if (eps <= dp) {
      std::vector<Track> next;
      for (const auto& t : tracks) {
        if (t.n == 0) continue;
        next.push_back({t.n - 1, t.n * t.prob, t.phase, t.amp});
      }
      tracks = std::move(next);
      refresh_decay();
      ++jumps;
    }
  }

  // Back to the laboratory frame.
  const Complex frame = std::exp(-kI * params.tau);
  std::vector<Sector> sectors;
  for (const auto& t : tracks) {
    const double phase = t.phase - params.r * params.tau * t.n;
    sectors.push_back({t.n, std::sqrt(t.prob) * std::exp(kI * phase), frame * t.amp});
  }
  return {SectorState(std::move(sectors)).normalized(), jumps};
}

std::vector<TrajectoryResult> run_ensemble(const SystemParams& params, const NoiseParams& noise,
                                           const std::optional<ThermalInit>& thermal, int n_max) {
  if (n_max <= 0) n_max = poisson_cutoff(params.alpha);
  noise.validate(n_max);
  std::vector<std::optional<TrajectoryResult>> slots(noise.n_traj);
  parallel_for(noise.n_traj, [&](std::ptrdiff_t i) {
    CounterRng rng(noise.seed, static_cast<std::uint64_t>(i));
    const Complex mech = thermal ? sample_thermal(*thermal, rng) : params.beta;
    slots[i] = run_trajectory(params, noise, mech, rng, n_max);
  });
  std::vector<TrajectoryResult> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

MixtureState ensemble_condition(const std::vector<TrajectoryResult>& trajectories,
                                const MeasurementSetting& setting) {
  if (trajectories.empty()) throw std::invalid_argument("ensemble_condition: no trajectories");
  std::vector<std::optional<MixtureComponent>> slots(trajectories.size());
  parallel_for(static_cast<std::ptrdiff_t>(trajectories.size()), [&](std::ptrdiff_t i) {
    std::vector<CoherentTerm> terms;
    for (const auto& s : trajectories[i].state.sectors()) {
      const Complex w = s.coefficient * measurement_amplitude(setting, s.n);
      if (std::abs(w) >= 1e-300) terms.push_back({w, s.amplitude});
    }
    if (terms.empty()) return;
    CoherentSuperposition raw(std::move(terms));
    if (!(raw.norm_squared() > 0.0)) return;
    slots[i] = MixtureComponent{raw.norm_squared(), raw.merged(1e-12).normalize(), 1};
  });
  std::vector<MixtureComponent> comps;
  for (auto& s : slots) {
    if (s) comps.push_back(std::move(*s));
  }
  if (comps.empty()) {
    throw DegenerateOutcome("ensemble_condition: every trajectory gives zero outcome probability");
  }
  return MixtureState::from_weights(std::move(comps)).coalesced(1e-6);
}

}  // namespace macromech

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

#include "macromech/experiment.hpp"

#include <fmt/format.h>

#include <boost/math/tools/minima.hpp>
#include <chrono>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numbers>

#include "macromech/errors.hpp"
#include "macromech/macroscopicity.hpp"
#include "macromech/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#ifndef MACROMECH_VERSION
#define MACROMECH_VERSION "0.0.0"
#endif

namespace macromech {

using Json = nlohmann::ordered_json;

std::string version() { return MACROMECH_VERSION; }

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

// Column names and values identifying a measurement setting.
std::string setting_header(const ExperimentConfig& cfg) {
  return cfg.measurement == "heterodyne" ? "sigma_re,sigma_im" : "x,theta";
}

std::string setting_cells(const MeasurementSetting& s) {
  if (const auto* h = std::get_if<Homodyne>(&s)) return num(h->x) + "," + num(h->theta);
  const auto& het = std::get<Heterodyne>(s);
  return num(het.sigma.real()) + "," + num(het.sigma.imag());
}

Json setting_json(const MeasurementSetting& s) {
  if (const auto* h = std::get_if<Homodyne>(&s)) return Json{{"type", "homodyne"}, {"x", h->x}, {"theta", h->theta}};
  const auto& het = std::get<Heterodyne>(s);
  return Json{{"type", "heterodyne"}, {"sigma_re", het.sigma.real()}, {"sigma_im", het.sigma.imag()}};
}

struct PointResult {
  double I = 0.0;
  double N = 0.0;
  double norm_residue = 0.0;
};

PointResult evaluate(const SystemParams& params, const MeasurementSetting& setting, double tol) {
  const CoherentSuperposition state = conditional_state(params, setting, tol);
  return {measure_I(state), mean_excitations(state), std::abs(state.norm_squared() - 1.0)};
}

struct Checker {
  bool enabled;
  void bound(double I, double N, const std::string& where) const {
    if (enabled && I > N + 1e-9) {
      throw InvariantViolation(fmt::format("I <= <b^dag b> violated at {}: I = {:.17g}, N = {:.17g}", where, I, N));
    }
  }
  void normalized(double residue, const std::string& where) const {
    if (enabled && residue >= 1e-10) {
      throw InvariantViolation(fmt::format("normalization residue {:.3e} >= 1e-10 at {}", residue, where));
    }
  }
};

class Outputs {
 public:
  Outputs(const std::filesystem::path& dir, std::string name) : dir_(dir), name_(std::move(name)) {}

  void write(const std::string& suffix, const std::string& content) {
    const auto path = dir_ / (name_ + suffix);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
    paths_.push_back(path);
  }
  const std::vector<std::filesystem::path>& paths() const { return paths_; }

 private:
  std::filesystem::path dir_;
  std::string name_;
  std::vector<std::filesystem::path> paths_;
};

std::vector<std::pair<double, double>> grid_points(const ExperimentConfig& cfg) {
  std::vector<std::pair<double, double>> pts;
  for (double re : cfg.wigner_re) {
    for (double im : cfg.wigner_im) pts.emplace_back(re, im);
  }
  return pts;
}

template <typename W>
std::vector<double> wigner_values(const ExperimentConfig& cfg, W&& w) {
  const auto pts = grid_points(cfg);
  std::vector<double> values(pts.size());
  parallel_for(static_cast<std::ptrdiff_t>(pts.size()), [&](std::ptrdiff_t i) {
    values[i] = w(Complex(pts[i].first, pts[i].second));
  });
  return values;
}

double wigner_mixture(const MixtureState& mix, Complex delta) {
  CompensatedSum<double> acc;
  for (const auto& c : mix.components()) acc.add(c.probability * wigner(c.state, delta));
  return acc.value();
}

// ---------------------------------------------------------------------------

Json run_sweep_k(const ExperimentConfig& cfg, const Checker& check, Outputs& out) {
  const auto settings = settings_of(cfg);
  const std::size_t nk = cfg.sweep_k.size();
  std::vector<PointResult> res(settings.size() * nk);
  parallel_for(static_cast<std::ptrdiff_t>(res.size()), [&](std::ptrdiff_t t) {
    SystemParams p = cfg.system;
    p.k = cfg.sweep_k[t % nk];
    res[t] = evaluate(p, settings[t / nk], cfg.cutoff_tol);
  });

  std::string csv = "k," + setting_header(cfg) + ",I,mean_excitations,gap\n";
  Json per_setting = Json::array();
  for (std::size_t s = 0; s < settings.size(); ++s) {
    double best_rel = INFINITY, best_k = NAN, max_I = -INFINITY;
    for (std::size_t j = 0; j < nk; ++j) {
      const auto& r = res[s * nk + j];
      const std::string where = fmt::format("k={} setting {}", cfg.sweep_k[j], s);
      check.bound(r.I, r.N, where);
      check.normalized(r.norm_residue, where);
      csv += num(cfg.sweep_k[j]) + "," + setting_cells(settings[s]) + "," + num(r.I) + "," +
             num(r.N) + "," + num(r.N - r.I) + "\n";
      max_I = std::max(max_I, r.I);
      if (r.N > 0.0 && (r.N - r.I) / r.N < best_rel) {
        best_rel = (r.N - r.I) / r.N;
        best_k = cfg.sweep_k[j];
      }
    }
    Json js = setting_json(settings[s]);
    js["max_I"] = max_I;
    js["min_relative_gap"] = std::isfinite(best_rel) ? Json(best_rel) : Json(nullptr);
    js["k_at_min_relative_gap"] = std::isfinite(best_k) ? Json(best_k) : Json(nullptr);
    per_setting.push_back(js);
  }
  out.write(".csv", csv);
  return Json{{"settings", per_setting}};
}

Json run_sweep_x_theta(const ExperimentConfig& cfg, const Checker& check, Outputs& out) {
  const std::size_t nx = cfg.sweep_x.size();
  std::vector<PointResult> res(cfg.theta.size() * nx);
  parallel_for(static_cast<std::ptrdiff_t>(res.size()), [&](std::ptrdiff_t t) {
    res[t] = evaluate(cfg.system, Homodyne{cfg.sweep_x[t % nx], cfg.theta[t / nx]}, cfg.cutoff_tol);
  });
  std::string csv = "x,theta,I,mean_excitations,gap\n";
  for (std::size_t a = 0; a < cfg.theta.size(); ++a) {
    for (std::size_t j = 0; j < nx; ++j) {
      const auto& r = res[a * nx + j];
      const std::string where = fmt::format("x={} theta={}", cfg.sweep_x[j], cfg.theta[a]);
      check.bound(r.I, r.N, where);
      check.normalized(r.norm_residue, where);
      csv += num(cfg.sweep_x[j]) + "," + num(cfg.theta[a]) + "," + num(r.I) + "," + num(r.N) +
             "," + num(r.N - r.I) + "\n";
    }
  }
  out.write(".csv", csv);

  Json crossings = Json::array();
  double lo = INFINITY, hi = -INFINITY;
  bool all_found = true;
  for (double th : cfg.theta) {
    Json c{{"theta", th}};
    try {
      const double xbar = find_crossing(cfg.system, th, cfg.sweep_x, cfg.crossing_proximity, cfg.cutoff_tol);
      const auto r = evaluate(cfg.system, Homodyne{xbar, th}, cfg.cutoff_tol);
      c["x_bar"] = xbar;
      c["I"] = r.I;
      c["mean_excitations"] = r.N;
      c["gap"] = r.N - r.I;
      lo = std::min(lo, xbar);
      hi = std::max(hi, xbar);
    } catch (const NonConvergence& e) {
      c["x_bar"] = nullptr;
      c["error"] = e.what();
      all_found = false;
    }
    crossings.push_back(c);
  }
  Json summary{{"crossings", crossings}};
  if (all_found && !cfg.theta.empty()) {
    summary["theta_spread"] = hi - lo;
    summary["theta_independent"] = (hi - lo) <= 1e-3;
  }

  if (cfg.fit_x) {
    std::vector<PointResult> fit(cfg.fit_theta.size());
    parallel_for(static_cast<std::ptrdiff_t>(fit.size()), [&](std::ptrdiff_t t) {
      fit[t] = evaluate(cfg.system, Homodyne{*cfg.fit_x, cfg.fit_theta[t]}, cfg.cutoff_tol);
    });
    std::vector<double> values;
    for (const auto& r : fit) values.push_back(r.I);
    const SinusoidFit f = fit_sinusoid(cfg.fit_theta, values);
    std::string fcsv = "theta,I,mean_excitations,fit\n";
    for (std::size_t t = 0; t < fit.size(); ++t) {
      check.bound(fit[t].I, fit[t].N, fmt::format("fit theta={}", cfg.fit_theta[t]));
      fcsv += num(cfg.fit_theta[t]) + "," + num(fit[t].I) + "," + num(fit[t].N) + "," +
              num(f.a + f.c * std::sin(cfg.fit_theta[t] + f.b)) + "\n";
    }
    out.write(".fit.csv", fcsv);
    summary["fit"] = Json{{"x", *cfg.fit_x}, {"a", f.a}, {"b", f.b}, {"c", f.c}, {"rms", f.rms}};
  }
  return summary;
}

Json run_wigner_grid(const ExperimentConfig& cfg, const Checker& check, Outputs& out) {
  const auto settings = settings_of(cfg);
  const auto pts = grid_points(cfg);
  const bool indexed = settings.size() > 1;
  std::string csv = "setting," + setting_header(cfg) + ",I,mean_excitations,min_wigner,max_wigner\n";
  std::string wcsv = indexed ? "setting,re,im,W\n" : "re,im,W\n";
  Json rows = Json::array();
  for (std::size_t s = 0; s < settings.size(); ++s) {
    const auto state = conditional_state(cfg.system, settings[s], cfg.cutoff_tol);
    const double I = measure_I(state);
    const double N = mean_excitations(state);
    check.bound(I, N, fmt::format("setting {}", s));
    check.normalized(std::abs(state.norm_squared() - 1.0), fmt::format("setting {}", s));
    const auto values = wigner_values(cfg, [&](Complex d) { return wigner(state, d); });
    const double wmin = *std::min_element(values.begin(), values.end());
    const double wmax = *std::max_element(values.begin(), values.end());
    csv += std::to_string(s) + "," + setting_cells(settings[s]) + "," + num(I) + "," + num(N) + "," +
           num(wmin) + "," + num(wmax) + "\n";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (indexed) wcsv += std::to_string(s) + ",";
      wcsv += num(pts[i].first) + "," + num(pts[i].second) + "," + num(values[i]) + "\n";
    }
    Json js = setting_json(settings[s]);
    js["min_wigner"] = wmin;
    js["max_wigner"] = wmax;
    rows.push_back(js);
  }
  out.write(".csv", csv);
  out.write(".wigner.csv", wcsv);
  return Json{{"settings", rows}};
}

Json run_fidelity_opt(const ExperimentConfig& cfg, const Checker& check, Outputs& out) {
  const auto settings = settings_of(cfg);
  struct Row {
    CatOptimum opt;
    double I, N;
    std::vector<CoherentTerm> weights;  // normalized per-sector weights w_n
  };
  std::vector<Row> rows(settings.size());
  parallel_for(static_cast<std::ptrdiff_t>(settings.size()), [&](std::ptrdiff_t s) {
    const int n_max = choose_cutoff(cfg.system, settings[s], cfg.cutoff_tol);
    const JointState joint = evolve_joint(cfg.system, n_max, 1.0);
    std::vector<CoherentTerm> terms = conditional_terms(joint, settings[s]);
    const double scale = 1.0 / std::sqrt(CoherentSuperposition(terms).norm_squared());
    for (auto& t : terms) t.weight *= scale;
    const auto state = condition(joint, settings[s]);
    rows[s] = {optimize_lambda(state, cfg.parity, cfg.search), measure_I(state),
               mean_excitations(state), terms};
  });

  const char* parity = cfg.parity == Parity::kEven ? "even" : "odd";
  std::string csv = setting_header(cfg) + ",parity,lambda_re,lambda_im,fidelity,I,mean_excitations\n";
  std::string coeff = "setting,n,weight_abs2,weight_abs2_normalized\n";
  Json js = Json::array();
  for (std::size_t s = 0; s < settings.size(); ++s) {
    const auto& r = rows[s];
    check.bound(r.I, r.N, fmt::format("setting {}", s));
    csv += setting_cells(settings[s]) + "," + parity + "," + num(r.opt.lambda.real()) + "," +
           num(r.opt.lambda.imag()) + "," + num(r.opt.fidelity) + "," + num(r.I) + "," + num(r.N) + "\n";
    double total = 0.0;
    for (const auto& t : r.weights) total += std::norm(t.weight);
    for (std::size_t n = 0; n < r.weights.size(); ++n) {
      const double w2 = std::norm(r.weights[n].weight);
      coeff += std::to_string(s) + "," + std::to_string(n) + "," + num(w2) + "," + num(w2 / total) + "\n";
    }
    Json e = setting_json(settings[s]);
    e["lambda_re"] = r.opt.lambda.real();
    e["lambda_im"] = r.opt.lambda.imag();
    e["fidelity"] = r.opt.fidelity;
    js.push_back(e);
  }
  out.write(".csv", csv);
  out.write(".coefficients.csv", coeff);
  Json summary{{"settings", js}};

  if (!cfg.simplified_mu.empty()) {
    // Three-component truncation of the first setting's state.
    const auto& w = rows.front().weights;
    if (w.size() < 3) throw ConfigError("[simplified] needs at least three sectors in the conditional state");
    const std::array<Complex, 3> amps{w[0].amplitude, w[1].amplitude, w[2].amplitude};
    const auto full = CoherentSuperposition::normalized(w);
    std::string scsv = "mu,lambda_re,lambda_im,fidelity\n";
    Json curves = Json::array();
    for (double mu : cfg.simplified_mu) {
      const auto c = simplified_state(w[0].weight, w[1].weight, w[2].weight, mu, amps);
      double best = -1.0, best_re = NAN;
      for (double re : cfg.simplified_lambda_re) {
        const Complex lambda(re, cfg.simplified_lambda_im);
        const double f = (cfg.parity == Parity::kOdd && std::abs(lambda) == 0.0)
                             ? 0.0
                             : cat_fidelity(c, lambda, cfg.parity);
        scsv += num(mu) + "," + num(re) + "," + num(cfg.simplified_lambda_im) + "," + num(f) + "\n";
        if (f > best) {
          best = f;
          best_re = re;
        }
      }
      const auto opt = optimize_lambda(c, cfg.parity, cfg.search);
      curves.push_back(Json{{"mu", mu},
                            {"grid_max_fidelity", best},
                            {"grid_argmax_lambda_re", best_re},
                            {"optimum_lambda_re", opt.lambda.real()},
                            {"optimum_lambda_im", opt.lambda.imag()},
                            {"optimum_fidelity", opt.fidelity},
                            {"fidelity_to_full_state", state_fidelity(c, full)}});
    }
    out.write(".simplified.csv", scsv);
    summary["simplified"] = curves;
  }
  return summary;
}

Json run_dissipative(const ExperimentConfig& cfg, const Checker& check, Outputs& out,
                     bool with_thermal) {
  const auto settings = settings_of(cfg);
  const MeasurementSetting setting = settings.front();
  const int n_max = cfg.n_max > 0 ? cfg.n_max : poisson_cutoff(cfg.system.alpha);
  const auto reference = conditional_state(cfg.system, setting, cfg.cutoff_tol);
  const auto pts = grid_points(cfg);

  std::string header =
      "kappa,init,nbar,I,mean_excitations,gap,se_I,se_mean_excitations,se_gap,mean_photons,"
      "se_mean_photons,expected_photons,unitary_fidelity,components,mean_jumps";
  if (cfg.wigner) header += ",min_wigner";
  std::string csv = header + "\n";
  std::string wcsv = "kappa,init,re,im,W\n";
  Json rows = Json::array();

  std::vector<std::optional<ThermalInit>> inits{std::nullopt};
  if (with_thermal) inits.push_back(cfg.thermal);

  for (double kappa : cfg.kappa) {
    for (const auto& init : inits) {
      NoiseParams noise = cfg.noise;
      noise.kappa = kappa;
      const auto trajs = run_ensemble(cfg.system, noise, init, n_max);
      const MixtureState mix = ensemble_condition(trajs, setting);
      const MixtureStatistics st = mixture_statistics(mix);

      CompensatedSum<double> photons, photons_sq, jumps;
      for (const auto& t : trajs) {
        const double m = t.state.mean_photons();
        photons.add(m);
        photons_sq.add(m * m);
        jumps.add(t.jumps);
      }
      const double T = static_cast<double>(trajs.size());
      const double mean_ph = photons.value() / T;
      const double var_ph = T > 1 ? std::max(0.0, (photons_sq.value() - T * mean_ph * mean_ph) / (T - 1)) : 0.0;
      const double expected = std::norm(cfg.system.alpha) * std::exp(-kappa * cfg.system.tau);
      CompensatedSum<double> fid;
      for (const auto& c : mix.components()) fid.add(c.probability * state_fidelity(c.state, reference));

      const std::string label = init ? "thermal" : "coherent";
      const double nbar = init ? init->nbar : 0.0;
      check.bound(st.I, st.mean_excitations, fmt::format("kappa={} init={}", kappa, label));

      std::string line = num(kappa) + "," + label + "," + num(nbar) + "," + num(st.I) + "," +
                         num(st.mean_excitations) + "," + num(st.gap) + "," + num(st.se_I) + "," +
                         num(st.se_mean_excitations) + "," + num(st.se_gap) + "," + num(mean_ph) +
                         "," + num(std::sqrt(var_ph / T)) + "," + num(expected) + "," +
                         num(fid.value()) + "," + std::to_string(mix.size()) + "," +
                         num(jumps.value() / T);
      Json js{{"kappa", kappa},      {"init", label}, {"I", st.I}, {"mean_excitations", st.mean_excitations},
              {"gap", st.gap},       {"se_I", st.se_I}, {"se_gap", st.se_gap},
              {"unitary_fidelity", fid.value()}};
      if (cfg.wigner) {
        const auto values = wigner_values(cfg, [&](Complex d) { return wigner_mixture(mix, d); });
        const double wmin = *std::min_element(values.begin(), values.end());
        line += "," + num(wmin);
        js["min_wigner"] = wmin;
        for (std::size_t i = 0; i < pts.size(); ++i) {
          wcsv += num(kappa) + "," + label + "," + num(pts[i].first) + "," + num(pts[i].second) + "," +
                  num(values[i]) + "\n";
        }
      }
      csv += line + "\n";
      rows.push_back(js);
    }
  }
  out.write(".csv", csv);
  if (cfg.wigner) out.write(".wigner.csv", wcsv);
  return Json{{"n_max", n_max}, {"setting", setting_json(setting)}, {"rows", rows}};
}

Json run_subtraction(const ExperimentConfig& cfg, const Checker& check, Outputs& out) {
  const auto table = cfg.table_path.empty()
                         ? synthetic_detuning_table(cfg.synthetic_delta.front(), cfg.synthetic_delta.back(),
                                                    static_cast<int>(cfg.synthetic_delta.size()),
                                                    cfg.squeeze_rate, cfg.nbar0, cfg.heating)
                         : read_detuning_table_file(cfg.table_path);
  const DetuningSweep sweep = detuning_sweep(table);
  std::string csv = "delta,I,mean_excitations\n";
  bool below = true;
  for (const auto& r : sweep.rows) {
    check.bound(r.I, r.mean_excitations, fmt::format("delta={}", r.delta));
    below = below && r.I < r.mean_excitations;
    csv += num(r.delta) + "," + num(r.I) + "," + num(r.mean_excitations) + "\n";
  }
  out.write(".csv", csv);
  const bool interior = sweep.argmax_I > 0 && sweep.argmax_I + 1 < sweep.rows.size();
  return Json{{"argmax_delta", sweep.rows[sweep.argmax_I].delta},
              {"max_I", sweep.rows[sweep.argmax_I].I},
              {"interior_maximum", interior},
              {"I_below_mean_excitations", below},
              {"source", cfg.table_path.empty() ? "synthetic" : cfg.table_path}};
}

}  // namespace

double find_crossing(const SystemParams& params, double theta, std::span<const double> x_grid,
                     double proximity, double cutoff_tol) {
  if (x_grid.size() < 3) throw std::invalid_argument("find_crossing: need at least three grid points");
  auto gap = [&](double x) {
    const auto r = evaluate(params, Homodyne{x, theta}, cutoff_tol);
    return std::pair{r.N - r.I, r.N};
  };
  std::vector<double> g(x_grid.size());
  parallel_for(static_cast<std::ptrdiff_t>(x_grid.size()), [&](std::ptrdiff_t i) { g[i] = gap(x_grid[i]).first; });
  const std::size_t i = static_cast<std::size_t>(std::min_element(g.begin(), g.end()) - g.begin());
  if (i == 0 || i + 1 == g.size()) {
    throw NonConvergence(fmt::format("find_crossing: no bracket, smallest gap {:.3e} at grid edge x={}", g[i], x_grid[i]),
                         g[i]);
  }
  double lo = std::min(x_grid[i - 1], x_grid[i + 1]);
  double hi = std::max(x_grid[i - 1], x_grid[i + 1]);
  const auto [xbar, gmin] =
      boost::math::tools::brent_find_minima([&](double x) { return gap(x).first; }, lo, hi, 40);
  const double N = gap(xbar).second;
  if (!(N > 0.0) || gmin / N > proximity) {
    throw NonConvergence(fmt::format("find_crossing: relative gap {:.3e} at x={} exceeds proximity {}",
                                     N > 0.0 ? gmin / N : INFINITY, xbar, proximity),
                         gmin);
  }
  return xbar;
}

SinusoidFit fit_sinusoid(std::span<const double> theta, std::span<const double> values) {
  if (theta.size() != values.size() || theta.size() < 3) {
    throw std::invalid_argument("fit_sinusoid: need at least three (theta, value) pairs");
  }
  // Normal equations for the basis (1, sin, cos), solved by Cramer's rule.
  double M[3][3] = {}, rhs[3] = {};
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double f[3] = {1.0, std::sin(theta[i]), std::cos(theta[i])};
    for (int r = 0; r < 3; ++r) {
      rhs[r] += f[r] * values[i];
      for (int c = 0; c < 3; ++c) M[r][c] += f[r] * f[c];
    }
  }
  auto det3 = [](const double m[3][3]) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  };
  const double D = det3(M);
  if (std::abs(D) < 1e-12) throw std::invalid_argument("fit_sinusoid: angles do not determine a sinusoid");
  double sol[3];
  for (int k = 0; k < 3; ++k) {
    double Mk[3][3];
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) Mk[r][c] = (c == k) ? rhs[r] : M[r][c];
    }
    sol[k] = det3(Mk) / D;
  }
  SinusoidFit fit{sol[0], std::atan2(sol[2], sol[1]), std::hypot(sol[1], sol[2]), 0.0};
  double ss = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double r = values[i] - (fit.a + fit.c * std::sin(theta[i] + fit.b));
    ss += r * r;
  }
  fit.rms = std::sqrt(ss / static_cast<double>(theta.size()));
  return fit;
}

RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
#ifdef _OPENMP
  if (options.threads > 0) omp_set_num_threads(options.threads);
#endif
  ExperimentConfig cfg = config;
  if (options.seed) cfg.seed = *options.seed;
  cfg.noise.seed = cfg.seed;

  std::filesystem::create_directories(options.out_dir);
  Outputs out(options.out_dir, cfg.name);
  const Checker check{options.debug_invariants};
  const auto start = std::chrono::steady_clock::now();

  Json summary;
  if (cfg.kind == "sweep-k" || cfg.kind == "sweep-sigma") {
    summary = run_sweep_k(cfg, check, out);
  } else if (cfg.kind == "sweep-x-theta") {
    summary = run_sweep_x_theta(cfg, check, out);
  } else if (cfg.kind == "wigner-grid") {
    summary = run_wigner_grid(cfg, check, out);
  } else if (cfg.kind == "fidelity-opt") {
    summary = run_fidelity_opt(cfg, check, out);
  } else if (cfg.kind == "dissipative") {
    summary = run_dissipative(cfg, check, out, false);
  } else if (cfg.kind == "thermal") {
    summary = run_dissipative(cfg, check, out, true);
  } else if (cfg.kind == "subtraction") {
    summary = run_subtraction(cfg, check, out);
  } else {
    throw ConfigError("[experiment] kind: unknown kind '" + cfg.kind + "'");
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  Json manifest;
  manifest["name"] = cfg.name;
  manifest["kind"] = cfg.kind;
  manifest["version"] = version();
  manifest["seed"] = cfg.seed;
  manifest["debug_invariants"] = options.debug_invariants;
#ifdef _OPENMP
  manifest["threads"] = omp_get_max_threads();
#else
  manifest["threads"] = 1;
#endif
  manifest["wall_time_seconds"] = wall;
  manifest["config"] = cfg.raw;
  Json files = Json::array();
  for (const auto& p : out.paths()) files.push_back(p.filename().string());
  manifest["outputs"] = files;
  manifest["summary"] = summary;

  RunResult result;
  result.outputs = out.paths();
  result.manifest = options.out_dir / (cfg.name + ".manifest.json");
  std::ofstream mf(result.manifest, std::ios::binary);
  if (!mf) throw std::runtime_error("cannot write '" + result.manifest.string() + "'");
  mf << manifest.dump(2) << "\n";
  return result;
}

}  // namespace macromech

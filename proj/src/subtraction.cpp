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

#include "macromech/subtraction.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "macromech/errors.hpp"
#include "macromech/parallel.hpp"

namespace macromech {

namespace {

Mat2 inverse(const Mat2& m) {
  const double d = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  return {{{m[1][1] / d, -m[0][1] / d}, {-m[1][0] / d, m[0][0] / d}}};
}

Mat2 scaled(const Mat2& m, double s) {
  return {{{m[0][0] * s, m[0][1] * s}, {m[1][0] * s, m[1][1] * s}}};
}

double gaussian_density(const GaussianState& g, Vec2 v) {
  const Mat2 inv = inverse(g.cov);
  const double ux = v[0] - g.mean[0];
  const double uy = v[1] - g.mean[1];
  const double q = inv[0][0] * ux * ux + 2.0 * inv[0][1] * ux * uy + inv[1][1] * uy * uy;
  return std::exp(-0.5 * q) / (2.0 * std::numbers::pi * std::sqrt(g.det()));
}

// int G(v)^2 d^2v; G^2 is this constant times the density with covariance S/2.
double gaussian_square_integral(const GaussianState& g) {
  return 1.0 / (4.0 * std::numbers::pi * std::sqrt(g.det()));
}

Poly2 linear(double c0, double cx, double cy) {
  Poly2 p;
  p.at(0, 0) = c0;
  p.at(1, 0) = cx;
  p.at(0, 1) = cy;
  return p;
}

}  // namespace

double GaussianState::det() const { return cov[0][0] * cov[1][1] - cov[0][1] * cov[1][0]; }

void GaussianState::validate() const {
  for (double x : {mean[0], mean[1], cov[0][0], cov[0][1], cov[1][0], cov[1][1]}) {
    if (!std::isfinite(x)) throw std::invalid_argument("GaussianState: non-finite entry");
  }
  if (std::abs(cov[0][1] - cov[1][0]) > 1e-12 * std::max(1.0, std::abs(cov[0][1]))) {
    throw std::invalid_argument("GaussianState: covariance not symmetric");
  }
  if (!(cov[0][0] > 0.0) || !(det() > 0.0)) {
    throw std::invalid_argument("GaussianState: covariance not positive definite");
  }
  if (det() < (1.0 / 16.0) * (1.0 - 1e-9)) {
    throw std::invalid_argument("GaussianState: det(cov) = " + std::to_string(det()) +
                                " violates the uncertainty bound 1/16");
  }
}

double GaussianState::mean_excitations() const {
  return cov[0][0] + cov[1][1] + mean[0] * mean[0] + mean[1] * mean[1] - 0.5;
}

GaussianState GaussianState::vacuum() { return {}; }

GaussianState GaussianState::thermal(double nbar) { return squeezed_thermal(nbar, 0.0); }

GaussianState GaussianState::squeezed_thermal(double nbar, double s) {
  if (!(nbar >= 0.0)) throw std::invalid_argument("squeezed_thermal: nbar must be >= 0");
  const double v = (2.0 * nbar + 1.0) / 4.0;
  GaussianState g;
  g.cov = {{{v * std::exp(2.0 * s), 0.0}, {0.0, v * std::exp(-2.0 * s)}}};
  return g;
}

int Poly2::degree() const {
  int d = -1;
  for (int i = 0; i <= kMaxDegree; ++i) {
    for (int j = 0; i + j <= kMaxDegree; ++j) {
      if (c_[i][j] != 0.0) d = std::max(d, i + j);
    }
  }
  return d;
}

double Poly2::operator()(Vec2 u) const {
  double total = 0.0;
  double xi = 1.0;
  for (int i = 0; i <= kMaxDegree; ++i) {
    double yj = 1.0;
    for (int j = 0; i + j <= kMaxDegree; ++j) {
      total += c_[i][j] * xi * yj;
      yj *= u[1];
    }
    xi *= u[0];
  }
  return total;
}

Poly2 Poly2::operator+(const Poly2& o) const {
  Poly2 r;
  for (int i = 0; i <= kMaxDegree; ++i) {
    for (int j = 0; j <= kMaxDegree; ++j) r.c_[i][j] = c_[i][j] + o.c_[i][j];
  }
  return r;
}

Poly2 Poly2::operator*(double s) const {
  Poly2 r;
  for (int i = 0; i <= kMaxDegree; ++i) {
    for (int j = 0; j <= kMaxDegree; ++j) r.c_[i][j] = c_[i][j] * s;
  }
  return r;
}

Poly2 Poly2::operator*(const Poly2& o) const {
  if (degree() + o.degree() > kMaxDegree) throw std::length_error("Poly2: degree overflow");
  Poly2 r;
  for (int i = 0; i <= kMaxDegree; ++i) {
    for (int j = 0; i + j <= kMaxDegree; ++j) {
      if (c_[i][j] == 0.0) continue;
      for (int k = 0; i + k <= kMaxDegree; ++k) {
        for (int l = 0; i + j + k + l <= kMaxDegree; ++l) {
          r.c_[i + k][j + l] += c_[i][j] * o.c_[k][l];
        }
      }
    }
  }
  return r;
}

Poly2 Poly2::dx() const {
  Poly2 r;
  for (int i = 1; i <= kMaxDegree; ++i) {
    for (int j = 0; j <= kMaxDegree; ++j) r.c_[i - 1][j] = i * c_[i][j];
  }
  return r;
}

Poly2 Poly2::dy() const {
  Poly2 r;
  for (int i = 0; i <= kMaxDegree; ++i) {
    for (int j = 1; j <= kMaxDegree; ++j) r.c_[i][j - 1] = j * c_[i][j];
  }
  return r;
}

double Poly2::expectation(const Mat2& cov) const {
  // Isserlis moments by Stein's identity:
  //   E[x^a y^b] = (a-1) Sxx E[x^{a-2} y^b] + b Sxy E[x^{a-1} y^{b-1}].
  std::array<std::array<double, kMaxDegree + 1>, kMaxDegree + 1> mom{};
  for (int total = 0; total <= kMaxDegree; ++total) {
    for (int a = 0; a <= total; ++a) {
      const int b = total - a;
      double v;
      if (total == 0) {
        v = 1.0;
      } else if (total % 2 == 1) {
        v = 0.0;
      } else if (a >= 1) {
        v = (a >= 2 ? (a - 1) * cov[0][0] * mom[a - 2][b] : 0.0) +
            (b >= 1 ? b * cov[0][1] * mom[a - 1][b - 1] : 0.0);
      } else {
        v = (b - 1) * cov[1][1] * mom[0][b - 2];
      }
      mom[a][b] = v;
    }
  }
  CompensatedSum<double> acc;
  for (int i = 0; i <= kMaxDegree; ++i) {
    for (int j = 0; i + j <= kMaxDegree; ++j) acc.add(c_[i][j] * mom[i][j]);
  }
  return acc.value();
}

double GaussPolyWigner::operator()(Complex delta) const {
  const Vec2 v{delta.real(), delta.imag()};
  const Vec2 u{v[0] - gaussian.mean[0], v[1] - gaussian.mean[1]};
  return norm * poly(u) * gaussian_density(gaussian, v);
}

GaussPolyWigner subtract_excitation(const GaussianState& g) {
  g.validate();
  if (g.det() < 1e-12) throw std::invalid_argument("subtract_excitation: near-singular covariance");
  const Mat2 inv = inverse(g.cov);
  // In Wigner space b^dag rho b acts as (d* - d_d / 2)(d - d_d* / 2) W. On a
  // Gaussian this gives (|p|^2 - d_d p / 2) G with p = d - (d_d* log G) / 2,
  // an affine function p = mu + l . u of the centered coordinates.
  const Complex mu(g.mean[0], g.mean[1]);
  std::array<Complex, 2> ell;
  for (int j = 0; j < 2; ++j) {
    const double mx = (j == 0 ? 1.0 : 0.0) + 0.25 * inv[0][j];
    const double my = (j == 1 ? 1.0 : 0.0) + 0.25 * inv[1][j];
    ell[j] = Complex(mx, my);
  }
  const double c0 = 0.5 * (1.0 + (inv[0][0] + inv[1][1]) / 8.0);

  GaussPolyWigner w;
  w.gaussian = g;
  w.poly.at(0, 0) = std::norm(mu) - c0;
  w.poly.at(1, 0) = 2.0 * (std::conj(mu) * ell[0]).real();
  w.poly.at(0, 1) = 2.0 * (std::conj(mu) * ell[1]).real();
  w.poly.at(2, 0) = std::norm(ell[0]);
  w.poly.at(0, 2) = std::norm(ell[1]);
  w.poly.at(1, 1) = 2.0 * (std::conj(ell[0]) * ell[1]).real();
  const double mass = w.poly.expectation(g.cov);
  if (!(mass > 0.0)) throw std::invalid_argument("subtract_excitation: non-positive output trace");
  w.norm = 1.0 / mass;
  return w;
}

double integral_wigner(const GaussPolyWigner& w) {
  return w.norm * w.poly.expectation(w.gaussian.cov);
}

double measure_I_wigner(const GaussPolyWigner& w) {
  const Mat2 inv = inverse(w.gaussian.cov);
  const Mat2 half = scaled(w.gaussian.cov, 0.5);
  const double g2 = gaussian_square_integral(w.gaussian) * w.norm * w.norm;
  // grad W = norm G (grad A + A g), g = -S^-1 u.
  const Poly2 gx = linear(0.0, -inv[0][0], -inv[0][1]);
  const Poly2 gy = linear(0.0, -inv[1][0], -inv[1][1]);
  const Poly2 vx = w.poly.dx() + w.poly * gx;
  const Poly2 vy = w.poly.dy() + w.poly * gy;
  const double grad_sq = g2 * (vx * vx + vy * vy).expectation(half);
  const double w_sq = g2 * (w.poly * w.poly).expectation(half);
  return std::numbers::pi / 8.0 * grad_sq - std::numbers::pi / 2.0 * w_sq;
}

double mean_excitations_wigner(const GaussPolyWigner& w) {
  const auto& m = w.gaussian.mean;
  Poly2 r2;  // |m + u|^2
  r2.at(0, 0) = m[0] * m[0] + m[1] * m[1];
  r2.at(1, 0) = 2.0 * m[0];
  r2.at(0, 1) = 2.0 * m[1];
  r2.at(2, 0) = 1.0;
  r2.at(0, 2) = 1.0;
  return w.norm * (w.poly * r2).expectation(w.gaussian.cov) - 0.5;
}

DetuningSweep detuning_sweep(const std::vector<DetuningRow>& table) {
  if (table.empty()) throw std::invalid_argument("detuning_sweep: empty table");
  DetuningSweep out;
  out.rows.resize(table.size());
  parallel_for(static_cast<std::ptrdiff_t>(table.size()), [&](std::ptrdiff_t i) {
    const GaussPolyWigner w = subtract_excitation(table[i].state);
    out.rows[i] = {table[i].delta, measure_I_wigner(w), mean_excitations_wigner(w)};
  });
  out.argmax_I = 0;
  for (std::size_t i = 1; i < out.rows.size(); ++i) {
    if (out.rows[i].I > out.rows[out.argmax_I].I) out.argmax_I = i;
  }
  return out;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_cell(const std::string& cell, int line_no, const std::string& column) {
  double v = 0.0;
  const auto* first = cell.data();
  const auto* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ConfigError("detuning table line " + std::to_string(line_no) + ": column '" + column +
                      "' is not a finite number: '" + cell + "'");
  }
  return v;
}

}  // namespace

std::vector<DetuningRow> read_detuning_table(std::istream& in) {
  std::string line;
  int line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    header = split_csv(line);
    break;
  }
  if (header.empty()) throw ConfigError("detuning table: missing header line");
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) {
    static const std::vector<std::string> known{"delta", "var_x", "var_p", "mean_x", "mean_p", "cov_xp"};
    if (std::find(known.begin(), known.end(), header[i]) == known.end()) {
      throw ConfigError("detuning table line " + std::to_string(line_no) + ": unknown column '" +
                        header[i] + "'");
    }
    if (!col.emplace(header[i], i).second) {
      throw ConfigError("detuning table line " + std::to_string(line_no) + ": duplicate column '" +
                        header[i] + "'");
    }
  }
  for (const char* required : {"delta", "var_x", "var_p"}) {
    if (!col.count(required)) {
      throw ConfigError(std::string("detuning table: header lacks required column '") + required + "'");
    }
  }

  std::vector<DetuningRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw ConfigError("detuning table line " + std::to_string(line_no) + ": expected " +
                        std::to_string(header.size()) + " fields, found " +
                        std::to_string(cells.size()));
    }
    auto get = [&](const char* name, double fallback) {
      const auto it = col.find(name);
      return it == col.end() ? fallback : parse_cell(cells[it->second], line_no, name);
    };
    DetuningRow row;
    row.delta = get("delta", 0.0);
    const double cxp = get("cov_xp", 0.0);
    row.state.mean = {get("mean_x", 0.0), get("mean_p", 0.0)};
    row.state.cov = {{{get("var_x", 0.0), cxp}, {cxp, get("var_p", 0.0)}}};
    try {
      row.state.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("detuning table line " + std::to_string(line_no) + ": " + e.what());
    }
    rows.push_back(row);
  }
  if (rows.empty()) throw ConfigError("detuning table: no data rows");
  return rows;
}

std::vector<DetuningRow> read_detuning_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("detuning table: cannot open '" + path + "'");
  return read_detuning_table(in);
}

std::vector<DetuningRow> synthetic_detuning_table(double delta_min, double delta_max, int count,
                                                  double squeeze_rate, double nbar0,
                                                  double heating) {
  if (count < 2 || !(delta_max > delta_min)) {
    throw std::invalid_argument("synthetic_detuning_table: need count >= 2 and a non-empty range");
  }
  std::vector<DetuningRow> rows;
  for (int i = 0; i < count; ++i) {
    const double delta = delta_min + (delta_max - delta_min) * i / (count - 1);
    rows.push_back({delta, GaussianState::squeezed_thermal(nbar0 + heating * delta * delta,
                                                           squeeze_rate * delta)});
  }
  return rows;
}

}  // namespace macromech

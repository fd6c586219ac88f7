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

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include "macromech/errors.hpp"
#include "macromech/experiment.hpp"

namespace macromech {

namespace {

// Recursive-descent evaluator:
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := ('+' | '-') unary | atom
//   atom   := number [unit] | unit | '(' expr ')'
//   unit   := 'pi' | 'i'    (juxtaposition multiplies: 2pi, 1.75i)
class ExprParser {
 public:
  explicit ExprParser(const std::string& text) : s_(text) {}

  Complex parse() {
    const Complex v = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError("cannot parse '" + s_ + "': " + why);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Complex expr() {
    Complex v = term();
    while (true) {
      if (eat('+')) {
        v += term();
      } else if (eat('-')) {
        v -= term();
      } else {
        return v;
      }
    }
  }

  Complex term() {
    Complex v = unary();
    while (true) {
      if (eat('*')) {
        v *= unary();
      } else if (eat('/')) {
        const Complex d = unary();
        if (d == Complex(0.0, 0.0)) fail("division by zero");
        v /= d;
      } else {
        return v;
      }
    }
  }

  Complex unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return atom();
  }

  std::optional<Complex> unit() {
    skip();
    if (s_.compare(pos_, 2, "pi") == 0) {
      pos_ += 2;
      return Complex(std::numbers::pi, 0.0);
    }
    if (pos_ < s_.size() && s_[pos_] == 'i') {
      ++pos_;
      return Complex(0.0, 1.0);
    }
    return std::nullopt;
  }

  Complex atom() {
    skip();
    if (eat('(')) {
      const Complex v = expr();
      if (!eat(')')) fail("missing ')'");
      return v;
    }
    if (auto u = unit()) return *u;
    double value = 0.0;
    const char* first = s_.data() + pos_;
    const char* last = s_.data() + s_.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr == first) fail("expected a number");
    pos_ += static_cast<std::size_t>(ptr - first);
    Complex v(value, 0.0);
    while (auto u = unit()) v *= *u;
    return v;
  }

  std::string s_;
  std::size_t pos_ = 0;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto p = s.find(sep, start);
    out.push_back(trim(s.substr(start, p == std::string::npos ? std::string::npos : p - start)));
    if (p == std::string::npos) return out;
    start = p + 1;
  }
}

struct Field {
  std::string section;
  std::string key;
  std::string where() const { return "[" + section + "] " + key; }
};

}  // namespace

Complex parse_complex(const std::string& text) {
  const Complex v = ExprParser(text).parse();
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
    throw ConfigError("'" + text + "' is not finite");
  }
  return v;
}

double parse_real(const std::string& text) {
  const Complex v = parse_complex(text);
  if (v.imag() != 0.0) throw ConfigError("'" + text + "' must be real");
  return v.real();
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) {
    if (item.empty()) throw ConfigError("empty item in list '" + text + "'");
    const auto parts = split(item, ':');
    if (parts.size() == 1) {
      out.push_back(parse_real(parts[0]));
      continue;
    }
    if (parts.size() != 3) throw ConfigError("range '" + item + "' must be start:stop:step");
    const double start = parse_real(parts[0]);
    const double stop = parse_real(parts[1]);
    const double step = parse_real(parts[2]);
    if (step == 0.0 || (stop - start) * step < 0.0) {
      throw ConfigError("range '" + item + "' has a step that does not reach stop");
    }
    // Inclusive of stop up to rounding; values are start + i * step, not accumulated.
    const long count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    if (count > 10'000'000) throw ConfigError("range '" + item + "' is too long");
    for (long i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
  }
  return out;
}

std::vector<Complex> parse_complex_list(const std::string& text) {
  std::vector<Complex> out;
  for (const auto& item : split(text, ',')) {
    if (item.empty()) throw ConfigError("empty item in list '" + text + "'");
    out.push_back(parse_complex(item));
  }
  return out;
}

ExperimentConfig parse_config(std::istream& in, const std::string& default_name,
                              const std::filesystem::path& base_dir) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }

  static const std::map<std::string, std::set<std::string>> schema{
      {"experiment", {"kind", "name", "seed"}},
      {"system", {"alpha", "beta", "k", "r", "tau"}},
      {"cutoff", {"tol"}},
      {"measurement", {"type", "x", "theta", "sigma"}},
      {"sweep", {"k", "x"}},
      {"crossing", {"proximity"}},
      {"fit", {"x", "theta"}},
      {"fidelity", {"parity", "half_width", "step", "tol"}},
      {"simplified", {"mu", "lambda_re", "lambda_im"}},
      {"noise", {"kappa", "dtau", "n_traj", "n_max"}},
      {"thermal", {"nbar"}},
      {"wigner", {"re", "im"}},
      {"subtraction", {"table", "delta", "squeeze_rate", "nbar0", "heating"}},
  };

  ExperimentConfig cfg;
  for (const auto& [section, body] : tree) {
    const auto known = schema.find(section);
    if (known == schema.end()) throw ConfigError("unknown section [" + section + "]");
    if (!body.data().empty()) throw ConfigError("value outside a section: '" + section + "'");
    cfg.raw[section];  // keep empty sections such as a bare [wigner]
    for (const auto& [key, value] : body) {
      if (!known->second.count(key)) throw ConfigError("[" + section + "] unknown key '" + key + "'");
      cfg.raw[section][key] = trim(value.data());
    }
  }
  auto has = [&](const std::string& s, const std::string& k) {
    return cfg.raw.count(s) && cfg.raw.at(s).count(k);
  };
  // Runs a field parser and prefixes any failure with the field name.
  auto with = [&](const std::string& s, const std::string& k, auto&& parse) {
    const Field f{s, k};
    try {
      parse(cfg.raw.at(s).at(k));
    } catch (const ConfigError& e) {
      throw ConfigError(f.where() + ": " + e.what());
    } catch (const std::exception& e) {
      throw ConfigError(f.where() + ": " + e.what());
    }
  };
  auto real = [&](const std::string& s, const std::string& k, double& out) {
    if (has(s, k)) with(s, k, [&](const std::string& v) { out = parse_real(v); });
  };
  auto cplx = [&](const std::string& s, const std::string& k, Complex& out) {
    if (has(s, k)) with(s, k, [&](const std::string& v) { out = parse_complex(v); });
  };
  auto reals = [&](const std::string& s, const std::string& k, std::vector<double>& out) {
    if (has(s, k)) with(s, k, [&](const std::string& v) { out = parse_real_list(v); });
  };
  auto integer = [&](const std::string& s, const std::string& k, auto& out, double lo) {
    if (!has(s, k)) return;
    with(s, k, [&](const std::string& v) {
      const double d = parse_real(v);
      if (d != std::floor(d) || d < lo || d > 9.0e15) {
        throw ConfigError("expected an integer >= " + std::to_string(static_cast<long long>(lo)));
      }
      out = static_cast<std::remove_reference_t<decltype(out)>>(d);
    });
  };
  auto require = [&](const std::string& s, const std::string& k) {
    if (!has(s, k)) throw ConfigError("[" + s + "] " + k + " is required for kind '" + cfg.kind + "'");
  };

  if (!has("experiment", "kind")) throw ConfigError("[experiment] kind is required");
  cfg.kind = cfg.raw["experiment"]["kind"];
  static const std::set<std::string> kinds{"sweep-k",      "sweep-x-theta", "sweep-sigma",
                                           "wigner-grid",  "fidelity-opt",  "dissipative",
                                           "thermal",      "subtraction"};
  if (!kinds.count(cfg.kind)) throw ConfigError("[experiment] kind: unknown kind '" + cfg.kind + "'");
  cfg.name = has("experiment", "name") ? cfg.raw["experiment"]["name"] : default_name;
  if (cfg.name.empty() || cfg.name.find_first_of("/\\") != std::string::npos) {
    throw ConfigError("[experiment] name: must be a non-empty file stem");
  }
  integer("experiment", "seed", cfg.seed, 0.0);

  cplx("system", "alpha", cfg.system.alpha);
  cplx("system", "beta", cfg.system.beta);
  real("system", "k", cfg.system.k);
  real("system", "r", cfg.system.r);
  real("system", "tau", cfg.system.tau);
  cfg.thermal.beta = cfg.system.beta;
  try {
    cfg.system.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("[system] ") + e.what());
  }
  real("cutoff", "tol", cfg.cutoff_tol);
  if (!(cfg.cutoff_tol > 0.0 && cfg.cutoff_tol <= 1.0)) throw ConfigError("[cutoff] tol: must be in (0, 1]");

  if (has("measurement", "type")) cfg.measurement = cfg.raw["measurement"]["type"];
  if (cfg.measurement != "homodyne" && cfg.measurement != "heterodyne") {
    throw ConfigError("[measurement] type: expected homodyne or heterodyne");
  }
  reals("measurement", "x", cfg.x);
  reals("measurement", "theta", cfg.theta);
  if (has("measurement", "sigma")) {
    with("measurement", "sigma", [&](const std::string& v) { cfg.sigma = parse_complex_list(v); });
  }
  if (cfg.measurement == "heterodyne" && cfg.sigma.empty() && cfg.kind != "subtraction") {
    throw ConfigError("[measurement] sigma is required for heterodyne measurements");
  }

  reals("sweep", "k", cfg.sweep_k);
  reals("sweep", "x", cfg.sweep_x);
  real("crossing", "proximity", cfg.crossing_proximity);
  if (has("fit", "x")) {
    double v = 0.0;
    real("fit", "x", v);
    cfg.fit_x = v;
    require("fit", "theta");
  }
  reals("fit", "theta", cfg.fit_theta);

  if (has("fidelity", "parity")) {
    const auto& p = cfg.raw["fidelity"]["parity"];
    if (p == "even") {
      cfg.parity = Parity::kEven;
    } else if (p == "odd") {
      cfg.parity = Parity::kOdd;
    } else {
      throw ConfigError("[fidelity] parity: expected even or odd");
    }
  }
  real("fidelity", "half_width", cfg.search.half_width);
  real("fidelity", "step", cfg.search.step);
  real("fidelity", "tol", cfg.search.tol);
  if (!(cfg.search.half_width > 0.0) || !(cfg.search.step > 0.0) || !(cfg.search.tol > 0.0)) {
    throw ConfigError("[fidelity] half_width, step and tol must be positive");
  }
  reals("simplified", "mu", cfg.simplified_mu);
  reals("simplified", "lambda_re", cfg.simplified_lambda_re);
  real("simplified", "lambda_im", cfg.simplified_lambda_im);
  for (double mu : cfg.simplified_mu) {
    if (!(mu >= 0.0 && mu <= 1.0)) throw ConfigError("[simplified] mu: values must lie in [0, 1]");
  }
  if (!cfg.simplified_mu.empty() && cfg.simplified_lambda_re.empty()) {
    throw ConfigError("[simplified] lambda_re is required with mu");
  }

  reals("noise", "kappa", cfg.kappa);
  real("noise", "dtau", cfg.noise.dtau);
  integer("noise", "n_traj", cfg.noise.n_traj, 1.0);
  integer("noise", "n_max", cfg.n_max, 0.0);
  real("thermal", "nbar", cfg.thermal.nbar);
  if (!(cfg.thermal.nbar >= 0.0)) throw ConfigError("[thermal] nbar: must be >= 0");

  cfg.wigner = cfg.raw.count("wigner") > 0;
  cfg.wigner_re = parse_real_list("-4:4:0.05");
  cfg.wigner_im = cfg.wigner_re;
  reals("wigner", "re", cfg.wigner_re);
  reals("wigner", "im", cfg.wigner_im);

  if (has("subtraction", "table")) {
    std::filesystem::path p = cfg.raw["subtraction"]["table"];
    cfg.table_path = (p.is_absolute() ? p : base_dir / p).string();
  }
  reals("subtraction", "delta", cfg.synthetic_delta);
  real("subtraction", "squeeze_rate", cfg.squeeze_rate);
  real("subtraction", "nbar0", cfg.nbar0);
  real("subtraction", "heating", cfg.heating);

  // Kind-specific requirements.
  if (cfg.kind == "sweep-k" || cfg.kind == "sweep-sigma") require("sweep", "k");
  if (cfg.kind == "sweep-sigma" && cfg.measurement != "heterodyne") {
    throw ConfigError("[measurement] type: sweep-sigma needs heterodyne");
  }
  if (cfg.kind == "sweep-x-theta") {
    require("sweep", "x");
    if (cfg.measurement != "homodyne") throw ConfigError("[measurement] type: sweep-x-theta needs homodyne");
  }
  if (cfg.kind == "dissipative" || cfg.kind == "thermal") {
    for (double k : cfg.kappa) {
      if (!(k >= 0.0)) throw ConfigError("[noise] kappa: values must be >= 0");
    }
    if (!(cfg.noise.dtau > 0.0)) throw ConfigError("[noise] dtau: must be > 0");
  }
  if (cfg.kind == "subtraction" && cfg.table_path.empty() && cfg.synthetic_delta.empty()) {
    throw ConfigError("[subtraction] either table or delta is required");
  }
  if (cfg.kind == "subtraction" && !cfg.table_path.empty() && !cfg.synthetic_delta.empty()) {
    throw ConfigError("[subtraction] table and delta are mutually exclusive");
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  return parse_config(in, path.stem().string(), path.parent_path());
}

std::vector<MeasurementSetting> settings_of(const ExperimentConfig& config) {
  std::vector<MeasurementSetting> out;
  if (config.measurement == "heterodyne") {
    for (const auto& s : config.sigma) out.emplace_back(Heterodyne{s});
  } else {
    for (double x : config.x) {
      for (double th : config.theta) out.emplace_back(Homodyne{x, th});
    }
  }
  return out;
}

}  // namespace macromech

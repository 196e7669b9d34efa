#include "gwshift/materials.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gwshift/errors.hpp"
#include "json.hpp"

namespace gwshift::materials {

using nlohmann::json;

namespace {

// Fritsch-Carlson monotone cubic slopes.
std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> h(n - 1), delta(n - 1), m(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    delta[i] = (y[i + 1] - y[i]) / h[i];
  }
  if (n == 2) {
    m[0] = m[1] = delta[0];
    return m;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      m[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  auto endpoint = [](double h0, double h1, double d0, double d1) {
    double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (s * d0 <= 0.0) return 0.0;
    if (d0 * d1 < 0.0 && std::abs(s) > 3.0 * std::abs(d0)) return 3.0 * d0;
    return s;
  };
  m[0] = endpoint(h[0], h[1], delta[0], delta[1]);
  m[n - 1] = endpoint(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  return m;
}

double pchip_eval(const std::vector<double>& x, const std::vector<double>& y,
                  const std::vector<double>& m, double xq) {
  const auto it = std::upper_bound(x.begin(), x.end(), xq);
  std::size_t i = (it == x.begin()) ? 0 : std::size_t(it - x.begin()) - 1;
  if (i >= x.size() - 1) i = x.size() - 2;
  const double h = x[i + 1] - x[i];
  const double t = (xq - x[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + t;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return h00 * y[i] + h * h10 * m[i] + h01 * y[i + 1] + h * h11 * m[i + 1];
}

Complex sellmeier_n(const SellmeierModel& s, Complex lambda_um) {
  Complex n2{1.0, 0.0};
  const Complex l2 = lambda_um * lambda_um;
  for (std::size_t i = 0; i < s.b.size(); ++i) n2 += s.b[i] * l2 / (l2 - s.c_um2[i]);
  Complex n = std::sqrt(n2);
  if (n.real() < 0.0) n = -n;
  return n;
}

Complex drude_lorentz_eps(const DrudeLorentzModel& d, Complex energy_ev) {
  const Complex e = energy_ev;
  Complex eps = d.eps_inf - d.plasma_ev * d.plasma_ev / (e * (e + kI * d.damping_ev));
  for (const auto& o : d.oscillators)
    eps += o.strength_ev2 / (o.center_ev * o.center_ev - e * e - kI * e * o.width_ev);
  return eps;
}

double real_wavelength_um(Complex k) {
  if (!(k.real() > 0.0)) throw RangeError("materials: Re(k) must be positive");
  return 2.0 * kPi / k.real() * 1e6;
}

void check_range(double lambda_um, double lo, double hi) {
  if (lambda_um < lo || lambda_um > hi) {
    std::ostringstream msg;
    msg << "materials: wavelength " << lambda_um << " um outside validity range [" << lo << ", "
        << hi << "] um";
    throw RangeError(msg.str());
  }
}

}  // namespace

TabulatedModel::TabulatedModel(std::vector<double> lambda_um, std::vector<double> n,
                               std::vector<double> kappa)
    : lambda_(std::move(lambda_um)), n_(std::move(n)), k_(std::move(kappa)) {
  if (lambda_.size() < 2 || lambda_.size() != n_.size() || lambda_.size() != k_.size())
    throw ConfigError("tabulated model: need >= 2 rows of equal-length columns");
  for (std::size_t i = 0; i + 1 < lambda_.size(); ++i)
    if (!(lambda_[i] < lambda_[i + 1]))
      throw ConfigError("tabulated model: lambda samples must be strictly increasing");
  slope_n_ = pchip_slopes(lambda_, n_);
  slope_k_ = pchip_slopes(lambda_, k_);
}

Complex TabulatedModel::index_at(double lambda_um) const {
  check_range(lambda_um, lambda_.front(), lambda_.back());
  return {pchip_eval(lambda_, n_, slope_n_, lambda_um),
          pchip_eval(lambda_, k_, slope_k_, lambda_um)};
}

Complex DispersionModel::refractive_index(Complex k, EvalRule rule) const {
  return std::visit(
      [&](const auto& m) -> Complex {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ConstantModel>) {
          return m.n;
        } else if constexpr (std::is_same_v<T, SellmeierModel>) {
          if (rule == EvalRule::frozen_at_real_part) {
            const double lam = real_wavelength_um(k);
            check_range(lam, m.lambda_min_um, m.lambda_max_um);
            return sellmeier_n(m, Complex{lam, 0.0});
          }
          const Complex lam = 2.0 * kPi / k * 1e6;
          check_range(lam.real(), m.lambda_min_um, m.lambda_max_um);
          return sellmeier_n(m, lam);
        } else if constexpr (std::is_same_v<T, DrudeLorentzModel>) {
          if (rule == EvalRule::frozen_at_real_part) {
            const double lam = real_wavelength_um(k);
            check_range(lam, m.lambda_min_um, m.lambda_max_um);
            Complex n = std::sqrt(drude_lorentz_eps(m, photon_energy_ev(Complex{k.real(), 0.0})));
            if (n.real() < 0.0) n = -n;
            return n;
          }
          check_range(real_wavelength_um(k), m.lambda_min_um, m.lambda_max_um);
          Complex n = std::sqrt(drude_lorentz_eps(m, photon_energy_ev(k)));
          if (n.real() < 0.0) n = -n;
          return n;
        } else {
          static_assert(std::is_same_v<T, TabulatedModel>);
          if (rule == EvalRule::analytic_continuation)
            throw UnsupportedError("materials: tabulated data supports only frozen_at_real_part");
          return m.index_at(real_wavelength_um(k));
        }
      },
      model_);
}

Complex DispersionModel::permittivity(Complex k, EvalRule rule) const {
  const Complex n = refractive_index(k, rule);
  return n * n;
}

TabulatedModel load_csv_table(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw ConfigError("materials: cannot open " + csv_path.string());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("materials: empty CSV " + csv_path.string());
  // tolerate a UTF-8 BOM and whitespace in the header
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  std::string header = line;
  header.erase(std::remove_if(header.begin(), header.end(), ::isspace), header.end());
  if (header != "lambda_um,n,k")
    throw ConfigError("materials: expected header 'lambda_um,n,k' in " + csv_path.string());
  std::vector<double> lam, n, k;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double a, b, c;
    if (!(row >> a >> b >> c))
      throw ConfigError("materials: malformed CSV row in " + csv_path.string() + ": " + line);
    lam.push_back(a);
    n.push_back(b);
    k.push_back(c);
  }
  return TabulatedModel(std::move(lam), std::move(n), std::move(k));
}

DispersionModel load_model(const std::filesystem::path& json_path) {
  std::ifstream in(json_path);
  if (!in) throw ConfigError("materials: cannot open " + json_path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("materials: bad JSON in " + json_path.string() + ": " + e.what());
  }
  const std::string type = j.value("type", "");
  const std::string source = j.value("source", "");
  const json params = j.value("params", json::object());

  if (type == "constant") {
    ConstantModel m{Complex{params.value("n_re", 1.0), params.value("n_im", 0.0)}};
    return DispersionModel(m, source);
  }
  if (type == "sellmeier") {
    SellmeierModel m;
    m.b = params.at("b").get<std::vector<double>>();
    m.c_um2 = params.at("c_um2").get<std::vector<double>>();
    if (m.b.size() != m.c_um2.size())
      throw ConfigError("materials: sellmeier b/c length mismatch in " + json_path.string());
    if (params.contains("validity_um")) {
      m.lambda_min_um = params["validity_um"][0].get<double>();
      m.lambda_max_um = params["validity_um"][1].get<double>();
    }
    return DispersionModel(m, source);
  }
  if (type == "drude_lorentz") {
    DrudeLorentzModel m;
    m.eps_inf = params.at("eps_inf").get<double>();
    m.plasma_ev = params.at("plasma_ev").get<double>();
    m.damping_ev = params.at("damping_ev").get<double>();
    for (const auto& o : params.value("oscillators", json::array())) {
      m.oscillators.push_back({o.at("strength_ev2").get<double>(), o.at("center_ev").get<double>(),
                               o.at("width_ev").get<double>()});
    }
    if (params.contains("validity_um")) {
      m.lambda_min_um = params["validity_um"][0].get<double>();
      m.lambda_max_um = params["validity_um"][1].get<double>();
    }
    return DispersionModel(m, source);
  }
  if (type == "tabulated") {
    const std::filesystem::path csv =
        json_path.parent_path() / params.at("path").get<std::string>();
    return DispersionModel(load_csv_table(csv), source);
  }
  throw ConfigError("materials: unknown model type '" + type + "' in " + json_path.string());
}

MaterialLibrary MaterialLibrary::load(const std::filesystem::path& library_json) {
  std::ifstream in(library_json);
  if (!in) throw ConfigError("materials: cannot open " + library_json.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("materials: bad JSON in " + library_json.string() + ": " + e.what());
  }
  MaterialLibrary lib;
  for (const auto& [id, rel] : j.at("materials").items()) {
    lib.add(id, load_model(library_json.parent_path() / rel.get<std::string>()));
  }
  return lib;
}

void MaterialLibrary::add(const std::string& id, DispersionModel model) {
  if (models_.count(id)) throw ConfigError("materials: duplicate id '" + id + "'");
  models_.emplace(id, std::move(model));
}

const DispersionModel& MaterialLibrary::at(const std::string& id) const {
  const auto it = models_.find(id);
  if (it == models_.end()) throw ConfigError("materials: unknown id '" + id + "'");
  return it->second;
}

std::vector<std::string> MaterialLibrary::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : models_) out.push_back(id);
  return out;
}

}  // namespace gwshift::materials

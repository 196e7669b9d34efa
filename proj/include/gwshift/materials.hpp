#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "gwshift/common.hpp"

namespace gwshift::materials {

/// How a model is evaluated at complex wavenumber k. frozen_at_real_part
/// samples the dispersion at lambda = 2*pi/Re(k), which keeps downstream
/// scattering functions analytic in k; analytic_continuation plugs the
/// complex argument straight into the closed-form models.
enum class EvalRule { frozen_at_real_part, analytic_continuation };

struct ConstantModel {
  Complex n;
};

struct SellmeierModel {
  std::vector<double> b;       // dimensionless strengths
  std::vector<double> c_um2;   // resonance wavelengths squared, um^2
  double lambda_min_um = 0.0;
  double lambda_max_um = 1e9;
};

struct Oscillator {
  double strength_ev2 = 0.0;  // numerator in eV^2
  double center_ev = 0.0;
  double width_ev = 0.0;
};

struct DrudeLorentzModel {
  double eps_inf = 1.0;
  double plasma_ev = 0.0;   // effective Drude plasma frequency
  double damping_ev = 0.0;  // Drude damping
  std::vector<Oscillator> oscillators;
  double lambda_min_um = 0.0;
  double lambda_max_um = 1e9;
};

/// Sorted (lambda, n, kappa) samples with monotone piecewise-cubic
/// interpolation, built once at construction.
class TabulatedModel {
 public:
  TabulatedModel(std::vector<double> lambda_um, std::vector<double> n,
                 std::vector<double> kappa);

  Complex index_at(double lambda_um) const;
  double lambda_min_um() const { return lambda_.front(); }
  double lambda_max_um() const { return lambda_.back(); }
  const std::vector<double>& knots() const { return lambda_; }

 private:
  std::vector<double> lambda_, n_, k_;
  std::vector<double> slope_n_, slope_k_;  // PCHIP derivatives at the knots
};

class DispersionModel {
 public:
  using Variant = std::variant<ConstantModel, SellmeierModel, DrudeLorentzModel, TabulatedModel>;

  DispersionModel(Variant v, std::string source = {})
      : model_(std::move(v)), source_(std::move(source)) {}

  /// n(k) under the requested evaluation rule. Throws RangeError outside the
  /// model validity window and UnsupportedError for analytic continuation of
  /// tabulated data.
  Complex refractive_index(Complex k, EvalRule rule) const;

  /// eps = n^2 (relative); the principal square root of eps recovers n with
  /// Re(n) >= 0.
  Complex permittivity(Complex k, EvalRule rule) const;

  const std::string& source() const { return source_; }
  const Variant& variant() const { return model_; }

 private:
  Variant model_;
  std::string source_;
};

/// Parse a single model parameter file ({type, params, source} JSON).
DispersionModel load_model(const std::filesystem::path& json_path);

/// Parse a lambda_um,n,k CSV into a tabulated model.
TabulatedModel load_csv_table(const std::filesystem::path& csv_path);

class MaterialLibrary {
 public:
  static MaterialLibrary load(const std::filesystem::path& library_json);

  void add(const std::string& id, DispersionModel model);
  const DispersionModel& at(const std::string& id) const;
  bool contains(const std::string& id) const { return models_.count(id) > 0; }
  std::vector<std::string> ids() const;

 private:
  std::map<std::string, DispersionModel> models_;
};

}  // namespace gwshift::materials

#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "gwshift/common.hpp"
#include "gwshift/complexplane.hpp"

namespace gwshift::ws {

struct Parameter {
  std::string name;
  double value = 0.0;
  std::string unit;
  double scale = 1.0;  // step scale for derivatives when value == 0
};

/// Scalar meromorphic scattering quantity M(k; parameters) with named,
/// perturbable real parameters. The inverted flag records that the evaluator
/// represents 1/M of some underlying quantity (zero tracking); callers only
/// ever see the function actually evaluated.
class ScatteringFunction {
 public:
  using Evaluator = std::function<Complex(Complex, const std::vector<double>&)>;

  ScatteringFunction(std::string label, Evaluator ev, std::vector<Parameter> params,
                     bool inverted = false, int multipole_order = 0)
      : label_(std::move(label)),
        eval_(std::move(ev)),
        params_(std::move(params)),
        inverted_(inverted),
        multipole_(multipole_order) {}

  Complex operator()(Complex k) const { return eval_at(k, values()); }
  Complex eval_at(Complex k, const std::vector<double>& vals) const { return eval_(k, vals); }
  Complex eval_shifted(Complex k, std::size_t idx, double delta) const;

  std::vector<double> values() const;
  std::size_t param_index(std::string_view name) const;
  double param_value(std::string_view name) const { return params_[param_index(name)].value; }
  void set_param(std::string_view name, double v) { params_[param_index(name)].value = v; }
  const std::vector<Parameter>& params() const { return params_; }

  /// The function 1/M with the same parameters.
  ScatteringFunction inverse() const;

  bool inverted() const { return inverted_; }
  int multipole_order() const { return multipole_; }
  const std::string& label() const { return label_; }

 private:
  std::string label_;
  Evaluator eval_;
  std::vector<Parameter> params_;
  bool inverted_ = false;
  int multipole_ = 0;
};

struct LogDerivativeOptions {
  double rel_step = 1e-6;   // central-difference step, relative to the value
  bool richardson = true;   // one halving
};

/// L_param(k) = -i M(k)^{-1} dM/dparam. Scalar M, so the trace is the value.
Complex log_derivative(const ScatteringFunction& M, std::string_view param, Complex k,
                       const LogDerivativeOptions& opt = {});

/// L_k(k) = -i M(k)^{-1} dM/dk.
Complex log_derivative_k(const ScatteringFunction& M, Complex k,
                         const LogDerivativeOptions& opt = {});

enum class ShiftMethod { gws_residue, ratio_form, direct };

struct ShiftPrediction {
  Complex k_p;
  std::string param;
  double dalpha = 0.0;
  Complex dk;
  ShiftMethod method = ShiftMethod::gws_residue;
  Complex residue_used;       // Res_{k_p} L_param where applicable
  double error_estimate = 0;  // first-order remainder scale |dalpha * dk|, not a bound
};

struct ShiftOptions {
  double contour_radius_rel = 1e-3;  // of |k_p|
  int contour_samples = 16;
  int max_shrink = 6;                // shrink-and-retry depth on contour trouble
  bool verify_winding = true;
  LogDerivativeOptions ld;
  cplane::ResidueOptions residue;
};

/// Residue of the parameter log-derivative on a contour around k_p, with
/// automatic shrink-and-retry when the contour grazes another singularity.
Complex residue_of_log_derivative(const ScatteringFunction& M, Complex k_p,
                                  std::string_view param, const ShiftOptions& opt = {});
Complex residue_of_log_derivative_k(const ScatteringFunction& M, Complex k_p,
                                    const ShiftOptions& opt = {});

/// First-order shift of a simple pole of M under a change dalpha of param.
ShiftPrediction pole_shift(const ScatteringFunction& M, Complex k_p, std::string_view param,
                           double dalpha, ShiftMethod method = ShiftMethod::gws_residue,
                           const ShiftOptions& opt = {});

/// First-order shift of a simple zero of M: delegates to pole_shift on 1/M.
ShiftPrediction zero_shift(const ScatteringFunction& M, Complex k_z, std::string_view param,
                           double dalpha, ShiftMethod method = ShiftMethod::gws_residue,
                           const ShiftOptions& opt = {});

struct SensitivityMetric {
  Complex eta;
  double abs_re = 0.0;
  double abs_im = 0.0;
  cplane::PoleRecord::Kind kind = cplane::PoleRecord::Kind::pole;
};

/// eta_b = i Res_{k_p}(L_{n_b}) / |Im k_p|: unit-background-index first-order
/// shift divided by the resonance half width.
SensitivityMetric sensitivity_eta(const ScatteringFunction& M, const cplane::PoleRecord& rec,
                                  std::string_view background_param = "n_b",
                                  const ShiftOptions& opt = {});

/// Analytic radius sensitivity -k_p/r_c of a nondispersive sphere.
Complex radius_sensitivity_analytic(Complex k_p, double r_c);

}  // namespace gwshift::ws

#include "gwshift/wigner_smith.hpp"

#include <cmath>

#include "gwshift/errors.hpp"

namespace gwshift::ws {

namespace {

constexpr double kUnderflowMag = 1e-280;

Complex central_diff(const std::function<Complex(double)>& f, double h, bool richardson) {
  const Complex d1 = (f(h) - f(-h)) / (2.0 * h);
  if (!richardson) return d1;
  const Complex d2 = (f(0.5 * h) - f(-0.5 * h)) / h;
  return (4.0 * d2 - d1) / 3.0;
}

}  // namespace

Complex ScatteringFunction::eval_shifted(Complex k, std::size_t idx, double delta) const {
  std::vector<double> v = values();
  v[idx] += delta;
  return eval_(k, v);
}

std::vector<double> ScatteringFunction::values() const {
  std::vector<double> v;
  v.reserve(params_.size());
  for (const auto& p : params_) v.push_back(p.value);
  return v;
}

std::size_t ScatteringFunction::param_index(std::string_view name) const {
  for (std::size_t i = 0; i < params_.size(); ++i)
    if (params_[i].name == name) return i;
  throw DomainError("ScatteringFunction: unknown parameter '" + std::string(name) + "'");
}

ScatteringFunction ScatteringFunction::inverse() const {
  Evaluator ev = eval_;
  return ScatteringFunction("1/(" + label_ + ")",
                            [ev](Complex k, const std::vector<double>& v) { return 1.0 / ev(k, v); },
                            params_, !inverted_, multipole_);
}

Complex log_derivative(const ScatteringFunction& M, std::string_view param, Complex k,
                       const LogDerivativeOptions& opt) {
  const std::size_t idx = M.param_index(param);
  const auto& p = M.params()[idx];
  const double h = opt.rel_step * (p.value != 0.0 ? std::abs(p.value) : p.scale);
  const Complex value = M(k);
  if (std::abs(value) < kUnderflowMag)
    throw ZeroValue("log_derivative: |M(k)| underflow at evaluation point");
  const Complex dM = central_diff(
      [&](double d) { return M.eval_shifted(k, idx, d); }, h, opt.richardson);
  return -kI * dM / value;
}

Complex log_derivative_k(const ScatteringFunction& M, Complex k, const LogDerivativeOptions& opt) {
  const double h = opt.rel_step * std::abs(k);
  const Complex value = M(k);
  if (std::abs(value) < kUnderflowMag)
    throw ZeroValue("log_derivative_k: |M(k)| underflow at evaluation point");
  const Complex dM = central_diff([&](double d) { return M(k + d); }, h, opt.richardson);
  return -kI * dM / value;
}

namespace {

Complex residue_with_shrink(const std::function<Complex(Complex)>& integrand, Complex k_p,
                            const ShiftOptions& opt) {
  double radius = opt.contour_radius_rel * std::abs(k_p);
  for (int attempt = 0;; ++attempt) {
    try {
      return cplane::residue(integrand, {k_p, radius, opt.contour_samples}, opt.residue);
    } catch (const MultipleSingularities&) {
      if (attempt >= opt.max_shrink) throw;
    } catch (const NoConvergence&) {
      if (attempt >= opt.max_shrink) throw;
    }
    radius *= 0.5;
  }
}

void verify_simple_pole(const ScatteringFunction& M, Complex k_p, const ShiftOptions& opt) {
  if (!opt.verify_winding) return;
  double radius = opt.contour_radius_rel * std::abs(k_p);
  for (int attempt = 0;; ++attempt) {
    try {
      const int w = cplane::winding_number([&](Complex k) { return M(k); },
                                           {k_p, radius, 4 * opt.contour_samples});
      if (w != -1)
        throw SimplePoleViolation("pole_shift: winding number " + std::to_string(w) +
                                  " (expected -1 for a simple pole)");
      return;
    } catch (const IllConditioned&) {
      if (attempt >= opt.max_shrink) throw;
      radius *= 0.5;
    }
  }
}

}  // namespace

Complex residue_of_log_derivative(const ScatteringFunction& M, Complex k_p,
                                  std::string_view param, const ShiftOptions& opt) {
  const std::string pname(param);
  return residue_with_shrink(
      [&, pname](Complex k) { return log_derivative(M, pname, k, opt.ld); }, k_p, opt);
}

Complex residue_of_log_derivative_k(const ScatteringFunction& M, Complex k_p,
                                    const ShiftOptions& opt) {
  return residue_with_shrink([&](Complex k) { return log_derivative_k(M, k, opt.ld); }, k_p, opt);
}

ShiftPrediction pole_shift(const ScatteringFunction& M, Complex k_p, std::string_view param,
                           double dalpha, ShiftMethod method, const ShiftOptions& opt) {
  if (method == ShiftMethod::direct)
    throw DomainError("pole_shift: the direct method lives in the direct module");
  verify_simple_pole(M, k_p, opt);

  ShiftPrediction out;
  out.k_p = k_p;
  out.param = std::string(param);
  out.dalpha = dalpha;
  out.method = method;
  if (dalpha == 0.0) {
    out.dk = {0.0, 0.0};
    return out;
  }

  if (method == ShiftMethod::gws_residue) {
    out.residue_used = residue_of_log_derivative(M, k_p, param, opt);
    out.dk = kI * dalpha * out.residue_used;
  } else {
    // evaluate the ratio on the residue contour; averaging over the four
    // quarter-turn points cancels the O(delta) and O(delta^3) offsets of the
    // near-pole limit
    const double radius = opt.contour_radius_rel * std::abs(k_p);
    Complex acc{0.0, 0.0};
    for (int q = 0; q < 4; ++q) {
      const Complex delta = radius * std::polar(1.0, 0.25 * kPi + 0.5 * kPi * q);
      const Complex k_eval = k_p + delta;
      const Complex l_param = log_derivative(M, param, k_eval, opt.ld);
      const Complex l_k = log_derivative_k(M, k_eval, opt.ld);
      acc += -dalpha * l_param / l_k;
    }
    out.dk = acc / 4.0;
  }
  out.error_estimate = std::abs(out.dk) * std::abs(dalpha);
  return out;
}

ShiftPrediction zero_shift(const ScatteringFunction& M, Complex k_z, std::string_view param,
                           double dalpha, ShiftMethod method, const ShiftOptions& opt) {
  return pole_shift(M.inverse(), k_z, param, dalpha, method, opt);
}

SensitivityMetric sensitivity_eta(const ScatteringFunction& M, const cplane::PoleRecord& rec,
                                  std::string_view background_param, const ShiftOptions& opt) {
  if (rec.location.imag() == 0.0)
    throw RealAxisPole("sensitivity_eta: zero linewidth (Im k_p = 0)");
  const Complex res = residue_of_log_derivative(M, rec.location, background_param, opt);
  SensitivityMetric s;
  s.eta = kI * res / std::abs(rec.location.imag());
  s.abs_re = std::abs(s.eta.real());
  s.abs_im = std::abs(s.eta.imag());
  s.kind = rec.kind;
  return s;
}

Complex radius_sensitivity_analytic(Complex k_p, double r_c) { return -k_p / r_c; }

}  // namespace gwshift::ws

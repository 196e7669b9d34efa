#pragma once

#include "gwshift/materials.hpp"
#include "gwshift/mie.hpp"
#include "gwshift/wigner_smith.hpp"

namespace gwshift::resonance {

/// How material dispersion enters an analytic-in-k scattering function.
/// Closed-form models can be continued to complex k directly; tabulated data
/// is pinned to its value at a real anchor wavenumber (constant in k), with
/// the anchor refreshed between solves. freeze_all pins every material,
/// which keeps M analytic but suppresses the dispersive contribution to the
/// resonance linewidth; it is exposed for sensitivity studies.
struct DispersionPolicy {
  bool freeze_all = false;
};

/// A layered particle bound to one multipole order; builds the scalar
/// scattering functions whose zeros/poles are tracked. Parameters exposed to
/// the shift operators: n_b (additive offset on the background index), r_c
/// (core radius, m) and, for two-layer particles, d_s (shell thickness, m).
class ParticleModel {
 public:
  ParticleModel(mie::LayeredSphere sphere, const materials::MaterialLibrary& lib, int nu,
                mie::Polarization pol = mie::Polarization::electric, DispersionPolicy policy = {});

  /// Denominator g(k); poles of a_nu are the zeros of g.
  ws::ScatteringFunction denominator_function(double anchor_k) const;
  /// Numerator f(k); zeros of a_nu are the zeros of f.
  ws::ScatteringFunction numerator_function(double anchor_k) const;
  /// The coefficient a_nu = f/g itself.
  ws::ScatteringFunction coefficient_function(double anchor_k) const;
  /// 1/g: carries the pole of a_nu (the function handed to the shift ops).
  ws::ScatteringFunction pole_function(double anchor_k) const;
  /// 1/f: carries the "pole" form of a zero of a_nu.
  ws::ScatteringFunction zero_function(double anchor_k) const;

  const mie::LayeredSphere& sphere() const { return sphere_; }
  int order() const { return nu_; }

 private:
  enum class Part { numerator, denominator, coefficient };
  ws::ScatteringFunction make(double anchor_k, Part part) const;

  mie::LayeredSphere sphere_;
  const materials::MaterialLibrary* lib_;
  int nu_;
  mie::Polarization pol_;
  DispersionPolicy policy_;
};

struct LocateOptions {
  cplane::NewtonOptions newton;
  int max_anchor_refresh = 12;
  double anchor_tol_rel = 1e-9;
  bool certify = true;  // winding check + residue of the k log-derivative
  ws::ShiftOptions shift;
};

struct Located {
  cplane::PoleRecord record;
  double anchor_k = 0.0;   // converged dispersion anchor, Re(k) of the singularity
  ws::ScatteringFunction fn;  // the pole-carrying function at that anchor
};

/// Newton on g (or f) with the tabulated-dispersion anchor refreshed to the
/// converged Re(k); certification per LocateOptions.
Located locate_pole(const ParticleModel& model, Complex seed, const LocateOptions& opt = {});
Located locate_zero(const ParticleModel& model, Complex seed, const LocateOptions& opt = {});

}  // namespace gwshift::resonance

#pragma once

#include <span>
#include <string>
#include <vector>

#include "gwshift/common.hpp"
#include "gwshift/materials.hpp"

namespace gwshift::mie {

/// Concentric-layer particle: outer radii (strictly increasing, meters) with
/// material ids resolved against a MaterialLibrary, in a background medium.
struct LayeredSphere {
  std::vector<double> radii;
  std::vector<std::string> layer_materials;
  std::string background_material;

  double core_radius() const { return radii.front(); }
  double outer_radius() const { return radii.back(); }
  /// Shell thickness r_2 - r_1 for the two-layer case.
  double shell_thickness() const;
  void validate() const;

  static LayeredSphere core_shell(double core_radius, double shell_thickness,
                                  std::string core_material, std::string shell_material,
                                  std::string background_material);
  static LayeredSphere homogeneous(double radius, std::string material,
                                   std::string background_material);
};

/// Geometry with materials already evaluated to absolute complex indices.
struct ResolvedSphere {
  std::vector<double> radii;
  std::vector<Complex> layer_index;  // absolute refractive index per layer
  Complex background_index;
};

ResolvedSphere resolve(const LayeredSphere& sphere, const materials::MaterialLibrary& lib,
                       Complex k, materials::EvalRule rule);

enum class Polarization { electric, magnetic };

struct MieEvaluation {
  int order = 0;
  Complex x;            // size parameter k * n_b * r_outer
  Complex m;            // relative index (homogeneous case; 0 for multilayer)
  Complex numerator;    // f
  Complex denominator;  // g
  bool near_pole = false;

  Complex value() const { return numerator / denominator; }
};

/// Electric-multipole Mie coefficient of a homogeneous sphere,
///   f = m psi(mx) psi'(x) - psi(x) psi'(mx),
///   g = m psi(mx) xi'(x)  - xi(x)  psi'(mx),  a = f/g.
MieEvaluation mie_a(int nu, Complex x, Complex m);

/// Magnetic-multipole companion (roles of m swapped in the usual way).
MieEvaluation mie_b(int nu, Complex x, Complex m);

/// Generalized multipole coefficient of a multilayer sphere via
/// inward-to-outward amplitude recursion; reduces to mie_a / mie_b for a
/// single layer (up to a constant factor on f and g that cancels in a).
/// The returned denominator g is the pole-search function: 1/g has the
/// same pole landscape as the coefficient.
MieEvaluation coated_multipole(int nu, const ResolvedSphere& s, Complex k, Polarization pol);

/// All orders 1..nu_max at once (shares the radial-function tables).
std::vector<MieEvaluation> coated_multipoles(int nu_max, const ResolvedSphere& s, Complex k,
                                             Polarization pol);

MieEvaluation coated_a(int nu, const LayeredSphere& sphere, const materials::MaterialLibrary& lib,
                       Complex k,
                       materials::EvalRule rule = materials::EvalRule::frozen_at_real_part);

struct CrossSections {
  double ext = 0.0, sca = 0.0, abs = 0.0;  // m^2
  int nu_max = 0;
};

/// Multipole cross-section sums from the standard far-field expressions.
/// nu_max = 0 selects the order from the size parameter (Wiscombe-style
/// heuristic, clamped to [3, 60]).
CrossSections cross_sections(const LayeredSphere& sphere, const materials::MaterialLibrary& lib,
                             double k, int nu_max = 0);

int multipole_cutoff(double size_parameter);

}  // namespace gwshift::mie

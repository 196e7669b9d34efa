#include "gwshift/mie.hpp"

#include <cmath>

#include "gwshift/errors.hpp"
#include "gwshift/specfun.hpp"

namespace gwshift::mie {

using specfun::RiccatiTable;

namespace {

constexpr double kUnderflowMag = 1e-290;

// Interface weight applied to the radial derivative: tangential-field
// continuity gives (u, u'/n) for electric multipoles and (u, n u') for
// magnetic ones.
Complex slope_weight(Polarization pol, Complex n) {
  return pol == Polarization::electric ? 1.0 / n : n;
}

}  // namespace

double LayeredSphere::shell_thickness() const {
  if (radii.size() != 2) throw DomainError("shell_thickness: defined for two-layer spheres");
  return radii[1] - radii[0];
}

void LayeredSphere::validate() const {
  if (radii.empty()) throw DomainError("LayeredSphere: at least one layer required");
  if (radii.size() != layer_materials.size())
    throw DomainError("LayeredSphere: radii/material count mismatch");
  double prev = 0.0;
  for (double r : radii) {
    if (!(r > prev)) throw DomainError("LayeredSphere: radii must be positive and increasing");
    prev = r;
  }
  if (background_material.empty()) throw DomainError("LayeredSphere: background material missing");
}

LayeredSphere LayeredSphere::core_shell(double core_radius, double shell_thickness,
                                        std::string core_material, std::string shell_material,
                                        std::string background_material) {
  LayeredSphere s;
  s.radii = {core_radius, core_radius + shell_thickness};
  s.layer_materials = {std::move(core_material), std::move(shell_material)};
  s.background_material = std::move(background_material);
  s.validate();
  return s;
}

LayeredSphere LayeredSphere::homogeneous(double radius, std::string material,
                                         std::string background_material) {
  LayeredSphere s;
  s.radii = {radius};
  s.layer_materials = {std::move(material)};
  s.background_material = std::move(background_material);
  s.validate();
  return s;
}

ResolvedSphere resolve(const LayeredSphere& sphere, const materials::MaterialLibrary& lib,
                       Complex k, materials::EvalRule rule) {
  sphere.validate();
  ResolvedSphere r;
  r.radii = sphere.radii;
  r.layer_index.reserve(sphere.layer_materials.size());
  for (const auto& id : sphere.layer_materials)
    r.layer_index.push_back(lib.at(id).refractive_index(k, rule));
  r.background_index = lib.at(sphere.background_material).refractive_index(k, rule);
  return r;
}

MieEvaluation mie_a(int nu, Complex x, Complex m) {
  if (x == Complex(0.0)) throw DomainError("mie_a: x = 0");
  const auto rx = specfun::riccati(nu, x);
  const auto rm = specfun::riccati(nu, m * x);
  MieEvaluation e;
  e.order = nu;
  e.x = x;
  e.m = m;
  e.numerator = m * rm.psi * rx.psi_prime - rx.psi * rm.psi_prime;
  e.denominator = m * rm.psi * rx.xi_prime - rx.xi * rm.psi_prime;
  e.near_pole = std::abs(e.denominator) < kUnderflowMag;
  return e;
}

MieEvaluation mie_b(int nu, Complex x, Complex m) {
  if (x == Complex(0.0)) throw DomainError("mie_b: x = 0");
  const auto rx = specfun::riccati(nu, x);
  const auto rm = specfun::riccati(nu, m * x);
  MieEvaluation e;
  e.order = nu;
  e.x = x;
  e.m = m;
  e.numerator = m * rm.psi_prime * rx.psi - rm.psi * rx.psi_prime;
  e.denominator = m * rm.psi_prime * rx.xi - rm.psi * rx.xi_prime;
  e.near_pole = std::abs(e.denominator) < kUnderflowMag;
  return e;
}

std::vector<MieEvaluation> coated_multipoles(int nu_max, const ResolvedSphere& s, Complex k,
                                             Polarization pol) {
  if (k == Complex(0.0)) throw DomainError("coated_multipole: k = 0");
  const std::size_t layers = s.radii.size();
  if (layers == 0 || s.layer_index.size() != layers)
    throw DomainError("coated_multipole: inconsistent resolved sphere");

  // Radial-function tables at every needed argument.
  std::vector<RiccatiTable> inner(layers), outer_arg(layers - 1);
  for (std::size_t l = 0; l < layers; ++l)
    inner[l] = specfun::riccati_table(nu_max, k * s.layer_index[l] * s.radii[l]);
  for (std::size_t l = 0; l + 1 < layers; ++l)
    outer_arg[l] = specfun::riccati_table(nu_max, k * s.layer_index[l + 1] * s.radii[l]);
  const Complex x = k * s.background_index * s.radii.back();
  const RiccatiTable ext = specfun::riccati_table(nu_max, x);

  std::vector<MieEvaluation> out;
  out.reserve(nu_max);
  for (int nu = 1; nu <= nu_max; ++nu) {
    // u = c psi + d chi in each layer, (c, d) = (1, 0) in the core.
    Complex c{1.0, 0.0}, d{0.0, 0.0};
    for (std::size_t l = 0; l + 1 < layers; ++l) {
      const auto in = inner[l].at(nu);
      const auto nx = outer_arg[l].at(nu);
      const Complex P = c * in.psi + d * in.chi();
      const Complex Q = slope_weight(pol, s.layer_index[l]) * (c * in.psi_prime + d * in.chi_prime());
      const Complex R = Q / slope_weight(pol, s.layer_index[l + 1]);
      // solve [psi chi; psi' chi'] (c', d') = (P, R); the Wronskian
      // psi chi' - psi' chi = -1 is exact for this pair
      c = nx.chi() * R - P * nx.chi_prime();
      d = nx.psi_prime * P - nx.psi * R;
    }
    const auto in = inner[layers - 1].at(nu);
    const auto ex = ext.at(nu);
    const Complex P = c * in.psi + d * in.chi();
    const Complex Q = slope_weight(pol, s.layer_index[layers - 1]) *
                      (c * in.psi_prime + d * in.chi_prime());
    const Complex wb = slope_weight(pol, s.background_index);

    MieEvaluation e;
    e.order = nu;
    e.x = x;
    e.m = Complex{0.0, 0.0};
    e.numerator = ex.psi * Q - wb * ex.psi_prime * P;
    e.denominator = ex.xi * Q - wb * ex.xi_prime * P;
    e.near_pole = std::abs(e.denominator) < kUnderflowMag;
    out.push_back(e);
  }
  return out;
}

MieEvaluation coated_multipole(int nu, const ResolvedSphere& s, Complex k, Polarization pol) {
  return coated_multipoles(nu, s, k, pol).back();
}

MieEvaluation coated_a(int nu, const LayeredSphere& sphere, const materials::MaterialLibrary& lib,
                       Complex k, materials::EvalRule rule) {
  return coated_multipole(nu, resolve(sphere, lib, k, rule), k, Polarization::electric);
}

int multipole_cutoff(double size_parameter) {
  const double x = std::abs(size_parameter);
  const int nu = int(std::ceil(x + 4.0 * std::cbrt(x) + 2.0));
  return std::clamp(nu, 3, 60);
}

CrossSections cross_sections(const LayeredSphere& sphere, const materials::MaterialLibrary& lib,
                             double k, int nu_max) {
  if (!(k > 0.0)) throw DomainError("cross_sections: real k > 0 required");
  const ResolvedSphere rs = resolve(sphere, lib, Complex{k, 0.0},
                                    materials::EvalRule::frozen_at_real_part);
  // background absorption is negligible for the intended media; the real
  // part defines the propagating wavenumber in the host
  const double kb = k * rs.background_index.real();
  const double x = kb * rs.radii.back();
  if (nu_max <= 0) nu_max = multipole_cutoff(x);

  const auto a = coated_multipoles(nu_max, rs, Complex{k, 0.0}, Polarization::electric);
  const auto b = coated_multipoles(nu_max, rs, Complex{k, 0.0}, Polarization::magnetic);

  const double prefactor = 2.0 * kPi / (kb * kb);
  CrossSections cs;
  cs.nu_max = nu_max;
  double last_term = 0.0, total_mag = 0.0;
  for (int nu = 1; nu <= nu_max; ++nu) {
    const Complex av = a[nu - 1].value();
    const Complex bv = b[nu - 1].value();
    const double w = 2.0 * nu + 1.0;
    cs.ext += prefactor * w * (av.real() + bv.real());
    cs.sca += prefactor * w * (std::norm(av) + std::norm(bv));
    last_term = w * (std::abs(av) + std::abs(bv));
    total_mag += last_term;
  }
  if (total_mag > 0.0 && last_term > 1e-8 * total_mag && nu_max >= 60)
    throw NoConvergence("cross_sections: multipole sum not converged at nu_max");
  cs.abs = cs.ext - cs.sca;
  return cs;
}

}  // namespace gwshift::mie

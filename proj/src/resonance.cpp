#include "gwshift/resonance.hpp"

#include <cmath>

#include "gwshift/errors.hpp"

namespace gwshift::resonance {

using materials::EvalRule;

namespace {

bool supports_continuation(const materials::DispersionModel& m) {
  return !std::holds_alternative<materials::TabulatedModel>(m.variant());
}

}  // namespace

ParticleModel::ParticleModel(mie::LayeredSphere sphere, const materials::MaterialLibrary& lib,
                             int nu, mie::Polarization pol, DispersionPolicy policy)
    : sphere_(std::move(sphere)), lib_(&lib), nu_(nu), pol_(pol), policy_(policy) {
  sphere_.validate();
  if (nu_ < 1) throw DomainError("ParticleModel: multipole order must be >= 1");
}

ws::ScatteringFunction ParticleModel::make(double anchor_k, Part part) const {
  const Complex anchor{anchor_k, 0.0};

  // Pin what must be pinned at the anchor; remember which materials stay
  // analytically continued.
  const std::size_t layers = sphere_.radii.size();
  std::vector<Complex> frozen_layer(layers);
  std::vector<bool> analytic_layer(layers, false);
  for (std::size_t l = 0; l < layers; ++l) {
    const auto& model = lib_->at(sphere_.layer_materials[l]);
    if (!policy_.freeze_all && supports_continuation(model)) {
      analytic_layer[l] = true;
    } else {
      frozen_layer[l] = model.refractive_index(anchor, EvalRule::frozen_at_real_part);
    }
  }
  const auto& bg_model = lib_->at(sphere_.background_material);
  const bool analytic_bg = !policy_.freeze_all && supports_continuation(bg_model);
  const Complex frozen_bg =
      analytic_bg ? Complex{0.0, 0.0}
                  : bg_model.refractive_index(anchor, EvalRule::frozen_at_real_part);

  std::vector<ws::Parameter> params;
  params.push_back({"n_b", 0.0, "1"});
  params.push_back({"r_c", sphere_.radii.front(), "m"});
  if (layers == 2) params.push_back({"d_s", sphere_.radii[1] - sphere_.radii[0], "m"});

  const mie::LayeredSphere sphere = sphere_;
  const materials::MaterialLibrary* lib = lib_;
  const int nu = nu_;
  const auto pol = pol_;
  auto eval = [sphere, lib, frozen_layer, analytic_layer, analytic_bg, frozen_bg, nu, pol,
               part](Complex k, const std::vector<double>& v) -> Complex {
    mie::ResolvedSphere rs;
    rs.radii = sphere.radii;
    rs.radii[0] = v[1];
    if (rs.radii.size() == 2) rs.radii[1] = v[1] + v[2];
    rs.layer_index.resize(rs.radii.size());
    for (std::size_t l = 0; l < rs.radii.size(); ++l) {
      rs.layer_index[l] = analytic_layer[l]
                              ? lib->at(sphere.layer_materials[l])
                                    .refractive_index(k, EvalRule::analytic_continuation)
                              : frozen_layer[l];
    }
    rs.background_index = analytic_bg ? lib->at(sphere.background_material)
                                            .refractive_index(k, EvalRule::analytic_continuation)
                                      : frozen_bg;
    rs.background_index += v[0];
    const auto e = mie::coated_multipole(nu, rs, k, pol);
    switch (part) {
      case Part::numerator:
        return e.numerator;
      case Part::denominator:
        return e.denominator;
      case Part::coefficient:
        return e.value();
    }
    return e.value();
  };

  const char* tag = part == Part::numerator ? "f" : part == Part::denominator ? "g" : "a";
  const std::string label = std::string(tag) + "_" + std::to_string(nu_);
  return ws::ScatteringFunction(label, std::move(eval), std::move(params), false, nu_);
}

ws::ScatteringFunction ParticleModel::denominator_function(double anchor_k) const {
  return make(anchor_k, Part::denominator);
}
ws::ScatteringFunction ParticleModel::numerator_function(double anchor_k) const {
  return make(anchor_k, Part::numerator);
}
ws::ScatteringFunction ParticleModel::coefficient_function(double anchor_k) const {
  return make(anchor_k, Part::coefficient);
}
ws::ScatteringFunction ParticleModel::pole_function(double anchor_k) const {
  return denominator_function(anchor_k).inverse();
}
ws::ScatteringFunction ParticleModel::zero_function(double anchor_k) const {
  return numerator_function(anchor_k).inverse();
}

namespace {

Located locate_impl(const ParticleModel& model, Complex seed, const LocateOptions& opt,
                    cplane::PoleRecord::Kind kind) {
  double anchor = seed.real();
  Complex root = seed;
  cplane::NewtonResult nres;
  for (int refresh = 0;; ++refresh) {
    const ws::ScatteringFunction target = (kind == cplane::PoleRecord::Kind::pole)
                                              ? model.denominator_function(anchor)
                                              : model.numerator_function(anchor);
    nres = cplane::newton_root_full([&](Complex k) { return target(k); }, root, opt.newton);
    root = nres.root;
    if (!(root.real() > 0.0))
      throw DivergedOutOfDomain("locate: singularity left the physical half plane");
    if (std::abs(root.real() - anchor) <= opt.anchor_tol_rel * std::abs(root.real())) break;
    if (refresh >= opt.max_anchor_refresh)
      throw NoConvergence("locate: dispersion anchor refresh did not settle");
    anchor = root.real();
  }

  Located out{{}, anchor,
              (kind == cplane::PoleRecord::Kind::pole) ? model.pole_function(anchor)
                                                       : model.zero_function(anchor)};
  out.record.location = root;
  out.record.kind = kind;
  out.record.q_factor = cplane::PoleRecord::q_of(root);
  out.record.iterations = nres.iterations;
  out.record.final_step = nres.final_step;
  out.record.passive_sign_ok = (kind != cplane::PoleRecord::Kind::pole) || (root.imag() < 0.0);

  if (opt.certify) {
    // the pole-carrying view must wind -1 and its k log-derivative must have
    // residue i at a simple singularity
    ws::ShiftOptions so = opt.shift;
    double radius = so.contour_radius_rel * std::abs(root);
    for (int attempt = 0;; ++attempt) {
      try {
        const int w = cplane::winding_number([&](Complex k) { return out.fn(k); },
                                             {root, radius, 4 * so.contour_samples});
        if (w != -1)
          throw SimplePoleViolation("locate: winding " + std::to_string(w) +
                                    " around located singularity (expected -1)");
        break;
      } catch (const IllConditioned&) {
        if (attempt >= so.max_shrink) throw;
        radius *= 0.5;
      }
    }
    so.contour_radius_rel = radius / std::abs(root);
    out.record.residue_of_trace = ws::residue_of_log_derivative_k(out.fn, root, so);
  }
  return out;
}

}  // namespace

Located locate_pole(const ParticleModel& model, Complex seed, const LocateOptions& opt) {
  return locate_impl(model, seed, opt, cplane::PoleRecord::Kind::pole);
}

Located locate_zero(const ParticleModel& model, Complex seed, const LocateOptions& opt) {
  return locate_impl(model, seed, opt, cplane::PoleRecord::Kind::zero);
}

}  // namespace gwshift::resonance

#include <cmath>

#include "doctest.h"
#include "gwshift/direct.hpp"
#include "gwshift/errors.hpp"
#include "gwshift/resonance.hpp"
#include "gwshift/wigner_smith.hpp"

using gwshift::Complex;
using gwshift::kI;
namespace ws = gwshift::ws;
namespace cp = gwshift::cplane;
namespace res = gwshift::resonance;
namespace mie = gwshift::mie;
namespace mat = gwshift::materials;

namespace {

const std::filesystem::path kDataDir = std::filesystem::path(GWSHIFT_SOURCE_DIR) / "data/materials";

// nondispersive m = 3.5 sphere in vacuum: first dipole pole in x = k r
const Complex kPoleX{1.2094368765, -0.1214042093};

const mat::MaterialLibrary& constant_library() {
  static mat::MaterialLibrary lib = [] {
    mat::MaterialLibrary l;
    l.add("hi", mat::DispersionModel(mat::ConstantModel{{3.5, 0.0}}));
    l.add("vacuum", mat::DispersionModel(mat::ConstantModel{{1.0, 0.0}}));
    return l;
  }();
  return lib;
}

const mat::MaterialLibrary& real_library() {
  static mat::MaterialLibrary lib = mat::MaterialLibrary::load(kDataDir / "library.json");
  return lib;
}

ws::ScatteringFunction exp_function() {
  // M(k; alpha) = exp(i alpha k), L_alpha = k exactly
  return ws::ScatteringFunction(
      "exp", [](Complex k, const std::vector<double>& v) { return std::exp(kI * v[0] * k); },
      {{"alpha", 2.0, "1"}});
}

// rational family M(k; alpha) = (k - z(alpha)) / (k - p), z = z0 + c alpha
struct Rational {
  Complex z0{1.0, -0.2};
  Complex p{2.5, -0.6};
  double c = 0.35;
  ws::ScatteringFunction fn() const {
    const Complex z0c = z0, pc = p;
    const double cc = c;
    return ws::ScatteringFunction(
        "rational",
        [z0c, pc, cc](Complex k, const std::vector<double>& v) {
          return (k - (z0c + cc * v[0])) / (k - pc);
        },
        {{"alpha", 0.0, "1"}});
  }
};

double rel_diff(Complex a, Complex b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace

TEST_CASE("log derivative of an exponential is exact") {
  const auto M = exp_function();
  for (Complex k : {Complex{0.8, 0.0}, Complex{1.3, -0.4}}) {
    CHECK(rel_diff(ws::log_derivative(M, "alpha", k), k) < 1e-9);
  }
}

TEST_CASE("inverting M negates the log derivative") {
  const auto M = Rational{}.fn();
  const auto Minv = M.inverse();
  const Complex k{1.7, -0.1};
  const Complex l = ws::log_derivative(M, "alpha", k);
  const Complex linv = ws::log_derivative(Minv, "alpha", k);
  CHECK(rel_diff(l, -linv) < 1e-9);
  CHECK(M.inverted() == false);
  CHECK(Minv.inverted() == true);
}

TEST_CASE("residues of L_alpha ignore analytic nonvanishing prefactors") {
  // f = 1/(k - p(alpha)); h analytic and nonvanishing near p
  const Complex p0{1.0, -0.5};
  const double c = 0.4;
  auto make = [&](bool with_prefactor) {
    return ws::ScatteringFunction(
        "synthetic",
        [p0, c, with_prefactor](Complex k, const std::vector<double>& v) {
          const Complex pole = p0 + c * v[0];
          Complex val = 1.0 / (k - pole);
          if (with_prefactor) val *= std::exp(0.3 * k) * (k + 4.0);
          return val;
        },
        {{"alpha", 0.0, "1"}});
  };
  const Complex r_plain = ws::residue_of_log_derivative(make(false), p0, "alpha");
  const Complex r_pref = ws::residue_of_log_derivative(make(true), p0, "alpha");
  CHECK(rel_diff(r_plain, r_pref) < 1e-7);
}

TEST_CASE("pole_shift on a constructed rational family") {
  // M = 1/(k - p(alpha)) has a pole moving at dp/dalpha = c
  const Complex p0{1.0, -0.5};
  const double c = 0.4;
  const auto M = ws::ScatteringFunction(
      "mover",
      [p0, c](Complex k, const std::vector<double>& v) { return 1.0 / (k - (p0 + c * v[0])); },
      {{"alpha", 0.0, "1"}});

  SUBCASE("dalpha = 0 gives zero shift") {
    const auto s = ws::pole_shift(M, p0, "alpha", 0.0);
    CHECK(s.dk == Complex{0.0, 0.0});
  }
  SUBCASE("gws residue reproduces the exact linear motion") {
    const auto s = ws::pole_shift(M, p0, "alpha", 1e-3, ws::ShiftMethod::gws_residue);
    CHECK(rel_diff(s.dk, Complex{c * 1e-3, 0.0}) < 1e-8);
    CHECK(s.dk == kI * s.dalpha * s.residue_used);  // exact by construction
  }
  SUBCASE("ratio form agrees with the residue form") {
    const auto s1 = ws::pole_shift(M, p0, "alpha", 1e-3, ws::ShiftMethod::gws_residue);
    const auto s2 = ws::pole_shift(M, p0, "alpha", 1e-3, ws::ShiftMethod::ratio_form);
    CHECK(rel_diff(s1.dk, s2.dk) < 1e-6);
  }
}

TEST_CASE("zero_shift on the constructed rational function") {
  const Rational r;
  const auto M = r.fn();
  const auto s = ws::zero_shift(M, r.z0, "alpha", 2e-3);
  CHECK(rel_diff(s.dk, Complex{r.c * 2e-3, 0.0}) < 1e-8);
}

TEST_CASE("coincident zero and pole is rejected") {
  const auto M = ws::ScatteringFunction(
      "cancel",
      [](Complex k, const std::vector<double>&) {
        const Complex w{1.0, -0.3};
        return (k - w) / (k - w) + 0.0 * k;  // identically 1: no singularity anywhere
      },
      {{"alpha", 0.0, "1"}});
  CHECK_THROWS_AS(ws::zero_shift(M, Complex{1.0, -0.3}, "alpha", 1e-3),
                  gwshift::SimplePoleViolation);
}

TEST_CASE("radius sensitivity closed form") {
  const Complex kp{1e7, -0.1e7};
  CHECK(ws::radius_sensitivity_analytic(kp, 100e-9) == -kp / 100e-9);
  const Complex s1 = ws::radius_sensitivity_analytic(kp, 100e-9);
  const Complex s2 = ws::radius_sensitivity_analytic(kp, 200e-9);
  CHECK(rel_diff(s1, 2.0 * s2) < 1e-14);
}

TEST_CASE("nondispersive sphere: locate, certify, and the -k_p/r_c law") {
  const double r_c = 100e-9;
  const auto sphere = mie::LayeredSphere::homogeneous(r_c, "hi", "vacuum");
  res::ParticleModel model(sphere, constant_library(), 1);
  const Complex seed = kPoleX / r_c;
  const auto loc = res::locate_pole(model, seed);

  CHECK(rel_diff(loc.record.location, kPoleX / r_c) < 1e-8);
  CHECK(loc.record.passive_sign_ok);
  CHECK(loc.record.q_factor == doctest::Approx(1.2094368765 / (2 * 0.1214042093)).epsilon(1e-6));
  // residue identity Res tr(L_k) = i
  CHECK(std::abs(loc.record.residue_of_trace - kI) < 1e-6);

  const Complex analytic = ws::radius_sensitivity_analytic(loc.record.location, r_c);
  const auto gws = ws::pole_shift(loc.fn, loc.record.location, "r_c", 1e-16,
                                  ws::ShiftMethod::gws_residue);
  CHECK(rel_diff(gws.dk / 1e-16, analytic) < 1e-6);
  const auto ratio = ws::pole_shift(loc.fn, loc.record.location, "r_c", 1e-16,
                                    ws::ShiftMethod::ratio_form);
  CHECK(rel_diff(ratio.dk / 1e-16, analytic) < 1e-6);

  // chain-rule consistency near the pole: L_{r_c} / L_k = k / r_c
  const Complex k_eval = loc.record.location * (1.0 + 1e-4);
  const Complex lr = ws::log_derivative(loc.fn, "r_c", k_eval);
  const Complex lk = ws::log_derivative_k(loc.fn, k_eval);
  CHECK(rel_diff(lr / lk, k_eval / r_c) < 1e-5);
}

TEST_CASE("nondispersive sphere: k_p r_c stays on the hyperbola under tracking") {
  const double r0 = 100e-9;
  res::ParticleModel model(mie::LayeredSphere::homogeneous(r0, "hi", "vacuum"),
                           constant_library(), 1);
  const auto family = [&](double rc) {
    auto g = model.denominator_function(1e7);
    g.set_param("r_c", rc);
    return cp::FuncC([g](Complex k) { return g(k); });
  };
  std::vector<double> path;
  for (int i = 0; i <= 20; ++i) path.push_back(r0 * (0.8 + 0.45 * i / 20.0));
  cp::TrackOptions topt;
  topt.newton.tol = 1e-12;
  const auto recs = cp::track(family, path, kPoleX / path.front(), topt);
  REQUIRE(recs.size() == path.size());
  const Complex C0 = recs.front().location * path.front();
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(rel_diff(recs[i].location * path[i], C0) < 1e-8);
  }
  // doubling the radius halves the pole wavenumber
  std::vector<double> doubling;
  for (int i = 0; i <= 16; ++i) doubling.push_back(r0 * (1.0 + i / 16.0));
  const auto far = cp::track(family, doubling, kPoleX / r0, topt);
  CHECK(rel_diff(far.back().location, 0.5 * kPoleX / r0) < 1e-7);
}

TEST_CASE("LSPR pole of the silica-gold reference particle") {
  const auto sphere = mie::LayeredSphere::core_shell(60e-9, 10e-9, "silica", "gold", "water");
  res::ParticleModel model(sphere, real_library(), 1);
  const auto loc = res::locate_pole(model, {0.71e7, -0.07e7});

  CHECK(loc.record.location.real() == doctest::Approx(0.71e7).epsilon(0.04 / 0.71));
  CHECK(loc.record.location.imag() == doctest::Approx(-0.07e7).epsilon(0.015 / 0.07));
  CHECK(loc.record.q_factor == doctest::Approx(4.8).epsilon(0.7 / 4.8));
  CHECK(std::abs(loc.record.residue_of_trace - kI) < 1e-6);

  // freezing the dispersion at a fixed anchor suppresses the linewidth: the
  // pole of the frozen family is several times broader (sensitivity study)
  res::DispersionPolicy frozen{true};
  res::ParticleModel frozen_model(sphere, real_library(), 1, mie::Polarization::electric, frozen);
  const auto g_frozen = frozen_model.denominator_function(0.71e7);
  const Complex frozen_pole =
      cp::newton_root([&](Complex k) { return g_frozen(k); }, {0.71e7, -0.07e7});
  CHECK(cp::PoleRecord::q_of(frozen_pole) < 2.0);
}

TEST_CASE("zero of the reference particle near 1.2e7") {
  const auto sphere = mie::LayeredSphere::core_shell(60e-9, 10e-9, "silica", "gold", "water");
  res::ParticleModel model(sphere, real_library(), 1);
  const auto loc = res::locate_zero(model, {1.2e7, -0.1e7});
  CHECK(loc.record.kind == cp::PoleRecord::Kind::zero);
  CHECK(loc.record.location.real() == doctest::Approx(1.23e7).epsilon(0.05));
  CHECK(std::abs(loc.record.residue_of_trace - kI) < 1e-6);
}

TEST_CASE("sensitivity metric eta_b") {
  const auto sphere = mie::LayeredSphere::core_shell(60e-9, 10e-9, "silica", "gold", "water");
  res::ParticleModel model(sphere, real_library(), 1);
  const auto loc = res::locate_pole(model, {0.71e7, -0.07e7});
  const auto eta = ws::sensitivity_eta(loc.fn, loc.record);
  CHECK(eta.kind == cp::PoleRecord::Kind::pole);
  CHECK(std::isfinite(eta.abs_re));
  CHECK(eta.abs_re > 0.1);
  CHECK(eta.abs_re < 100.0);

  cp::PoleRecord real_axis = loc.record;
  real_axis.location = Complex{1e7, 0.0};
  CHECK_THROWS_AS(ws::sensitivity_eta(loc.fn, real_axis), gwshift::RealAxisPole);
}

TEST_CASE("direct re-solve: zero perturbation and the radius law") {
  const double r_c = 100e-9;
  res::ParticleModel model(mie::LayeredSphere::homogeneous(r_c, "hi", "vacuum"),
                           constant_library(), 1);
  const auto loc = res::locate_pole(model, kPoleX / r_c);

  const auto zero = gwshift::direct::pole_shift_direct(loc.fn, loc.record.location, "r_c", 0.0);
  CHECK(zero.dk == Complex{0.0, 0.0});

  const double dr = 1e-6 * r_c;
  const auto shifted = gwshift::direct::pole_shift_direct(loc.fn, loc.record.location, "r_c", dr);
  const Complex expected = -loc.record.location * dr / r_c;
  CHECK(rel_diff(shifted.dk, expected) < 2e-6);
}

TEST_CASE("direct substep splitting is path independent") {
  const double r_c = 100e-9;
  res::ParticleModel model(mie::LayeredSphere::homogeneous(r_c, "hi", "vacuum"),
                           constant_library(), 1);
  const auto loc = res::locate_pole(model, kPoleX / r_c);
  const double dr = 0.05 * r_c;

  gwshift::direct::DirectOptions plain;
  const auto one = gwshift::direct::pole_shift_direct(loc.fn, loc.record.location, "r_c", dr, plain);
  gwshift::direct::DirectOptions forced = plain;
  forced.nearest_singularity_dist = 0.1 * std::abs(one.dk);  // forces subdivision
  const auto split = gwshift::direct::pole_shift_direct(loc.fn, loc.record.location, "r_c", dr, forced);
  CHECK(split.substeps > one.substeps);
  CHECK(rel_diff(one.dk, split.dk) < 1e-9);
}

TEST_CASE("gws vs direct on the coated sphere background index") {
  const auto sphere = mie::LayeredSphere::core_shell(60e-9, 10e-9, "silica", "gold", "water");
  res::ParticleModel model(sphere, real_library(), 1);
  const auto loc = res::locate_pole(model, {0.71e7, -0.07e7});

  const double da = 1e-4;
  const auto gws = ws::pole_shift(loc.fn, loc.record.location, "n_b", da);
  const auto dir = gwshift::direct::pole_shift_direct(loc.fn, loc.record.location, "n_b", da);
  CHECK(rel_diff(gws.dk, dir.dk) < 1e-3);

  // O(dalpha^2) convergence: halving dalpha shrinks the discrepancy ~4x
  double prev_err = 0.0;
  int idx = 0;
  for (double d : {1e-3, 5e-4, 2.5e-4}) {
    const auto g = ws::pole_shift(loc.fn, loc.record.location, "n_b", d);
    const auto t = gwshift::direct::pole_shift_direct(loc.fn, loc.record.location, "n_b", d);
    const double err = std::abs(g.dk - t.dk);
    if (idx > 0) {
      const double ratio = prev_err / err;
      CHECK(ratio > 3.2);
      CHECK(ratio < 4.8);
    }
    prev_err = err;
    ++idx;
  }
}

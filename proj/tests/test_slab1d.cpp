#include <cmath>
#include <random>

#include "doctest.h"
#include "gwshift/errors.hpp"
#include "gwshift/slab1d.hpp"

using gwshift::Complex;
using gwshift::kI;
using gwshift::kPi;
using gwshift::kSpeedOfLight;
namespace sb = gwshift::slab1d;

namespace {

sb::Slab1D random_slab(std::mt19937_64& rng, bool lossy) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  sb::Slab1D s;
  const int n = 1 + int(u(rng) * 3);
  for (int l = 0; l < n; ++l) {
    const double im = lossy ? 0.8 * u(rng) : 0.0;
    s.layers.push_back({(0.1 + 1.2 * u(rng)) * 1e-6, Complex{1.0 + 8.0 * u(rng), im}});
  }
  return s;
}

Complex random_omega(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double re = (1.0 + 3.0 * u(rng)) * 1e15;
  return {re, (2.0 * u(rng) - 1.0) * 0.2 * re};
}

// single dielectric layer, third Fabry-Perot mode: Q ~ 4.3
const sb::Slab1D kLowQ{{{0.25e-6, {4.0, 0.0}}}, {1.0, 0.0}};
const Complex kLowQPoleSeed{5.65095e15, -6.58711e14};

sb::Slab1D make_cavity() {
  sb::Slab1D s;
  const double lam0 = 1.0e-6;
  const Complex eH{3.5 * 3.5, 0.0}, eL{1.5 * 1.5, 0.0};
  const double dH = lam0 / (4.0 * 3.5), dL = lam0 / (4.0 * 1.5);
  for (int i = 0; i < 4; ++i) {
    s.layers.push_back({dH, eH});
    s.layers.push_back({dL, eL});
  }
  s.layers.push_back({lam0 / (2.0 * 1.5), eL});
  for (int i = 0; i < 4; ++i) {
    s.layers.push_back({dL, eL});
    s.layers.push_back({dH, eH});
  }
  return s;
}

}  // namespace

TEST_CASE("slab validation") {
  sb::Slab1D bad;
  bad.layers.push_back({-1e-7, {2.0, 0.0}});
  CHECK_THROWS_AS(bad.validate(), gwshift::DomainError);
  sb::Slab1D lossy_bg;
  lossy_bg.layers.push_back({1e-7, {2.0, 0.0}});
  lossy_bg.eps_background = {1.0, 0.1};
  CHECK_THROWS_AS(lossy_bg.validate(), gwshift::DomainError);
}

TEST_CASE("zero-thickness slab: unit transmission and exact identities") {
  const sb::Slab1D empty;
  const auto S = sb::slab_smatrix(empty, {2e15, -0.1e15});
  CHECK(std::abs(S(0, 0)) == 0.0);
  CHECK(std::abs(S(1, 1)) == 0.0);
  CHECK(std::abs(S(0, 1) - 1.0) < 1e-15);
  CHECK(std::abs(S(1, 0) - 1.0) < 1e-15);
  const auto C = S.transpose() * S;
  CHECK((C - sb::Mat2::identity()).norm() < 1e-15);
}

TEST_CASE("index-matched layer is pure transmission phase") {
  sb::Slab1D s;
  s.layers.push_back({0.7e-6, {1.0, 0.0}});
  const Complex w{2.3e15, 0.0};
  const auto S = sb::slab_smatrix(s, w);
  CHECK(std::abs(S(0, 0)) < 1e-14);
  CHECK(std::abs(std::abs(S(1, 0)) - 1.0) < 1e-13);
  const Complex expected = std::exp(kI * (w / kSpeedOfLight) * 0.7e-6);
  CHECK(std::abs(S(1, 0) - expected) < 1e-12);

  const auto f = sb::internal_fields(s, w, 0);
  for (const auto& piece : f.pieces) CHECK(std::abs(piece.bwd) < 1e-12 * std::abs(piece.fwd));
}

TEST_CASE("lossless slab at real omega is unitary; reciprocity holds everywhere") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 25; ++t) {
    const auto s = random_slab(rng, false);
    const auto S = sb::slab_smatrix(s, {2.4e15, 0.0});
    const auto G = S.adjoint() * S;
    CHECK((G - sb::Mat2::identity()).norm() < 1e-12);
  }
  for (int t = 0; t < 25; ++t) {
    const auto s = random_slab(rng, true);
    const Complex w = random_omega(rng);
    const auto S = sb::slab_smatrix(s, w);
    CHECK(std::abs(S(0, 1) - S(1, 0)) <= 1e-12 * S.norm());
  }
}

TEST_CASE("internal fields: continuity and the bilinear flux balance") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 20; ++t) {
    const auto s = random_slab(rng, t % 2 == 1);
    const Complex w = random_omega(rng);
    for (int port = 0; port < 2; ++port) {
      const auto f = sb::internal_fields(s, w, port);
      CHECK(f.continuity_residual(s) < 1e-12);
    }
    CHECK(sb::poynting_residual(s, w) < 1e-10);
  }
}

TEST_CASE("unconjugated identities hold at complex omega") {
  std::mt19937_64 rng(37);
  for (int t = 0; t < 30; ++t) {
    const auto s = random_slab(rng, t % 2 == 1);
    const Complex w = random_omega(rng);
    CHECK(sb::verify_identity(s, w, sb::IdentityTag::unconj_gram).residual < 1e-8);
    CHECK(sb::verify_identity(s, w, sb::IdentityTag::unconj_ws).residual < 1e-6);
  }
}

TEST_CASE("derivative identity for permittivity-scale and thickness parameters") {
  sb::Slab1D s;
  s.layers = {{0.4e-6, {4.0, 0.1}}, {0.3e-6, {2.25, 0.0}}, {0.5e-6, {7.0, 0.4}}};
  const Complex w{2.2e15, -0.15e15};
  for (std::size_t l = 0; l < s.layers.size(); ++l) {
    CHECK(sb::verify_identity(s, w, sb::IdentityTag::unconj_ws,
                              {sb::SlabParam::layer_eps_scale, l})
              .residual < 1e-6);
    CHECK(sb::verify_identity(s, w, sb::IdentityTag::unconj_ws,
                              {sb::SlabParam::layer_thickness, l})
              .residual < 1e-6);
  }
}

TEST_CASE("conjugated identities: exact for lossless, break with absorption") {
  sb::Slab1D lossless;
  lossless.layers = {{0.5e-6, {6.25, 0.0}}, {0.35e-6, {2.0, 0.0}}};
  sb::Slab1D lossy = lossless;
  lossy.layers[0].eps_rel += Complex{0.0, 0.35};
  lossy.layers[1].eps_rel += Complex{0.0, 0.10};
  const Complex w_real{2.0e15, 0.0};

  CHECK(sb::verify_identity(lossless, w_real, sb::IdentityTag::conj_gram).residual < 1e-12);
  CHECK(sb::verify_identity(lossless, w_real, sb::IdentityTag::conj_ws).residual < 1e-8);

  // with absorption the conjugated forms fail already on the real axis while
  // the unconjugated pair stays exact
  CHECK(sb::verify_identity(lossy, w_real, sb::IdentityTag::conj_gram).residual > 1e-3);
  CHECK(sb::verify_identity(lossy, w_real, sb::IdentityTag::conj_ws).residual > 1e-3);
  CHECK(sb::verify_identity(lossy, w_real, sb::IdentityTag::unconj_gram).residual < 1e-10);
  CHECK(sb::verify_identity(lossy, w_real, sb::IdentityTag::unconj_ws).residual < 1e-6);
}

TEST_CASE("low-Q Fabry-Perot pole and the shift-method ordering") {
  const Complex wp = sb::locate_pole(kLowQ, kLowQPoleSeed);
  const double Q = wp.real() / (2.0 * std::abs(wp.imag()));
  CHECK(Q > 3.0);
  CHECK(Q < 5.0);

  const auto zero = sb::perturb_compare(kLowQ, wp, 0, 0.0);
  CHECK(zero.dw_conjugated == Complex{0.0, 0.0});
  CHECK(zero.dw_unconjugated == Complex{0.0, 0.0});
  CHECK(zero.dw_gws == Complex{0.0, 0.0});
  CHECK(zero.dw_direct == Complex{0.0, 0.0});

  const auto pc = sb::perturb_compare(kLowQ, wp, 0, 1e-3);
  const double e_conj = std::abs(pc.dw_conjugated - pc.dw_direct);
  const double e_unconj = std::abs(pc.dw_unconjugated - pc.dw_direct);
  const double e_gws = std::abs(pc.dw_gws - pc.dw_direct);
  CHECK(e_conj > e_unconj);
  CHECK(e_conj > 10.0 * e_unconj);  // at Q ~ 4 the conjugated form is far off
  CHECK(e_gws < 1e-3 * std::abs(pc.dw_direct));

  // unconjugated first-order error shrinks quadratically with the step
  const auto pc2 = sb::perturb_compare(kLowQ, wp, 0, 5e-4);
  const double ratio = e_unconj / std::abs(pc2.dw_unconjugated - pc2.dw_direct);
  CHECK(ratio > 3.2);
  CHECK(ratio < 4.8);
}

TEST_CASE("high-Q cavity: all four methods agree to better than 1%") {
  const auto cav = make_cavity();
  const double w0 = 2.0 * kPi * kSpeedOfLight / 1.0e-6;
  const Complex wp = sb::locate_pole(cav, {w0, -1e-4 * w0});
  CHECK(wp.real() / (2.0 * std::abs(wp.imag())) > 1e3);

  const auto pc = sb::perturb_compare(cav, wp, 8, 1e-3);
  const double scale = std::abs(pc.dw_direct);
  CHECK(std::abs(pc.dw_conjugated - pc.dw_direct) < 0.01 * scale);
  CHECK(std::abs(pc.dw_unconjugated - pc.dw_direct) < 0.01 * scale);
  CHECK(std::abs(pc.dw_gws - pc.dw_direct) < 0.01 * scale);
}

TEST_CASE("mode field satisfies the outgoing-wave problem") {
  const Complex wp = sb::locate_pole(kLowQ, kLowQPoleSeed);
  const auto mode = sb::mode_field(kLowQ, wp);
  CHECK(mode.continuity_residual(kLowQ) < 1e-9);
  // outgoing only: no incident amplitude
  CHECK(mode.incident_amplitude == Complex{0.0, 0.0});
  CHECK(std::abs(mode.outgoing_left) > 0.0);
}

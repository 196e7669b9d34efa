#include <cmath>
#include <vector>

#include "doctest.h"
#include "gwshift/errors.hpp"
#include "gwshift/specfun.hpp"

using gwshift::Complex;
using gwshift::kI;
using gwshift::kPi;
namespace sf = gwshift::specfun;

namespace {

// Independent oracle for psi_nu, accurate at small |z| where the sin/cos
// closed forms cancel catastrophically: psi_nu = z * j_nu with the Taylor
// series j_nu(z) = sum_m (-z^2/2)^m z^nu / (m! (2nu+2m+1)!!).
Complex psi_series(int nu, Complex z) {
  double dfact = 1.0;  // (2nu+1)!!
  for (int k = 2 * nu + 1; k > 1; k -= 2) dfact *= k;
  Complex term = std::pow(z, nu) / dfact;
  Complex sum = term;
  for (int m = 1; m < 80; ++m) {
    term *= -(z * z) / (2.0 * m * (2.0 * (nu + m) + 1.0));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return z * sum;
}

// Closed forms for nu <= 3 from sin/cos of the complex argument. chi has no
// small-z cancellation, psi does (handled by psi_series in the tests).
struct ClosedForms {
  std::vector<Complex> psi, chi;
  Complex psi_m1, chi_m1;  // order -1

  explicit ClosedForms(Complex z) {
    const Complex s = std::sin(z), c = std::cos(z);
    psi = {s, s / z - c, (3.0 / (z * z) - 1.0) * s - 3.0 * c / z,
           (15.0 / (z * z * z) - 6.0 / z) * s - (15.0 / (z * z) - 1.0) * c};
    chi = {c, c / z + s, (3.0 / (z * z) - 1.0) * c + 3.0 * s / z,
           (15.0 / (z * z * z) - 6.0 / z) * c + (15.0 / (z * z) - 1.0) * s};
    psi_m1 = c;
    chi_m1 = -s;
  }
  Complex xi(int nu) const { return psi[nu] - kI * chi[nu]; }
};

double rel_err(Complex got, Complex want) {
  const double scale = std::max(std::abs(want), 1e-300);
  return std::abs(got - want) / scale;
}

}  // namespace

TEST_CASE("riccati psi matches closed forms at moderate arguments") {
  const std::vector<Complex> args = {{1.0, 0.0}, {2.0, 0.5}, {5.0, 1.0}, {-1.5, 2.0}, {8.0, -3.0}};
  for (Complex z : args) {
    const ClosedForms f(z);
    for (int nu = 0; nu <= 3; ++nu) {
      const auto r = sf::riccati(nu, z);
      CHECK(rel_err(r.psi, f.psi[nu]) < 1e-11);
      CHECK(rel_err(r.xi, f.xi(nu)) < 1e-11);
      const Complex psi_below = (nu == 0) ? f.psi_m1 : f.psi[nu - 1];
      const Complex xi_below = (nu == 0) ? (f.psi_m1 - kI * f.chi_m1) : f.xi(nu - 1);
      CHECK(rel_err(r.psi_prime, psi_below - (double(nu) / z) * f.psi[nu]) < 1e-10);
      CHECK(rel_err(r.xi_prime, xi_below - (double(nu) / z) * f.xi(nu)) < 1e-10);
    }
  }
}

TEST_CASE("riccati psi matches Taylor series at small arguments") {
  const std::vector<Complex> args = {{0.01, 0.0}, {0.05, 0.01}, {0.3, -0.2}, {1.2, 0.4}};
  for (Complex z : args) {
    for (int nu = 0; nu <= 8; ++nu) {
      const auto r = sf::riccati(nu, z);
      CHECK(rel_err(r.psi, psi_series(nu, z)) < 1e-12);
      const Complex psi_below = (nu == 0) ? std::cos(z) : psi_series(nu - 1, z);
      CHECK(rel_err(r.psi_prime, psi_below - (double(nu) / z) * psi_series(nu, z)) < 1e-11);
    }
  }
}

TEST_CASE("spec examples") {
  CHECK(sf::riccati(0, {1.0, 0.0}).psi.real() == doctest::Approx(0.8414709848).epsilon(1e-9));
  CHECK(sf::riccati(1, {1.0, 0.0}).psi.real() == doctest::Approx(0.3011686789).epsilon(1e-9));

  // Wronskian at nu = 3, z = 2 + 0.5i against the pinned constant
  const auto r = sf::riccati(3, {2.0, 0.5});
  CHECK(std::abs(r.wronskian() - sf::kRiccatiWronskian) < 1e-10);

  CHECK(rel_err(sf::spherical_bessel(sf::BesselKind::j, 0, {1.0, 0.0}),
                Complex{0.8414709848, 0.0}) < 1e-9);
  // h1_0(i) = -i e^{i*i}/i = -e^{-1}
  CHECK(rel_err(sf::spherical_bessel(sf::BesselKind::h1, 0, {0.0, 1.0}),
                Complex{-std::exp(-1.0), 0.0}) < 1e-12);
  CHECK(std::abs(sf::spherical_bessel(sf::BesselKind::y, 0, {kPi / 2.0, 0.0})) < 1e-12);
}

TEST_CASE("Wronskian constancy over sampling grid") {
  const std::vector<double> mags = {1e-2, 3e-2, 0.1, 0.3, 1.0, 2.0, 5.0, 10.0, 20.0, 35.0, 50.0};
  const std::vector<double> phases = {-3.0, -2.2, -1.4, -0.7, -0.1, 0.0, 0.4, 1.1, 1.9, 2.7, 3.1};
  for (double m : mags) {
    for (double p : phases) {
      const Complex z = std::polar(m, p);
      const auto table = sf::riccati_table(30, z);
      for (int nu = 1; nu <= 30; ++nu) CHECK(table.at(nu).wronskian_residual() < 1e-10);
    }
  }
}

TEST_CASE("psi is real on the positive real axis") {
  for (double x : {0.3, 1.0, 4.0, 17.5}) {
    const auto table = sf::riccati_table(12, Complex{x, 0.0});
    for (int nu = 0; nu <= 12; ++nu) CHECK(table.psi[nu].imag() == 0.0);
  }
}

TEST_CASE("upward recurrence self-consistency") {
  // psi_nu = ((2nu+3)/z) psi_{nu+1} - psi_{nu+2}, valid where magnitudes O(1)
  for (Complex z : {Complex{10.0, 2.0}, Complex{15.0, -1.0}, Complex{8.0, 0.0}}) {
    const auto t = sf::riccati_table(10, z);
    for (int nu = 0; nu <= 6; ++nu) {
      const Complex rebuilt = (Complex(2.0 * nu + 3.0) / z) * t.psi[nu + 1] - t.psi[nu + 2];
      CHECK(rel_err(rebuilt, t.psi[nu]) < 1e-8);
    }
  }
}

TEST_CASE("h2 is the conjugate partner on the real axis") {
  const Complex z{3.7, 0.0};
  for (int nu = 0; nu <= 5; ++nu) {
    const Complex h1 = sf::spherical_bessel(sf::BesselKind::h1, nu, z);
    const Complex h2 = sf::spherical_bessel(sf::BesselKind::h2, nu, z);
    CHECK(rel_err(h2, std::conj(h1)) < 1e-10);
  }
}

TEST_CASE("domain and overflow errors") {
  CHECK_THROWS_AS(sf::riccati(0, Complex{0.0, 0.0}), gwshift::DomainError);
  CHECK_THROWS_AS(sf::riccati(1, Complex{-2.0, 0.0}), gwshift::DomainError);
  CHECK_THROWS_AS(sf::riccati(61, Complex{1.0, 0.0}), gwshift::DomainError);
  CHECK_THROWS_AS(sf::riccati(0, Complex{1.0, -710.0}), gwshift::OverflowError);
}

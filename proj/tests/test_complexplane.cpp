#include <cmath>

#include "doctest.h"
#include "gwshift/complexplane.hpp"

using gwshift::Complex;
using gwshift::kPi;
namespace cp = gwshift::cplane;

TEST_CASE("newton finds a linear root from the origin") {
  const auto f = [](Complex k) { return k - Complex{2.0, 1.0}; };
  const Complex r = cp::newton_root(f, {0.0, 0.0});
  CHECK(std::abs(r - Complex{2.0, 1.0}) < 1e-10);
}

TEST_CASE("newton result is stable across finite-difference steps") {
  const auto f = [](Complex k) { return std::exp(k) * (k * k - Complex{2.0, 0.7}); };
  Complex ref;
  bool first = true;
  for (double h : {1e-9, 1e-8, 1e-7, 1e-6, 1e-5}) {
    cp::NewtonOptions opt;
    opt.fd_step_rel = h;
    const Complex r = cp::newton_root_full(f, {1.4, 0.2}, opt).root;
    if (first) {
      ref = r;
      first = false;
    }
    CHECK(std::abs(r - ref) < 1e-9 * std::abs(ref));
  }
}

TEST_CASE("double root: newton converges but winding flags multiplicity") {
  const Complex k0{1.0, -0.5};
  const auto f = [&](Complex k) { return (k - k0) * (k - k0); };
  const Complex r = cp::newton_root(f, k0 + Complex{0.08, 0.02}, 1e-9, 200);
  CHECK(std::abs(r - k0) < 1e-6);
  const int w = cp::winding_number(f, {k0, 0.05, 64});
  CHECK(w == 2);
}

TEST_CASE("newton error contracts") {
  const auto f = [](Complex k) { return (k - 1.0) * (k - 1.0) + 1e-8; };
  CHECK_THROWS_AS(cp::newton_root(f, {200.0, 0.0}, 1e-13, 4), gwshift::NoConvergence);
  const auto g = [](Complex k) { return std::exp(-k * k); };  // no root, iterates run away
  CHECK_THROWS_AS(cp::newton_root(g, {3.0, 0.0}), gwshift::DivergedOutOfDomain);
}

TEST_CASE("residue of a simple pole") {
  const auto f = [](Complex k) { return 1.0 / (k - 2.0); };
  const Complex r = cp::residue(f, {{2.0, 0.0}, 0.5, 16});
  CHECK(std::abs(r - 1.0) < 1e-10);
}

TEST_CASE("argument principle: residue of g'/g at a simple zero is 1") {
  const Complex z0{0.4, -1.3};
  const auto g = [&](Complex k) { return (k - z0) * (k + 3.0) * std::exp(0.3 * k); };
  const auto logd = [&](Complex k) {
    const double h = 1e-6;
    return (g(k + h) - g(k - h)) / (2.0 * h) / g(k);
  };
  const Complex r = cp::residue(logd, {z0, 0.1, 32});
  CHECK(std::abs(r - 1.0) < 1e-6);
}

TEST_CASE("residue quadrature converges exponentially") {
  // pole off-center: trapezoid error ~ (d/r)^N decays geometrically with N
  const Complex c{0.0, 0.0};
  const double r = 1.0;
  const Complex p = c + Complex{0.45, 0.1};
  const auto f = [&](Complex k) { return 1.0 / (k - p); };
  auto ring_err = [&](int n) {
    Complex s{0.0, 0.0};
    for (int j = 0; j < n; ++j) {
      const double t = 2.0 * kPi * j / n;
      const Complex e{std::cos(t), std::sin(t)};
      s += f(c + r * e) * e;
    }
    return std::abs(s * (r / double(n)) - 1.0);
  };
  const double e8 = ring_err(8), e16 = ring_err(16), e32 = ring_err(32);
  CHECK(e16 < 0.05 * e8);             // far faster than any algebraic order
  CHECK(e32 < 0.05 * e16 + 1e-12);
}

TEST_CASE("residue near-contour singularity is reported") {
  const Complex c{0.0, 0.0};
  const auto f = [&](Complex k) { return 1.0 / (k - Complex{1.0000001, 0.0}); };
  CHECK_THROWS_AS(cp::residue(f, {c, 1.0, 16}), gwshift::Error);
}

TEST_CASE("winding numbers of elementary functions") {
  const Complex k0{0.3, 0.7};
  const cp::ContourSpec cont{k0, 0.2, 64};
  CHECK(cp::winding_number([&](Complex k) { return k - k0; }, cont) == 1);
  CHECK(cp::winding_number([&](Complex k) { return 1.0 / (k - k0); }, cont) == -1);
  CHECK(cp::winding_number([&](Complex k) { return (k - k0) * (k - k0); }, cont) == 2);
  CHECK(cp::winding_number([&](Complex k) { return std::exp(k); }, cont) == 0);
}

TEST_CASE("winding is contour-radius independent while nothing is crossed") {
  const Complex k0{1.0, -1.0};
  const auto f = [&](Complex k) { return (k - k0) / (k + 4.0); };
  for (double r : {0.1, 0.5, 1.0, 2.0}) {
    CHECK(cp::winding_number(f, {k0, r, 64}) == 1);
  }
}

TEST_CASE("track: constant family gives a constant trajectory") {
  const Complex root{2.0, -0.5};
  const auto family = [&](double) {
    return cp::FuncC([root](Complex k) { return k - root; });
  };
  const std::vector<double> path = {0.0, 0.5, 1.0};
  const auto recs = cp::track(family, path, root + Complex{0.1, 0.0});
  REQUIRE(recs.size() == 3);
  for (const auto& r : recs) CHECK(std::abs(r.location - root) < 1e-9);
}

TEST_CASE("track follows a moving root and records q factors") {
  const auto family = [](double a) {
    return cp::FuncC([a](Complex k) { return k - Complex{1.0 + a, -0.1}; });
  };
  std::vector<double> path;
  for (int i = 0; i <= 10; ++i) path.push_back(i / 10.0);
  const auto recs = cp::track(family, path, {1.0, -0.1});
  REQUIRE(recs.size() == path.size());
  CHECK(std::abs(recs.back().location - Complex{2.0, -0.1}) < 1e-9);
  CHECK(recs.back().q_factor == doctest::Approx(2.0 / 0.2));
}

TEST_CASE("track reports LostTrack with completed prefix") {
  // root teleports discontinuously at a = 0.5; bisection cannot bridge it
  const auto family = [](double a) {
    const Complex root = (a < 0.5) ? Complex{1.0, 0.0} : Complex{200.0, 0.0};
    return cp::FuncC([root](Complex k) { return (k - root) * std::exp(k * 1e-2); });
  };
  const std::vector<double> path = {0.0, 1.0};
  cp::TrackOptions opt;
  opt.max_bisections = 8;
  try {
    cp::track(family, path, {1.0, 0.0}, opt);
    FAIL("expected LostTrackError");
  } catch (const cp::LostTrackError& e) {
    CHECK(e.completed.size() == 1);
    CHECK(std::abs(e.completed.front().location - Complex{1.0, 0.0}) < 1e-8);
  }
}

#include <cmath>
#include <random>

#include "doctest.h"
#include "gwshift/errors.hpp"
#include "gwshift/materials.hpp"

using gwshift::Complex;
using gwshift::kPi;
namespace mat = gwshift::materials;
using mat::EvalRule;

namespace {

const std::filesystem::path kDataDir = std::filesystem::path(GWSHIFT_SOURCE_DIR) / "data/materials";

double k_of_lambda_um(double lambda_um) { return 2.0 * kPi / (lambda_um * 1e-6); }

}  // namespace

TEST_CASE("constant model ignores k") {
  mat::DispersionModel m(mat::ConstantModel{Complex{1.33, 0.0}});
  CHECK(m.refractive_index({1e7, -3e5}, EvalRule::frozen_at_real_part) == Complex{1.33, 0.0});
  CHECK(m.refractive_index({5e6, 0.0}, EvalRule::analytic_continuation) == Complex{1.33, 0.0});
  CHECK(m.permittivity({1e7, 0.0}, EvalRule::frozen_at_real_part).real() ==
        doctest::Approx(1.7689));
}

TEST_CASE("silica Sellmeier matches independent evaluation at 880 nm") {
  const auto lib = mat::MaterialLibrary::load(kDataDir / "library.json");
  const Complex n = lib.at("silica").refractive_index({k_of_lambda_um(0.88), 0.0},
                                                      EvalRule::frozen_at_real_part);
  // independent evaluation of the published three-term coefficients
  const double l2 = 0.88 * 0.88;
  const double n2 = 1.0 + 0.6961663 * l2 / (l2 - 0.0046791482) +
                    0.4079426 * l2 / (l2 - 0.0135120631) + 0.8974794 * l2 / (l2 - 97.9340025);
  CHECK(n.real() == doctest::Approx(std::sqrt(n2)).epsilon(1e-12));
  CHECK(n.real() == doctest::Approx(1.45).epsilon(2e-3));
  CHECK(n.imag() == 0.0);
}

TEST_CASE("water tabulation near 660 nm") {
  const auto lib = mat::MaterialLibrary::load(kDataDir / "library.json");
  const Complex n = lib.at("water").refractive_index({k_of_lambda_um(0.66), 0.0},
                                                     EvalRule::frozen_at_real_part);
  CHECK(n.real() == doctest::Approx(1.331).epsilon(3e-3));
  CHECK(n.imag() < 1e-6);
  CHECK(n.imag() >= 0.0);
}

TEST_CASE("tabulated interpolation reproduces knots exactly") {
  const auto table = mat::load_csv_table(kDataDir / "water.csv");
  const auto& lam = table.knots();
  for (double l : lam) {
    const Complex direct = table.index_at(l);
    (void)direct;  // must not throw at the boundary knots
  }
  // interior knots: PCHIP interpolates the data exactly
  CHECK(table.index_at(0.650).real() == doctest::Approx(1.331).epsilon(1e-14));
  CHECK(table.index_at(0.875).imag() == doctest::Approx(3.91e-07).epsilon(1e-14));
}

TEST_CASE("gold model: metallic and absorbing in the visible/NIR") {
  const auto lib = mat::MaterialLibrary::load(kDataDir / "library.json");
  const auto& gold = lib.at("gold");

  // frozen oracle from an independent evaluation of the same parametrization
  const Complex eps880 = gold.permittivity({k_of_lambda_um(0.88), 0.0},
                                           EvalRule::frozen_at_real_part);
  CHECK(eps880.real() == doctest::Approx(-25.9391).epsilon(2e-3));
  CHECK(eps880.imag() == doctest::Approx(2.4495).epsilon(2e-3));

  for (double lam = 0.40; lam <= 1.00; lam += 0.02) {
    const Complex eps = gold.permittivity({k_of_lambda_um(lam), 0.0},
                                          EvalRule::frozen_at_real_part);
    CHECK(eps.imag() > 0.0);
  }
}

TEST_CASE("passivity of library materials at real wavelengths") {
  const auto lib = mat::MaterialLibrary::load(kDataDir / "library.json");
  for (const auto& id : lib.ids()) {
    for (double lam = 0.40; lam <= 1.40; lam += 0.05) {
      const Complex eps = lib.at(id).permittivity({k_of_lambda_um(lam), 0.0},
                                                  EvalRule::frozen_at_real_part);
      CHECK(eps.imag() >= 0.0);
    }
  }
}

TEST_CASE("sqrt(n^2) round trip for random passive samples") {
  std::mt19937_64 rng(20240811);
  std::uniform_real_distribution<double> re(0.1, 4.0), im(0.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    const Complex n{re(rng), im(rng)};
    Complex r = std::sqrt(n * n);
    if (r.real() < 0.0) r = -r;
    CHECK(std::abs(r - n) <= 1e-12 * std::abs(n));
  }
}

TEST_CASE("frozen rule uses only Re(k)") {
  const auto lib = mat::MaterialLibrary::load(kDataDir / "library.json");
  const double k = k_of_lambda_um(0.88);
  const Complex a = lib.at("gold").refractive_index({k, 0.0}, EvalRule::frozen_at_real_part);
  const Complex b = lib.at("gold").refractive_index({k, -0.1 * k}, EvalRule::frozen_at_real_part);
  CHECK(a == b);
  // analytic continuation does depend on Im(k)
  const Complex c = lib.at("gold").refractive_index({k, -0.1 * k},
                                                    EvalRule::analytic_continuation);
  CHECK(std::abs(c - a) > 1e-6);
}

TEST_CASE("error contracts") {
  const auto lib = mat::MaterialLibrary::load(kDataDir / "library.json");
  CHECK_THROWS_AS(lib.at("water").refractive_index({k_of_lambda_um(5.0), 0.0},
                                                   EvalRule::frozen_at_real_part),
                  gwshift::RangeError);
  CHECK_THROWS_AS(lib.at("water").refractive_index({k_of_lambda_um(0.66), 0.0},
                                                   EvalRule::analytic_continuation),
                  gwshift::UnsupportedError);
  CHECK_THROWS_AS(lib.at("no-such-material"), gwshift::ConfigError);
  CHECK_THROWS_AS(mat::TabulatedModel({0.5, 0.5, 0.6}, {1, 1, 1}, {0, 0, 0}),
                  gwshift::ConfigError);
}

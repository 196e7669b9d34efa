#pragma once

#include <vector>

#include "gwshift/common.hpp"

namespace gwshift::specfun {

inline constexpr int kDefaultMaxOrder = 60;

/// Riccati-Bessel values at a single order: psi_nu(z) = z j_nu(z) and
/// xi_nu(z) = z h1_nu(z) = psi_nu(z) - i chi_nu(z), chi_nu(z) = -z y_nu(z).
/// With these definitions psi xi' - psi' xi == +i for every order.
struct RiccatiSet {
  int order = 0;
  Complex z;
  Complex psi, psi_prime;
  Complex xi, xi_prime;

  Complex chi() const { return kI * (xi - psi); }
  Complex chi_prime() const { return kI * (xi_prime - psi_prime); }
  Complex wronskian() const { return psi * xi_prime - psi_prime * xi; }

  /// |wronskian - i| normalized by the magnitude of the cancelling products,
  /// so the check stays meaningful where psi and xi grow like e^{|Im z|}.
  double wronskian_residual() const {
    const double scale =
        std::max(1.0, std::abs(psi) * std::abs(xi_prime) + std::abs(psi_prime) * std::abs(xi));
    return std::abs(wronskian() - Complex{0.0, 1.0}) / scale;
  }
};

/// Pinned value of psi xi' - psi' xi (checked against nu = 1 closed forms).
inline constexpr Complex kRiccatiWronskian{0.0, 1.0};

/// All orders 0..max_order at once; index [nu]. psi comes from downward
/// ratios seeded by a Lentz continued fraction, xi from upward recurrence.
struct RiccatiTable {
  Complex z;
  std::vector<Complex> psi, psi_prime, xi, xi_prime;
  RiccatiSet at(int nu) const {
    return {nu, z, psi[nu], psi_prime[nu], xi[nu], xi_prime[nu]};
  }
};

RiccatiTable riccati_table(int max_order, Complex z);
RiccatiSet riccati(int order, Complex z, int max_order = kDefaultMaxOrder);

enum class BesselKind { j, y, h1, h2 };

/// Spherical Bessel/Hankel functions, consistent with riccati() through
/// psi = z*j and xi = z*h1 (so h1 = j + i*y).
Complex spherical_bessel(BesselKind kind, int order, Complex z,
                         int max_order = kDefaultMaxOrder);

}  // namespace gwshift::specfun

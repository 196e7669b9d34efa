#include "gwshift/specfun.hpp"

#include <cmath>
#include <limits>

#include "gwshift/errors.hpp"

namespace gwshift::specfun {

namespace {

constexpr double kLentzTol = 1e-15;
constexpr int kLentzMaxTerms = 10000;

bool finite(Complex v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

// Ratio r_{n} = psi_n / psi_{n-1} evaluated as the continued fraction
//   r_n = 1 / (b_n - 1/(b_{n+1} - 1/(b_{n+2} - ...))),  b_k = (2k+1)/z,
// by the modified Lentz algorithm.
Complex psi_ratio_continued_fraction(int n, Complex z) {
  const double tiny = 1e-290;
  Complex f{tiny, 0.0}, c = f, d{0.0, 0.0};
  for (int k = 0; k < kLentzMaxTerms; ++k) {
    const Complex b = Complex(2.0 * (n + k) + 1.0) / z;
    const Complex a = (k == 0) ? Complex(1.0) : Complex(-1.0);
    d = b + a * d;
    if (d == Complex(0.0)) d = tiny;
    c = b + a / c;
    if (c == Complex(0.0)) c = tiny;
    d = 1.0 / d;
    const Complex delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < kLentzTol) return f;
  }
  throw NoConvergence("riccati: psi continued fraction did not converge");
}

}  // namespace

RiccatiTable riccati_table(int max_order, Complex z) {
  if (max_order < 0) throw DomainError("riccati: order must be non-negative");
  if (z == Complex(0.0)) throw DomainError("riccati: z = 0 is outside the domain");
  if (z.imag() == 0.0 && z.real() < 0.0)
    throw DomainError("riccati: negative real axis rejected (principal branch)");

  // For Im z < 0 the xi recurrence passes through a deep dip (|xi_0| =
  // e^{|Im z|} decaying before the (2nu-1)!!/z^nu growth) and loses digits.
  // Reflect to the upper half plane: psi(z) = conj(psi(conj z)) and
  // xi(z) = conj(2 psi(conj z) - xi(conj z)), i.e. z h1(z) = conj(zbar h2(zbar)).
  if (z.imag() < 0.0) {
    RiccatiTable m = riccati_table(max_order, std::conj(z));
    RiccatiTable t;
    t.z = z;
    const std::size_t sz = m.psi.size();
    t.psi.resize(sz);
    t.psi_prime.resize(sz);
    t.xi.resize(sz);
    t.xi_prime.resize(sz);
    for (std::size_t i = 0; i < sz; ++i) {
      t.psi[i] = std::conj(m.psi[i]);
      t.psi_prime[i] = std::conj(m.psi_prime[i]);
      t.xi[i] = std::conj(2.0 * m.psi[i] - m.xi[i]);
      t.xi_prime[i] = std::conj(2.0 * m.psi_prime[i] - m.xi_prime[i]);
      if (!finite(t.xi[i]) || !finite(t.xi_prime[i]))
        throw OverflowError("riccati: intermediate magnitudes exceeded representable range");
    }
    return t;
  }

  const int n = max_order;
  RiccatiTable t;
  t.z = z;
  t.psi.resize(n + 1);
  t.psi_prime.resize(n + 1);
  t.xi.resize(n + 1);
  t.xi_prime.resize(n + 1);

  const Complex sin_z = std::sin(z);
  const Complex cos_z = std::cos(z);
  const Complex exp_iz = std::exp(kI * z);

  // psi: ratios r_nu = psi_nu/psi_{nu-1}, top ratio from the continued
  // fraction, the rest by downward recurrence 1/r_nu = (2nu+1)/z - r_{nu+1}.
  std::vector<Complex> ratio(n + 2);
  ratio[n + 1] = psi_ratio_continued_fraction(n + 1, z);
  for (int nu = n; nu >= 1; --nu)
    ratio[nu] = 1.0 / (Complex(2.0 * nu + 1.0) / z - ratio[nu + 1]);

  // Anchor on whichever of psi_0, psi_1 is better conditioned (psi_0 = sin z
  // vanishes at z = m*pi on the real axis).
  const Complex psi1 = sin_z / z - cos_z;
  t.psi[0] = sin_z;
  if (n >= 1) {
    if (std::abs(sin_z) >= std::abs(psi1)) {
      for (int nu = 1; nu <= n; ++nu) t.psi[nu] = t.psi[nu - 1] * ratio[nu];
    } else {
      t.psi[1] = psi1;
      for (int nu = 2; nu <= n; ++nu) t.psi[nu] = t.psi[nu - 1] * ratio[nu];
    }
  }

  // xi: upward recurrence from closed-form seeds xi_{-1} = e^{iz},
  // xi_0 = -i e^{iz}; growing solution, so upward is stable.
  Complex xi_prev = exp_iz;
  t.xi[0] = -kI * exp_iz;
  for (int nu = 0; nu < n; ++nu) {
    const Complex next = (Complex(2.0 * nu + 1.0) / z) * t.xi[nu] - xi_prev;
    xi_prev = t.xi[nu];
    t.xi[nu + 1] = next;
  }

  // Derivatives from f'_nu = f_{nu-1} - (nu/z) f_nu, with the order -1
  // values psi_{-1} = cos z, xi_{-1} = e^{iz}.
  t.psi_prime[0] = cos_z;
  t.xi_prime[0] = exp_iz;
  for (int nu = 1; nu <= n; ++nu) {
    t.psi_prime[nu] = t.psi[nu - 1] - (double(nu) / z) * t.psi[nu];
    t.xi_prime[nu] = t.xi[nu - 1] - (double(nu) / z) * t.xi[nu];
  }

  for (int nu = 0; nu <= n; ++nu) {
    if (!finite(t.psi[nu]) || !finite(t.xi[nu]) || !finite(t.psi_prime[nu]) ||
        !finite(t.xi_prime[nu]))
      throw OverflowError("riccati: intermediate magnitudes exceeded representable range");
  }
  return t;
}

RiccatiSet riccati(int order, Complex z, int max_order) {
  if (order < 0) throw DomainError("riccati: order must be non-negative");
  if (order > max_order) throw DomainError("riccati: order exceeds configured maximum");
  return riccati_table(order, z).at(order);
}

Complex spherical_bessel(BesselKind kind, int order, Complex z, int max_order) {
  const RiccatiSet r = riccati(order, z, max_order);
  switch (kind) {
    case BesselKind::j:
      return r.psi / z;
    case BesselKind::y:
      return -r.chi() / z;
    case BesselKind::h1:
      return r.xi / z;
    case BesselKind::h2:
      return (2.0 * r.psi - r.xi) / z;  // h2 = j - i y = (psi + i chi)/z
  }
  throw DomainError("spherical_bessel: unknown kind");
}

}  // namespace gwshift::specfun

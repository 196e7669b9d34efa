#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "gwshift/common.hpp"
#include "gwshift/wigner_smith.hpp"

namespace gwshift::slab1d {

/// Two-port multilayer slab at normal incidence: E along x, H along y,
/// stack occupying [0, L] between free-space-like background half spaces.
struct Layer {
  double thickness = 0.0;   // m
  Complex eps_rel{1.0, 0.0};
};

struct Slab1D {
  std::vector<Layer> layers;
  Complex eps_background{1.0, 0.0};  // must be lossless (real)

  double total_length() const;
  void validate() const;
};

struct Mat2 {
  std::array<std::array<Complex, 2>, 2> m{};

  Complex& operator()(int r, int c) { return m[r][c]; }
  const Complex& operator()(int r, int c) const { return m[r][c]; }
  static Mat2 identity();
  Mat2 transpose() const;
  Mat2 adjoint() const;
  Mat2 operator*(const Mat2& o) const;
  Mat2 operator-(const Mat2& o) const;
  Mat2 operator+(const Mat2& o) const;
  Mat2 scaled(Complex s) const;
  double norm() const;  // Frobenius
};

/// Piecewise plane-wave field over the stack, with the port-normalized
/// incident amplitude and the outgoing amplitudes at both reference planes.
struct FieldSolution {
  struct Piece {
    double z_lo = 0.0, z_hi = 0.0;
    double zref_fwd = 0.0;  // forward wave referenced at the layer entry
    double zref_bwd = 0.0;  // backward wave referenced at the layer exit
    Complex q;              // local wavenumber
    Complex fwd;            // coefficient of e^{+i q (z - zref_fwd)}
    Complex bwd;            // coefficient of e^{-i q (z - zref_bwd)}
  };
  std::vector<Piece> pieces;  // one per layer, ordered
  Complex omega;
  int port = 0;                 // 0 = left, 1 = right illumination
  Complex incident_amplitude;   // reciprocity-normalized mode amplitude
  Complex outgoing_left, outgoing_right;

  Complex efield(double z) const;
  Complex efield_derivative(double z) const;
  Complex hfield(double z) const;  // E' / (i omega mu0)

  /// Max tangential-field mismatch across interfaces, relative.
  double continuity_residual(const Slab1D& slab) const;
};

/// Scattering matrix with reference planes at the slab faces;
/// row = outgoing port, column = illuminated port.
Mat2 slab_smatrix(const Slab1D& slab, Complex omega);

FieldSolution internal_fields(const Slab1D& slab, Complex omega, int port);

/// Surface-vs-volume bilinear balance: max over (p,q) of the relative
/// mismatch between -i/4 times the boundary flux of E_p x H_q and
/// omega/4 times the volume integral of eps E_p E_q + mu0 H_p H_q.
double poynting_residual(const Slab1D& slab, Complex omega);

/// Operator identities checked against closed-form layer integrals of the
/// internal fields. The unconjugated pair is exact at any complex omega;
/// the conjugated pair holds only near real frequencies.
enum class IdentityTag {
  unconj_gram,  // S^T S vs unconjugated field products
  unconj_ws,    // -i S^T dS/dxi vs unconjugated products
  conj_gram,    // S^dag S vs conjugated products (approximate off the real axis)
  conj_ws,      // -i S^dag dS/dxi vs conjugated products (approximate)
};

enum class SlabParam { frequency, layer_eps_scale, layer_thickness };

struct ParamRef {
  SlabParam kind = SlabParam::frequency;
  std::size_t layer = 0;
};

struct OperatorIdentityReport {
  Mat2 lhs, rhs;
  double residual = 0.0;  // ||lhs - rhs|| / max(||lhs||, ||rhs||)
  IdentityTag tag = IdentityTag::unconj_gram;
};

OperatorIdentityReport verify_identity(const Slab1D& slab, Complex omega, IdentityTag tag,
                                       ParamRef xi = {});

/// det of the outgoing-only boundary-value problem; S-matrix poles are its
/// zeros.
Complex pole_function(const Slab1D& slab, Complex omega);

Complex locate_pole(const Slab1D& slab, Complex seed, double tol = 1e-12, int max_iter = 80);

/// Outgoing-only resonance field (arbitrary overall scale).
FieldSolution mode_field(const Slab1D& slab, Complex omega_p);

/// ScatteringFunction view for the shift operators: 1/det with parameter
/// "deps" = additive change of layer `layer`'s relative permittivity.
ws::ScatteringFunction pole_scattering_function(const Slab1D& slab, std::size_t layer);

struct PerturbComparison {
  Complex omega_p;
  double q_factor = 0.0;
  double deps = 0.0;              // applied relative-permittivity change
  Complex dw_conjugated;          // first order, conjugated products + energy norm
  Complex dw_unconjugated;        // first order, unconjugated products
  Complex dw_gws;                 // log-derivative residue
  Complex dw_direct;              // re-solved pole
};

/// The four shift estimates for a real permittivity perturbation of one layer.
PerturbComparison perturb_compare(const Slab1D& slab, Complex omega_p_seed, std::size_t layer,
                                  double deps);

}  // namespace gwshift::slab1d

#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "gwshift/common.hpp"
#include "gwshift/errors.hpp"

namespace gwshift::cplane {

using FuncC = std::function<Complex(Complex)>;

/// Circular contour for residue / winding quadrature.
struct ContourSpec {
  Complex center;
  double radius = 0.0;
  int samples = 16;
};

/// A located pole or zero with certification metadata.
struct PoleRecord {
  enum class Kind { pole, zero };
  Complex location;
  Kind kind = Kind::pole;
  double q_factor = 0.0;          // Re / (2 |Im|)
  Complex residue_of_trace;       // Res of the k-logarithmic-derivative trace
  int iterations = 0;
  double final_step = 0.0;        // |last Newton step| / |location|
  bool passive_sign_ok = true;    // Im < 0 expected for passive-system poles

  static double q_of(Complex k) { return k.real() / (2.0 * std::abs(k.imag())); }
};

struct NewtonOptions {
  double tol = 1e-11;            // relative step tolerance
  int max_iter = 60;
  double escape_factor = 1.0;    // diverged if |k - k0| > escape_factor * (|k0| + 8 |first step|)
  std::optional<FuncC> derivative;  // analytic derivative, else central differences
  double fd_step_rel = 1e-7;     // h = max(fd_step_rel*|k|, 1e-2*tol*|k|)
};

struct NewtonResult {
  Complex root;
  int iterations = 0;
  double final_step = 0.0;
};

/// Seeded Newton iteration on an analytic scalar function.
NewtonResult newton_root_full(const FuncC& f, Complex k0, const NewtonOptions& opt = {});
Complex newton_root(const FuncC& f, Complex k0, double tol = 1e-11, int max_iter = 60);

struct ResidueOptions {
  double rel_tol = 1e-9;   // doubling stops when the result changes less than this
  int max_samples = 1 << 15;
};

/// (1/2 pi i) \oint f dk over the circle, uniform trapezoid with sample
/// doubling (exponentially convergent for f meromorphic off the contour).
Complex residue(const FuncC& f, const ContourSpec& contour, const ResidueOptions& opt = {});

/// Argument-principle count of zeros minus poles enclosed by the contour,
/// from accumulated phase of f along adaptively refined samples.
int winding_number(const FuncC& f, const ContourSpec& contour);

/// Parameter-continuation of a root along a path of parameter values.
struct TrackOptions {
  NewtonOptions newton;
  int max_bisections = 16;  // path refinement depth on Newton failure
  PoleRecord::Kind kind = PoleRecord::Kind::pole;
  /// Optional first-order predictor: (alpha_prev, alpha_next, k_prev) -> seed.
  std::function<Complex(double, double, Complex)> predictor;
};

struct LostTrackError : Error {
  LostTrackError(const std::string& msg, std::vector<PoleRecord> done)
      : Error(msg), completed(std::move(done)) {}
  std::vector<PoleRecord> completed;
};

/// family(alpha) must return the scalar function whose root is tracked.
std::vector<PoleRecord> track(const std::function<FuncC(double)>& family,
                              const std::vector<double>& parameter_path, Complex seed,
                              const TrackOptions& opt = {});

}  // namespace gwshift::cplane

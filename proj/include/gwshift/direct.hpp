#pragma once

#include "gwshift/complexplane.hpp"
#include "gwshift/wigner_smith.hpp"

namespace gwshift::direct {

/// Ground-truth shift: re-solve the singularity after a finite perturbation.
struct DirectShiftResult {
  Complex k_before, k_after;
  double dalpha = 0.0;
  Complex dk;
  int iterations_before = 0;
  int iterations_after = 0;
  int substeps = 1;  // > 1 when dalpha had to be applied in pieces
};

struct DirectOptions {
  cplane::NewtonOptions newton;
  int max_splits = 10;
  /// Distance to the nearest other known singularity; a step whose predicted
  /// |dk| exceeds 30% of it is subdivided. 0 disables the heuristic.
  double nearest_singularity_dist = 0.0;
  bool verify_winding = true;
  ws::ShiftOptions shift;  // contour parameters for the winding checks
};

/// M is the pole-carrying function (1/g for a coefficient pole, 1/f for a
/// tracked zero); the Newton target is its reciprocal.
DirectShiftResult pole_shift_direct(const ws::ScatteringFunction& M, Complex k_p,
                                    std::string_view param, double dalpha,
                                    const DirectOptions& opt = {});

}  // namespace gwshift::direct

#include "gwshift/direct.hpp"

#include <cmath>

#include "gwshift/errors.hpp"

namespace gwshift::direct {

namespace {

void verify_pole_winding(const std::function<Complex(Complex)>& pole_fn, Complex k,
                         const ws::ShiftOptions& so) {
  double radius = so.contour_radius_rel * std::abs(k);
  for (int attempt = 0;; ++attempt) {
    try {
      const int w = cplane::winding_number(pole_fn, {k, radius, 4 * so.contour_samples});
      if (w != -1)
        throw SimplePoleViolation("pole_shift_direct: endpoint winding " + std::to_string(w));
      return;
    } catch (const IllConditioned&) {
      if (attempt >= so.max_shrink) throw;
      radius *= 0.5;
    }
  }
}

}  // namespace

DirectShiftResult pole_shift_direct(const ws::ScatteringFunction& M, Complex k_p,
                                    std::string_view param, double dalpha,
                                    const DirectOptions& opt) {
  const std::size_t idx = M.param_index(param);

  // target for the solver: zeros of 1/M sit at the poles of M
  auto target_at = [&](double delta) {
    return [&M, idx, delta](Complex k) { return 1.0 / M.eval_shifted(k, idx, delta); };
  };

  DirectShiftResult out;
  out.dalpha = dalpha;

  // confirm the starting singularity from the given seed
  {
    const auto r = cplane::newton_root_full(target_at(0.0), k_p, opt.newton);
    out.k_before = r.root;
    out.iterations_before = r.iterations;
    if (opt.verify_winding)
      verify_pole_winding([&](Complex k) { return M(k); }, out.k_before, opt.shift);
  }
  if (dalpha == 0.0) {
    out.k_after = out.k_before;
    out.dk = {0.0, 0.0};
    return out;
  }

  // walk to dalpha, splitting the step when the solver loses the basin or
  // the predicted move is large compared to the nearest other singularity
  double applied = 0.0;
  double step = dalpha;
  Complex current = out.k_before;
  int consecutive_failures = 0;
  out.substeps = 0;
  while (std::abs(applied - dalpha) > 0.0) {
    bool ok = true;
    cplane::NewtonResult r;
    try {
      r = cplane::newton_root_full(target_at(applied + step), current, opt.newton);
      if (opt.nearest_singularity_dist > 0.0 &&
          std::abs(r.root - current) > 0.3 * opt.nearest_singularity_dist)
        ok = false;
    } catch (const Error&) {
      ok = false;
    }
    if (ok) {
      current = r.root;
      applied += step;
      out.iterations_after += r.iterations;
      ++out.substeps;
      consecutive_failures = 0;
      step = dalpha - applied;  // try to finish in one go
      if (step == 0.0) break;
    } else {
      ++consecutive_failures;
      if (consecutive_failures > opt.max_splits)
        throw LostTrack("pole_shift_direct: perturbed root escaped the basin");
      step *= 0.5;
    }
  }
  out.k_after = current;
  out.dk = out.k_after - out.k_before;

  if (opt.verify_winding) {
    auto perturbed = [&](Complex k) { return M.eval_shifted(k, idx, dalpha); };
    verify_pole_winding(perturbed, out.k_after, opt.shift);
  }
  return out;
}

}  // namespace gwshift::direct

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "gwshift/resonance.hpp"

namespace gwshift::sweep {

/// Core-radius x shell-thickness design sweep of one tracked singularity.
struct SweepConfig {
  mie::LayeredSphere particle;  // two-layer template carrying the materials
  double rc_min = 0.0, rc_max = 0.0;
  int rc_steps = 0;
  double ds_min = 0.0, ds_max = 0.0;
  int ds_steps = 0;
  cplane::PoleRecord::Kind target = cplane::PoleRecord::Kind::pole;
  Complex seed_k;                    // singularity seed for the template particle
  std::string perturb_param = "n_b";
  double direct_check_fraction = 0.05;
  double direct_check_dalpha = 1e-4;
  std::uint64_t rng_seed = 1;
  int threads = 1;
  int nu = 1;
  std::filesystem::path journal;  // empty disables resumable journalling

  void validate() const;
  double rc_at(int i) const;
  double ds_at(int j) const;
};

struct CellResult {
  int i = 0, j = 0;
  double r_c = 0.0, d_s = 0.0;
  bool ok = false;
  Complex k;
  double q_factor = 0.0;
  Complex eta;
  double direct_rel_diff = -1.0;  // < 0 when the cell was not cross-checked
  std::string error;
};

struct HeatmapResult {
  SweepConfig config;
  std::vector<CellResult> cells;  // row-major: index = i * ds_steps + j

  const CellResult& at(int i, int j) const { return cells[std::size_t(i) * config.ds_steps + j]; }
  std::size_t failures() const;
  std::optional<CellResult> argmax_abs_re_eta() const;
  std::optional<CellResult> argmax_abs_im_eta() const;
  std::size_t computed_this_run = 0;  // cells not loaded from the journal
};

HeatmapResult run_sweep(const SweepConfig& config, const materials::MaterialLibrary& lib);

}  // namespace gwshift::sweep

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "gwshift/common.hpp"

namespace gwshift::cli {

struct CommonOptions {
  std::filesystem::path materials = "data/materials/library.json";
  std::filesystem::path out_dir = "out";
  int threads = 1;
  std::string format = "csv";  // report format: csv (text) or json
};

struct ParticleOptions {
  std::string core = "silica";
  std::string shell = "gold";  // empty = homogeneous sphere of the core material
  std::string background = "water";
  double rc = 60e-9;
  double ds = 10e-9;
  int nu = 1;
};

struct SpectrumOptions {
  double k_min = 0.4e7, k_max = 1.3e7;
  int steps = 400;
  int nu_max = 0;  // 0 = automatic
};

struct PolemapOptions {
  double k_re_min = 0.4e7, k_re_max = 1.4e7;
  double k_im_min = -0.4e7, k_im_max = 0.05e7;
  int n_re = 160, n_im = 90;
};

struct SweepOptions {
  double rc_min = 1e-9, rc_max = 65e-9;
  int rc_steps = 20;
  double ds_min = 0.5e-9, ds_max = 6.5e-9;
  int ds_steps = 16;
  std::string target = "pole";
  double seed_re = 0.71e7, seed_im = -0.07e7;
  std::string param = "n_b";
  double check_fraction = 0.05;
  std::uint64_t rng_seed = 1;
  bool resume = true;
};

struct ShiftOptions {
  std::string target = "pole";
  double seed_re = 0.71e7, seed_im = -0.07e7;
  std::string param = "n_b";
  double dalpha = 1e-4;
};

struct VerifyOptions {
  std::string suite = "identities";  // slab | identities | analytic-sphere | residues
  int count = 100;
  std::uint64_t rng_seed = 7;
};

struct TrajectoryOptions {
  std::string target = "pole";
  double seed_re = 0.71e7, seed_im = -0.07e7;
  std::string param = "r_c";
  double from = 48e-9, to = 75e-9;
  int steps = 28;
};

// command entry points; return process exit codes:
// 0 ok, 1 verification failure, 2 configuration error, 3 numerical failure
int cmd_spectrum(const CommonOptions&, const ParticleOptions&, const SpectrumOptions&);
int cmd_polemap(const CommonOptions&, const ParticleOptions&, const PolemapOptions&);
int cmd_sweep(const CommonOptions&, const ParticleOptions&, const SweepOptions&);
int cmd_shift(const CommonOptions&, const ParticleOptions&, const ShiftOptions&);
int cmd_verify(const CommonOptions&, const VerifyOptions&);
int cmd_trajectory(const CommonOptions&, const ParticleOptions&, const TrajectoryOptions&);

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailure = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericalFailure = 3;
inline constexpr int kSchemaVersion = 1;

}  // namespace gwshift::cli

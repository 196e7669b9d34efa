#include <string>

#include "CLI11.hpp"
#include "gwshift/cli.hpp"

using namespace gwshift;

int main(int argc, char** argv) {
  CLI::App app{"scattering pole/zero tracking and first-order shift prediction"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  app.set_config("--config")->description("TOML run configuration");

  cli::CommonOptions common;
  std::string materials = common.materials.string();
  std::string out_dir = common.out_dir.string();
  app.add_option("--materials", materials, "material library JSON")->capture_default_str();
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--threads", common.threads, "worker threads")->capture_default_str();
  app.add_option("--format", common.format, "report format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  cli::ParticleOptions particle;
  auto add_particle = [&](CLI::App* sub) {
    sub->add_option("--core", particle.core, "core material id")->capture_default_str();
    sub->add_option("--shell", particle.shell, "shell material id (empty = homogeneous)")
        ->capture_default_str();
    sub->add_option("--background", particle.background, "background material id")
        ->capture_default_str();
    sub->add_option("--rc", particle.rc, "core radius in m")->capture_default_str();
    sub->add_option("--ds", particle.ds, "shell thickness in m")->capture_default_str();
    sub->add_option("--nu", particle.nu, "multipole order")->capture_default_str();
  };

  cli::SpectrumOptions spectrum;
  auto* sub_spectrum = app.add_subcommand("spectrum", "cross sections over real wavenumbers");
  add_particle(sub_spectrum);
  sub_spectrum->add_option("--kmin", spectrum.k_min, "start k (1/m)")->capture_default_str();
  sub_spectrum->add_option("--kmax", spectrum.k_max, "end k (1/m)")->capture_default_str();
  sub_spectrum->add_option("--steps", spectrum.steps, "samples")->capture_default_str();
  sub_spectrum->add_option("--numax", spectrum.nu_max, "multipole cutoff (0 = auto)")
      ->capture_default_str();

  cli::PolemapOptions polemap;
  auto* sub_polemap = app.add_subcommand("polemap", "complex-plane map of the coefficient");
  add_particle(sub_polemap);
  sub_polemap->add_option("--kre-min", polemap.k_re_min)->capture_default_str();
  sub_polemap->add_option("--kre-max", polemap.k_re_max)->capture_default_str();
  sub_polemap->add_option("--kim-min", polemap.k_im_min)->capture_default_str();
  sub_polemap->add_option("--kim-max", polemap.k_im_max)->capture_default_str();
  sub_polemap->add_option("--nre", polemap.n_re, "grid columns")->capture_default_str();
  sub_polemap->add_option("--nim", polemap.n_im, "grid rows")->capture_default_str();

  cli::SweepOptions sweep;
  auto* sub_sweep = app.add_subcommand("sweep", "design-space sensitivity heat maps");
  add_particle(sub_sweep);
  sub_sweep->add_option("--rc-min", sweep.rc_min)->capture_default_str();
  sub_sweep->add_option("--rc-max", sweep.rc_max)->capture_default_str();
  sub_sweep->add_option("--rc-steps", sweep.rc_steps)->capture_default_str();
  sub_sweep->add_option("--ds-min", sweep.ds_min)->capture_default_str();
  sub_sweep->add_option("--ds-max", sweep.ds_max)->capture_default_str();
  sub_sweep->add_option("--ds-steps", sweep.ds_steps)->capture_default_str();
  sub_sweep->add_option("--target", sweep.target, "pole or zero")
      ->check(CLI::IsMember({"pole", "zero"}))
      ->capture_default_str();
  sub_sweep->add_option("--seed-re", sweep.seed_re, "seed Re k (1/m)")->capture_default_str();
  sub_sweep->add_option("--seed-im", sweep.seed_im, "seed Im k (1/m)")->capture_default_str();
  sub_sweep->add_option("--param", sweep.param, "perturbation parameter")->capture_default_str();
  sub_sweep->add_option("--check-fraction", sweep.check_fraction,
                        "fraction of cells cross-checked against the re-solve")
      ->capture_default_str();
  sub_sweep->add_option("--rng-seed", sweep.rng_seed)->capture_default_str();
  sub_sweep->add_flag("--no-resume{false}", sweep.resume, "disable the cell journal");

  cli::ShiftOptions shift;
  auto* sub_shift = app.add_subcommand("shift", "compare shift predictions at one singularity");
  add_particle(sub_shift);
  sub_shift->add_option("--target", shift.target)->check(CLI::IsMember({"pole", "zero"}))
      ->capture_default_str();
  sub_shift->add_option("--seed-re", shift.seed_re)->capture_default_str();
  sub_shift->add_option("--seed-im", shift.seed_im)->capture_default_str();
  sub_shift->add_option("--param", shift.param)->capture_default_str();
  sub_shift->add_option("--dalpha", shift.dalpha)->capture_default_str();

  cli::VerifyOptions verify;
  auto* sub_verify = app.add_subcommand("verify", "run an invariant suite");
  sub_verify->add_option("--suite", verify.suite,
                         "slab | identities | analytic-sphere | residues")
      ->check(CLI::IsMember({"slab", "identities", "analytic-sphere", "residues"}))
      ->capture_default_str();
  sub_verify->add_option("--count", verify.count, "random cases")->capture_default_str();
  sub_verify->add_option("--rng-seed", verify.rng_seed)->capture_default_str();

  cli::TrajectoryOptions traj;
  auto* sub_traj = app.add_subcommand("trajectory", "continuation along a parameter path");
  add_particle(sub_traj);
  sub_traj->add_option("--target", traj.target)->check(CLI::IsMember({"pole", "zero"}))
      ->capture_default_str();
  sub_traj->add_option("--seed-re", traj.seed_re)->capture_default_str();
  sub_traj->add_option("--seed-im", traj.seed_im)->capture_default_str();
  sub_traj->add_option("--param", traj.param, "r_c, d_s or n_b")->capture_default_str();
  sub_traj->add_option("--from", traj.from)->capture_default_str();
  sub_traj->add_option("--to", traj.to)->capture_default_str();
  sub_traj->add_option("--steps", traj.steps)->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  common.materials = materials;
  common.out_dir = out_dir;

  if (sub_spectrum->parsed()) return cli::cmd_spectrum(common, particle, spectrum);
  if (sub_polemap->parsed()) return cli::cmd_polemap(common, particle, polemap);
  if (sub_sweep->parsed()) return cli::cmd_sweep(common, particle, sweep);
  if (sub_shift->parsed()) return cli::cmd_shift(common, particle, shift);
  if (sub_verify->parsed()) return cli::cmd_verify(common, verify);
  if (sub_traj->parsed()) return cli::cmd_trajectory(common, particle, traj);
  return cli::kExitConfigError;
}

#include "gwshift/cli.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <iostream>
#include <random>

#include "gwshift/direct.hpp"
#include "gwshift/errors.hpp"
#include "gwshift/io.hpp"
#include "gwshift/resonance.hpp"
#include "gwshift/slab1d.hpp"
#include "gwshift/sweep.hpp"
#include "json.hpp"

namespace gwshift::cli {

using nlohmann::json;

namespace {

materials::MaterialLibrary load_library(const CommonOptions& common) {
  if (!std::filesystem::exists(common.materials))
    throw ConfigError("material library not found: " + common.materials.string());
  return materials::MaterialLibrary::load(common.materials);
}

mie::LayeredSphere build_particle(const ParticleOptions& p) {
  if (p.shell.empty() || p.ds <= 0.0)
    return mie::LayeredSphere::homogeneous(p.rc, p.core, p.background);
  return mie::LayeredSphere::core_shell(p.rc, p.ds, p.core, p.shell, p.background);
}

std::filesystem::path ensure_out(const CommonOptions& common) {
  std::filesystem::create_directories(common.out_dir);
  return common.out_dir;
}

std::string fd(double v) { return io::format_double(v); }

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumericalFailure;
  }
}

void write_report(const CommonOptions& common, const std::string& stem, const json& doc,
                  const std::string& text) {
  const auto out = ensure_out(common);
  if (common.format == "json") {
    std::ofstream f(out / (stem + ".json"));
    f << doc.dump(2) << "\n";
  } else {
    std::ofstream f(out / (stem + ".txt"));
    f << text;
  }
  std::cout << text;
}

}  // namespace

int cmd_spectrum(const CommonOptions& common, const ParticleOptions& popt,
                 const SpectrumOptions& opt) {
  return run_guarded([&]() {
    if (!(opt.k_max > opt.k_min) || opt.steps < 2)
      throw ConfigError("spectrum: need k_max > k_min and steps >= 2");
    const auto lib = load_library(common);
    const auto particle = build_particle(popt);
    const auto out = ensure_out(common);

    io::CsvWriter csv({"k_per_m", "sigma_ext_m2", "sigma_sca_m2", "sigma_abs_m2"});
    io::Series ext{"extinction", "#1f77b4", false, {}, {}};
    io::Series sca{"scattering", "#ff7f0e", true, {}, {}};
    io::Series abs{"absorption", "#2ca02c", false, {}, {}};
    double peak_k = 0.0, peak = -1.0;
    for (int s = 0; s < opt.steps; ++s) {
      const double k = opt.k_min + (opt.k_max - opt.k_min) * s / double(opt.steps - 1);
      const auto cs = mie::cross_sections(particle, lib, k, opt.nu_max);
      csv.add_row({fd(k), fd(cs.ext), fd(cs.sca), fd(cs.abs)});
      ext.x.push_back(k);
      ext.y.push_back(cs.ext);
      sca.x.push_back(k);
      sca.y.push_back(cs.sca);
      abs.x.push_back(k);
      abs.y.push_back(cs.abs);
      if (cs.ext > peak) {
        peak = cs.ext;
        peak_k = k;
      }
    }
    csv.write(out / "spectrum.csv");
    io::write_line_plot(out / "spectrum.svg",
                        {"cross sections", "k (1/m)", "sigma (m^2)", 720, 480, false},
                        {ext, sca, abs});
    std::cout << "spectrum: " << opt.steps << " samples -> " << (out / "spectrum.csv").string()
              << "\n       extinction peak at k = " << fd(peak_k) << " 1/m\n";
    return kExitOk;
  });
}

int cmd_polemap(const CommonOptions& common, const ParticleOptions& popt,
                const PolemapOptions& opt) {
  return run_guarded([&]() {
    if (opt.n_re < 8 || opt.n_im < 8) throw ConfigError("polemap: grid too small");
    const auto lib = load_library(common);
    const auto particle = build_particle(popt);
    const auto out = ensure_out(common);
    const resonance::ParticleModel model(particle, lib, popt.nu);

    // |a_nu| over the complex-k rectangle; dispersion anchored per column
    io::CsvWriter csv({"k_re_per_m", "k_im_per_m", "log10_abs_a"});
    std::vector<double> vals(std::size_t(opt.n_re) * opt.n_im, NAN);
    std::vector<double> xe(opt.n_re + 1), ye(opt.n_im + 1);
    for (int i = 0; i <= opt.n_re; ++i)
      xe[i] = opt.k_re_min + (opt.k_re_max - opt.k_re_min) * i / double(opt.n_re);
    for (int j = 0; j <= opt.n_im; ++j)
      ye[j] = opt.k_im_min + (opt.k_im_max - opt.k_im_min) * j / double(opt.n_im);

    struct Extremum {
      Complex k;
      double mag;
    };
    std::vector<Extremum> g_minima, f_minima;
    std::vector<std::vector<double>> gmag(opt.n_re, std::vector<double>(opt.n_im));
    std::vector<std::vector<double>> fmag(opt.n_re, std::vector<double>(opt.n_im));
    for (int i = 0; i < opt.n_re; ++i) {
      const double kre = 0.5 * (xe[i] + xe[i + 1]);
      const auto af = model.coefficient_function(kre);
      const auto gf = model.denominator_function(kre);
      const auto ff = model.numerator_function(kre);
      for (int j = 0; j < opt.n_im; ++j) {
        const double kim = 0.5 * (ye[j] + ye[j + 1]);
        const Complex k{kre, kim};
        const double a = std::abs(af(k));
        vals[std::size_t(i) * opt.n_im + j] = std::log10(std::max(a, 1e-300));
        gmag[i][j] = std::abs(gf(k));
        fmag[i][j] = std::abs(ff(k));
        csv.add_row({fd(kre), fd(kim), fd(vals[std::size_t(i) * opt.n_im + j])});
      }
    }
    csv.write(out / "polemap.csv");

    // seeded searches from interior grid minima, deduplicated, winding-checked
    auto collect = [&](const std::vector<std::vector<double>>& mag, bool pole) {
      std::vector<Extremum> found;
      for (int i = 1; i + 1 < opt.n_re; ++i) {
        for (int j = 1; j + 1 < opt.n_im; ++j) {
          const double m = mag[i][j];
          if (m < mag[i - 1][j] && m < mag[i + 1][j] && m < mag[i][j - 1] && m < mag[i][j + 1]) {
            const Complex seed{0.5 * (xe[i] + xe[i + 1]), 0.5 * (ye[j] + ye[j + 1])};
            try {
              const auto loc = pole ? resonance::locate_pole(model, seed)
                                    : resonance::locate_zero(model, seed);
              const Complex root = loc.record.location;
              if (root.real() < opt.k_re_min || root.real() > opt.k_re_max ||
                  root.imag() < opt.k_im_min || root.imag() > opt.k_im_max)
                continue;
              bool dup = false;
              for (const auto& e : found)
                if (std::abs(e.k - root) < 1e-4 * std::abs(root)) dup = true;
              if (!dup) found.push_back({root, m});
            } catch (const Error&) {
            }
          }
        }
      }
      return found;
    };
    g_minima = collect(gmag, true);
    f_minima = collect(fmag, false);

    io::CsvWriter markers({"kind", "k_re_per_m", "k_im_per_m", "q_factor"});
    io::HeatmapSpec hm;
    hm.title = "log10 |a_" + std::to_string(popt.nu) + "|";
    hm.x_label = "Re k (1/m)";
    hm.y_label = "Im k (1/m)";
    hm.x_edges = xe;
    hm.y_edges = ye;
    hm.values = vals;
    for (const auto& e : g_minima) {
      markers.add_row({"pole", fd(e.k.real()), fd(e.k.imag()),
                       fd(e.k.real() / (2.0 * std::abs(e.k.imag())))});
      hm.markers.push_back({e.k.real(), e.k.imag(), "#ff3030", "pole"});
    }
    for (const auto& e : f_minima) {
      markers.add_row({"zero", fd(e.k.real()), fd(e.k.imag()),
                       fd(e.k.real() / (2.0 * std::abs(e.k.imag())))});
      hm.markers.push_back({e.k.real(), e.k.imag(), "#40c0ff", "zero"});
    }
    markers.write(out / "polemap_markers.csv");
    io::write_heatmap(out / "polemap.svg", hm);

    // real-axis cut of the first two multipole magnitudes
    io::CsvWriter cut({"k_per_m", "abs_a1", "abs_a2"});
    const resonance::ParticleModel m2(particle, lib, 2);
    for (int i = 0; i < opt.n_re; ++i) {
      const double kre = 0.5 * (xe[i] + xe[i + 1]);
      const auto a1 = model.coefficient_function(kre);
      const auto a2 = m2.coefficient_function(kre);
      cut.add_row({fd(kre), fd(std::abs(a1({kre, 0.0}))), fd(std::abs(a2({kre, 0.0})))});
    }
    cut.write(out / "polemap_cut.csv");

    std::cout << "polemap: " << g_minima.size() << " pole(s), " << f_minima.size()
              << " zero(s) marked -> " << (out / "polemap.svg").string() << "\n";
    return kExitOk;
  });
}

int cmd_sweep(const CommonOptions& common, const ParticleOptions& popt, const SweepOptions& opt) {
  return run_guarded([&]() {
    const auto lib = load_library(common);
    const auto out = ensure_out(common);

    sweep::SweepConfig cfg;
    cfg.particle = build_particle(popt);
    cfg.rc_min = opt.rc_min;
    cfg.rc_max = opt.rc_max;
    cfg.rc_steps = opt.rc_steps;
    cfg.ds_min = opt.ds_min;
    cfg.ds_max = opt.ds_max;
    cfg.ds_steps = opt.ds_steps;
    cfg.target = (opt.target == "zero") ? cplane::PoleRecord::Kind::zero
                                        : cplane::PoleRecord::Kind::pole;
    cfg.seed_k = {opt.seed_re, opt.seed_im};
    cfg.perturb_param = opt.param;
    cfg.direct_check_fraction = opt.check_fraction;
    cfg.rng_seed = opt.rng_seed;
    cfg.threads = common.threads;
    cfg.nu = popt.nu;
    if (opt.resume) cfg.journal = out / "journal.jsonl";

    const auto result = sweep::run_sweep(cfg, lib);

    io::CsvWriter csv({"r_c_m", "d_s_m", "status", "k_re_per_m", "k_im_per_m", "q_factor",
                       "eta_re", "eta_im", "abs_re_eta", "abs_im_eta", "direct_rel_diff",
                       "error"});
    std::vector<double> re_vals(result.cells.size(), NAN), im_vals(result.cells.size(), NAN);
    for (int i = 0; i < cfg.rc_steps; ++i) {
      for (int j = 0; j < cfg.ds_steps; ++j) {
        const auto& c = result.at(i, j);
        if (c.ok) {
          re_vals[std::size_t(i) * cfg.ds_steps + j] = std::abs(c.eta.real());
          im_vals[std::size_t(i) * cfg.ds_steps + j] = std::abs(c.eta.imag());
        }
        csv.add_row({fd(c.r_c), fd(c.d_s), c.ok ? "ok" : "failed", fd(c.k.real()),
                     fd(c.k.imag()), fd(c.q_factor), fd(c.eta.real()), fd(c.eta.imag()),
                     fd(std::abs(c.eta.real())), fd(std::abs(c.eta.imag())),
                     fd(c.direct_rel_diff), c.error});
      }
    }
    csv.write(out / "sweep.csv");

    // cell-edge grids in nanometers for the plots
    auto edges = [](double lo, double hi, int n) {
      std::vector<double> e(n + 1);
      const double h = (hi - lo) / (n - 1);
      for (int i = 0; i <= n; ++i) e[i] = (lo - 0.5 * h + i * h) * 1e9;
      return e;
    };
    io::HeatmapSpec hm_re;
    hm_re.title = "|Re eta_b| (" + opt.target + ")";
    hm_re.x_label = "core radius (nm)";
    hm_re.y_label = "shell thickness (nm)";
    hm_re.x_edges = edges(cfg.rc_min, cfg.rc_max, cfg.rc_steps);
    hm_re.y_edges = edges(cfg.ds_min, cfg.ds_max, cfg.ds_steps);
    hm_re.values = re_vals;
    io::HeatmapSpec hm_im = hm_re;
    hm_im.title = "|Im eta_b| (" + opt.target + ")";
    hm_im.values = im_vals;
    const auto amax_re = result.argmax_abs_re_eta();
    const auto amax_im = result.argmax_abs_im_eta();
    if (amax_re) hm_re.markers.push_back({amax_re->r_c * 1e9, amax_re->d_s * 1e9, "#ffffff", "max"});
    if (amax_im) hm_im.markers.push_back({amax_im->r_c * 1e9, amax_im->d_s * 1e9, "#ffffff", "max"});
    io::write_heatmap(out / "eta_re.svg", hm_re);
    io::write_heatmap(out / "eta_im.svg", hm_im);

    json summary{{"schema_version", kSchemaVersion},
                 {"target", opt.target},
                 {"grid", {{"rc_min", cfg.rc_min}, {"rc_max", cfg.rc_max},
                           {"rc_steps", cfg.rc_steps}, {"ds_min", cfg.ds_min},
                           {"ds_max", cfg.ds_max}, {"ds_steps", cfg.ds_steps}}},
                 {"failures", result.failures()},
                 {"computed_this_run", result.computed_this_run},
                 {"rng_seed", cfg.rng_seed}};
    if (amax_re)
      summary["argmax_abs_re_eta"] = {{"r_c", amax_re->r_c},
                                      {"d_s", amax_re->d_s},
                                      {"value", std::abs(amax_re->eta.real())},
                                      {"k_re", amax_re->k.real()},
                                      {"k_im", amax_re->k.imag()}};
    if (amax_im)
      summary["argmax_abs_im_eta"] = {{"r_c", amax_im->r_c},
                                      {"d_s", amax_im->d_s},
                                      {"value", std::abs(amax_im->eta.imag())}};
    {
      std::ofstream f(out / "summary.json");
      f << summary.dump(2) << "\n";
    }
    std::cout << "sweep: " << result.cells.size() - result.failures() << "/"
              << result.cells.size() << " cells ok (" << result.computed_this_run
              << " computed this run)\n";
    if (amax_re)
      std::cout << "  max |Re eta| = " << fd(std::abs(amax_re->eta.real())) << " at r_c = "
                << fd(amax_re->r_c * 1e9) << " nm, d_s = " << fd(amax_re->d_s * 1e9) << " nm\n";
    if (amax_im)
      std::cout << "  max |Im eta| = " << fd(std::abs(amax_im->eta.imag())) << " at r_c = "
                << fd(amax_im->r_c * 1e9) << " nm, d_s = " << fd(amax_im->d_s * 1e9) << " nm\n";
    return kExitOk;
  });
}

int cmd_shift(const CommonOptions& common, const ParticleOptions& popt, const ShiftOptions& opt) {
  return run_guarded([&]() {
    const auto lib = load_library(common);
    const auto particle = build_particle(popt);
    const resonance::ParticleModel model(particle, lib, popt.nu);
    const Complex seed{opt.seed_re, opt.seed_im};
    const bool is_zero = (opt.target == "zero");
    const auto loc = is_zero ? resonance::locate_zero(model, seed)
                             : resonance::locate_pole(model, seed);

    const auto gws = ws::pole_shift(loc.fn, loc.record.location, opt.param, opt.dalpha,
                                    ws::ShiftMethod::gws_residue);
    const auto ratio = ws::pole_shift(loc.fn, loc.record.location, opt.param, opt.dalpha,
                                      ws::ShiftMethod::ratio_form);
    const auto dir =
        direct::pole_shift_direct(loc.fn, loc.record.location, opt.param, opt.dalpha);

    auto rel = [](Complex a, Complex b) {
      return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
    };
    std::ostringstream text;
    text << "shift comparison (" << opt.target << " at k = " << fd(loc.record.location.real())
         << " + " << fd(loc.record.location.imag()) << "i 1/m, Q = " << fd(loc.record.q_factor)
         << ")\n"
         << "  param " << opt.param << ", dalpha = " << fd(opt.dalpha) << "\n"
         << "  gws_residue : dk = " << fd(gws.dk.real()) << " + " << fd(gws.dk.imag()) << "i\n"
         << "  ratio_form  : dk = " << fd(ratio.dk.real()) << " + " << fd(ratio.dk.imag())
         << "i\n"
         << "  direct      : dk = " << fd(dir.dk.real()) << " + " << fd(dir.dk.imag()) << "i\n"
         << "  rel diff gws/ratio  = " << fd(rel(gws.dk, ratio.dk)) << "\n"
         << "  rel diff gws/direct = " << fd(rel(gws.dk, dir.dk)) << "\n"
         << "  rel diff ratio/direct = " << fd(rel(ratio.dk, dir.dk)) << "\n";

    json doc{{"schema_version", kSchemaVersion},
             {"target", opt.target},
             {"param", opt.param},
             {"dalpha", opt.dalpha},
             {"k", {loc.record.location.real(), loc.record.location.imag()}},
             {"q_factor", loc.record.q_factor},
             {"gws_residue", {gws.dk.real(), gws.dk.imag()}},
             {"ratio_form", {ratio.dk.real(), ratio.dk.imag()}},
             {"direct", {dir.dk.real(), dir.dk.imag()}},
             {"rel_diff_gws_ratio", rel(gws.dk, ratio.dk)},
             {"rel_diff_gws_direct", rel(gws.dk, dir.dk)},
             {"rel_diff_ratio_direct", rel(ratio.dk, dir.dk)}};
    write_report(common, "shift", doc, text.str());
    return kExitOk;
  });
}

int cmd_trajectory(const CommonOptions& common, const ParticleOptions& popt,
                   const TrajectoryOptions& opt) {
  return run_guarded([&]() {
    if (opt.steps < 2) throw ConfigError("trajectory: steps >= 2 required");
    const auto lib = load_library(common);
    const auto particle = build_particle(popt);
    const auto out = ensure_out(common);
    const resonance::ParticleModel model(particle, lib, popt.nu);
    const bool is_zero = (opt.target == "zero");

    // continuation: each path point re-anchors the tabulated dispersion
    std::vector<double> path(opt.steps);
    for (int s = 0; s < opt.steps; ++s)
      path[s] = opt.from + (opt.to - opt.from) * s / double(opt.steps - 1);

    io::CsvWriter csv({"param_value", "k_re_per_m", "k_im_per_m", "q_factor"});
    io::Series line{"trajectory", "#1f77b4", false, {}, {}};
    Complex seed{opt.seed_re, opt.seed_im};
    for (int s = 0; s < opt.steps; ++s) {
      ParticleOptions p2 = popt;
      if (opt.param == "r_c")
        p2.rc = path[s];
      else if (opt.param == "d_s")
        p2.ds = path[s];
      else if (opt.param != "n_b")
        throw ConfigError("trajectory: param must be r_c, d_s or n_b");
      resonance::ParticleModel m(build_particle(p2), lib, popt.nu);
      resonance::LocateOptions lopt;
      auto locate = [&](Complex sd) {
        if (opt.param == "n_b") {
          // offset the background index through the scattering function
          auto fn = is_zero ? m.numerator_function(sd.real()) : m.denominator_function(sd.real());
          fn.set_param("n_b", path[s]);
          const auto r = cplane::newton_root_full([&](Complex k) { return fn(k); }, sd,
                                                  lopt.newton);
          return r.root;
        }
        const auto loc = is_zero ? resonance::locate_zero(m, sd, lopt)
                                 : resonance::locate_pole(m, sd, lopt);
        return loc.record.location;
      };
      seed = locate(seed);
      csv.add_row({fd(path[s]), fd(seed.real()), fd(seed.imag()),
                   fd(seed.real() / (2.0 * std::abs(seed.imag())))});
      line.x.push_back(seed.real());
      line.y.push_back(seed.imag());
    }
    csv.write(out / "trajectory.csv");
    io::write_line_plot(out / "trajectory.svg",
                        {"singularity trajectory (" + opt.param + ")", "Re k (1/m)",
                         "Im k (1/m)", 640, 480, false},
                        {line});
    std::cout << "trajectory: " << opt.steps << " points -> "
              << (out / "trajectory.csv").string() << "\n";
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------
// verification suites

namespace {

struct SuiteReport {
  int checks = 0, failures = 0;
  std::ostringstream text;
  json items = json::array();

  void add(const std::string& name, bool pass, double value, double bound) {
    ++checks;
    if (!pass) ++failures;
    text << (pass ? "PASS" : "FAIL") << "  " << name << "  (" << io::format_double(value)
         << " vs bound " << io::format_double(bound) << ")\n";
    items.push_back({{"name", name}, {"pass", pass}, {"value", value}, {"bound", bound}});
  }
};

slab1d::Slab1D random_slab(std::mt19937_64& rng, bool lossy) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  slab1d::Slab1D s;
  const int n = 1 + int(u(rng) * 3);
  for (int l = 0; l < n; ++l) {
    const double im = lossy ? 0.8 * u(rng) : 0.0;
    s.layers.push_back({(0.1 + 1.2 * u(rng)) * 1e-6, Complex{1.0 + 8.0 * u(rng), im}});
  }
  return s;
}

Complex random_omega(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double re = (1.0 + 3.0 * u(rng)) * 1e15;
  return {re, (2.0 * u(rng) - 1.0) * 0.2 * re};
}

void suite_slab(SuiteReport& rep, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst_rec = 0, worst_unit = 0, worst_cont = 0, worst_poynting = 0;
  for (int t = 0; t < count; ++t) {
    const bool lossy = t % 2 == 1;
    const auto s = random_slab(rng, lossy);
    const Complex w = random_omega(rng);
    const auto S = slab1d::slab_smatrix(s, w);
    worst_rec = std::max(worst_rec, std::abs(S(0, 1) - S(1, 0)) / S.norm());
    if (!lossy) {
      const auto Sr = slab1d::slab_smatrix(s, {w.real(), 0.0});
      worst_unit =
          std::max(worst_unit, (Sr.adjoint() * Sr - slab1d::Mat2::identity()).norm());
    }
    for (int port = 0; port < 2; ++port)
      worst_cont = std::max(worst_cont,
                            slab1d::internal_fields(s, w, port).continuity_residual(s));
    worst_poynting = std::max(worst_poynting, slab1d::poynting_residual(s, w));
  }
  rep.add("reciprocity S = S^T", worst_rec < 1e-12, worst_rec, 1e-12);
  rep.add("lossless unitarity at real omega", worst_unit < 1e-12, worst_unit, 1e-12);
  rep.add("interface continuity", worst_cont < 1e-12, worst_cont, 1e-12);
  rep.add("bilinear flux balance", worst_poynting < 1e-10, worst_poynting, 1e-10);
  const auto S0 = slab1d::slab_smatrix({}, {2e15, 0.0});
  const double empty_res = (S0.transpose() * S0 - slab1d::Mat2::identity()).norm();
  rep.add("zero-thickness exactness", empty_res < 1e-15, empty_res, 1e-15);
}

void suite_identities(SuiteReport& rep, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst_gram = 0, worst_ws = 0;
  for (int t = 0; t < count; ++t) {
    const auto s = random_slab(rng, t % 2 == 1);
    const Complex w = random_omega(rng);
    worst_gram = std::max(
        worst_gram, slab1d::verify_identity(s, w, slab1d::IdentityTag::unconj_gram).residual);
    worst_ws = std::max(
        worst_ws, slab1d::verify_identity(s, w, slab1d::IdentityTag::unconj_ws).residual);
  }
  rep.add("unconjugated gram identity", worst_gram < 1e-8, worst_gram, 1e-8);
  rep.add("unconjugated derivative identity", worst_ws < 1e-6, worst_ws, 1e-6);

  slab1d::Slab1D lossless;
  lossless.layers = {{0.5e-6, {6.25, 0.0}}, {0.35e-6, {2.0, 0.0}}};
  slab1d::Slab1D lossy = lossless;
  lossy.layers[0].eps_rel += Complex{0.0, 0.35};
  const Complex w_real{2.0e15, 0.0};
  const double a_lossless =
      slab1d::verify_identity(lossless, w_real, slab1d::IdentityTag::conj_gram).residual;
  const double a_lossy =
      slab1d::verify_identity(lossy, w_real, slab1d::IdentityTag::conj_gram).residual;
  rep.add("conjugated gram exact for lossless at real omega", a_lossless < 1e-12, a_lossless,
          1e-12);
  rep.add("conjugated gram breaks with absorption", a_lossy > 1e-3, a_lossy, 1e-3);
}

void suite_analytic_sphere(SuiteReport& rep) {
  materials::MaterialLibrary lib;
  lib.add("hi", materials::DispersionModel(materials::ConstantModel{{3.5, 0.0}}));
  lib.add("vacuum", materials::DispersionModel(materials::ConstantModel{{1.0, 0.0}}));
  const double r_c = 100e-9;
  const resonance::ParticleModel model(mie::LayeredSphere::homogeneous(r_c, "hi", "vacuum"),
                                       lib, 1);
  const Complex seed = Complex{1.2094368765, -0.1214042093} / r_c;
  const auto loc = resonance::locate_pole(model, seed);
  const Complex analytic = ws::radius_sensitivity_analytic(loc.record.location, r_c);

  const double dr = 1e-16;
  const auto gws = ws::pole_shift(loc.fn, loc.record.location, "r_c", dr);
  const auto ratio =
      ws::pole_shift(loc.fn, loc.record.location, "r_c", dr, ws::ShiftMethod::ratio_form);
  const auto dir = direct::pole_shift_direct(loc.fn, loc.record.location, "r_c", 1e-6 * r_c);
  auto rel = [](Complex a, Complex b) { return std::abs(a - b) / std::abs(b); };
  rep.add("radius law, residue method", rel(gws.dk / dr, analytic) < 1e-6,
          rel(gws.dk / dr, analytic), 1e-6);
  rep.add("radius law, ratio form", rel(ratio.dk / dr, analytic) < 1e-6,
          rel(ratio.dk / dr, analytic), 1e-6);
  rep.add("radius law, direct re-solve", rel(dir.dk / (1e-6 * r_c), analytic) < 2e-6,
          rel(dir.dk / (1e-6 * r_c), analytic), 2e-6);

  // continuation keeps k_p r_c constant
  auto family = [&](double rc) {
    auto g = model.denominator_function(seed.real());
    g.set_param("r_c", rc);
    return cplane::FuncC([g](Complex k) { return g(k); });
  };
  std::vector<double> path;
  for (int i = 0; i <= 18; ++i) path.push_back(r_c * (0.8 + 0.45 * i / 18.0));
  const auto recs = cplane::track(family, path, seed / 0.8);
  double worst = 0.0;
  const Complex C0 = recs.front().location * path.front();
  for (std::size_t i = 0; i < recs.size(); ++i)
    worst = std::max(worst, std::abs(recs[i].location * path[i] - C0) / std::abs(C0));
  rep.add("hyperbola k_p r_c constant", worst < 1e-8, worst, 1e-8);
}

void suite_residues(SuiteReport& rep, const CommonOptions& common) {
  // the k log-derivative residue must be i at every located singularity
  materials::MaterialLibrary constant;
  constant.add("hi", materials::DispersionModel(materials::ConstantModel{{3.5, 0.0}}));
  constant.add("vacuum", materials::DispersionModel(materials::ConstantModel{{1.0, 0.0}}));
  struct Case {
    std::string name;
    double residual;
  };
  std::vector<Case> cases;

  const resonance::ParticleModel sphere(
      mie::LayeredSphere::homogeneous(100e-9, "hi", "vacuum"), constant, 1);
  const auto l1 = resonance::locate_pole(sphere, Complex{1.2094368765, -0.1214042093} / 100e-9);
  cases.push_back({"nondispersive sphere pole", std::abs(l1.record.residue_of_trace - kI)});

  if (std::filesystem::exists(common.materials)) {
    const auto lib = materials::MaterialLibrary::load(common.materials);
    const auto particle = mie::LayeredSphere::core_shell(60e-9, 10e-9, "silica", "gold", "water");
    const resonance::ParticleModel model(particle, lib, 1);
    const auto lp = resonance::locate_pole(model, {0.71e7, -0.07e7});
    cases.push_back({"core-shell resonance pole", std::abs(lp.record.residue_of_trace - kI)});
    const auto lz = resonance::locate_zero(model, {1.2e7, -0.1e7});
    cases.push_back({"core-shell zero (inverted)", std::abs(lz.record.residue_of_trace - kI)});
  }
  for (const auto& c : cases) rep.add("residue identity: " + c.name, c.residual < 1e-6,
                                      c.residual, 1e-6);
}

}  // namespace

int cmd_verify(const CommonOptions& common, const VerifyOptions& opt) {
  return run_guarded([&]() {
    SuiteReport rep;
    if (opt.suite == "slab") {
      suite_slab(rep, opt.count, opt.rng_seed);
    } else if (opt.suite == "identities") {
      suite_identities(rep, opt.count, opt.rng_seed);
    } else if (opt.suite == "analytic-sphere") {
      suite_analytic_sphere(rep);
    } else if (opt.suite == "residues") {
      suite_residues(rep, common);
    } else {
      throw ConfigError("verify: unknown suite '" + opt.suite + "'");
    }
    json doc{{"schema_version", kSchemaVersion},
             {"suite", opt.suite},
             {"checks", rep.checks},
             {"failures", rep.failures},
             {"items", rep.items}};
    std::ostringstream head;
    head << "verify suite '" << opt.suite << "': " << rep.checks - rep.failures << "/"
         << rep.checks << " checks passed\n"
         << rep.text.str();
    write_report(common, "verify_" + opt.suite, doc, head.str());
    return rep.failures == 0 ? kExitOk : kExitVerificationFailure;
  });
}

}  // namespace gwshift::cli

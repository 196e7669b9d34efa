#include "gwshift/sweep.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <thread>

#include "gwshift/direct.hpp"
#include "gwshift/errors.hpp"
#include "json.hpp"

namespace gwshift::sweep {

using nlohmann::json;

void SweepConfig::validate() const {
  particle.validate();
  if (particle.radii.size() != 2)
    throw ConfigError("sweep: a two-layer (core/shell) particle template is required");
  if (!(rc_min > 0.0) || !(ds_min > 0.0) || rc_max <= rc_min || ds_max <= ds_min)
    throw ConfigError("sweep: grid bounds must be positive with max > min");
  if (rc_steps < 2 || ds_steps < 2) throw ConfigError("sweep: need at least 2 steps per axis");
  if (!(seed_k.real() > 0.0)) throw ConfigError("sweep: seed wavenumber must have Re(k) > 0");
  if (threads < 1) throw ConfigError("sweep: threads must be >= 1");
}

double SweepConfig::rc_at(int i) const {
  return rc_min + (rc_max - rc_min) * i / double(rc_steps - 1);
}
double SweepConfig::ds_at(int j) const {
  return ds_min + (ds_max - ds_min) * j / double(ds_steps - 1);
}

std::size_t HeatmapResult::failures() const {
  std::size_t n = 0;
  for (const auto& c : cells) n += !c.ok;
  return n;
}

namespace {

std::optional<CellResult> argmax_by(const HeatmapResult& r, bool imaginary) {
  std::optional<CellResult> best;
  for (const auto& c : r.cells) {
    if (!c.ok) continue;
    const double v = imaginary ? std::abs(c.eta.imag()) : std::abs(c.eta.real());
    const double b = !best ? -1.0
                           : (imaginary ? std::abs(best->eta.imag()) : std::abs(best->eta.real()));
    if (v > b) best = c;
  }
  return best;
}

// deterministic per-cell uniform deviate for the direct cross-check draw
double cell_hash_uniform(std::uint64_t seed, int i, int j) {
  std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL + std::uint64_t(i) * 0xbf58476d1ce4e5b9ULL +
                            std::uint64_t(j) * 0x94d049bb133111ebULL);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return double(x >> 11) / double(1ULL << 53);
}

json cell_to_json(const CellResult& c) {
  return json{{"i", c.i},
              {"j", c.j},
              {"r_c", c.r_c},
              {"d_s", c.d_s},
              {"ok", c.ok},
              {"k_re", c.k.real()},
              {"k_im", c.k.imag()},
              {"q", c.q_factor},
              {"eta_re", c.eta.real()},
              {"eta_im", c.eta.imag()},
              {"direct_rel_diff", c.direct_rel_diff},
              {"error", c.error}};
}

CellResult cell_from_json(const json& jd) {
  CellResult c;
  c.i = jd.at("i").get<int>();
  c.j = jd.at("j").get<int>();
  c.r_c = jd.at("r_c").get<double>();
  c.d_s = jd.at("d_s").get<double>();
  c.ok = jd.at("ok").get<bool>();
  c.k = {jd.at("k_re").get<double>(), jd.at("k_im").get<double>()};
  c.q_factor = jd.at("q").get<double>();
  c.eta = {jd.at("eta_re").get<double>(), jd.at("eta_im").get<double>()};
  c.direct_rel_diff = jd.at("direct_rel_diff").get<double>();
  c.error = jd.at("error").get<std::string>();
  return c;
}

struct Journal {
  std::filesystem::path path;
  std::ofstream out;
  std::mutex mu;

  explicit Journal(const std::filesystem::path& p) : path(p) {
    if (p.empty()) return;
    std::filesystem::create_directories(p.parent_path().empty() ? "." : p.parent_path());
    out.open(p, std::ios::app);
    if (!out) throw ConfigError("sweep: cannot open journal " + p.string());
  }
  void append(const CellResult& c) {
    if (path.empty()) return;
    const std::string line = cell_to_json(c).dump() + "\n";
    std::lock_guard<std::mutex> lock(mu);
    out << line;
    out.flush();
  }
};

struct CellTask {
  resonance::ParticleModel model;
  Complex seed;
};

}  // namespace

HeatmapResult run_sweep(const SweepConfig& config, const materials::MaterialLibrary& lib) {
  config.validate();
  const int NR = config.rc_steps, ND = config.ds_steps;

  HeatmapResult result;
  result.config = config;
  result.cells.resize(std::size_t(NR) * ND);
  std::vector<char> done(std::size_t(NR) * ND, 0);
  auto idx = [&](int i, int j) { return std::size_t(i) * ND + j; };

  // resume from the journal when present
  if (!config.journal.empty() && std::filesystem::exists(config.journal)) {
    std::ifstream in(config.journal);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      json jd = json::parse(line, nullptr, false);
      if (jd.is_discarded()) continue;  // torn tail write
      const CellResult c = cell_from_json(jd);
      if (c.i < 0 || c.i >= NR || c.j < 0 || c.j >= ND) continue;
      result.cells[idx(c.i, c.j)] = c;
      done[idx(c.i, c.j)] = 1;
    }
  }
  Journal journal(config.journal);

  // anchor: track the singularity from the template particle to the grid
  // corner nearest to it, then flood the grid by continuation
  const double rc0 = config.particle.core_radius();
  const double ds0 = config.particle.shell_thickness();
  auto nearest_index = [](double v, double lo, double hi, int n) {
    const double t = (v - lo) / (hi - lo) * (n - 1);
    return std::clamp(int(std::lround(t)), 0, n - 1);
  };
  const int i0 = nearest_index(rc0, config.rc_min, config.rc_max, NR);
  const int j0 = nearest_index(ds0, config.ds_min, config.ds_max, ND);

  auto make_model = [&](double rc, double ds) {
    mie::LayeredSphere p = config.particle;
    p.radii = {rc, rc + ds};
    return resonance::ParticleModel(p, lib, config.nu);
  };
  auto locate_cell = [&](double rc, double ds, Complex seed) {
    const resonance::ParticleModel model = make_model(rc, ds);
    return (config.target == cplane::PoleRecord::Kind::pole)
               ? resonance::locate_pole(model, seed)
               : resonance::locate_zero(model, seed);
  };

  // continuation path template particle -> corner cell, bisected on failure
  Complex corner_seed = config.seed_k;
  {
    const double rc1 = config.rc_at(i0), ds1 = config.ds_at(j0);
    const int steps = 24;
    Complex seed = config.seed_k;
    double t_done = 0.0;
    double dt = 1.0 / steps;
    int guard = 0;
    while (t_done < 1.0) {
      const double t = std::min(1.0, t_done + dt);
      const double rc = rc0 + (rc1 - rc0) * t;
      const double ds = ds0 + (ds1 - ds0) * t;
      try {
        const auto loc = locate_cell(rc, ds, seed);
        seed = loc.record.location;
        t_done = t;
        dt = std::min(1.0 - t_done, 2.0 * dt);
      } catch (const Error&) {
        dt *= 0.5;
        if (++guard > 60)
          throw NumericalFailure("sweep: continuation to the grid corner lost the singularity");
      }
    }
    corner_seed = seed;
  }

  std::atomic<std::size_t> computed{0};

  auto solve_one = [&](int i, int j, Complex seed) {
    CellResult c;
    c.i = i;
    c.j = j;
    c.r_c = config.rc_at(i);
    c.d_s = config.ds_at(j);
    try {
      const auto loc = locate_cell(c.r_c, c.d_s, seed);
      c.k = loc.record.location;
      c.q_factor = loc.record.q_factor;
      const auto eta =
          ws::sensitivity_eta(loc.fn, loc.record, config.perturb_param);
      c.eta = eta.eta;
      c.ok = true;
      if (cell_hash_uniform(config.rng_seed, i, j) < config.direct_check_fraction) {
        const double da = config.direct_check_dalpha;
        const auto gws = ws::pole_shift(loc.fn, c.k, config.perturb_param, da);
        const auto dir = gwshift::direct::pole_shift_direct(loc.fn, c.k, config.perturb_param, da);
        c.direct_rel_diff = std::abs(gws.dk - dir.dk) / std::max(std::abs(dir.dk), 1e-300);
      }
    } catch (const std::exception& e) {
      c.ok = false;
      c.error = e.what();
    }
    return c;
  };

  // flood outward from the corner: cells at the same L1 distance are
  // independent (their seeds live on the previous shell) and run in parallel
  const int max_dist = std::abs(NR - 1 - i0) + std::abs(ND - 1 - j0) + i0 + j0;
  for (int dist = 0; dist <= max_dist; ++dist) {
    std::vector<std::pair<int, int>> shell;
    for (int i = 0; i < NR; ++i) {
      const int dj = dist - std::abs(i - i0);
      if (dj < 0) continue;
      for (int j : {j0 - dj, j0 + dj}) {
        if (j < 0 || j >= ND) continue;
        if (dj == 0 && j != j0) continue;
        shell.push_back({i, j});
        if (dj == 0) break;
      }
    }
    auto seed_for = [&](int i, int j) -> Complex {
      // deterministic preference: step toward the corner in i first, else j
      if (i != i0) {
        const int ni = i + (i0 > i ? 1 : -1);
        if (done[idx(ni, j)] && result.cells[idx(ni, j)].ok) return result.cells[idx(ni, j)].k;
      }
      if (j != j0) {
        const int nj = j + (j0 > j ? 1 : -1);
        if (done[idx(i, nj)] && result.cells[idx(i, nj)].ok) return result.cells[idx(i, nj)].k;
      }
      if (i != i0 && j != j0) {
        const int ni = i + (i0 > i ? 1 : -1);
        const int nj = j + (j0 > j ? 1 : -1);
        if (done[idx(ni, nj)] && result.cells[idx(ni, nj)].ok)
          return result.cells[idx(ni, nj)].k;
      }
      return corner_seed;
    };

    std::vector<std::pair<int, int>> todo;
    for (auto [i, j] : shell)
      if (!done[idx(i, j)]) todo.push_back({i, j});
    if (todo.empty()) continue;

    const int nthreads = std::min<int>(config.threads, int(todo.size()));
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        const std::size_t t = next.fetch_add(1);
        if (t >= todo.size()) break;
        const auto [i, j] = todo[t];
        CellResult c = solve_one(i, j, seed_for(i, j));
        result.cells[idx(i, j)] = c;
        journal.append(c);
        computed.fetch_add(1);
      }
    };
    if (nthreads == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    for (auto [i, j] : todo) done[idx(i, j)] = 1;
  }

  result.computed_this_run = computed.load();
  return result;
}

std::optional<CellResult> HeatmapResult::argmax_abs_re_eta() const {
  return argmax_by(*this, false);
}
std::optional<CellResult> HeatmapResult::argmax_abs_im_eta() const {
  return argmax_by(*this, true);
}

}  // namespace gwshift::sweep

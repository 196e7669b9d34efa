#include "gwshift/complexplane.hpp"

#include <cmath>

namespace gwshift::cplane {

namespace {

bool finite(Complex v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

Complex fd_derivative(const FuncC& f, Complex k, double h) {
  return (f(k + h) - f(k - h)) / (2.0 * h);
}

}  // namespace

NewtonResult newton_root_full(const FuncC& f, Complex k0, const NewtonOptions& opt) {
  if (!(opt.tol > 0.0)) throw DomainError("newton_root: tol must be positive");
  Complex k = k0;
  const double scale0 = (std::abs(k0) > 0.0) ? std::abs(k0) : 1.0;  // unit scale at the origin
  double escape = 0.0;  // fixed after the first step, when the natural scale is known
  NewtonResult res;
  for (int it = 0; it < opt.max_iter; ++it) {
    const Complex fk = f(k);
    if (!finite(fk)) throw DivergedOutOfDomain("newton_root: function not finite at iterate");
    const double hk = std::max(std::abs(k), scale0);
    const double h = std::max(opt.fd_step_rel * hk, 1e-2 * opt.tol * hk);
    const Complex dfk = opt.derivative ? (*opt.derivative)(k) : fd_derivative(f, k, h);
    if (dfk == Complex(0.0) || !finite(dfk))
      throw DivergedOutOfDomain("newton_root: vanishing or non-finite derivative");
    const Complex step = fk / dfk;
    k -= step;
    if (it == 0) escape = opt.escape_factor * (std::abs(k0) + 8.0 * std::abs(step));
    res.iterations = it + 1;
    res.final_step = std::abs(step) / std::max(std::abs(k), 1e-300);
    if (!finite(k) || std::abs(k - k0) > escape)
      throw DivergedOutOfDomain("newton_root: iterate escaped the search region");
    if (std::abs(step) <= opt.tol * std::max(std::abs(k), scale0)) {
      res.root = k;
      return res;
    }
  }
  throw NoConvergence("newton_root: no convergence within max_iter");
}

Complex newton_root(const FuncC& f, Complex k0, double tol, int max_iter) {
  NewtonOptions opt;
  opt.tol = tol;
  opt.max_iter = max_iter;
  return newton_root_full(f, k0, opt).root;
}

Complex residue(const FuncC& f, const ContourSpec& contour, const ResidueOptions& opt) {
  if (!(contour.radius > 0.0)) throw DomainError("residue: contour radius must be positive");
  int n = std::max(16, contour.samples);

  // trapezoid on the circle: (1/2 pi i) \oint f dk = (r/n) sum f(c+r e^{it}) e^{it}
  std::vector<Complex> vals(n);
  auto eval_ring = [&](std::vector<Complex>& v) {
    const int m = int(v.size());
    for (int j = 0; j < m; ++j) {
      const double t = 2.0 * kPi * j / m;
      const Complex e{std::cos(t), std::sin(t)};
      v[j] = f(contour.center + contour.radius * e) * e;
    }
  };
  eval_ring(vals);
  auto sum_ring = [&](const std::vector<Complex>& v) {
    Complex s{0.0, 0.0};
    for (const Complex& x : v) s += x;
    return s * (contour.radius / double(v.size()));
  };
  Complex prev = sum_ring(vals);

  double last_delta = std::numeric_limits<double>::infinity();
  int oscillations = 0;
  while (2 * n <= opt.max_samples) {
    // double: old samples land on even indices
    std::vector<Complex> next(2 * n);
    for (int j = 0; j < n; ++j) next[2 * j] = vals[j];
    for (int j = 0; j < n; ++j) {
      const double t = 2.0 * kPi * (2 * j + 1) / (2 * n);
      const Complex e{std::cos(t), std::sin(t)};
      next[2 * j + 1] = f(contour.center + contour.radius * e) * e;
    }
    const Complex cur = sum_ring(next);
    const double delta = std::abs(cur - prev) / std::max(std::abs(cur), 1e-300);
    if (delta < opt.rel_tol) return cur;
    if (delta > 0.5 * last_delta) ++oscillations;  // not halving: quadrature is struggling
    last_delta = delta;
    prev = cur;
    vals.swap(next);
    n *= 2;
  }
  if (oscillations >= 3)
    throw MultipleSingularities(
        "residue: sample doubling oscillates; contour likely grazes a singularity");
  throw NoConvergence("residue: quadrature did not reach tolerance at max samples");
}

int winding_number(const FuncC& f, const ContourSpec& contour) {
  if (!(contour.radius > 0.0)) throw DomainError("winding_number: radius must be positive");
  int n = std::max(32, contour.samples);
  const int max_n = 1 << 16;

  while (true) {
    double total = 0.0;
    double min_mag = std::numeric_limits<double>::infinity(), max_mag = 0.0;
    bool refine = false;
    Complex prev = f(contour.center + contour.radius);
    min_mag = std::min(min_mag, std::abs(prev));
    max_mag = std::max(max_mag, std::abs(prev));
    for (int j = 1; j <= n; ++j) {
      const double t = 2.0 * kPi * j / n;
      const Complex e{std::cos(t), std::sin(t)};
      const Complex cur = f(contour.center + contour.radius * e);
      const double mag = std::abs(cur);
      if (mag == 0.0 || !finite(cur))
        throw IllConditioned("winding_number: function vanished or overflowed on contour");
      min_mag = std::min(min_mag, mag);
      max_mag = std::max(max_mag, mag);
      const double dphi = std::arg(cur / prev);
      if (std::abs(dphi) > 0.5 * kPi) {
        refine = true;
        break;
      }
      total += dphi;
      prev = cur;
    }
    if (max_mag / min_mag > 1e12)
      throw IllConditioned("winding_number: |f| spans more than 12 orders on the contour");
    if (!refine) return int(std::lround(total / (2.0 * kPi)));
    if (2 * n > max_n)
      throw IllConditioned("winding_number: phase increments did not settle under refinement");
    n *= 2;
  }
}

std::vector<PoleRecord> track(const std::function<FuncC(double)>& family,
                              const std::vector<double>& parameter_path, Complex seed,
                              const TrackOptions& opt) {
  std::vector<PoleRecord> out;
  if (parameter_path.empty()) return out;

  Complex current = seed;
  double alpha_prev = parameter_path.front();

  auto solve_at = [&](double alpha, Complex guess) {
    const FuncC f = family(alpha);
    return newton_root_full(f, guess, opt.newton);
  };

  // first point: plain solve from the seed
  {
    NewtonResult r = solve_at(alpha_prev, current);
    current = r.root;
    PoleRecord rec;
    rec.location = current;
    rec.kind = opt.kind;
    rec.q_factor = PoleRecord::q_of(current);
    rec.iterations = r.iterations;
    rec.final_step = r.final_step;
    rec.passive_sign_ok = (opt.kind != PoleRecord::Kind::pole) || (current.imag() < 0.0);
    out.push_back(rec);
  }

  for (std::size_t i = 1; i < parameter_path.size(); ++i) {
    const double target = parameter_path[i];
    double from = alpha_prev;
    Complex k_from = current;
    int depth = 0;
    double next = target;
    while (true) {
      Complex guess = k_from;
      if (opt.predictor) guess = opt.predictor(from, next, k_from);
      bool ok = true;
      NewtonResult r;
      try {
        r = solve_at(next, guess);
      } catch (const Error&) {
        ok = false;
      }
      if (ok) {
        // reject branch hops: accept nearest root to the predictor only
        if (std::abs(r.root - guess) > 0.5 * std::max(std::abs(k_from), 1e-300) && depth < opt.max_bisections) {
          ok = false;
        }
      }
      if (ok) {
        from = next;
        k_from = r.root;
        if (from == target) {
          PoleRecord rec;
          rec.location = k_from;
          rec.kind = opt.kind;
          rec.q_factor = PoleRecord::q_of(k_from);
          rec.iterations = r.iterations;
          rec.final_step = r.final_step;
          rec.passive_sign_ok = (opt.kind != PoleRecord::Kind::pole) || (k_from.imag() < 0.0);
          out.push_back(rec);
          break;
        }
        next = target;  // try to jump the rest in one go
      } else {
        ++depth;
        if (depth > opt.max_bisections)
          throw LostTrackError("track: path refinement limit reached", out);
        next = 0.5 * (from + next);
      }
    }
    current = k_from;
    alpha_prev = target;
  }
  return out;
}

}  // namespace gwshift::cplane

#pragma once

// Pseudo-spectral time integration of
//
//   d_t u = d_x (A u + u^2),
//
// where A is a real, even Fourier multiplier (the dispersion). ILW uses
// A = G_delta d_x, BO uses A = H d_x, the two-depth model a weighted sum.
// Linear part exact (unitary), nonlinear part by ETDRK4 with 2/3-rule
// dealiasing. Conserved quantities are M(u) = 1/2 int u^2 and
// H(u) = 1/2 int u A u + 1/3 int u^3.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ilw/dispersive_ops.hpp"
#include "ilw/errors.hpp"
#include "ilw/spectral_core.hpp"

namespace ilw {

enum class Frame { original, renormalized };

struct EvolutionProblem {
  SpectralGrid grid;
  std::string name;
  /// Real even symbol a(xi) of A; the linear symbol is i xi a(xi).
  std::vector<double> dispersion;
  std::optional<double> depth;
  double dealias_fraction = 2.0 / 3.0;
  /// Weight of d_x(u^2); 0 gives the linear flow.
  double nonlinearity = 1.0;

  /// Tabulated linear symbol i xi a(xi) (Nyquist zeroed).
  std::vector<cplx> linear_symbol() const {
    std::vector<cplx> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      out[i] = grid.is_nyquist(i) ? cplx{} : cplx(0.0, grid.frequency(i) * dispersion[i]);
    }
    return out;
  }
};

namespace detail {

inline EvolutionProblem make_problem(const SpectralGrid& grid, std::string name,
                                     const std::function<double(double)>& a, std::optional<double> depth) {
  EvolutionProblem p{grid, std::move(name), std::vector<double>(grid.size()), depth};
  for (std::size_t i = 0; i < grid.size(); ++i) p.dispersion[i] = a(grid.frequency(i));
  return p;
}

inline void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ContractError(what);
}

}  // namespace detail

/// ILW: d_t u - G_delta d_x^2 u = d_x(u^2). The renormalized frame drops the
/// drift -delta^{-1} d_x u (Galilean shift by 1/delta), leaving T_delta d_x^2.
inline EvolutionProblem make_ilw(double delta, const SpectralGrid& grid, Frame frame = Frame::original) {
  detail::require_positive(delta, "make_ilw: depth must be positive");
  if (frame == Frame::original) {
    return detail::make_problem(grid, "ilw", [delta](double xi) { return symbol_Gdl_dx(xi, delta); }, delta);
  }
  return detail::make_problem(
      grid, "ilw-renormalized",
      [delta](double xi) { return xi == 0.0 ? 0.0 : symbol_Tdl_dx(xi, delta); }, delta);
}

/// BO with dispersion scaled by `strength`: d_t u - strength H d_x^2 u = d_x(u^2).
inline EvolutionProblem make_bo(const SpectralGrid& grid, double strength = 1.0) {
  detail::require_positive(strength, "make_bo: strength must be positive");
  return detail::make_problem(grid, "bo", [strength](double xi) { return strength * std::abs(xi); }, std::nullopt);
}

/// d_t u - c1 G_{d1} d_x^2 u - c2 G_{d2} d_x^2 u = d_x(u^2). In the renormalized
/// frame, v(t,x) = u(t, x + gamma t) with gamma = c1/d1 + c2/d2 solves the
/// equation with T in place of G. c2 = 0 is accepted as the single-depth limit.
inline EvolutionProblem make_two_depth(double c1, double c2, double delta1, double delta2,
                                       const SpectralGrid& grid, Frame frame = Frame::renormalized) {
  detail::require_positive(c1, "make_two_depth: c1 must be positive");
  detail::require_positive(delta1, "make_two_depth: delta1 must be positive");
  detail::require_positive(delta2, "make_two_depth: delta2 must be positive");
  if (!(c2 >= 0.0)) throw ContractError("make_two_depth: c2 must be nonnegative");
  if (frame == Frame::original) {
    return detail::make_problem(
        grid, "two-depth",
        [=](double xi) { return c1 * symbol_Gdl_dx(xi, delta1) + c2 * symbol_Gdl_dx(xi, delta2); },
        std::min(delta1, delta2));
  }
  return detail::make_problem(
      grid, "two-depth-renormalized",
      [=](double xi) {
        if (xi == 0.0) return 0.0;
        return c1 * symbol_Tdl_dx(xi, delta1) + c2 * symbol_Tdl_dx(xi, delta2);
      },
      std::min(delta1, delta2));
}

/// Galilean speed relating the original and renormalized two-depth frames.
inline double two_depth_gamma(double c1, double c2, double delta1, double delta2) {
  return c1 / delta1 + c2 / delta2;
}

// ---------------------------------------------------------------------------
// Conserved quantities

/// M(u) = 1/2 int u^2 dx.
inline double mass(const RealField& u) {
  double acc = 0.0;
  for (const auto& z : u.coeffs()) acc += std::norm(z);
  return 0.5 * acc / u.grid().period();
}

/// int u^3 dx, exact for the trigonometric polynomial represented by u
/// (evaluated on a 2N-point padded grid).
inline double cubic_integral(const RealField& u) {
  const std::size_t p = 2 * u.grid().size();
  const auto s = padded_samples(u, p);
  double acc = 0.0;
  for (double v : s) acc += v * v * v;
  return acc * u.grid().period() / static_cast<double>(p);
}

/// 1/2 int u A u dx for a real even symbol a(xi).
inline double quadratic_form(const RealField& u, const std::function<double(double)>& a) {
  const auto& g = u.grid();
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) acc += a(g.frequency(i)) * std::norm(u.coeffs()[i]);
  return 0.5 * acc / g.period();
}

inline double hamiltonian(const EvolutionProblem& p, const RealField& u) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.grid.size(); ++i) acc += p.dispersion[i] * std::norm(u.coeffs()[i]);
  return 0.5 * acc / p.grid.period() + p.nonlinearity * cubic_integral(u) / 3.0;
}

/// H_BO = 1/2 int u H d_x u + 1/3 int u^3 (H d_x has symbol |xi|).
inline double hamiltonian_bo(const RealField& u) {
  return quadratic_form(u, [](double xi) { return std::abs(xi); }) + cubic_integral(u) / 3.0;
}

/// H_Q = 1/2 int u Q_delta u.
inline double hamiltonian_q(const RealField& u, double delta) {
  return quadratic_form(u, [delta](double xi) { return symbol_Qdl(xi, delta); });
}

/// H_ILW = 1/2 int u G_delta d_x u + 1/3 int u^3, evaluated directly.
inline double hamiltonian_ilw_direct(const RealField& u, double delta) {
  return quadratic_form(u, [delta](double xi) { return symbol_Gdl_dx(xi, delta); }) + cubic_integral(u) / 3.0;
}

/// H_ILW through the split H_BO - M/delta + H_Q; checked against the direct form.
inline double hamiltonian_ilw(const RealField& u, double delta) {
  const double split = hamiltonian_bo(u) - mass(u) / delta + hamiltonian_q(u, delta);
  const double direct = hamiltonian_ilw_direct(u, delta);
  const double scale = std::max({1.0, std::abs(direct), mass(u) / delta});
  if (std::abs(split - direct) > 1e-12 * scale) {
    throw NumericalError("hamiltonian_ilw: split and direct forms disagree");
  }
  return split;
}

// ---------------------------------------------------------------------------
// Symmetries

/// u(x - h) by phase multiplication; the Nyquist mode uses the real part of the phase.
inline RealField translate(const RealField& u, double h) {
  const auto& g = u.grid();
  std::vector<cplx> out(u.coeffs());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double xi = g.frequency(i);
    out[i] *= g.is_nyquist(i) ? cplx(std::cos(xi * h), 0.0) : std::polar(1.0, -xi * h);
  }
  return RealField(g, std::move(out));
}

enum class GalileanFlavor {
  shift_subtract,  // u(t, x - 2 gamma t) - gamma   (maps ILW solutions to ILW solutions)
  pure_shift,      // u(t, x + gamma t)            (two-depth frame change)
};

inline RealField galilean(const RealField& u, double gamma, double t, GalileanFlavor flavor) {
  if (flavor == GalileanFlavor::pure_shift) return translate(u, -gamma * t);
  auto shifted = translate(u, 2.0 * gamma * t);
  std::vector<cplx> c(shifted.coeffs());
  c[0] -= gamma * u.grid().period();
  return RealField(u.grid(), std::move(c));
}

// ---------------------------------------------------------------------------
// Right-hand side and ETDRK4

namespace detail {

inline std::vector<double> dealias_mask(const SpectralGrid& g, double fraction) {
  // keep |k| < fraction * N / 2; for 2/3 this is |k| < N/3
  const double kmax = fraction * static_cast<double>(g.size()) / 2.0;
  std::vector<double> m(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    m[i] = (!g.is_nyquist(i) && std::abs(static_cast<double>(g.wavenumber(i))) < kmax) ? 1.0 : 0.0;
  }
  return m;
}

/// Dealiased transform of d_x(u^2) in FFT order, plus sup|u| as a by-product.
class Nonlinearity {
 public:
  Nonlinearity(const SpectralGrid& g, double fraction, double weight = 1.0)
      : grid_(g), mask_(dealias_mask(g, fraction)), dx_(g.size()) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      dx_[i] = g.is_nyquist(i) ? cplx{} : cplx(0.0, weight * g.frequency(i));
    }
  }

  std::vector<cplx> operator()(const std::vector<cplx>& uhat) const {
    const std::size_t n = grid_.size();
    std::vector<cplx> work(n);
    for (std::size_t i = 0; i < n; ++i) work[i] = uhat[i] * mask_[i];
    auto phys = dft_inverse(work);
    const double to_phys = static_cast<double>(n) / grid_.period();
    for (auto& z : phys) {
      const double v = z.real() * to_phys;
      z = cplx(v * v, 0.0);
    }
    auto out = dft_forward(phys);
    const double h = grid_.spacing();
    for (std::size_t i = 0; i < n; ++i) out[i] *= h * mask_[i] * dx_[i];
    return out;
  }

 private:
  SpectralGrid grid_;
  std::vector<double> mask_;
  std::vector<cplx> dx_;
};

}  // namespace detail

/// Transform of d_t u: i xi a(xi) u_hat + (d_x(u^2))_hat with 2/3 dealiasing.
inline RealField rhs(const EvolutionProblem& p, const RealField& u) {
  if (!(u.grid() == p.grid)) throw ContractError("rhs: field is not on the problem grid");
  detail::Nonlinearity nl(p.grid, p.dealias_fraction, p.nonlinearity);
  auto out = nl(u.coeffs());
  const auto lin = p.linear_symbol();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += lin[i] * u.coeffs()[i];
  return RealField(p.grid, std::move(out));
}

struct Monitor {
  std::string name;
  std::function<double(const RealField&)> fn;
};

/// mass, hamiltonian, mean, l2 for the given problem.
inline std::vector<Monitor> default_monitors(const EvolutionProblem& p) {
  return {
      {"mass", [](const RealField& u) { return mass(u); }},
      {"hamiltonian", [p](const RealField& u) { return hamiltonian(p, u); }},
      {"mean", [](const RealField& u) { return u.mean(); }},
      {"l2", [](const RealField& u) { return l2_norm(u); }},
  };
}

struct EvolveOptions {
  double final_time = 1.0;
  double dt = 1e-3;
  /// Record a state every `record_stride` steps (the initial and final states are always kept).
  std::size_t record_stride = 1;
  bool keep_states = true;
  std::vector<Monitor> monitors;
  /// Abort once sup|u| exceeds this multiple of the initial sup norm.
  double blowup_factor = 1e6;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<RealField> states;
  std::vector<std::string> diagnostic_names;
  /// diagnostics[k][j]: monitor j at times[k].
  std::vector<std::vector<double>> diagnostics;
  std::size_t steps = 0;
  double dt = 0.0;

  const RealField& final_state() const { return states.back(); }
  std::vector<double> column(const std::string& name) const {
    const auto it = std::find(diagnostic_names.begin(), diagnostic_names.end(), name);
    if (it == diagnostic_names.end()) throw ContractError("Trajectory: unknown diagnostic " + name);
    const auto j = static_cast<std::size_t>(it - diagnostic_names.begin());
    std::vector<double> out;
    for (const auto& row : diagnostics) out.push_back(row[j]);
    return out;
  }
};

/// dt * xi_max * max|u0|, the advisory nonlinear CFL number (should stay <= 0.5).
inline double cfl_number(const EvolutionProblem& p, const RealField& u0, double dt) {
  const auto s = inverse_transform(u0);
  return dt * p.grid.max_frequency() * sup_norm(s);
}

inline double default_time_step(const EvolutionProblem& p, const RealField& u0) {
  const auto s = inverse_transform(u0);
  return std::min(1e-3, 0.5 / (p.grid.max_frequency() * (1.0 + sup_norm(s))));
}

/// ETDRK4 coefficients for a diagonal linear symbol.
class Etdrk4 {
 public:
  Etdrk4(const EvolutionProblem& p, double dt) : nl_(p.grid, p.dealias_fraction, p.nonlinearity) {
    constexpr int kContour = 32;
    const auto lin = p.linear_symbol();
    const std::size_t n = lin.size();
    e_.resize(n);
    e2_.resize(n);
    q_.resize(n);
    f1_.resize(n);
    f2_.resize(n);
    f3_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const cplx hl = dt * lin[i];
      e_[i] = std::exp(hl);
      e2_[i] = std::exp(0.5 * hl);
      cplx q{}, a{}, b{}, c{};
      for (int j = 0; j < kContour; ++j) {
        const cplx r = hl + std::polar(1.0, 2.0 * kPi * (j + 0.5) / kContour);
        const cplx er = std::exp(r);
        const cplx r3 = r * r * r;
        q += (std::exp(0.5 * r) - 1.0) / r;
        a += (-4.0 - r + er * (4.0 - 3.0 * r + r * r)) / r3;
        b += (2.0 + r + er * (r - 2.0)) / r3;
        c += (-4.0 - 3.0 * r - r * r + er * (4.0 - r)) / r3;
      }
      q_[i] = dt * q / double(kContour);
      f1_[i] = dt * a / double(kContour);
      f2_[i] = dt * b / double(kContour);
      f3_[i] = dt * c / double(kContour);
    }
  }

  void step(std::vector<cplx>& v) const {
    const std::size_t n = v.size();
    const auto nv = nl_(v);
    std::vector<cplx> a(n), b(n), c(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = e2_[i] * v[i] + q_[i] * nv[i];
    const auto na = nl_(a);
    for (std::size_t i = 0; i < n; ++i) b[i] = e2_[i] * v[i] + q_[i] * na[i];
    const auto nb = nl_(b);
    for (std::size_t i = 0; i < n; ++i) c[i] = e2_[i] * a[i] + q_[i] * (2.0 * nb[i] - nv[i]);
    const auto nc = nl_(c);
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = e_[i] * v[i] + nv[i] * f1_[i] + 2.0 * (na[i] + nb[i]) * f2_[i] + nc[i] * f3_[i];
    }
  }

 private:
  detail::Nonlinearity nl_;
  std::vector<cplx> e_, e2_, q_, f1_, f2_, f3_;
};

/// Integrates the problem from u0 over [0, final_time] with a fixed step
/// (adjusted so that final_time is hit exactly). Deterministic for fixed inputs.
inline Trajectory evolve(const EvolutionProblem& p, const RealField& u0, const EvolveOptions& opt) {
  if (!(u0.grid() == p.grid)) throw ContractError("evolve: initial data is not on the problem grid");
  if (!(opt.final_time > 0.0)) throw ContractError("evolve: final time must be positive");
  if (!(opt.dt > 0.0)) throw ContractError("evolve: time step must be positive");
  if (opt.record_stride == 0) throw ContractError("evolve: record stride must be positive");

  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(opt.final_time / opt.dt - 1e-9)));
  const double dt = opt.final_time / static_cast<double>(steps);
  const Etdrk4 scheme(p, dt);

  Trajectory traj;
  traj.steps = steps;
  traj.dt = dt;
  for (const auto& m : opt.monitors) traj.diagnostic_names.push_back(m.name);

  auto record = [&](double t, const RealField& u) {
    traj.times.push_back(t);
    std::vector<double> row;
    row.reserve(opt.monitors.size());
    for (const auto& m : opt.monitors) row.push_back(m.fn(u));
    traj.diagnostics.push_back(std::move(row));
    if (opt.keep_states || traj.states.empty()) {
      traj.states.push_back(u);
    } else {
      traj.states.back() = u;
    }
  };

  const double sup0 = sup_norm(inverse_transform(u0));
  record(0.0, u0);
  std::vector<cplx> v(u0.coeffs());
  for (std::size_t k = 1; k <= steps; ++k) {
    scheme.step(v);
    const double t = dt * static_cast<double>(k);
    const bool last = k == steps;
    const bool want = last || k % opt.record_stride == 0;
    // blow-up check on every step
    std::vector<cplx> tmp(v);
    auto phys = detail::dft_inverse(tmp);
    double sup = 0.0;
    bool finite = true;
    for (const auto& z : phys) {
      if (!std::isfinite(z.real())) finite = false;
      sup = std::max(sup, std::abs(z.real()));
    }
    sup *= static_cast<double>(p.grid.size()) / p.grid.period();
    if (!finite || (sup0 > 0.0 && sup > opt.blowup_factor * sup0)) {
      throw BlowUpError("evolve: blow-up detected at t = " + std::to_string(t), t, sup);
    }
    if (want) record(t, RealField(p.grid, v));
  }
  return traj;
}

/// Convenience: state at time T only.
inline RealField evolve_to(const EvolutionProblem& p, const RealField& u0, double final_time, double dt) {
  EvolveOptions opt;
  opt.final_time = final_time;
  opt.dt = dt;
  opt.keep_states = false;
  opt.record_stride = static_cast<std::size_t>(-1);
  return evolve(p, u0, opt).final_state();
}

}  // namespace ilw

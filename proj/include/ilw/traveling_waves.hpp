#pragma once

// Explicit traveling waves of ILW on the line and on the unit torus.
//
// Line:   u_c(t,x) = -a sin(a delta) / (cosh(a(x - ct)) + cos(a delta)),
//         a delta cot(a delta) = 1 - c delta,   0 < a delta < pi.
// Circle: U_c = periodization of u_c(0), with Fourier coefficients
//         -2 pi sinh(delta xi) / sinh(pi xi / a),  xi in 2 pi Z,
//         moving at the speed c(a, delta) and solving
//         -c U + U/delta - T_delta d_x U - U^2 = B.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "ilw/dispersive_ops.hpp"
#include "ilw/errors.hpp"
#include "ilw/evolution.hpp"
#include "ilw/spectral_core.hpp"

namespace ilw {

enum class WaveFlavor { line, circle };

struct WaveParams {
  double depth;
  double a;
  double speed;
  WaveFlavor flavor;

  double a_delta() const noexcept { return a * depth; }
};

struct PeriodicWaveConstants {
  double V;
  double D;
  double B;
};

inline constexpr double kSeriesTolerance = 1e-16;
inline constexpr long kSeriesCap = 100000;
/// Closest admissible approach of a delta to pi.
inline constexpr double kRegimeMargin = 1e-3;

namespace detail {

/// Sum of term(l) for l = first, first+1, ... until |term| < 1e-16.
template <class Term>
double sum_series(Term&& term, long first = 1) {
  double acc = 0.0;
  for (long l = first; l < first + kSeriesCap; ++l) {
    const double t = term(l);
    acc += t;
    if (std::abs(t) < kSeriesTolerance) return acc;
  }
  throw NumericalError("sum_series: no convergence within the term cap");
}

inline void check_wave_regime(double a, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ContractError("traveling wave: depth must be positive");
  const double th = a * delta;
  if (!(th > 0.0) || !(th < kPi)) {
    throw ContractError("traveling wave: requires 0 < a delta < pi (lattice series diverge otherwise)");
  }
  if (th > kPi - kRegimeMargin) {
    throw RegimeError("traveling wave: a delta within 1e-3 of pi; cancellation regime");
  }
}

/// sinh(delta xi) / sinh(pi xi / a), equal to a delta / pi at xi = 0.
inline double sinh_ratio(double xi, double a, double delta) {
  const double ax = std::abs(xi);
  if (ax == 0.0) return a * delta / kPi;
  const double p = kPi / a;
  if (p * ax < 20.0) return std::sinh(delta * ax) / std::sinh(p * ax);
  return std::exp((delta - p) * ax) * (-std::expm1(-2.0 * delta * ax)) / (-std::expm1(-2.0 * p * ax));
}

/// cosh(delta xi) / sinh(pi xi / a) for xi != 0 (odd in xi).
inline double cosh_sinh_ratio(double xi, double a, double delta) {
  const double ax = std::abs(xi);
  const double p = kPi / a;
  double r;
  if (p * ax < 20.0) {
    r = std::cosh(delta * ax) / std::sinh(p * ax);
  } else {
    r = std::exp((delta - p) * ax) * (1.0 + std::exp(-2.0 * delta * ax)) / (-std::expm1(-2.0 * p * ax));
  }
  return std::copysign(r, xi);
}

/// Sum over n of term(n) for n = 0, 1, ... and n = -1, -2, ..., each side
/// stopping at the first term below 1e-16 once past |n| = 1.
template <class Term>
double lattice_sum(Term&& term) {
  double acc = term(0L);
  for (int dir : {1, -1}) {
    long n = dir;
    for (long count = 0;; ++count, n += dir) {
      if (count >= kSeriesCap) throw NumericalError("lattice_sum: no convergence within the term cap");
      const double t = term(n);
      acc += t;
      if (std::abs(t) < kSeriesTolerance && std::abs(n) > 1) break;
    }
  }
  return acc;
}

}  // namespace detail

/// Unique a in (0, pi/delta) with a delta cot(a delta) = 1 - c delta, by bisection.
inline double solve_a_of_c(double c, double delta) {
  if (!(c > 0.0) || !std::isfinite(c)) throw ContractError("solve_a_of_c: speed must be positive");
  if (!(delta > 0.0)) throw ContractError("solve_a_of_c: depth must be positive");
  const double target = 1.0 - c * delta;
  auto g = [target](double th) { return th / std::tan(th) - target; };
  double lo = 1e-300;
  double hi = std::nextafter(kPi, 0.0);
  // th cot th is 1 at 0+ and -> -inf at pi-, strictly decreasing
  if (!(g(hi) < 0.0)) {
    throw NumericalError("solve_a_of_c: root not bracketed (speed too large for double precision)");
  }
  std::uintmax_t iters = 400;
  const auto tol = [](double l, double r) { return r - l <= 1e-15 * r; };
  const auto [l, r] = boost::math::tools::bisect(g, lo, hi, tol, iters);
  if (iters >= 400) throw NumericalError("solve_a_of_c: bisection did not converge");
  return 0.5 * (l + r) / delta;
}

inline WaveParams line_wave(double c, double delta) {
  return WaveParams{delta, solve_a_of_c(c, delta), c, WaveFlavor::line};
}

inline double line_profile(double x, double t, const WaveParams& w) {
  if (w.flavor != WaveFlavor::line) throw ContractError("line_profile: requires a line wave");
  const double th = w.a_delta();
  const double ch = std::cosh(w.a * (x - w.speed * t));
  if (!std::isfinite(ch)) return -0.0;
  return -w.a * std::sin(th) / (ch + std::cos(th));
}

/// Line-normalized transform (1/sqrt(2 pi)) int u_c(0,x) e^{-i xi x} dx
///   = -sqrt(2 pi) sinh(delta xi) / sinh(pi xi / a).
/// The torus convention used elsewhere (no 1/sqrt(2 pi)) differs by a factor sqrt(2 pi).
inline double line_profile_fourier(double xi, const WaveParams& w) {
  if (w.flavor != WaveFlavor::line) throw ContractError("line_profile_fourier: requires a line wave");
  return -std::sqrt(2.0 * kPi) * detail::sinh_ratio(xi, w.a, w.depth);
}

/// Periodic speed c(a, delta); see constants_VDB for V.
inline double periodic_speed(double a, double delta);

/// V, D and B = -D of the periodic wave. D carries the coefficient 2 on the
/// l coth series, which is what the pair-sum identity yields (see lattice_pair_sum).
inline PeriodicWaveConstants constants_VDB(double a, double delta) {
  detail::check_wave_regime(a, delta);
  const double th = a * delta;
  const double s2 = std::sin(th) * std::sin(th);
  const double v = detail::sum_series([&](long l) {
    const double sh = std::sinh(0.5 * a * static_cast<double>(l));
    return a * std::sin(2.0 * th) / (sh * sh + s2);
  });
  const double dsum = detail::sum_series([&](long l) {
    const double x = 0.5 * a * static_cast<double>(l);
    const double sh = std::sinh(x);
    const double den = sh * sh + s2;
    if (!std::isfinite(den)) return 0.0;
    return static_cast<double>(l) / std::tanh(x) / den;
  });
  const double d = 2.0 * a * a * s2 * dsum;
  return PeriodicWaveConstants{v, d, -d};
}

inline double periodic_speed(double a, double delta) {
  const auto k = constants_VDB(a, delta);
  const double th = a * delta;
  return 1.0 / delta - a / std::tan(th) - k.V;
}

inline WaveParams circle_wave(double a, double delta) {
  return WaveParams{delta, a, periodic_speed(a, delta), WaveFlavor::circle};
}

/// Torus coefficients of U_c (L = 1 required).
inline RealField periodic_profile_fourier(double a, double delta, const SpectralGrid& grid) {
  detail::check_wave_regime(a, delta);
  if (grid.period() != 1.0) throw ContractError("periodic_profile: requires the unit torus L = 1");
  std::vector<cplx> c(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    c[i] = -2.0 * kPi * detail::sinh_ratio(grid.frequency(i), a, delta);
  }
  return RealField(grid, std::move(c));
}

/// U_c(x) = sum_n -a sin(a delta) / (cosh(a(x+n)) + cos(a delta)).
inline double periodic_profile_lattice_at(double x, double a, double delta) {
  const double th = a * delta;
  const double amp = -a * std::sin(th);
  const double ct = std::cos(th);
  return detail::lattice_sum([&](long n) {
    const double ch = std::cosh(a * (x + static_cast<double>(n)));
    return std::isfinite(ch) ? amp / (ch + ct) : 0.0;
  });
}

struct PeriodicProfile {
  RealField fourier;
  std::vector<double> lattice;  // samples at the grid points
};

/// U_c by two routes: Fourier coefficients and the lattice periodization.
inline PeriodicProfile periodic_profile(double a, double delta, const SpectralGrid& grid) {
  auto f = periodic_profile_fourier(a, delta, grid);
  std::vector<double> lat(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) lat[j] = periodic_profile_lattice_at(grid.point(j), a, delta);
  return PeriodicProfile{std::move(f), std::move(lat)};
}

/// sup_x | -c U + U/delta - T_delta d_x U - U^2 - B |, spectrally.
inline double residual_traveleqn(const RealField& U, double c, double B, double delta) {
  const auto tdu = inverse_transform(
      multiplier_apply(U, [delta](double xi) { return cplx(symbol_Tdl_dx(xi, delta), 0.0); }));
  const auto u = inverse_transform(U);
  double sup = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double r = -c * u[j] + u[j] / delta - tdu[j] - u[j] * u[j] - B;
    sup = std::max(sup, std::abs(r));
  }
  return sup;
}

struct TdlRoutes {
  RealField fourier;            // T_delta U_c with the xi = 0 mode set to 0
  std::vector<double> lattice;  // regularized lattice sum at the grid points
};

/// T_delta U_c two ways. The lattice sum of -a sinh(a(x+n))/(cosh(a(x+n))+cos(a delta))
/// converges only symmetrically; it equals a periodic odd function minus 2 a x
/// (the delta^{-1} d_x^{-1} part acting on the mean -2 a delta). The lattice
/// route returns sum_n [g(x+n) + a sgn(n)] + 2 a x, which is periodic.
inline TdlRoutes tdl_of_profile_lattice(double a, double delta, const SpectralGrid& grid) {
  const auto u = periodic_profile_fourier(a, delta, grid);
  auto f = multiplier_apply(u, [delta](double xi) { return symbol_Tdl(xi, delta); });
  const double th = a * delta;
  const double ct = std::cos(th);
  std::vector<double> lat(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double x = grid.point(j);
    const double s = detail::lattice_sum([&](long n) {
      const double y = a * (x + static_cast<double>(n));
      const double g = std::abs(y) > 350.0 ? -a * sign(y) : -a * std::sinh(y) / (std::cosh(y) + ct);
      return g + a * sign(static_cast<double>(n));
    });
    lat[j] = s + 2.0 * a * x;
  }
  return TdlRoutes{std::move(f), std::move(lat)};
}

/// T_delta U_c from the closed Fourier form 2 pi i cosh(delta xi) / sinh(pi xi / a), xi != 0.
inline RealField tdl_of_profile_closed_form(double a, double delta, const SpectralGrid& grid) {
  detail::check_wave_regime(a, delta);
  std::vector<cplx> c(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double xi = grid.frequency(i);
    c[i] = (xi == 0.0 || grid.is_nyquist(i)) ? cplx{} : cplx(0.0, 2.0 * kPi * detail::cosh_sinh_ratio(xi, a, delta));
  }
  return RealField(grid, std::move(c));
}

/// |2 b_n b_m - RHS| for the pairwise identity with
/// b_n = 1/(cosh(a(x+n)) + cos(a delta)), d_n = b_n sinh(a(x+n)).
inline double lattice_identity_check(double a, double delta, double x, long n, long m) {
  if (n == m) throw ContractError("lattice_identity_check: requires n != m");
  const double th = a * delta;
  auto b = [&](long k) { return 1.0 / (std::cosh(a * (x + double(k))) + std::cos(th)); };
  auto d = [&](long k) { return b(k) * std::sinh(a * (x + double(k))); };
  const double sh = std::sinh(0.5 * a * double(m - n));
  const double den = sh * sh + std::sin(th) * std::sin(th);
  const double lhs = 2.0 * b(n) * b(m);
  const double rhs = -std::cos(th) / den * (b(n) + b(m)) + (1.0 / std::tanh(0.5 * a * double(n - m))) / den * (d(n) - d(m));
  return std::abs(lhs - rhs);
}

struct PairSum {
  double truncated;          // sum_{n != m, |n|,|m| <= K} b_n b_m
  double closed_form;        // -2 (sum_l cos/den) sum_k b_k + 2 sum_l l coth/den
  double closed_form_coeff4; // same with coefficient 4 on the l coth series
};

inline PairSum lattice_pair_sum(double a, double delta, double x, long truncation) {
  if (truncation < 1) throw ContractError("lattice_pair_sum: truncation must be >= 1");
  const double th = a * delta;
  double sb = 0.0, sb2 = 0.0;
  for (long k = -truncation; k <= truncation; ++k) {
    const double b = 1.0 / (std::cosh(a * (x + double(k))) + std::cos(th));
    sb += b;
    sb2 += b * b;
  }
  double cos_series = 0.0, coth_series = 0.0;
  for (long l = 1; l <= truncation; ++l) {
    const double h = 0.5 * a * double(l);
    const double den = std::sinh(h) * std::sinh(h) + std::sin(th) * std::sin(th);
    cos_series += std::cos(th) / den;
    coth_series += double(l) / std::tanh(h) / den;
  }
  return PairSum{sb * sb - sb2, -2.0 * cos_series * sb + 2.0 * coth_series, -2.0 * cos_series * sb + 4.0 * coth_series};
}

namespace detail {

/// sum_{k >= k0} (1 + (2 pi k)^2)^s for s < -1/2: direct sum, then Euler-Maclaurin.
inline double bracket_tail(long k0, double s) {
  const long direct = 4096;
  double acc = 0.0;
  const double w = 2.0 * kPi;
  for (long k = k0; k < k0 + direct; ++k) acc += std::pow(1.0 + w * w * double(k) * double(k), s);
  const double x = double(k0 + direct);
  // int_x^inf (1 + w^2 k^2)^s dk with (1 + e)^s ~ 1 + s e, e = 1/(w k)^2
  const double ws = std::pow(w, 2.0 * s);
  const double integral = ws * (std::pow(x, 2.0 * s + 1.0) / (-2.0 * s - 1.0) +
                                s / (w * w) * std::pow(x, 2.0 * s - 1.0) / (1.0 - 2.0 * s));
  const double fx = std::pow(1.0 + w * w * x * x, s);
  const double dfx = 2.0 * s * w * w * x * std::pow(1.0 + w * w * x * x, s - 1.0);
  return acc + integral + 0.5 * fx - dfx / 12.0;
}

}  // namespace detail

/// ||U + 2 pi delta_0||_{H^s(T)}, delta_0 having coefficient 1 at every xi in 2 pi Z.
/// Modes beyond the grid contribute (2 pi)^2 <xi>^{2s} each. Requires s < -1/2 and L = 1.
inline double delta_distance(const RealField& U, double s) {
  if (!(s < -0.5)) throw ContractError("delta_distance: requires s < -1/2 (delta_0 is not in H^s otherwise)");
  const auto& g = U.grid();
  if (g.period() != 1.0) throw ContractError("delta_distance: requires the unit torus L = 1");
  const SobolevIndex idx(s);
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    acc += idx.weight(g.frequency(i)) * std::norm(U.coeffs()[i] + 2.0 * kPi);
  }
  const long half = static_cast<long>(g.size() / 2);
  // beyond the lattice: k >= N/2 and k <= -N/2 - 1
  const double tail = detail::bracket_tail(half, s) + detail::bracket_tail(half + 1, s);
  return std::sqrt(acc + 4.0 * kPi * kPi * tail);
}

/// ||delta_0||^2_{H^s(T)} = sum_{xi in 2 pi Z} <xi>^{2s}.
inline double delta_norm_squared(double s) {
  if (!(s < -0.5)) throw ContractError("delta_norm_squared: requires s < -1/2");
  return 1.0 + 2.0 * detail::bracket_tail(1, s);
}

struct IllposedObservables {
  cplx mode_2pi;           // (v_{c,alpha})^(t, 2 pi)
  double mean;             // spatial mean of v_{c,alpha}
  double phase;            // unwrapped argument of mode_2pi
  double speed;            // c(a, delta)
  double wave_mean;        // mu_c = -2 a delta
  double galilean_shift;   // gamma = mu_c - alpha
};

/// Observables of the mean-alpha family v_{c,alpha} = Gamma_{mu_c - alpha}(u_c),
/// Gamma_gamma(u)(t,x) = u(t, x - 2 gamma t) - gamma. The 2 pi mode is
/// -2 pi exp(-2 pi i (c + 2(mu_c - alpha)) t) sinh(2 pi delta) / sinh(2 pi^2 / a).
inline IllposedObservables illposed_observables(double a, double delta, double t, double alpha) {
  const double c = periodic_speed(a, delta);
  const double mu = -2.0 * a * delta;
  const double gamma = mu - alpha;
  const double amp = 2.0 * kPi * detail::sinh_ratio(2.0 * kPi, a, delta);
  const double phase = kPi - 2.0 * kPi * (c + 2.0 * gamma) * t;
  return IllposedObservables{std::polar(amp, phase), mu - gamma, phase, c, mu, gamma};
}

/// u_c^(t, 2 pi) = -2 pi exp(-2 pi i c t) sinh(2 pi delta)/sinh(2 pi^2/a) and its unwrapped phase.
struct ModeSample {
  cplx value;
  double phase;
  double speed;
};

inline ModeSample traveling_mode_2pi(double a, double delta, double t) {
  const double c = periodic_speed(a, delta);
  const double amp = 2.0 * kPi * detail::sinh_ratio(2.0 * kPi, a, delta);
  const double phase = kPi - 2.0 * kPi * c * t;
  return ModeSample{std::polar(amp, phase), phase, c};
}

/// v_{c,alpha}(t) built on a grid: translate U_c by c t, then apply Gamma_{mu_c - alpha}.
inline RealField galilean_family_field(double a, double delta, double alpha, double t, const SpectralGrid& grid) {
  const auto u0 = periodic_profile_fourier(a, delta, grid);
  const double c = periodic_speed(a, delta);
  const double gamma = -2.0 * a * delta - alpha;
  return galilean(translate(u0, c * t), gamma, t, GalileanFlavor::shift_subtract);
}

/// Pairing of u_c(t) with a test function on the line, by the trapezoidal rule on [-R, R].
template <class Psi>
double line_pairing(const WaveParams& w, double t, Psi&& psi, double half_width, std::size_t points) {
  const double h = 2.0 * half_width / static_cast<double>(points);
  double acc = 0.0;
  for (std::size_t j = 0; j < points; ++j) {
    const double x = -half_width + h * static_cast<double>(j);
    acc += line_profile(x, t, w) * psi(x);
  }
  return acc * h;
}

}  // namespace ilw

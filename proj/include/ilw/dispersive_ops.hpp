#pragma once

// Symbols of the dispersive operators of the ILW / BO family.
//
//   H          : -i sgn(xi),                          sgn(0) = 0
//   T_delta    : -i coth(delta xi)
//   G_delta    : T_delta - delta^{-1} d_x^{-1}  ->  -i (coth(delta xi) - 1/(delta xi))
//   Q_delta    : (T_delta - H) d_x              ->  2|xi| / (exp(2 delta |xi|) - 1)
//
// Composite symbols that stay finite at xi = 0 are evaluated through their limits.

#include <algorithm>
#include <cmath>
#include <ostream>
#include <vector>

#include "ilw/errors.hpp"
#include "ilw/spectral_core.hpp"

namespace ilw {

/// Fluid depth 0 < delta < infinity.
struct DepthParam {
  double value;

  explicit DepthParam(double delta) : value(delta) {
    if (!(delta > 0.0) || !std::isfinite(delta)) {
      throw ContractError("DepthParam: depth must be positive and finite");
    }
  }
  operator double() const noexcept { return value; }
};

namespace detail {

/// coth(x) - 1/x, odd, with the Taylor series near 0 to avoid cancellation.
inline double coth_minus_inverse(double x) {
  const double ax = std::abs(x);
  if (ax < 0.1) {
    const double x2 = x * x;
    // x/3 - x^3/45 + 2x^5/945 - x^7/4725 + 2x^9/93555
    return x * (1.0 / 3.0 + x2 * (-1.0 / 45.0 + x2 * (2.0 / 945.0 + x2 * (-1.0 / 4725.0 + x2 * (2.0 / 93555.0)))));
  }
  if (ax > 40.0) return std::copysign(1.0, x) - 1.0 / x;
  return 1.0 / std::tanh(x) - 1.0 / x;
}

}  // namespace detail

inline double sign(double x) noexcept { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

inline cplx symbol_hilbert(double xi) { return cplx(0.0, -sign(xi)); }

/// -i coth(delta xi) for xi != 0. At xi = 0 the symbol is singular; 0 is
/// returned (principal value), so T_delta is only meaningful on mean-zero data
/// unless composed with d_x.
inline cplx symbol_Tdl(double xi, double delta) {
  if (xi == 0.0) return cplx{};
  const double x = delta * xi;
  const double coth = std::abs(x) > 40.0 ? sign(x) : 1.0 / std::tanh(x);
  return cplx(0.0, -coth);
}

/// Symbol of T_delta d_x: xi coth(delta xi), equal to 1/delta at xi = 0.
inline double symbol_Tdl_dx(double xi, double delta) {
  const double x = delta * xi;
  // xi coth(delta xi) = (1 + x (coth x - 1/x)) / delta
  return (1.0 + x * detail::coth_minus_inverse(x)) / delta;
}

/// -i (coth(delta xi) - 1/(delta xi)); 0 at xi = 0.
inline cplx symbol_Gdl(double xi, double delta) {
  return cplx(0.0, -detail::coth_minus_inverse(delta * xi));
}

/// 2|xi| / (exp(2 delta |xi|) - 1); 1/delta at xi = 0; 0 once 2 delta |xi| > 700.
inline double symbol_Qdl(double xi, double delta) {
  const double ax = std::abs(xi);
  if (ax == 0.0) return 1.0 / delta;
  const double e = 2.0 * delta * ax;
  if (e > 700.0) return 0.0;
  return 2.0 * ax / std::expm1(e);
}

/// Symbol of G_delta d_x (real, even): xi coth(delta xi) - 1/delta.
inline double symbol_Gdl_dx(double xi, double delta) {
  const double x = delta * xi;
  return x * detail::coth_minus_inverse(x) / delta;
}

/// Q_delta d_x f, multiplier i xi Q_hat(xi).
inline RealField apply_Qdl_dx(const RealField& f, DepthParam delta) {
  return multiplier_apply(f, [d = delta.value](double xi) { return cplx(0.0, xi * symbol_Qdl(xi, d)); });
}

inline RealField apply_Qdl(const RealField& f, DepthParam delta) {
  return multiplier_apply(f, [d = delta.value](double xi) { return cplx(symbol_Qdl(xi, d), 0.0); });
}

inline RealField apply_hilbert(const RealField& f) { return multiplier_apply(f, symbol_hilbert); }

inline RealField apply_dx(const RealField& f) {
  return multiplier_apply(f, [](double xi) { return cplx(0.0, xi); });
}

/// Operator norm of Q_delta d_x from H^{s1} to H^{s2} on the grid lattice,
/// next to the delta-dependence delta^{-2}(1 + delta^{s1-s2}) of the bound.
struct SmoothingScan {
  double measured;
  double bound;
  double argmax_frequency;

  double ratio() const noexcept { return measured / bound; }
};

inline SmoothingScan smoothing_norm_scan(double s1, double s2, DepthParam delta, const SpectralGrid& grid) {
  if (s1 > s2) throw ContractError("smoothing_norm_scan: requires s1 <= s2");
  const double d = delta.value;
  SmoothingScan out{0.0, std::pow(d, -2.0) * (1.0 + std::pow(d, s1 - s2)), 0.0};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.is_nyquist(i)) continue;
    const double xi = grid.frequency(i);
    const double v = std::abs(xi) * symbol_Qdl(xi, d) * std::pow(1.0 + xi * xi, 0.5 * (s2 - s1));
    if (v > out.measured) {
      out.measured = v;
      out.argmax_frequency = std::abs(xi);
    }
  }
  return out;
}

/// CSV rows "xi,re,im" for nonnegative-then-negative lattice frequencies in ascending order.
inline void write_symbol_csv(std::ostream& os, const SpectralGrid& grid, const Symbol& symbol) {
  os << "xi,re,im\n";
  const long n = static_cast<long>(grid.size());
  os.precision(17);
  for (long k = -n / 2; k < n / 2; ++k) {
    const double xi = grid.fundamental() * static_cast<double>(k);
    const cplx v = symbol(xi);
    os << xi << ',' << v.real() << ',' << v.imag() << '\n';
  }
}

}  // namespace ilw

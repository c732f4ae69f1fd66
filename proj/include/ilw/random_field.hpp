#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "ilw/errors.hpp"
#include "ilw/spectral_core.hpp"

namespace ilw {

struct RandomFieldOptions {
  /// Decay exponent r of (1 + |xi|)^{-r}; negative means |s_target| + 0.6.
  double decay = -1.0;
  /// Keep only |k| <= band (0 keeps every mode below Nyquist).
  std::size_t band = 0;
  /// Zero mode stays at zero when false.
  bool random_mean = false;
};

/// u_hat(xi) = amplitude (1 + |xi|)^{-r} e^{i theta}, theta uniform per mode, Hermitian.
inline RealField random_field(double s_target, double amplitude, std::uint64_t seed, const SpectralGrid& grid,
                              const RandomFieldOptions& opt = {}) {
  if (!(amplitude >= 0.0)) throw ContractError("random_field: amplitude must be nonnegative");
  const double r = opt.decay < 0.0 ? std::abs(s_target) + 0.6 : opt.decay;
  const std::size_t n = grid.size();
  const std::size_t top = opt.band == 0 ? n / 2 - 1 : std::min(opt.band, n / 2 - 1);
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  std::vector<cplx> c(n, cplx{});
  const double z0 = phase(gen);
  if (opt.random_mean) c[0] = amplitude * std::cos(z0);
  for (std::size_t k = 1; k <= top; ++k) {
    const double xi = grid.fundamental() * double(k);
    const cplx v = amplitude * std::pow(1.0 + xi, -r) * std::polar(1.0, phase(gen));
    c[k] = v;
    c[n - k] = std::conj(v);
  }
  return RealField(grid, std::move(c));
}

}  // namespace ilw

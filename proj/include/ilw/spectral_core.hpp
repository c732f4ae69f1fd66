#pragma once

// Periodic spectral grids, real fields stored as Fourier coefficients,
// Sobolev norms with a spectral shift, and the Cauchy-Szego projection.
//
// Fourier convention on a torus of period L:
//   u_hat(xi) = int_0^L u(x) exp(-i xi x) dx,    xi in (2 pi / L) Z
//   u(x)      = (1/L) sum_xi u_hat(xi) exp(i xi x)
// so that L = 1 is the unit torus with xi in 2 pi Z, and
//   ||u||_{L^2}^2 = (1/L) sum_xi |u_hat(xi)|^2.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "ilw/errors.hpp"

namespace ilw {

using cplx = std::complex<double>;
inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

/// Equispaced periodic grid of N points on [0, L) with frequency lattice
/// (2 pi / L) k, k in [-N/2, N/2). Coefficients are stored in FFT order.
class SpectralGrid {
 public:
  SpectralGrid(double period, std::size_t n_points) : period_(period), n_(n_points) {
    if (!(period > 0.0) || !std::isfinite(period)) {
      throw ContractError("SpectralGrid: period must be positive and finite");
    }
    if (n_points < 8 || n_points % 2 != 0) {
      throw ContractError("SpectralGrid: point count must be even and >= 8");
    }
  }

  double period() const noexcept { return period_; }
  std::size_t size() const noexcept { return n_; }
  double spacing() const noexcept { return period_ / static_cast<double>(n_); }
  double fundamental() const noexcept { return 2.0 * kPi / period_; }

  /// Signed integer wavenumber of storage index idx.
  long wavenumber(std::size_t idx) const noexcept {
    const long i = static_cast<long>(idx);
    const long n = static_cast<long>(n_);
    return i < n / 2 ? i : i - n;
  }
  double frequency(std::size_t idx) const noexcept {
    return fundamental() * static_cast<double>(wavenumber(idx));
  }
  /// Storage index of wavenumber k; k must lie in [-N/2, N/2).
  std::size_t index_of(long k) const {
    const long n = static_cast<long>(n_);
    if (k < -n / 2 || k >= n / 2) {
      throw ContractError("SpectralGrid::index_of: wavenumber outside the lattice");
    }
    return static_cast<std::size_t>(k >= 0 ? k : k + n);
  }
  bool contains(long k) const noexcept {
    const long n = static_cast<long>(n_);
    return k >= -n / 2 && k < n / 2;
  }
  std::size_t nyquist_index() const noexcept { return n_ / 2; }
  bool is_nyquist(std::size_t idx) const noexcept { return idx == n_ / 2; }
  /// Largest resolved |xi| excluding the Nyquist mode.
  double max_frequency() const noexcept {
    return fundamental() * static_cast<double>(n_ / 2 - 1);
  }
  double point(std::size_t j) const noexcept { return spacing() * static_cast<double>(j); }

  std::vector<double> points() const {
    std::vector<double> x(n_);
    for (std::size_t j = 0; j < n_; ++j) x[j] = point(j);
    return x;
  }

  friend bool operator==(const SpectralGrid&, const SpectralGrid&) = default;

 private:
  double period_;
  std::size_t n_;
};

namespace detail {

inline Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> engine;
  return engine;
}

/// Unnormalized forward DFT: out_k = sum_j in_j exp(-2 pi i jk/N).
inline std::vector<cplx> dft_forward(const std::vector<cplx>& in) {
  std::vector<cplx> out;
  fft_engine().fwd(out, in);
  return out;
}

/// Inverse DFT including the 1/N factor.
inline std::vector<cplx> dft_inverse(const std::vector<cplx>& in) {
  std::vector<cplx> out;
  fft_engine().inv(out, in);
  return out;
}

inline double max_abs(std::span<const cplx> v) {
  double m = 0.0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace detail

/// Real-valued function on a SpectralGrid, held as Hermitian-symmetric
/// Fourier coefficients in FFT storage order.
class RealField {
 public:
  /// Validates Hermitian symmetry (relative 1e-12) and finiteness, then
  /// symmetrizes exactly.
  RealField(SpectralGrid grid, std::vector<cplx> coeffs) : grid_(grid), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != grid_.size()) {
      throw DimensionError("RealField: coefficient count does not match grid");
    }
    const double scale = std::max(detail::max_abs(coeffs_), 1e-300);
    const std::size_t n = grid_.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(coeffs_[i].real()) || !std::isfinite(coeffs_[i].imag())) {
        throw ContractError("RealField: non-finite coefficient");
      }
    }
    for (std::size_t i = 1; i < n / 2; ++i) {
      const cplx& p = coeffs_[i];
      const cplx& m = coeffs_[n - i];
      if (std::abs(m - std::conj(p)) > 1e-12 * scale) {
        throw ContractError("RealField: coefficients are not Hermitian symmetric");
      }
      const cplx avg = 0.5 * (p + std::conj(m));
      coeffs_[i] = avg;
      coeffs_[n - i] = std::conj(avg);
    }
    for (std::size_t i : {std::size_t{0}, n / 2}) {
      if (std::abs(coeffs_[i].imag()) > 1e-12 * scale) {
        throw ContractError("RealField: zero/Nyquist coefficient must be real");
      }
      coeffs_[i] = cplx(coeffs_[i].real(), 0.0);
    }
  }

  static RealField zero(const SpectralGrid& grid) {
    return RealField(grid, std::vector<cplx>(grid.size(), cplx{}));
  }

  const SpectralGrid& grid() const noexcept { return grid_; }
  const std::vector<cplx>& coeffs() const noexcept { return coeffs_; }
  std::span<const cplx> span() const noexcept { return coeffs_; }

  /// Coefficient at integer wavenumber k (zero outside the lattice).
  cplx coefficient(long k) const {
    return grid_.contains(k) ? coeffs_[grid_.index_of(k)] : cplx{};
  }

  double mean() const noexcept { return coeffs_[0].real() / grid_.period(); }

 private:
  SpectralGrid grid_;
  std::vector<cplx> coeffs_;
};

/// Sobolev index (s, kappa) for the norm with bracket <xi>_kappa = (kappa^2 + xi^2)^{1/2}.
struct SobolevIndex {
  double s;
  double kappa;

  SobolevIndex(double s_, double kappa_ = 1.0) : s(s_), kappa(kappa_) {
    if (!(kappa_ >= 1.0) || !std::isfinite(s_)) {
      throw ContractError("SobolevIndex: kappa must be >= 1 and s finite");
    }
  }

  double weight(double xi) const noexcept {
    return std::pow(kappa * kappa + xi * xi, s);  // <xi>_kappa^{2s}
  }
};

/// u_hat = integral over one period by the trapezoidal rule (exact for band-limited data).
inline RealField forward_transform(const SpectralGrid& grid, std::span<const double> samples) {
  if (samples.size() != grid.size()) {
    throw DimensionError("forward_transform: sample count does not match grid");
  }
  std::vector<cplx> in(samples.begin(), samples.end());
  auto out = detail::dft_forward(in);
  const double h = grid.spacing();
  for (auto& z : out) z *= h;
  return RealField(grid, std::move(out));
}

/// Inverse of forward_transform: samples u(x_j) at x_j = j L / N.
inline std::vector<double> inverse_transform(const RealField& f) {
  auto z = detail::dft_inverse(f.coeffs());
  const double scale = static_cast<double>(f.grid().size()) / f.grid().period();
  std::vector<double> out(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) out[j] = z[j].real() * scale;
  return out;
}

/// Samples of u on a zero-padded grid of `points` >= N points over the same period.
inline std::vector<double> padded_samples(const RealField& f, std::size_t points) {
  const auto& g = f.grid();
  const std::size_t n = g.size();
  if (points < n) throw ContractError("padded_samples: target smaller than grid");
  std::vector<cplx> big(points, cplx{});
  for (std::size_t i = 0; i < n; ++i) {
    if (g.is_nyquist(i)) continue;
    const long k = g.wavenumber(i);
    big[static_cast<std::size_t>(k >= 0 ? k : k + static_cast<long>(points))] = f.coeffs()[i];
  }
  auto z = detail::dft_inverse(big);
  const double scale = static_cast<double>(points) / g.period();
  std::vector<double> out(points);
  for (std::size_t j = 0; j < points; ++j) out[j] = z[j].real() * scale;
  return out;
}

/// ||f||_{H^s_kappa} = ((1/L) sum_xi <xi>_kappa^{2s} |f_hat(xi)|^2)^{1/2}.
inline double sobolev_norm(const RealField& f, const SobolevIndex& idx) {
  const auto& g = f.grid();
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    acc += idx.weight(g.frequency(i)) * std::norm(f.coeffs()[i]);
  }
  return std::sqrt(acc / g.period());
}

inline double l2_norm(const RealField& f) { return sobolev_norm(f, SobolevIndex(0.0)); }

inline double sup_norm(std::span<const double> samples) {
  double m = 0.0;
  for (double v : samples) m = std::max(m, std::abs(v));
  return m;
}

/// Coefficients f_hat(xi_j), xi_j = 2 pi j / L for j = 0..J, of a function in
/// the Hardy space (nonnegative frequencies only).
struct HardyVector {
  SpectralGrid grid;
  std::vector<cplx> coeffs;

  std::size_t max_index() const noexcept { return coeffs.empty() ? 0 : coeffs.size() - 1; }
  double frequency(std::size_t j) const noexcept {
    return grid.fundamental() * static_cast<double>(j);
  }
};

/// Norm of a Hardy vector with the same normalization as sobolev_norm.
inline double sobolev_norm(const HardyVector& h, const SobolevIndex& idx) {
  double acc = 0.0;
  for (std::size_t j = 0; j < h.coeffs.size(); ++j) {
    acc += idx.weight(h.frequency(j)) * std::norm(h.coeffs[j]);
  }
  return std::sqrt(acc / h.grid.period());
}

/// Pi_+ f: keeps xi >= 0 (zero mode included). The Nyquist mode sits at a
/// negative frequency and is dropped.
inline HardyVector hardy_project(const RealField& f) {
  const auto& g = f.grid();
  HardyVector out{g, std::vector<cplx>(g.size() / 2)};
  for (std::size_t j = 0; j < g.size() / 2; ++j) out.coeffs[j] = f.coeffs()[j];
  return out;
}

/// Pi_- f = f - Pi_+ f as full-lattice coefficients (negative frequencies incl. Nyquist).
inline std::vector<cplx> hardy_complement(const RealField& f) {
  const auto& g = f.grid();
  std::vector<cplx> out(g.size(), cplx{});
  for (std::size_t i = g.size() / 2; i < g.size(); ++i) out[i] = f.coeffs()[i];
  return out;
}

/// Fourier multiplier symbol xi -> complex value.
using Symbol = std::function<cplx(double)>;

/// Symbol values on the grid in storage order.
inline std::vector<cplx> tabulate(const SpectralGrid& grid, const Symbol& symbol) {
  std::vector<cplx> t(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) t[i] = symbol(grid.frequency(i));
  return t;
}

/// Symbol(xi) * f_hat(xi) with a real result. The symbol must be Hermitian,
/// symbol(-xi) = conj(symbol(xi)), on every resolved pair; the Nyquist mode is
/// kept only when the symbol is Hermitian there too (even symbols) and zeroed
/// otherwise (odd symbols such as i xi or -i sgn(xi)).
inline RealField multiplier_apply(const RealField& f, const Symbol& symbol) {
  const auto& g = f.grid();
  const std::size_t n = g.size();
  std::vector<cplx> out(n);
  out[0] = symbol(0.0) * f.coeffs()[0];
  if (std::abs(out[0].imag()) > 1e-12 * std::max(1.0, std::abs(out[0]))) {
    throw ContractError("multiplier_apply: symbol must be real at xi = 0 for real output");
  }
  for (std::size_t i = 1; i < n / 2; ++i) {
    const double xi = g.frequency(i);
    const cplx sp = symbol(xi);
    const cplx sm = symbol(-xi);
    if (std::abs(sm - std::conj(sp)) > 1e-12 * std::max(1.0, std::abs(sp))) {
      throw ContractError("multiplier_apply: symbol is not Hermitian; output would not be real");
    }
    out[i] = sp * f.coeffs()[i];
    out[n - i] = std::conj(out[i]);
  }
  const double xn = g.frequency(n / 2);
  const cplx sn = symbol(xn);
  const cplx sn_mirror = symbol(-xn);
  const bool even_at_nyquist =
      std::abs(sn_mirror - std::conj(sn)) <= 1e-12 * std::max(1.0, std::abs(sn)) &&
      std::abs(sn.imag()) <= 1e-12 * std::max(1.0, std::abs(sn));
  out[n / 2] = even_at_nyquist ? cplx(sn.real() * f.coeffs()[n / 2].real(), 0.0) : cplx{};
  return RealField(g, std::move(out));
}

/// Symbol(xi) * f_hat(xi) without any realness requirement.
inline std::vector<cplx> multiplier_apply_complex(const RealField& f, const Symbol& symbol) {
  const auto& g = f.grid();
  std::vector<cplx> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = symbol(g.frequency(i)) * f.coeffs()[i];
  return out;
}

/// Pointwise linear combination a*f + b*g on a shared grid.
inline RealField combine(double a, const RealField& f, double b, const RealField& g) {
  if (!(f.grid() == g.grid())) throw ContractError("combine: fields live on different grids");
  std::vector<cplx> out(f.coeffs().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * f.coeffs()[i] + b * g.coeffs()[i];
  return RealField(f.grid(), std::move(out));
}

/// int_0^L f g dx = (1/L) sum conj(f_hat) g_hat.
inline double inner_product(const RealField& f, const RealField& g) {
  if (!(f.grid() == g.grid())) throw ContractError("inner_product: fields live on different grids");
  double acc = 0.0;
  for (std::size_t i = 0; i < f.coeffs().size(); ++i) {
    acc += (std::conj(f.coeffs()[i]) * g.coeffs()[i]).real();
  }
  return acc / f.grid().period();
}

/// Field from samples of a callable on the grid points.
template <class F>
RealField sample_function(const SpectralGrid& grid, F&& fn) {
  std::vector<double> s(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) s[j] = fn(grid.point(j));
  return forward_transform(grid, s);
}

}  // namespace ilw

#pragma once

// Truncated Lax operator L_u = -i d_x + Pi_+ u on the Hardy space and the
// functionals built from its resolvent:
//
//   m(kappa; u)     = -(L_u + kappa)^{-1} Pi_+ u
//   beta(kappa; u)  = <Pi_+ u, (L_u + kappa)^{-1} Pi_+ u>
//   beta_s(kappa;u) = int_kappa^inf tau^{2s} beta(tau; u) dtau
//
// The Hardy space is truncated to frequencies 2 pi j / L, 0 <= j <= J. The
// field u is read as the trigonometric polynomial of its modes |k| < N/2, so
// matrix entries with |j - k| >= N/2 vanish exactly and J may exceed N/2.

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ilw/dispersive_ops.hpp"
#include "ilw/errors.hpp"
#include "ilw/evolution.hpp"
#include "ilw/spectral_core.hpp"

namespace ilw {

inline constexpr std::size_t kMaxHardyModes = 4096;

/// Largest Hardy index J kept in the truncation (J + 1 modes).
struct HardyCutoff {
  std::size_t max_index;

  static HardyCutoff modes(std::size_t count) {
    if (count == 0 || count > kMaxHardyModes) throw ContractError("HardyCutoff: mode count out of range");
    return HardyCutoff{count - 1};
  }
  /// Xi must be a nonnegative multiple of 2 pi / L.
  static HardyCutoff from_frequency(double xi_max, const SpectralGrid& grid) {
    const double j = xi_max / grid.fundamental();
    const double r = std::round(j);
    if (!(r >= 0.0) || std::abs(j - r) > 1e-9 * std::max(1.0, r)) {
      throw ContractError("HardyCutoff: Xi must be a nonnegative multiple of 2 pi / L");
    }
    return modes(static_cast<std::size_t>(r) + 1);
  }
  std::size_t count() const noexcept { return max_index + 1; }
};

struct LaxTruncation {
  SpectralGrid grid;
  Eigen::MatrixXcd matrix;

  std::size_t modes() const noexcept { return static_cast<std::size_t>(matrix.rows()); }
  double cutoff_frequency() const noexcept { return grid.fundamental() * double(modes() - 1); }
};

namespace detail {

/// u_hat at integer wavenumber k, zero for |k| >= N/2 (Nyquist dropped).
inline cplx band_coefficient(const RealField& u, long k) {
  const long half = static_cast<long>(u.grid().size() / 2);
  if (k <= -half || k >= half) return cplx{};
  return u.coeffs()[u.grid().index_of(k)];
}

inline Eigen::VectorXcd to_eigen(const std::vector<cplx>& v) {
  Eigen::VectorXcd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

inline std::vector<cplx> to_std(const Eigen::VectorXcd& v) {
  return std::vector<cplx>(v.data(), v.data() + v.size());
}

/// Toeplitz matrix f_hat(xi_j - xi_k) / L on the Hardy block.
inline Eigen::MatrixXcd multiplication_block(const RealField& f, std::size_t modes) {
  const auto n = static_cast<Eigen::Index>(modes);
  Eigen::MatrixXcd t(n, n);
  const double inv_l = 1.0 / f.grid().period();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) t(j, k) = band_coefficient(f, static_cast<long>(j - k)) * inv_l;
  }
  return t;
}

}  // namespace detail

/// Pi_+ u restricted to the truncation, as a coefficient vector.
inline Eigen::VectorXcd hardy_data(const RealField& u, HardyCutoff cut) {
  Eigen::VectorXcd g(static_cast<Eigen::Index>(cut.count()));
  for (std::size_t j = 0; j < cut.count(); ++j) g(static_cast<Eigen::Index>(j)) = detail::band_coefficient(u, long(j));
  return g;
}

inline LaxTruncation build_lax(const RealField& u, HardyCutoff cut) {
  if (cut.count() > kMaxHardyModes) throw ContractError("build_lax: truncation exceeds the dense limit");
  auto m = detail::multiplication_block(u, cut.count());
  const double fund = u.grid().fundamental();
  for (Eigen::Index j = 0; j < m.rows(); ++j) m(j, j) += fund * double(j);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-13 * scale) {
    throw NumericalError("build_lax: truncated Lax matrix is not Hermitian");
  }
  Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  return LaxTruncation{u.grid(), std::move(h)};
}

/// Solves (L + kappa) x = g by Cholesky; throws KappaTooSmall when L + kappa
/// is not positive definite.
inline Eigen::VectorXcd resolvent_solve(const LaxTruncation& lax, double kappa, const Eigen::VectorXcd& g) {
  if (g.size() != lax.matrix.rows()) throw DimensionError("resolvent_solve: vector size mismatch");
  Eigen::MatrixXcd a = lax.matrix;
  a.diagonal().array() += kappa;
  Eigen::LLT<Eigen::MatrixXcd> llt(a);
  if (llt.info() != Eigen::Success) {
    throw KappaTooSmall("resolvent_solve: L + kappa is not positive definite", kappa,
                        std::numeric_limits<double>::quiet_NaN());
  }
  Eigen::VectorXcd x = llt.solve(g);
  const double gn = g.norm();
  if (gn > 0.0 && (a * x - g).norm() > 1e-12 * gn) {
    throw NumericalError("resolvent_solve: residual above 1e-12");
  }
  return x;
}

inline double lambda_min(const LaxTruncation& lax) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(lax.matrix, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

struct KappaCheck {
  bool ok;
  double threshold;
  double lambda_min;
};

/// threshold = C_s (1 + ||u||_{H^s_kappa})^{1/(2 sigma)}, sigma = (1/2 + s)/2;
/// ok when kappa >= threshold and lambda_min(L_u) + kappa > 0.
inline KappaCheck check_kappa(const RealField& u, double s, double kappa, double c_s, HardyCutoff cut) {
  if (!(s > -0.5 && s < 0.0)) throw ContractError("check_kappa: requires -1/2 < s < 0");
  const double sigma = 0.5 * (0.5 + s);
  const double norm = sobolev_norm(u, SobolevIndex(s, kappa));
  const double threshold = c_s * std::pow(1.0 + norm, 1.0 / (2.0 * sigma));
  const double lmin = lambda_min(build_lax(u, cut));
  return KappaCheck{kappa >= threshold && lmin + kappa > 0.0, threshold, lmin};
}

/// m(kappa; u) = -(L_u + kappa)^{-1} Pi_+ u.
inline HardyVector m_state(const RealField& u, double kappa, HardyCutoff cut) {
  const auto lax = build_lax(u, cut);
  Eigen::VectorXcd x = resolvent_solve(lax, kappa, hardy_data(u, cut));
  return HardyVector{u.grid(), detail::to_std(-x)};
}

/// Norms entering the resolvent-state bounds.
struct MStateNorms {
  double m_hs1_kappa;  // ||m||_{H^{s+1}_kappa}
  double u_hs_kappa;   // ||u||_{H^s_kappa}
  double m_hs;         // ||m||_{H^s}
  double u_hs;         // ||u||_{H^s}
};

inline MStateNorms mstate_norms(const HardyVector& m, const RealField& u, double s, double kappa) {
  return MStateNorms{sobolev_norm(m, SobolevIndex(s + 1.0, kappa)), sobolev_norm(u, SobolevIndex(s, kappa)),
                     sobolev_norm(m, SobolevIndex(s)), sobolev_norm(u, SobolevIndex(s))};
}

namespace detail {

/// Values of a Hardy vector (or any coefficient set on 0..J) at P equispaced points.
inline std::vector<cplx> hardy_samples(const HardyVector& h, std::size_t points) {
  std::vector<cplx> big(points, cplx{});
  for (std::size_t j = 0; j < h.coeffs.size(); ++j) big[j] = h.coeffs[j];
  auto z = dft_inverse(big);
  const double scale = double(points) / h.grid.period();
  for (auto& v : z) v *= scale;
  return z;
}

inline std::size_t padded_size(std::size_t min_points) {
  std::size_t p = 8;
  while (p < min_points) p *= 2;
  return p;
}

}  // namespace detail

struct BetaRoutes {
  double inner_product;   // <Pi_+ u, R Pi_+ u>
  double integral;        // -int u m dx on an alias-free padded grid
  double integral_imag;   // imaginary part of -int u m dx (should vanish)
};

inline BetaRoutes beta_routes(const RealField& u, double kappa, HardyCutoff cut) {
  const auto lax = build_lax(u, cut);
  const Eigen::VectorXcd g = hardy_data(u, cut);
  const Eigen::VectorXcd x = resolvent_solve(lax, kappa, g);
  const double l = u.grid().period();
  const double inner = g.dot(x).real() / l;  // dot conjugates the first argument

  const HardyVector m{u.grid(), detail::to_std(-x)};
  const std::size_t p = detail::padded_size(2 * (cut.count() + u.grid().size() / 2 + 1));
  const auto ms = detail::hardy_samples(m, p);
  const auto us = padded_samples(u, p);
  cplx acc{};
  for (std::size_t j = 0; j < p; ++j) acc += us[j] * ms[j];
  acc *= -l / double(p);
  return BetaRoutes{inner, acc.real(), acc.imag()};
}

/// beta(kappa; u), both routes computed and required to agree to 1e-11.
inline double beta(const RealField& u, double kappa, HardyCutoff cut) {
  const auto r = beta_routes(u, kappa, cut);
  const double scale = std::max(std::abs(r.inner_product), 1e-300);
  if (std::abs(r.inner_product - r.integral) > 1e-11 * scale + 1e-300 ||
      std::abs(r.integral_imag) > 1e-11 * scale + 1e-300) {
    throw NumericalError("beta: inner-product and integral routes disagree");
  }
  return r.inner_product;
}

/// Spectral factorization L_u = V diag(lambda) V^* shared by all tau in a quadrature.
class LaxSpectrum {
 public:
  LaxSpectrum(const RealField& u, HardyCutoff cut) : period_(u.grid().period()), grid_(u.grid()) {
    const auto lax = build_lax(u, cut);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(lax.matrix);
    if (es.info() != Eigen::Success) throw NumericalError("LaxSpectrum: eigensolver failed");
    lambda_ = es.eigenvalues();
    vectors_ = es.eigenvectors();
    weights_ = vectors_.adjoint() * hardy_data(u, cut);
  }

  double lambda_min() const { return lambda_(0); }
  double lambda_max() const { return lambda_(lambda_.size() - 1); }
  const Eigen::VectorXd& eigenvalues() const noexcept { return lambda_; }
  const Eigen::MatrixXcd& eigenvectors() const noexcept { return vectors_; }
  /// V^* Pi_+ u.
  const Eigen::VectorXcd& weights() const noexcept { return weights_; }
  double period() const noexcept { return period_; }
  const SpectralGrid& grid() const noexcept { return grid_; }

  void require_positive(double tau) const {
    if (!(lambda_(0) + tau > 0.0)) {
      throw KappaTooSmall("LaxSpectrum: L + tau is not positive definite", tau, lambda_(0));
    }
  }

  double beta(double tau) const {
    require_positive(tau);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < lambda_.size(); ++i) acc += std::norm(weights_(i)) / (lambda_(i) + tau);
    return acc / period_;
  }

  /// m(tau) in the eigenbasis: -diag(1/(lambda + tau)) V^* Pi_+ u.
  Eigen::VectorXcd m_eigen(double tau) const {
    require_positive(tau);
    return -(weights_.array() / (lambda_.array() + tau)).matrix();
  }

  HardyVector m(double tau) const { return HardyVector{grid_, detail::to_std(vectors_ * m_eigen(tau))}; }

 private:
  double period_;
  SpectralGrid grid_;
  Eigen::VectorXd lambda_;
  Eigen::MatrixXcd vectors_;
  Eigen::VectorXcd weights_;
};

struct BetaSOptions {
  /// Relative tolerance of each adaptive Gauss-Kronrod panel.
  double rel_tol = 1e-12;
  /// Stop extending the t-range once the analytic tail is below this fraction.
  double tail_fraction = 1e-8;
  double panel_width = 8.0;
  unsigned max_depth = 18;
};

struct BetaProfile {
  double kappa;
  double s;
  double sigma;
  std::vector<double> tau;
  std::vector<double> beta;
  double beta_s;
  double tail;
  double t_star;
};

namespace detail {

/// int_kappa^inf tau^{2s} f(tau) dtau with f(tau) ~ C tau^{-decay}, via tau = kappa e^t,
/// panels of adaptive GK15, and the analytic tail f(tau*) tau*^{2s+1} / (decay - 2s - 1).
template <class F>
double semi_infinite(F&& f, double kappa, double s, double decay, const BetaSOptions& opt, double* tail_out,
                     double* tstar_out) {
  using boost::math::quadrature::gauss_kronrod;
  const double p = 2.0 * s + 1.0;
  auto integrand = [&](double t) {
    const double tau = kappa * std::exp(t);
    return std::pow(kappa, p) * std::exp(p * t) * f(tau);
  };
  double acc = 0.0;
  double scale = 0.0;  // running L1 norm of the integrand
  double t0 = 0.0;
  for (int panel = 0; panel < 400; ++panel) {
    const double t1 = t0 + opt.panel_width;
    double err = 0.0;
    double l1 = 0.0;
    const double v = gauss_kronrod<double, 15>::integrate(integrand, t0, t1, opt.max_depth, opt.rel_tol, &err, &l1);
    scale += l1;
    if (!(err <= std::max(1e3 * opt.rel_tol * scale, 1e-300))) {
      std::ostringstream os;
      os << "beta_s quadrature: panel [" << t0 << ", " << t1 << "] error " << err << " exceeds tolerance (L1 "
         << scale << ")";
      throw NumericalError(os.str());
    }
    acc += v;
    t0 = t1;
    const double tau = kappa * std::exp(t0);
    const double tail = f(tau) * std::pow(tau, p) / (decay - p);
    if (std::abs(tail) <= opt.tail_fraction * std::abs(acc) || acc == 0.0) {
      if (tail_out) *tail_out = tail;
      if (tstar_out) *tstar_out = t0;
      return acc + tail;
    }
  }
  throw NumericalError("beta_s quadrature: tail criterion not met within 400 panels");
}

}  // namespace detail

inline BetaProfile beta_s(const LaxSpectrum& spec, double kappa, double s, const BetaSOptions& opt = {}) {
  if (!(s > -0.5 && s < 0.0)) throw ContractError("beta_s: requires -1/2 < s < 0");
  if (!(kappa >= 1.0)) throw ContractError("beta_s: requires kappa >= 1");
  spec.require_positive(kappa);
  BetaProfile out{kappa, s, 0.5 * (0.5 + s), {}, {}, 0.0, 0.0, 0.0};
  std::vector<std::pair<double, double>> nodes;
  auto f = [&](double tau) {
    const double b = spec.beta(tau);
    nodes.emplace_back(tau, b);
    return b;
  };
  out.beta_s = detail::semi_infinite(f, kappa, s, 1.0, opt, &out.tail, &out.t_star);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end(),
                          [](const auto& x, const auto& y) { return x.first == y.first; }),
              nodes.end());
  for (const auto& [t, b] : nodes) {
    out.tau.push_back(t);
    out.beta.push_back(b);
  }
  return out;
}

inline BetaProfile beta_s(const RealField& u, double kappa, double s, HardyCutoff cut, const BetaSOptions& opt = {}) {
  return beta_s(LaxSpectrum(u, cut), kappa, s, opt);
}

/// d beta / d u = -(m + conj(m) + |m|^2), restricted to the grid's modes |k| < N/2.
inline RealField beta_gradient(const RealField& u, const HardyVector& m) {
  const auto& g = u.grid();
  const std::size_t n = g.size();
  const long half = static_cast<long>(n / 2);
  const double inv_l = 1.0 / g.period();
  const long jmax = static_cast<long>(m.coeffs.size()) - 1;
  std::vector<cplx> out(n, cplx{});
  for (long k = 0; k < half; ++k) {
    cplx c{};  // (|m|^2)^(k) = (1/L) sum_j m_{j+k} conj(m_j)
    for (long j = 0; j + k <= jmax; ++j) c += m.coeffs[std::size_t(j + k)] * std::conj(m.coeffs[std::size_t(j)]);
    c *= inv_l;
    cplx lin = k <= jmax ? m.coeffs[std::size_t(k)] : cplx{};
    if (k == 0) lin = 2.0 * lin.real();
    const cplx v = -(lin + c);
    out[g.index_of(k)] = v;
    if (k > 0) out[g.index_of(-k)] = std::conj(v);
  }
  out[0] = cplx(out[0].real(), 0.0);
  return RealField(g, std::move(out));
}

inline RealField beta_gradient(const RealField& u, double kappa, HardyCutoff cut) {
  return beta_gradient(u, m_state(u, kappa, cut));
}

struct FlowDerivative {
  cplx I1;      // contribution of m
  cplx I2;      // contribution of conj(m)
  double I3;    // contribution of |m|^2
  double total; // predicted d beta_s / dt along ILW
};

/// d/dt beta_s(kappa; u(t)) along ILW: -int tau^{2s} int (m + conj m + |m|^2) Q_delta d_x u dx dtau.
inline FlowDerivative beta_flow_derivative(const RealField& u, double kappa, double s, double delta, HardyCutoff cut,
                                           const BetaSOptions& opt = {}) {
  if (!(s > -0.5 && s < 0.0)) throw ContractError("beta_flow_derivative: requires -1/2 < s < 0");
  const LaxSpectrum spec(u, cut);
  spec.require_positive(kappa);
  const auto w = apply_Qdl_dx(u, DepthParam(delta));
  const double inv_l = 1.0 / u.grid().period();
  const Eigen::VectorXcd q = spec.eigenvectors().adjoint() * hardy_data(w, cut);
  const Eigen::MatrixXcd wt =
      spec.eigenvectors().adjoint() * detail::multiplication_block(w, cut.count()) * spec.eigenvectors();

  // int m w dx = (1/L) (Pi_+ w)^* m
  auto linear = [&](double tau) -> cplx { return q.dot(spec.m_eigen(tau)) * inv_l; };
  auto quadratic = [&](double tau) -> double {
    const Eigen::VectorXcd me = spec.m_eigen(tau);
    return me.dot(wt * me).real() * inv_l;
  };
  const double re1 = detail::semi_infinite([&](double t) { return linear(t).real(); }, kappa, s, 1.0, opt, nullptr, nullptr);
  const double im1 = detail::semi_infinite([&](double t) { return linear(t).imag(); }, kappa, s, 1.0, opt, nullptr, nullptr);
  const double i3 = -detail::semi_infinite(quadratic, kappa, s, 2.0, opt, nullptr, nullptr);
  const cplx i1(-re1, -im1);
  return FlowDerivative{i1, std::conj(i1), i3, 2.0 * i1.real() + i3};
}

// ---------------------------------------------------------------------------
// Gronwall experiment and a priori bound

struct GronwallOptions {
  double delta = 1.0;
  double s = -0.25;
  double kappa = 32.0;
  double final_time = 1.0;
  double dt = 1e-3;
  std::size_t samples = 100;
  HardyCutoff cutoff = HardyCutoff::modes(128);
  double c_s = 1.0;
  /// Use the BO flow instead of ILW (conservation control run).
  bool bo_control = false;
  double epsilon = 0.01;
  BetaSOptions quadrature{};
};

struct GronwallReport {
  std::vector<double> times;
  std::vector<double> beta_s;
  std::vector<double> log_rates;   // per-interval d/dt log beta_s
  double max_log_rate = 0.0;       // max of log_rates (signed)
  double a_hat = 0.0;              // max of |log_rates|, the constant in |d/dt beta_s| <= A beta_s
  bool bound_ok = true;            // beta_s(t) <= e^{a_hat t} beta_s(0) (1 + 1e-6)
  bool signed_bound_ok = true;     // same with max_log_rate in place of a_hat
  double max_bound_ratio = 0.0;    // max beta_s(t) / (e^{a_hat t} beta_s(0))
  double predicted_scaling = 0.0;  // delta^{-2} (1 + delta^{-|s| - 1/2 - eps})
  double min_lambda_plus_kappa = 0.0;
  double max_threshold = 0.0;
  double relative_drift = 0.0;     // |beta_s(T) - beta_s(0)| / beta_s(0)
};

inline double gronwall_scaling(double delta, double s, double epsilon) {
  return std::pow(delta, -2.0) * (1.0 + std::pow(delta, -std::abs(s) - 0.5 - epsilon));
}

inline GronwallReport gronwall_experiment(const RealField& u0, const GronwallOptions& opt) {
  if (opt.samples == 0) throw ContractError("gronwall_experiment: need at least one sample interval");
  const auto problem = opt.bo_control ? make_bo(u0.grid()) : make_ilw(opt.delta, u0.grid());
  const auto steps = static_cast<std::size_t>(std::ceil(opt.final_time / opt.dt - 1e-9));
  EvolveOptions eo;
  eo.final_time = opt.final_time;
  eo.dt = opt.final_time / double(std::max<std::size_t>(steps, opt.samples) / opt.samples * opt.samples);
  eo.record_stride = static_cast<std::size_t>(std::llround(opt.final_time / eo.dt)) / opt.samples;
  const auto traj = evolve(problem, u0, eo);

  GronwallReport rep;
  rep.predicted_scaling = gronwall_scaling(opt.delta, opt.s, opt.epsilon);
  rep.min_lambda_plus_kappa = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const auto& u = traj.states[k];
    const LaxSpectrum spec(u, opt.cutoff);
    const double sigma = 0.5 * (0.5 + opt.s);
    const double threshold =
        opt.c_s * std::pow(1.0 + sobolev_norm(u, SobolevIndex(opt.s, opt.kappa)), 1.0 / (2.0 * sigma));
    rep.max_threshold = std::max(rep.max_threshold, threshold);
    rep.min_lambda_plus_kappa = std::min(rep.min_lambda_plus_kappa, spec.lambda_min() + opt.kappa);
    if (!(opt.kappa >= threshold) || !(spec.lambda_min() + opt.kappa > 0.0)) {
      std::ostringstream os;
      os << "gronwall_experiment: kappa condition violated at t = " << traj.times[k] << " (threshold " << threshold
         << ", lambda_min + kappa " << spec.lambda_min() + opt.kappa << ")";
      throw KappaTooSmall(os.str(), opt.kappa, spec.lambda_min());
    }
    rep.times.push_back(traj.times[k]);
    rep.beta_s.push_back(beta_s(spec, opt.kappa, opt.s, opt.quadrature).beta_s);
  }
  rep.max_log_rate = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < rep.times.size(); ++k) {
    const double r = (std::log(rep.beta_s[k]) - std::log(rep.beta_s[k - 1])) / (rep.times[k] - rep.times[k - 1]);
    rep.log_rates.push_back(r);
    rep.max_log_rate = std::max(rep.max_log_rate, r);
    rep.a_hat = std::max(rep.a_hat, std::abs(r));
  }
  for (std::size_t k = 0; k < rep.times.size(); ++k) {
    const double env = std::exp(rep.a_hat * rep.times[k]) * rep.beta_s[0];
    rep.max_bound_ratio = std::max(rep.max_bound_ratio, rep.beta_s[k] / env);
    if (rep.beta_s[k] > env * (1.0 + 1e-6)) rep.bound_ok = false;
    if (rep.beta_s[k] > std::exp(rep.max_log_rate * rep.times[k]) * rep.beta_s[0] * (1.0 + 1e-6)) {
      rep.signed_bound_ok = false;
    }
  }
  rep.relative_drift = std::abs(rep.beta_s.back() - rep.beta_s.front()) / rep.beta_s.front();
  return rep;
}

/// C_s^{|s|+1} e^{A t} (1 + 2 C_s e^{A t} ||u0||_{H^s})^{2|s|/(1-2|s|)} ||u0||_{H^s}.
inline double apriori_rhs(double u0_norm, double s, double t, double c_s, double a) {
  if (!(s > -0.5 && s < 0.0)) throw ContractError("apriori_rhs: requires -1/2 < s < 0");
  const double as = std::abs(s);
  const double growth = std::exp(a * std::abs(t));
  return std::pow(c_s, as + 1.0) * growth * std::pow(1.0 + 2.0 * c_s * growth * u0_norm, 2.0 * as / (1.0 - 2.0 * as)) *
         u0_norm;
}

struct AprioriBound {
  double lhs;
  double rhs;
  bool ok;
};

/// lhs = ||u(t)||_{H^s} for a given state, rhs from the initial data.
inline AprioriBound apriori_bound_eval(const RealField& u0, const RealField& ut, double s, double t, double c_s,
                                       double a) {
  const double lhs = sobolev_norm(ut, SobolevIndex(s));
  const double rhs = apriori_rhs(sobolev_norm(u0, SobolevIndex(s)), s, t, c_s, a);
  return AprioriBound{lhs, rhs, lhs <= rhs};
}

/// Same, evolving ILW from u0 to time t with step dt.
inline AprioriBound apriori_bound_eval(const RealField& u0, double s, double delta, double t, double c_s, double a,
                                       double dt) {
  const auto ut = t == 0.0 ? u0 : evolve_to(make_ilw(delta, u0.grid()), u0, t, dt);
  return apriori_bound_eval(u0, ut, s, t, c_s, a);
}

}  // namespace ilw

#include <gtest/gtest.h>

#include <cmath>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "ilw/lax_functionals.hpp"
#include "ilw/random_field.hpp"

using namespace ilw;

namespace {

RealField single_mode(const SpectralGrid& g, double eps) {
  return sample_function(g, [eps](double x) { return 2.0 * eps * std::cos(2.0 * kPi * x); });
}

RealField smooth_data(const SpectralGrid& g, std::uint64_t seed, double amplitude, std::size_t band = 16) {
  return random_field(-0.25, amplitude, seed, g, {.decay = 2.0, .band = band});
}

// Dense oracle: (M + kappa)^{-1} by full-pivot LU on a matrix assembled entry by entry.
double dense_beta(const RealField& u, double kappa, std::size_t modes) {
  const auto& g = u.grid();
  const long half = long(g.size() / 2);
  auto uhat = [&](long k) { return (k <= -half || k >= half) ? cplx{} : u.coefficient(k); };
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(long(modes), long(modes));
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(static_cast<long>(modes));
  for (long j = 0; j < long(modes); ++j) {
    rhs(j) = uhat(j);
    for (long k = 0; k < long(modes); ++k) m(j, k) = uhat(j - k) / g.period();
    m(j, j) += g.fundamental() * double(j) + kappa;
  }
  const Eigen::VectorXcd x = m.fullPivLu().solve(rhs);
  return (rhs.adjoint() * x)(0).real() / g.period();
}

double norm_sq_plus(const RealField& u) { return std::pow(sobolev_norm(hardy_project(u), SobolevIndex(0.0)), 2); }

}  // namespace

TEST(BuildLax, FreeAndConstant) {
  const SpectralGrid g(2.0, 32);
  const auto free = build_lax(RealField::zero(g), HardyCutoff::modes(10));
  for (long j = 0; j < 10; ++j)
    for (long k = 0; k < 10; ++k) EXPECT_EQ(free.matrix(j, k), j == k ? cplx(kPi * double(j), 0.0) : cplx{});
  const auto c = sample_function(g, [](double) { return 0.75; });
  const auto shifted = build_lax(c, HardyCutoff::modes(10));
  for (long j = 0; j < 10; ++j) {
    EXPECT_NEAR(shifted.matrix(j, j).real(), kPi * double(j) + 0.75, 1e-14);
    for (long k = 0; k < 10; ++k) {
      if (k == j) continue;
      EXPECT_LT(std::abs(shifted.matrix(j, k)), 1e-15);
    }
  }
}

TEST(BuildLax, HermitianWithBandStructure) {
  const SpectralGrid g(1.0, 32);
  const auto u = random_field(-0.25, 1.0, 3, g, {.random_mean = true});
  const auto lax = build_lax(u, HardyCutoff::modes(64));
  EXPECT_LT((lax.matrix - lax.matrix.adjoint()).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_EQ(lax.matrix(20, 4), cplx{});  // |j - k| >= N/2
  EXPECT_EQ(lax.matrix(3, 3).imag(), 0.0);
  EXPECT_NEAR(lax.matrix(5, 5).real(), 10.0 * kPi + u.mean(), 1e-12);
  EXPECT_EQ(lax.modes(), 64u);
  EXPECT_NEAR(lax.cutoff_frequency(), 126.0 * kPi, 1e-12);
}

TEST(BuildLax, CutoffContract) {
  const SpectralGrid g(1.0, 32);
  EXPECT_EQ(HardyCutoff::from_frequency(2.0 * kPi * 20.0, g).count(), 21u);
  EXPECT_THROW(HardyCutoff::from_frequency(2.0 * kPi * 20.5, g), ContractError);
  EXPECT_THROW(HardyCutoff::modes(0), ContractError);
  EXPECT_THROW(HardyCutoff::modes(kMaxHardyModes + 1), ContractError);
}

TEST(BuildLax, SmallPerturbationOfFreeSpectrum) {
  const SpectralGrid g(1.0, 64);
  const double eps = 0.01;
  const auto lax = build_lax(single_mode(g, eps), HardyCutoff::modes(32));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(lax.matrix);
  for (long j = 0; j < 32; ++j) EXPECT_LT(std::abs(es.eigenvalues()(j) - 2.0 * kPi * double(j)), eps * eps);
  EXPECT_NEAR(es.eigenvalues()(0), -eps * eps / (2.0 * kPi), 1e-2 * eps * eps);
}

TEST(CheckKappa, FreeCaseMonotoneAndFailure) {
  const SpectralGrid g(1.0, 64);
  const auto cut = HardyCutoff::modes(32);
  const auto z = check_kappa(RealField::zero(g), -0.25, 2.0, 1.5, cut);
  EXPECT_DOUBLE_EQ(z.threshold, 1.5);
  EXPECT_DOUBLE_EQ(z.lambda_min, 0.0);
  EXPECT_TRUE(z.ok);
  EXPECT_FALSE(check_kappa(RealField::zero(g), -0.25, 1.0, 1.5, cut).ok);

  const auto u = random_field(-0.25, 3.0, 1, g);
  double prev = 1e300;
  for (double kappa : {1.0, 2.0, 8.0, 32.0, 128.0}) {
    const double t = check_kappa(u, -0.25, kappa, 1.0, cut).threshold;
    EXPECT_LE(t, prev);
    prev = t;
  }
  const auto deep = sample_function(g, [](double) { return -50.0; });
  const auto bad = check_kappa(deep, -0.25, 1.0, 1.0, cut);
  EXPECT_FALSE(bad.ok);
  EXPECT_NEAR(bad.lambda_min, -50.0, 1e-12);
  EXPECT_LE(bad.lambda_min + 1.0, 0.0);
}

TEST(Resolvent, FreeSolveResidualAndMonotonicity) {
  const SpectralGrid g(1.0, 64);
  const auto cut = HardyCutoff::modes(32);
  const auto u = random_field(-0.25, 1.0, 2, g);
  const auto g0 = hardy_data(u, cut);
  const auto free = build_lax(RealField::zero(g), cut);
  const auto x0 = resolvent_solve(free, 3.0, g0);
  for (long j = 0; j < 32; ++j) EXPECT_LT(std::abs(x0(j) - g0(j) / (2.0 * kPi * double(j) + 3.0)), 1e-16);

  const auto lax = build_lax(u, cut);
  const auto x = resolvent_solve(lax, 16.0, g0);
  Eigen::MatrixXcd a = lax.matrix;
  a.diagonal().array() += 16.0;
  EXPECT_LT((a * x - g0).norm() / g0.norm(), 1e-12);
  EXPECT_LT(resolvent_solve(lax, 32.0, g0).norm(), x.norm());

  const auto deep = sample_function(g, [](double) { return -50.0; });
  EXPECT_THROW(resolvent_solve(build_lax(deep, cut), 10.0, hardy_data(deep, cut)), KappaTooSmall);
  EXPECT_THROW(resolvent_solve(lax, 16.0, Eigen::VectorXcd::Zero(3)), DimensionError);
}

TEST(MState, ZeroDecayAndNeumannSeries) {
  const SpectralGrid g(1.0, 64);
  const auto cut = HardyCutoff::modes(32);
  for (const auto& c : m_state(RealField::zero(g), 8.0, cut).coeffs) EXPECT_EQ(c, cplx{});

  const double eps = 1e-3, kappa = 10.0;
  const auto m = m_state(single_mode(g, eps), kappa, cut);
  const double w = 2.0 * kPi;
  // -R0 g + R0 (u R0 g) with g = eps e_1; u R0 g lives on modes 0 and 2
  std::vector<cplx> neumann(32, cplx{});
  neumann[1] = -eps / (w + kappa);
  neumann[0] = eps * eps / ((w + kappa) * kappa);
  neumann[2] = eps * eps / ((w + kappa) * (2.0 * w + kappa));
  double err = 0.0;
  for (std::size_t j = 0; j < 32; ++j) err = std::max(err, std::abs(m.coeffs[j] - neumann[j]));
  EXPECT_LT(err, eps * eps * eps);

  const SpectralGrid g2(2.0 * kPi, 64);
  const auto u = smooth_data(g2, 4, 1.0, 4);
  std::vector<double> lk, lm;
  for (double k : {8.0, 16.0, 32.0, 64.0}) {
    lk.push_back(std::log(k));
    lm.push_back(std::log(sobolev_norm(m_state(u, k, cut), SobolevIndex(-0.25))));
    const auto n = mstate_norms(m_state(u, k, cut), u, -0.25, k);
    EXPECT_LE(n.m_hs1_kappa, 2.0 * n.u_hs_kappa);
  }
  const double mk = (lk[0] + lk[1] + lk[2] + lk[3]) / 4.0, mm = (lm[0] + lm[1] + lm[2] + lm[3]) / 4.0;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < 4; ++i) {
    num += (lk[i] - mk) * (lm[i] - mm);
    den += (lk[i] - mk) * (lk[i] - mk);
  }
  EXPECT_LE(num / den, -0.9);
}

TEST(Beta, ZeroPerturbativeAndDense) {
  const SpectralGrid g(1.0, 64);
  const auto cut = HardyCutoff::modes(32);
  EXPECT_EQ(beta(RealField::zero(g), 4.0, cut), 0.0);
  const double eps = 1e-3, kappa = 32.0;
  const auto u = single_mode(g, eps);
  const double b = beta(u, kappa, cut);
  EXPECT_NEAR(b, dense_beta(u, kappa, 32), 1e-12 * b);
  const double lead = eps * eps / (2.0 * kPi + kappa);
  EXPECT_NEAR(b, lead, 1e-8 * lead);

  const auto r = random_field(-0.25, 1.0, 8, g);
  const double br = beta(r, kappa, cut);
  EXPECT_NEAR(br, dense_beta(r, kappa, 32), 1e-12 * br);
  const auto routes = beta_routes(r, kappa, cut);
  EXPECT_NEAR(routes.inner_product, routes.integral, 1e-11 * br);
}

TEST(Beta, TranslationInvariance) {
  const SpectralGrid g(1.0, 64);
  const auto cut = HardyCutoff::modes(64);
  const auto u = random_field(-0.25, 2.0, 5, g);
  const auto v = translate(u, 0.3183);
  EXPECT_NEAR(beta(v, 16.0, cut), beta(u, 16.0, cut), 1e-12 * beta(u, 16.0, cut));
  const double a = beta_s(u, 16.0, -0.25, cut).beta_s, b = beta_s(v, 16.0, -0.25, cut).beta_s;
  EXPECT_NEAR(a, b, 1e-12 * a);
}

TEST(Beta, PositivityMonotonicityAndLargeTau) {
  const SpectralGrid g(1.0, 64);
  const auto cut = HardyCutoff::modes(64);
  const auto u = random_field(-0.25, 2.0, 6, g, {.random_mean = true});
  const LaxSpectrum spec(u, cut);
  double prev = 1e300;
  for (double tau = 4.0; tau < 1e5; tau *= 2.0) {
    const double b = spec.beta(tau);
    EXPECT_GE(b, 0.0);
    EXPECT_LE(b, prev);
    EXPECT_NEAR(b, beta(u, tau, cut), 1e-12 * b);
    prev = b;
  }
  const double p = norm_sq_plus(u);
  const double e3 = std::abs(1e3 * spec.beta(1e3) - p) / p;
  const double e4 = std::abs(1e4 * spec.beta(1e4) - p) / p;
  EXPECT_LT(e4, e3);
  EXPECT_LT(e4, 1e-2);
}

TEST(Beta, TruncationConvergence) {
  const SpectralGrid g(1.0, 64);
  const auto u = smooth_data(g, 2, 1.0, 8);
  const double b64 = beta(u, 16.0, HardyCutoff::modes(64));
  const double b128 = beta(u, 16.0, HardyCutoff::modes(128));
  EXPECT_LT(std::abs(b128 - b64), 1e-9 * b64);
}

TEST(BetaS, ZeroAndPerturbativeQuadrature) {
  const SpectralGrid g(1.0, 64);
  const auto cut = HardyCutoff::modes(32);
  EXPECT_EQ(beta_s(RealField::zero(g), 32.0, -0.25, cut).beta_s, 0.0);
  EXPECT_THROW(beta_s(RealField::zero(g), 32.0, -0.5, cut), ContractError);
  EXPECT_THROW(beta_s(RealField::zero(g), 0.5, -0.25, cut), ContractError);

  const double eps = 1e-3, kappa = 32.0;
  for (double s : {-0.25, -0.1, -0.45}) {
    const auto prof = beta_s(single_mode(g, eps), kappa, s, cut);
    boost::math::quadrature::exp_sinh<double> es;
    const double ref = eps * eps * es.integrate([&](double t) { return std::pow(t, 2.0 * s) / (2.0 * kPi + t); }, kappa,
                                                std::numeric_limits<double>::infinity());
    EXPECT_NEAR(prof.beta_s, ref, 1e-8 * ref) << s;
    EXPECT_LT(std::abs(prof.tail), 1e-8 * prof.beta_s);
    EXPECT_TRUE(std::is_sorted(prof.tau.begin(), prof.tau.end()));
    EXPECT_EQ(prof.tau.size(), prof.beta.size());
    EXPECT_DOUBLE_EQ(prof.sigma, 0.5 * (0.5 + s));
  }
}

TEST(BetaS, KappaBelowSpectrumThrows) {
  const SpectralGrid g(1.0, 64);
  const auto deep = sample_function(g, [](double) { return -50.0; });
  EXPECT_THROW(beta_s(deep, 10.0, -0.25, HardyCutoff::modes(32)), KappaTooSmall);
}

TEST(BetaS, NormEquivalenceOnRandomFields) {
  const SpectralGrid g(1.0, 128);
  const auto cut = HardyCutoff::modes(128);
  double lo = 1e300, hi = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto u = random_field(-0.25, 0.2 + 0.05 * double(seed), seed, g);
    const double n = sobolev_norm(u, SobolevIndex(-0.25, 32.0));
    const double r = beta_s(u, 32.0, -0.25, cut).beta_s / (n * n);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  EXPECT_LT(std::max(hi, 1.0 / lo), 10.0);
}

TEST(Gradient, ZeroRealAndFiniteDifference) {
  const SpectralGrid g(2.0 * kPi, 128);
  const auto cut = HardyCutoff::modes(64);
  const auto zero = beta_gradient(RealField::zero(g), 16.0, cut);
  for (const auto& c : zero.coeffs()) EXPECT_EQ(c, cplx{});

  const auto u = smooth_data(g, 12, 3.0);
  const auto m = m_state(u, 16.0, cut);
  // pointwise -(m + conj m + |m|^2) is real
  const auto ms = detail::hardy_samples(m, 512);
  double imag = 0.0;
  for (const auto& z : ms) imag = std::max(imag, std::abs((-(z + std::conj(z) + z * std::conj(z))).imag()));
  EXPECT_LT(imag, 1e-12);

  const auto grad = beta_gradient(u, m);
  double worst = 0.0;
  for (std::uint64_t d = 0; d < 20; ++d) {
    const auto v = smooth_data(g, 100 + d, 1.0);
    const double h = 1e-5;
    const double fd = (beta(combine(1.0, u, h, v), 16.0, cut) - beta(combine(1.0, u, -h, v), 16.0, cut)) / (2.0 * h);
    const double an = inner_product(grad, v);
    worst = std::max(worst, std::abs(fd - an) / std::abs(an));
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(FlowDerivative, ZeroAndTrajectoryFiniteDifference) {
  const SpectralGrid g(2.0 * kPi, 256);
  const auto cut = HardyCutoff::modes(128);
  const auto z = beta_flow_derivative(RealField::zero(g), 32.0, -0.25, 0.5, cut);
  EXPECT_EQ(z.total, 0.0);
  EXPECT_EQ(z.I1, cplx{});
  EXPECT_EQ(z.I3, 0.0);

  const auto u0 = smooth_data(g, 11, 3.0);
  const double h = 1e-4, delta = 0.5;
  const auto p = make_ilw(delta, g);
  const auto um = evolve_to(p, u0, 0.3, h);
  const auto uc = evolve_to(p, um, h, h);
  const auto up = evolve_to(p, uc, h, h);
  const double fd = (beta_s(up, 32.0, -0.25, cut).beta_s - beta_s(um, 32.0, -0.25, cut).beta_s) / (2.0 * h);
  const auto pred = beta_flow_derivative(uc, 32.0, -0.25, delta, cut);
  EXPECT_NEAR(pred.total, fd, 1e-4 * std::abs(pred.total));
  EXPECT_EQ(pred.I2, std::conj(pred.I1));

  const auto pb = make_bo(g);
  const auto bm = evolve_to(pb, u0, 0.3, h);
  const auto bp = evolve_to(pb, evolve_to(pb, bm, h, h), h, h);
  const double fdb = (beta_s(bp, 32.0, -0.25, cut).beta_s - beta_s(bm, 32.0, -0.25, cut).beta_s) / (2.0 * h);
  EXPECT_LT(std::abs(fdb), 1e-7);
}

TEST(Gronwall, ControlBoundAndDepthTrend) {
  const SpectralGrid g(2.0 * kPi, 128);
  const auto u0 = smooth_data(g, 21, 3.0, 12);
  GronwallOptions o;
  o.cutoff = HardyCutoff::modes(64);
  o.dt = 1e-3;
  o.samples = 50;
  o.bo_control = true;
  const auto bo = gronwall_experiment(u0, o);
  EXPECT_LT(bo.a_hat, 1e-6);
  o.bo_control = false;
  std::vector<double> a;
  for (double d : {0.5, 1.0, 2.0}) {
    o.delta = d;
    const auto rep = gronwall_experiment(u0, o);
    EXPECT_TRUE(rep.bound_ok);
    EXPECT_TRUE(rep.signed_bound_ok);
    EXPECT_EQ(rep.times.size(), 51u);
    EXPECT_NEAR(rep.times.back(), 1.0, 1e-12);
    a.push_back(rep.a_hat);
  }
  EXPECT_GT(a[0], a[1]);
  EXPECT_GT(a[1], a[2]);
}

TEST(Gronwall, KappaViolationAborts) {
  const SpectralGrid g(2.0 * kPi, 64);
  GronwallOptions o;
  o.kappa = 1.0;
  o.cutoff = HardyCutoff::modes(32);
  o.samples = 4;
  o.dt = 1e-2;
  o.final_time = 0.04;
  EXPECT_THROW(gronwall_experiment(smooth_data(g, 1, 40.0), o), KappaTooSmall);
}

TEST(Apriori, TrivialCasesAndComposite) {
  EXPECT_THROW(apriori_rhs(1.0, -0.5, 0.0, 1.0, 0.0), ContractError);
  // exponent 2|s|/(1-2|s|) = 1 at s = -1/4
  EXPECT_DOUBLE_EQ(apriori_rhs(2.0, -0.25, 0.0, 1.0, 0.0), (1.0 + 4.0) * 2.0);
  const SpectralGrid g(2.0 * kPi, 64);
  const auto u0 = smooth_data(g, 3, 2.0, 8);
  const auto b0 = apriori_bound_eval(u0, u0, -0.25, 0.0, 1.0, 0.0);
  EXPECT_GE(b0.rhs, b0.lhs);
  EXPECT_TRUE(b0.ok);

  const auto cut = HardyCutoff::modes(64);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto u = smooth_data(g, 50 + seed, 2.0, 8);
    GronwallOptions o;
    o.cutoff = cut;
    o.samples = 10;
    o.dt = 2e-3;
    const auto rep = gronwall_experiment(u, o);
    const double n = sobolev_norm(u, SobolevIndex(-0.25, 32.0));
    const double ratio = beta_s(u, 32.0, -0.25, cut).beta_s / (n * n);
    const double cs = std::max({1.0, ratio, 1.0 / ratio});
    for (double t : {0.25, 0.5, 1.0}) {
      const auto b = apriori_bound_eval(u, -0.25, 1.0, t, cs, rep.a_hat, 2e-3);
      EXPECT_TRUE(b.ok) << seed << " " << t << " " << b.lhs << " " << b.rhs;
    }
  }
}

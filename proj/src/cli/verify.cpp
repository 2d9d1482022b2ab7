#include "ensure/cli/verify.hpp"

#include "ensure/core/fft.hpp"
#include "ensure/core/linear_operator.hpp"
#include "ensure/data/phantom.hpp"
#include "ensure/forward/coils.hpp"
#include "ensure/net/grad_check.hpp"
#include "ensure/risk/linear_study.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace ensure {

namespace {

auto check(std::string name, Real stat, Real tol, std::string detail = {}) -> VerifyCheck
{
  bool const ok = std::isfinite(stat) && stat <= tol;
  return {std::move(name), stat, tol, ok, std::move(detail)};
}

auto fmt(Real v) -> std::string
{
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

struct MeanSe
{
  Real mean, se;
};

auto mean_se(std::vector<Real> const &v) -> MeanSe
{
  Real s = 0;
  for (Real x : v)
    s += x;
  Real const n = Real(v.size()), m = s / n;
  Real ss = 0;
  for (Real x : v)
    ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / (n - 1) / n)};
}

auto to_vec(ComplexImage const &x) -> Eigen::VectorXcd
{
  Eigen::VectorXcd v(x.size());
  for (Index i = 0; i < x.size(); ++i)
    v(i) = x[i];
  return v;
}

auto tight(Real lambda = 1e-10) -> SolverConfig
{
  return SolverConfig{lambda, 400, 1e-13, false};
}

auto rel(ComplexImage const &a, ComplexImage const &b) -> Real
{
  return norm(a - b) / std::max(norm(b), 1e-300);
}

auto random_density(Index n, Real lo, Real hi, Rng &rng) -> DensityMap
{
  std::vector<Real> d(static_cast<std::size_t>(n));
  for (auto &v : d)
    v = rng.uniform(lo, hi);
  return DensityMap::from_values({1, n}, d, DensityKind::GaussianVardens);
}

auto empty_mask_probability(DensityMap const &d) -> Real
{
  Real p0 = 1;
  for (Real v : d.values())
    p0 *= 1 - v;
  return p0;
}

// ---------------------------------------------------------------- adjoint

auto suite_adjoint(VerifyOptions const &o) -> std::vector<VerifyCheck>
{
  Rng rng(o.seed, 0x61646a);
  Shape const sh{16, 16};
  auto const vd = make_density(DensityKind::GaussianVardens, sh, 4.0);
  std::vector<std::pair<std::string, MeasurementOperator>> ops;
  ops.emplace_back("full_sampling", MeasurementOperator(SamplingMask::full(sh)));
  ops.emplace_back("vardens_4x", MeasurementOperator(sample_mask(vd, rng)));
  ops.emplace_back("cartesian_lines_2x",
                   MeasurementOperator(sample_mask(make_density(DensityKind::CartesianLines, sh, 2.0), rng)));
  ops.emplace_back("vardens_4x_8coil", MeasurementOperator(sample_mask(vd, rng), simulate_coils(8, sh, rng)));
  Shape const odd{15, 17};
  ops.emplace_back("odd_shape_3coil",
                   MeasurementOperator(sample_mask(make_density(DensityKind::GaussianVardens, odd, 3.0), rng),
                                       simulate_coils(3, odd, rng)));
  std::vector<VerifyCheck> out;
  for (auto const &[name, op] : ops)
    out.push_back(check("operator_" + name, adjoint_check(op.contract(), 20, rng), 1e-10));

  Index const n = sh.size();
  LinearOperatorContract fft{n, n,
                             [&](CxVector const &x) { return fft2c(ComplexImage(sh, x)).values(); },
                             [&](CxVector const &y) { return ifft2c(ComplexImage(sh, y)).values(); }};
  out.push_back(check("centred_fft", adjoint_check(fft, 20, rng), 1e-12));

  // R_s against its solved adjoint
  // lambda well above rounding: null-space parts of the solve scale with 1/lambda
  RangeProjector proj(ops[1].second, {vd, WeightingMode::CgWeighted}, tight(1e-6));
  LinearOperatorContract rs{n, n,
                            [&](CxVector const &x) { return proj.apply(ComplexImage(sh, x)).x.values(); },
                            [&](CxVector const &y) { return proj.adjoint(ComplexImage(sh, y)).values(); }};
  out.push_back(check("weighted_projection", adjoint_check(rs, 5, rng), 1e-8));
  return out;
}

// ------------------------------------------------------------- projection

auto suite_projection(VerifyOptions const &o) -> std::vector<VerifyCheck>
{
  Rng rng(o.seed, 0x70726f6a);
  Shape const sh{16, 16};
  auto const vd = make_density(DensityKind::GaussianVardens, sh, 4.0);
  std::vector<VerifyCheck> out;
  {
    MeasurementOperator op(sample_mask(vd, rng));
    auto const e = randn_complex(sh, 1.0, rng);
    auto const pe = project_range(op, e, tight()).x;
    auto const ppe = project_range(op, pe, tight()).x;
    out.push_back(check("single_coil_idempotent", rel(ppe, pe), 1e-8));
    out.push_back(check("single_coil_null_residual", std::sqrt(norm2(op.apply(e - pe)) / norm2(op.apply(e))), 1e-8,
                        "||A (e - P e)|| / ||A e||"));
    out.push_back(check("single_coil_orthogonal", std::abs(inner(e - pe, pe)) / norm2(e), 1e-8));
    auto const cg = weighted_project(op, {vd, WeightingMode::CgWeighted}, e, tight()).x;
    auto const cf = weighted_project(op, {vd, WeightingMode::ClosedForm}, e, tight()).x;
    out.push_back(check("weighted_cg_vs_closed_form", rel(cg, cf), 1e-8));
  }
  {
    // multi-coil normal operators are ill-conditioned, so compare the
    // regularized solves with a dense factorization instead
    Shape const small{8, 8};
    auto const d8 = make_density(DensityKind::GaussianVardens, small, 4.0);
    MeasurementOperator op(sample_mask(d8, rng), simulate_coils(4, small, rng));
    Real const lambda = 1e-6;
    Eigen::MatrixXcd N = dense_matrix([&](ComplexImage const &x) { return op.normal(x); }, small);
    Eigen::MatrixXcd Nl = N;
    Nl.diagonal().array() += lambda;
    auto const e = randn_complex(small, 1.0, rng);
    Eigen::VectorXcd const ev = to_vec(e);
    Eigen::VectorXcd const p_ref = Nl.ldlt().solve(N * ev);
    auto const p = project_range(op, e, tight(lambda)).x;
    out.push_back(check("4coil_projection_vs_dense", (to_vec(p) - p_ref).norm() / p_ref.norm(), 1e-8));
    std::vector<Real> w(static_cast<std::size_t>(small.size()));
    for (Index i = 0; i < small.size(); ++i)
      w[std::size_t(i)] = 1.0 / std::sqrt(d8[i]);
    Eigen::MatrixXcd const Nw = dense_matrix([&](ComplexImage const &x) { return op.weighted_normal(x, w); }, small);
    Eigen::VectorXcd const r_ref = Nl.ldlt().solve(Nw * ev);
    auto const r = weighted_project(op, {d8, WeightingMode::CgWeighted}, e, tight(lambda)).x;
    out.push_back(check("4coil_weighted_vs_dense", (to_vec(r) - r_ref).norm() / r_ref.norm(), 1e-8));
  }
  return out;
}

// ------------------------------------------------------------------- sure

auto suite_sure(VerifyOptions const &o) -> std::vector<VerifyCheck>
{
  std::vector<VerifyCheck> out;
  ImageMap const identity = [](ComplexImage const &u) { return u; };
  {
    Rng rng(o.seed, 0x6964);
    auto u = randn_complex({2, 2}, 1.0, rng);
    auto e = sure_denoise(identity, u, NoiseModel{1.0}, DivergenceConfig{1e-3, 1, ProbeKind::Rademacher}, rng);
    out.push_back(check("identity_2x2_exact", std::abs(e.total - 4.0), 1e-9, "SURE = " + fmt(e.total) + ", MSE = 4"));
  }
  Shape const sh{16, 16};
  Real const sigma = 1.0;
  for (Real alpha : {0.0, 0.5, 1.0}) {
    ImageMap f = [alpha](ComplexImage const &u) { return alpha * u; };
    Rng noise(o.seed, 0x6e6f), probes(o.seed, 0x7072);
    std::vector<Real> v;
    v.reserve(std::size_t(o.draws));
    for (int t = 0; t < o.draws; ++t) {
      auto u = randn_complex(sh, sigma, noise); // rho = 0
      v.push_back(sure_denoise(f, u, NoiseModel{sigma}, DivergenceConfig{}, probes).total);
    }
    auto [m, se] = mean_se(v);
    Real const mse = alpha * alpha * sigma * sigma * Real(sh.size());
    Real const z = se > 0 ? std::abs(m - mse) / se : std::abs(m - mse) * 1e12;
    out.push_back(check("alpha_" + fmt(alpha) + "_unbiased", z, 3.0,
                        "mean SURE " + fmt(m) + " +- " + fmt(se) + ", MSE " + fmt(mse) + " (statistic in SE)"));
  }
  return out;
}

// ------------------------------------------------------------- divergence

// chi-square quantile (Wilson-Hilferty)
auto chi2_quantile(Real dof, Real z) -> Real
{
  Real const a = 2.0 / (9.0 * dof);
  return dof * std::pow(1 - a + z * std::sqrt(a), 3);
}

auto suite_divergence(VerifyOptions const &o) -> std::vector<VerifyCheck>
{
  Shape const sh{16, 16};
  Index const n = sh.size(), m = 2 * n;
  Rng br(o.seed, 0x42);
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(m, m);
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i < m; ++i)
      B(i, j) += 0.1 * br.normal();
  ImageMap f = [&](ComplexImage const &x) {
    Eigen::VectorXd v(m);
    for (Index i = 0; i < n; ++i) {
      v(i) = x[i].real();
      v(n + i) = x[i].imag();
    }
    Eigen::VectorXd w = B * v;
    ComplexImage out(x.shape());
    for (Index i = 0; i < n; ++i)
      out[i] = Cx{w(i), w(n + i)};
    return out;
  };
  Real const trace = B.trace();
  Eigen::MatrixXd const Bs = 0.5 * (B + B.transpose());
  Real const var1 = 2 * Bs.squaredNorm(); // one Gaussian probe
  auto const u = randn_complex(sh, 1.0, br);

  std::vector<VerifyCheck> out;
  int const kmax = o.probes;
  std::vector<std::pair<int, int>> const plan{{std::max(1, kmax / 100), 100}, {std::max(1, kmax / 10), 20}, {kmax, 6}};
  std::vector<Real> log_k, log_rms;
  Rng rng(o.seed, 0x646976);
  for (auto [k, reps] : plan) {
    Real ss = 0;
    for (int r = 0; r < reps; ++r) {
      Real const est = mc_divergence(f, u, DivergenceConfig{1e-3, k}, rng);
      if (k == kmax && r == 0)
        out.push_back(check("trace_rel_error_K" + std::to_string(k), std::abs(est - trace) / std::abs(trace), 0.02,
                            "estimate " + fmt(est) + ", trace " + fmt(trace)));
      ss += (est - trace) * (est - trace);
    }
    Real const rms = std::sqrt(ss / reps), se = std::sqrt(var1 / k);
    Real const ratio = rms / se;
    Real const lo = std::sqrt(chi2_quantile(reps, -3.29) / reps), hi = std::sqrt(chi2_quantile(reps, 3.29) / reps);
    VerifyCheck c{"rms_over_se_K" + std::to_string(k), ratio, hi, ratio >= lo && ratio <= hi,
                  "RMS error " + fmt(rms) + " over " + std::to_string(reps) + " runs, predicted " + fmt(se) +
                    "; accepted ratio [" + fmt(lo) + ", " + fmt(hi) + "]"};
    out.push_back(c);
    log_k.push_back(std::log(Real(k)));
    log_rms.push_back(std::log(rms));
  }
  // least-squares slope of log RMS error against log K
  Real mk = 0, mr = 0;
  for (std::size_t i = 0; i < log_k.size(); ++i) {
    mk += log_k[i];
    mr += log_rms[i];
  }
  mk /= Real(log_k.size());
  mr /= Real(log_k.size());
  Real sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < log_k.size(); ++i) {
    sxy += (log_k[i] - mk) * (log_rms[i] - mr);
    sxx += (log_k[i] - mk) * (log_k[i] - mk);
  }
  Real const slope = sxy / sxx;
  out.push_back(check("error_slope", std::abs(slope + 0.5), 0.2, "fitted slope " + fmt(slope) + ", expected -0.5"));
  return out;
}

// ----------------------------------------------------------------- lemma1

auto suite_lemma1(VerifyOptions const &o) -> std::vector<VerifyCheck>
{
  if (o.n < 2 || o.n > 12)
    throw std::invalid_argument("verify lemma1: --n must be in [2, 12]");
  Index const n = o.n;
  Shape const sh{1, n};
  Rng rng(o.seed, 0x6c31);
  Eigen::MatrixXcd const F = dense_matrix([](ComplexImage const &x) { return fft2c(x); }, sh);
  Real const bound = std::pow(0.5, Real(n));

  std::vector<std::pair<std::string, DensityMap>> cases;
  cases.emplace_back("uniform_half", DensityMap::from_values(sh, std::vector<Real>(static_cast<std::size_t>(n), 0.5)));
  // every d_i >= 1/2 keeps the empty-mask probability below 2^-n
  cases.emplace_back("random_d", random_density(n, 0.5, 0.95, rng));
  cases.emplace_back("random_wide_d", random_density(n, 0.05, 0.95, rng));

  std::vector<VerifyCheck> out;
  for (auto const &[name, d] : cases) {
    auto const masks = enumerate_masks(d);
    Eigen::MatrixXcd const Q = q_bruteforce(d);
    auto const e = randn_complex(sh, 1.0, rng);
    Eigen::VectorXcd const ev = to_vec(e);
    Real lhs = 0;
    for (auto const &[p, mask] : masks) {
      auto k = fft2c(e);
      for (Index i = 0; i < n; ++i)
        if (!mask[i])
          k[i] = 0;
      lhs += p * norm2(ifft2c(k));
    }
    Real const rhs = (ev.adjoint() * Q * ev)(0).real();
    out.push_back(check(name + "_expected_projection", std::abs(lhs - rhs), 1e-10,
                        "E ||P_s e||^2 = " + fmt(lhs) + ", e^H Q e = " + fmt(rhs)));

    Eigen::VectorXcd dv(n);
    for (Index i = 0; i < n; ++i)
      dv(i) = d[i];
    Eigen::MatrixXcd const Qd = F.adjoint() * dv.asDiagonal() * F;
    Real const p0 = empty_mask_probability(d);
    Real const dev = Eigen::JacobiSVD<Eigen::MatrixXcd>(Q - Qd).singularValues()(0);
    if (name != "random_wide_d")
      out.push_back(check(name + "_closed_form", dev, bound,
                          "||Q - F^H diag(d) F||_op; empty-mask probability " + fmt(p0)));
    // the deviation is exactly the renormalization over non-empty masks
    out.push_back(check(name + "_renormalization", ((1 - p0) * Q - Qd).norm(), 1e-12,
                        "||(1 - p0) Q - F^H diag(d) F||_F, p0 = " + fmt(p0)));
  }
  return out;
}

// ----------------------------------------------------------------- lemma2

auto suite_lemma2(VerifyOptions const &o) -> std::vector<VerifyCheck>
{
  Index const n = o.n;
  Shape const sh{1, n};
  Rng rng(o.seed, 0x6c32);
  auto const density = random_density(n, 0.2, 0.9, rng);
  auto const rho = randn_complex(sh, 1.0, rng);
  Eigen::MatrixXcd B1 = 0.9 * Eigen::MatrixXcd::Identity(n, n), B2 = 0.6 * Eigen::MatrixXcd::Identity(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      Real const r1 = rng.normal();
      B1(i, j) += 0.1 * Cx{r1, rng.normal()};
      Real const r2 = rng.normal();
      B2(i, j) += 0.1 * Cx{r2, rng.normal()};
    }
  LinearStudyConfig cfg;
  cfg.draws = o.draws;
  cfg.seed = o.seed;
  auto const s = linear_study(B1, B2, rho, density, cfg);
  auto z = [&](Real exact) { return std::abs(s.d_ensure - exact) / s.d_ensure_se; };
  std::string const base = "dENSURE " + fmt(s.d_ensure) + " +- " + fmt(s.d_ensure_se);
  std::vector<VerifyCheck> out;
  out.push_back(check("difference_vs_mse", z(s.d_mse), 3.0, base + ", dMSE " + fmt(s.d_mse) + " (statistic in SE)"));
  out.push_back(check("gradient_vs_mse", s.grad_z_mse, 3.0,
                      "largest of " + std::to_string(s.grad_components) + " componentwise z-scores"));
  out.push_back(check("difference_vs_weighted_risk", z(s.d_weighted_risk), 3.0,
                      base + ", dL " + fmt(s.d_weighted_risk) + " with L = E ||R_s (B u - rho)||^2"));
  // the largest of 2n^2 z-scores: a per-component 3 SE bound would fail by chance
  out.push_back(check("gradient_vs_weighted_risk", s.grad_z_weighted_risk, 4.5,
                      "largest of " + std::to_string(s.grad_components) + " componentwise z-scores"));
  return out;
}

// -------------------------------------------------------------- gradcheck

auto grad_sample(Shape sh, Real accel, Real sigma, std::uint64_t seed, DensityMap &density) -> TrainingSample
{
  Rng rng(seed, 0x6763);
  density = make_density(DensityKind::GaussianVardens, sh, accel);
  auto mask = sample_mask(density, rng);
  MeasurementOperator op(mask, std::nullopt, sigma);
  auto rho = randn_complex(sh, 1.0, rng);
  auto y = add_noise(op.apply(rho), mask, sigma, rng);
  return TrainingSample{0, op, y, op.adjoint(y), rho, {}, {}};
}

auto suite_gradcheck(VerifyOptions const &o) -> std::vector<VerifyCheck>
{
  NetConfig tiny;
  tiny.n_layers = 2;
  tiny.features = 2;
  tiny.n_unrolls = 2;
  tiny.dc_iters = 4;
  Real const sigma = 0.1;
  struct Case
  {
    std::string name;
    LossKind kind;
    bool noise;
  };
  std::vector<Case> const cases{{"sup", LossKind::Sup, true},
                                {"kmse", LossKind::Kmse, true},
                                {"ssdu", LossKind::Ssdu, true},
                                {"ensure_data_term", LossKind::Ensure, false},
                                {"ensure", LossKind::Ensure, true},
                                {"gsure", LossKind::Gsure, true}};
  std::vector<VerifyCheck> out;
  for (auto const &c : cases) {
    Real worst = 0;
    for (std::uint64_t k = 0; k < 3; ++k) {
      std::uint64_t const seed = o.seed + k;
      DensityMap density = make_density(DensityKind::Uniform, {6, 6}, 2.0);
      auto sample = grad_sample({6, 6}, 2.0, sigma, seed, density);
      ObjectiveConfig obj;
      obj.kind = c.kind;
      obj.density = density;
      obj.noise.sigma = c.noise ? sigma : 0.0;
      obj.ssdu_ratio = 0.6;
      // the divergence is itself a difference quotient; a wider one keeps
      // the nested differences above rounding
      obj.div.epsilon = 1e-2;
      Rng prep(seed, 0x70);
      prepare_sample(sample, obj, prep);
      auto net = init_network(tiny, seed);
      auto rep = grad_check(net, sample, obj, 1e-4, 0, seed);
      worst = std::max(worst, rep.max_rel_error);
    }
    out.push_back(check(c.name, worst, 1e-4, "largest relative error over all parameters, 3 seeds"));
  }
  // negative control: early-exit DC solves are not differentiated exactly
  {
    Shape const sh{8, 8};
    Rng rng(o.seed, 0x6e63);
    auto density = make_density(DensityKind::GaussianVardens, sh, 2.0);
    MeasurementOperator op(sample_mask(density, rng), simulate_coils(4, sh, rng), sigma);
    auto rho = randn_complex(sh, 1.0, rng);
    auto y = add_noise(op.apply(rho), op.mask(), sigma, rng);
    TrainingSample s{0, op, y, op.adjoint(y), rho, {}, {}};
    ObjectiveConfig obj;
    obj.kind = LossKind::Sup;
    NetConfig c = tiny;
    c.dc_adaptive = true;
    c.dc_tol = 1e-2;
    auto rep = grad_check(init_network(c, o.seed), s, obj, 1e-4, 0);
    out.push_back({"adaptive_dc_detected", rep.max_rel_error, 1e-4, rep.max_rel_error > 1e-4,
                   "early-exit DC must fail the check (error above tolerance)"});
  }
  return out;
}

// -------------------------------------------------------------- weighting

auto suite_weighting(VerifyOptions const &o) -> std::vector<VerifyCheck>
{
  if (o.n < 2 || o.n > 12)
    throw std::invalid_argument("verify weighting: --n must be in [2, 12]");
  Index const n = o.n;
  Shape const sh{1, n};
  Rng rng(o.seed, 0x7767);
  auto const d = random_density(n, 0.2, 0.9, rng);
  auto const masks = enumerate_masks(d);
  Real const p0 = empty_mask_probability(d);

  // errors that do not depend on the mask, as in the weighted-risk identity
  Real worst_unbiased = 0, worst_weighting = 0, worst_ensemble = 0;
  int const trials = 20;
  for (int t = 0; t < trials; ++t) {
    auto const e = randn_complex(sh, 1.0, rng);
    Real const mse = norm2(e);
    Real weighted = 0, unweighted = 0;
    for (auto const &[p, mask] : masks) {
      MeasurementOperator op(mask);
      weighted += p * norm2(weighted_project(op, {d, WeightingMode::CgWeighted}, e, tight()).x);
      unweighted += p * norm2(project_range(op, e, tight()).x);
    }
    MeasurementOperator single(sample_mask(d, rng));
    Real const gsure = norm2(project_range(single, e, tight()).x);
    worst_unbiased = std::max(worst_unbiased, std::abs((1 - p0) * weighted - mse) / mse);
    worst_weighting = std::max(worst_weighting, std::abs(weighted - mse) / std::abs(unweighted - mse));
    worst_ensemble = std::max(worst_ensemble, std::abs(weighted - mse) / std::abs(gsure - mse));
  }
  std::vector<VerifyCheck> out;
  out.push_back(check("weighted_data_term_unbiased", worst_unbiased, 1e-6,
                      "max |(1 - p0) E ||R_s e||^2 - ||e||^2| / ||e||^2 over " + std::to_string(trials) + " errors"));
  VerifyCheck w{"weighting_reduces_bias", worst_weighting, 1.0, worst_weighting < 1.0,
                "max |E ||R_s e||^2 - MSE| / |E ||P_s e||^2 - MSE|"};
  VerifyCheck s{"ensemble_beats_single_mask", worst_ensemble, 1.0, worst_ensemble < 1.0,
                "max |E ||R_s e||^2 - MSE| / |||P_s0 e||^2 - MSE| for one fixed mask s0"};
  out.push_back(w);
  out.push_back(s);
  return out;
}

} // namespace

auto SuiteReport::pass() const -> bool
{
  for (auto const &c : checks)
    if (!c.pass)
      return false;
  return !checks.empty();
}

auto verify_suites() -> std::vector<std::string> const &
{
  static std::vector<std::string> const names{"adjoint", "projection", "sure",      "divergence",
                                              "lemma1",  "lemma2",     "gradcheck", "weighting"};
  return names;
}

auto run_suite(std::string const &suite, VerifyOptions const &opt) -> SuiteReport
{
  using Fn = std::vector<VerifyCheck> (*)(VerifyOptions const &);
  static std::vector<std::pair<std::string, Fn>> const table{
    {"adjoint", suite_adjoint},     {"projection", suite_projection}, {"sure", suite_sure},
    {"divergence", suite_divergence}, {"lemma1", suite_lemma1},       {"lemma2", suite_lemma2},
    {"gradcheck", suite_gradcheck}, {"weighting", suite_weighting}};
  if (opt.draws < 2 || opt.probes < 100)
    throw std::invalid_argument("verify: need --draws >= 2 and --probes >= 100");
  for (auto const &[name, fn] : table)
    if (name == suite) {
      auto const t0 = std::chrono::steady_clock::now();
      SuiteReport r{suite, fn(opt), 0.0};
      r.seconds = std::chrono::duration<Real>(std::chrono::steady_clock::now() - t0).count();
      return r;
    }
  throw std::invalid_argument("unknown verify suite '" + suite + "'");
}

auto verify_json(std::vector<SuiteReport> const &reports) -> std::string
{
  auto num = [](Real v) -> nlohmann::json { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  nlohmann::json doc;
  bool all = !reports.empty();
  doc["suites"] = nlohmann::json::array();
  for (auto const &r : reports) {
    nlohmann::json s{{"suite", r.suite}, {"pass", r.pass()}, {"seconds", r.seconds}};
    s["checks"] = nlohmann::json::array();
    for (auto const &c : r.checks)
      s["checks"].push_back({{"name", c.name},
                             {"statistic", num(c.statistic)},
                             {"tolerance", num(c.tolerance)},
                             {"pass", c.pass},
                             {"detail", c.detail}});
    all = all && r.pass();
    doc["suites"].push_back(std::move(s));
  }
  doc["pass"] = all;
  return doc.dump(2) + "\n";
}

} // namespace ensure

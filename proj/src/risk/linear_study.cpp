#include "ensure/risk/linear_study.hpp"

#include <cmath>
#include <stdexcept>

namespace ensure {

namespace {

auto to_vec(ComplexImage const &x) -> Eigen::VectorXcd
{
  Eigen::VectorXcd v(x.size());
  for (Index i = 0; i < x.size(); ++i)
    v(i) = x[i];
  return v;
}

auto to_img(Eigen::VectorXcd const &v, Shape sh) -> ComplexImage
{
  ComplexImage x(sh);
  for (Index i = 0; i < x.size(); ++i)
    x[i] = v(i);
  return x;
}

auto tight() -> SolverConfig
{
  SolverConfig cfg;
  cfg.tol = 1e-13;
  cfg.max_iters = 200;
  return cfg;
}

auto range_matrix(MeasurementOperator const &op, DensityMap const &density, WeightingMode mode) -> Eigen::MatrixXcd
{
  RangeProjector proj(op, {density, mode}, tight());
  return dense_matrix([&](ComplexImage const &e) { return proj.apply(e).x; }, op.shape());
}

} // namespace

auto dense_matrix(ImageMap const &f, Shape shape) -> Eigen::MatrixXcd
{
  Index const n = shape.size();
  Eigen::MatrixXcd M(n, n);
  for (Index j = 0; j < n; ++j) {
    ComplexImage e(shape);
    e[j] = 1.0;
    M.col(j) = to_vec(f(e));
  }
  return M;
}

auto linear_risks(Eigen::MatrixXcd const &B, ComplexImage const &rho, DensityMap const &density, Real sigma,
                  WeightingMode mode) -> LinearRisks
{
  Shape const sh = rho.shape();
  Index const n = sh.size();
  if (B.rows() != n || B.cols() != n)
    throw ShapeError("linear_risks: B does not match the image size");
  Eigen::VectorXcd const r = to_vec(rho);
  Eigen::MatrixXcd const I = Eigen::MatrixXcd::Identity(n, n);
  LinearRisks out;
  out.grad_mse = Eigen::MatrixXcd::Zero(n, n);
  out.grad_weighted = Eigen::MatrixXcd::Zero(n, n);
  Real const s2 = sigma * sigma;
  for (auto const &[p, mask] : enumerate_masks(density)) {
    MeasurementOperator op(mask);
    Eigen::MatrixXcd P = dense_matrix([&](ComplexImage const &x) { return op.normal(x); }, sh);
    Eigen::MatrixXcd R = range_matrix(op, density, mode);
    Eigen::MatrixXcd Pp = range_matrix(op, density, WeightingMode::None);
    Eigen::VectorXcd bias = (B * P - I) * r;
    Eigen::MatrixXcd BP = B * P;
    // E_n ||C (B u - rho)||^2 with u = P rho + A^H n, Cov(A^H n) = sigma^2 P
    auto risk = [&](Eigen::MatrixXcd const &C) {
      return (C * bias).squaredNorm() + s2 * (C * BP * P * BP.adjoint() * C.adjoint()).trace().real();
    };
    out.mse += p * risk(I);
    out.weighted += p * risk(R);
    out.projected += p * risk(Pp);
    Eigen::MatrixXcd core = bias * (P * r).adjoint() + s2 * BP;
    out.grad_mse += p * 2.0 * core;
    out.grad_weighted += p * 2.0 * R.adjoint() * R * core;
  }
  return out;
}

auto linear_study(Eigen::MatrixXcd const &B1, Eigen::MatrixXcd const &B2, ComplexImage const &rho,
                  DensityMap const &density, LinearStudyConfig const &cfg) -> LinearStudy
{
  if (cfg.draws < 2)
    throw std::invalid_argument("linear_study: need at least two draws");
  Shape const sh = rho.shape();
  Index const n = sh.size();
  auto const r1 = linear_risks(B1, rho, density, cfg.sigma, cfg.mode);
  auto const r2 = linear_risks(B2, rho, density, cfg.sigma, cfg.mode);
  LinearStudy out;
  out.d_mse = r1.mse - r2.mse;
  out.d_weighted_risk = r1.weighted - r2.weighted;
  out.d_projected_risk = r1.projected - r2.projected;

  auto linear = [sh](Eigen::MatrixXcd const &B) {
    return [&B, sh](ComplexImage const &u, MeasurementOperator const &) { return to_img(B * to_vec(u), sh); };
  };
  ReconMap const f1 = linear(B1), f2 = linear(B2);
  WeightingSpec const wspec{density, cfg.mode};
  NoiseModel const noise{cfg.sigma};
  SolverConfig const scfg = tight();

  Rng mask_rng(cfg.seed, 1), noise_rng(cfg.seed, 2), probe_rng(cfg.seed, 3);
  Real sum = 0.0, sum2 = 0.0;
  Eigen::MatrixXcd gsum = Eigen::MatrixXcd::Zero(n, n);
  Eigen::MatrixXd gre2 = Eigen::MatrixXd::Zero(n, n), gim2 = Eigen::MatrixXd::Zero(n, n);
  Real const s2 = cfg.sigma * cfg.sigma;

  for (int t = 0; t < cfg.draws; ++t) {
    MeasurementOperator op(sample_mask(density, mask_rng), std::nullopt, cfg.sigma);
    Acquisition acq{op, add_noise(op.apply(rho), op.mask(), cfg.sigma, noise_rng)};
    std::uint64_t const probe_seed = probe_rng.next_u64();
    Rng a(probe_seed), b(probe_seed);
    auto e1 = ensure_loss(f1, {&acq, 1}, wspec, noise, cfg.div, cfg.variant, a, scfg);
    auto e2 = ensure_loss(f2, {&acq, 1}, wspec, noise, cfg.div, cfg.variant, b, scfg);
    Real const d = e1.total - e2.total;
    sum += d;
    sum2 += d * d;

    // per-draw gradient of ENSURE at B1, divergence in its probe expectation
    Eigen::VectorXcd u = to_vec(op.adjoint(acq.y));
    Eigen::VectorXcd ls = to_vec(recon_ls(op, acq.y, scfg).x);
    Eigen::MatrixXcd R = range_matrix(op, density, cfg.mode);
    Eigen::MatrixXcd G = 2.0 * R.adjoint() * (R * (B1 * u - ls)) * u.adjoint();
    if (cfg.variant == EnsureVariant::Projected)
      G += 2.0 * s2 * R.adjoint() * R;
    else
      G += 2.0 * s2 * Eigen::MatrixXcd::Identity(n, n);
    gsum += G;
    gre2 += G.real().cwiseAbs2();
    gim2 += G.imag().cwiseAbs2();
  }
  Real const N = cfg.draws;
  out.d_ensure = sum / N;
  out.d_ensure_se = std::sqrt(std::max(0.0, (sum2 / N - out.d_ensure * out.d_ensure) / (N - 1)));

  Eigen::MatrixXcd gmean = gsum / N;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      Real const se_re = std::sqrt(std::max(0.0, (gre2(i, j) / N - std::pow(gmean(i, j).real(), 2)) / (N - 1)));
      Real const se_im = std::sqrt(std::max(0.0, (gim2(i, j) / N - std::pow(gmean(i, j).imag(), 2)) / (N - 1)));
      auto z = [](Real diff, Real se) { return se > 0 ? std::abs(diff) / se : (std::abs(diff) < 1e-12 ? 0.0 : 1e300); };
      out.grad_z_mse = std::max({out.grad_z_mse, z(gmean(i, j).real() - r1.grad_mse(i, j).real(), se_re),
                                 z(gmean(i, j).imag() - r1.grad_mse(i, j).imag(), se_im)});
      out.grad_z_weighted_risk =
        std::max({out.grad_z_weighted_risk, z(gmean(i, j).real() - r1.grad_weighted(i, j).real(), se_re),
                  z(gmean(i, j).imag() - r1.grad_weighted(i, j).imag(), se_im)});
    }
  out.grad_components = int(2 * n * n);
  return out;
}

} // namespace ensure

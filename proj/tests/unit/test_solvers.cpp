#include "dense.hpp"

#include "ensure/core/fft.hpp"
#include "ensure/solvers/projections.hpp"

#include <doctest.h>

#include <cmath>

using namespace ensure;

namespace {

auto random_image(Shape sh, std::uint64_t seed) -> ComplexImage
{
  Rng rng(seed);
  return randn_complex(sh, 1.0, rng);
}

auto random_mask(Shape sh, Real p, std::uint64_t seed) -> SamplingMask
{
  Rng rng(seed);
  return sample_mask(DensityMap::from_values(sh, std::vector<Real>(sh.size(), p)), rng);
}

auto tight() -> SolverConfig
{
  SolverConfig cfg;
  cfg.tol = 1e-12;
  cfg.max_iters = 200;
  return cfg;
}

auto rel(ComplexImage const &a, ComplexImage const &b) -> Real { return norm(a - b) / std::max(norm(b), 1e-300); }

auto identity_op() -> NormalOp
{
  return [](ComplexImage const &x) { return x; };
}

auto diag_op() -> NormalOp
{
  return [](ComplexImage const &x) {
    ComplexImage y = x;
    for (Index i = 0; i < y.size(); ++i)
      y[i] *= Real(i + 1);
    return y;
  };
}

} // namespace

TEST_CASE("cg_solve")
{
  Shape const sh{4, 4};
  auto b = random_image(sh, 1);
  SolverConfig cfg;
  cfg.lambda = 0.0;

  auto r = cg_solve(identity_op(), b, cfg);
  CHECK(r.report.iterations == 1);
  CHECK(r.report.converged);
  CHECK(rel(r.x, b) < 1e-14);

  auto d = cg_solve(diag_op(), b, cfg);
  CHECK(d.report.converged);
  for (Index i = 0; i < 16; ++i)
    CHECK(std::abs(d.x[i] - b[i] / Real(i + 1)) < 1e-9);

  auto z = cg_solve(diag_op(), ComplexImage(sh), cfg);
  CHECK(norm(z.x) == 0.0);
  CHECK(z.report.converged);

  SUBCASE("non-convergence is reported, not thrown")
  {
    SolverConfig few = cfg;
    few.max_iters = 3;
    auto s = cg_solve(diag_op(), b, few);
    CHECK(s.report.iterations == 3);
    CHECK_FALSE(s.report.converged);
    CHECK(s.report.relative_residual > cfg.tol);
  }
  SUBCASE("fixed iterations do not stop at the tolerance")
  {
    SolverConfig fixed = cfg;
    fixed.fixed_iterations = true;
    fixed.max_iters = 12;
    fixed.tol = 1e-2;
    CHECK(cg_solve(diag_op(), b, fixed).report.iterations == 12);
  }
  SUBCASE("bad input")
  {
    SolverConfig bad = cfg;
    bad.lambda = -1;
    CHECK_THROWS(cg_solve(diag_op(), b, bad));
    ComplexImage nan = b;
    nan[0] = Cx{NAN, 0};
    CHECK_THROWS_AS(cg_solve(diag_op(), nan, cfg), NonFiniteError);
  }
}

TEST_CASE("cg_backward is the exact gradient of a truncated solve")
{
  Shape const sh{4, 4};
  auto b = random_image(sh, 2);
  auto g = random_image(sh, 3);
  auto v = random_image(sh, 4);
  SolverConfig cfg;
  cfg.lambda = 0.1;
  cfg.fixed_iterations = true;
  for (int iters : {1, 3, 6}) {
    cfg.max_iters = iters;
    CgTrace tr;
    auto x = cg_solve(diag_op(), b, cfg, tr);
    auto bbar = cg_backward(diag_op(), tr, g);
    Real const h = 1e-6;
    Real const lp = real_inner(g, cg_solve(diag_op(), b + h * v, cfg).x);
    Real const lm = real_inner(g, cg_solve(diag_op(), b - h * v, cfg).x);
    Real const fd = (lp - lm) / (2 * h);
    CHECK(real_inner(bbar, v) == doctest::Approx(fd).epsilon(1e-7));
  }
  // converged solve: gradient is (M + lambda)^-1 g
  cfg.max_iters = 100;
  CgTrace tr;
  (void)cg_solve(diag_op(), b, cfg, tr);
  auto bbar = cg_backward(diag_op(), tr, g);
  for (Index i = 0; i < 16; ++i)
    CHECK(std::abs(bbar[i] - g[i] / (Real(i + 1) + 0.1)) < 1e-9);
}

TEST_CASE("recon_ls")
{
  Shape const sh{8, 8};
  auto rho = random_image(sh, 1);
  SolverConfig cfg = tight();

  MeasurementOperator full(SamplingMask::full(sh));
  CHECK(rel(recon_ls(full, full.apply(rho), cfg).x, rho) < 1e-6);

  MeasurementOperator op(random_mask(sh, 0.4, 2));
  auto zf = op.adjoint(op.apply(rho));
  CHECK(rel(recon_ls(op, op.apply(rho), cfg).x, zf) < 1e-6);
  CHECK(norm(recon_ls(op, op.apply(ComplexImage(sh)), cfg).x) == 0.0);

  // multi-coil against dense regularized pseudo-inverse
  Rng rng(3);
  MeasurementOperator mc(random_mask(sh, 0.5, 3), simulate_coils(4, sh, rng));
  Eigen::MatrixXcd A = dense::forward_matrix(mc);
  Eigen::MatrixXcd N = A.adjoint() * A + cfg.lambda * Eigen::MatrixXcd::Identity(64, 64);
  auto y = mc.apply(rho);
  Eigen::VectorXcd expect = N.ldlt().solve(dense::vec(mc.adjoint(y)));
  auto got = recon_ls(mc, y, cfg);
  CHECK(got.report.converged);
  CHECK(dense::rel_diff(dense::vec(got.x), expect) < 1e-8);
}

TEST_CASE("project_range")
{
  Shape const sh{8, 8};
  auto e = random_image(sh, 5);
  SolverConfig cfg = tight();

  MeasurementOperator full(SamplingMask::full(sh));
  CHECK(rel(project_range(full, e, cfg).x, e) < 1e-6);

  MeasurementOperator op(random_mask(sh, 0.4, 6));
  auto p1 = project_range(op, e, cfg).x;
  CHECK(rel(project_range(op, p1, cfg).x, p1) < 1e-6);
  Eigen::MatrixXcd F = dense::dft2(sh);
  Eigen::VectorXcd m(64);
  for (Index i = 0; i < 64; ++i)
    m(i) = op.mask()[i] ? 1.0 : 0.0;
  Eigen::MatrixXcd P = F.adjoint() * m.asDiagonal() * F / (1.0 + cfg.lambda);
  CHECK(dense::rel_diff(dense::vec(p1), P * dense::vec(e)) < 1e-8);

  Rng rng(7);
  MeasurementOperator mc(random_mask(sh, 0.5, 8), simulate_coils(3, sh, rng));
  Eigen::MatrixXcd A = dense::forward_matrix(mc);
  Eigen::MatrixXcd Pm =
    (A.adjoint() * A + cfg.lambda * Eigen::MatrixXcd::Identity(64, 64)).ldlt().solve(A.adjoint() * A);
  CHECK(dense::rel_diff(dense::vec(project_range(mc, e, cfg).x), Pm * dense::vec(e)) < 1e-8);
  CHECK((Pm - Pm.adjoint()).norm() < 1e-8);
}

TEST_CASE("weighted_project")
{
  Shape const sh{8, 8};
  auto e = random_image(sh, 9);
  SolverConfig cfg = tight();
  auto density = make_density(DensityKind::GaussianVardens, sh, 3.0);
  Rng rng(10);
  MeasurementOperator op(sample_mask(density, rng));
  Eigen::MatrixXcd F = dense::dft2(sh);
  Eigen::VectorXcd m(64), isd(64);
  for (Index i = 0; i < 64; ++i) {
    m(i) = op.mask()[i] ? 1.0 : 0.0;
    isd(i) = 1.0 / std::sqrt(density[i]);
  }
  // matched regularization: (A^H A + lambda)^-1 A^H A = F^H M F / (1 + lambda)
  Eigen::MatrixXcd P = F.adjoint() * m.asDiagonal() * F / (1.0 + cfg.lambda);
  Eigen::MatrixXcd Winv = F.adjoint() * isd.asDiagonal() * F;
  Eigen::VectorXcd expect = Winv * P * dense::vec(e);
  Eigen::VectorXcd expect_cf = expect * (1.0 + cfg.lambda); // closed form is unregularized

  for (auto mode : {WeightingMode::CgWeighted, WeightingMode::ClosedForm}) {
    CAPTURE(to_string(mode));
    WeightingSpec w{density, mode};
    auto const &ref = mode == WeightingMode::ClosedForm ? expect_cf : expect;
    CHECK(dense::rel_diff(dense::vec(weighted_project(op, w, e, cfg).x), ref) < 1e-8);
    CHECK(norm(weighted_project(op, w, ComplexImage(sh), cfg).x) == 0.0);
  }
  WeightingSpec none{density, WeightingMode::None};
  CHECK(dense::rel_diff(dense::vec(weighted_project(op, none, e, cfg).x), P * dense::vec(e)) < 1e-8);

  SUBCASE("uniform density scales the projection by p^-1/2")
  {
    auto u = make_density(DensityKind::Uniform, sh, 4.0);
    MeasurementOperator opu(sample_mask(u, rng));
    auto got = weighted_project(opu, {u, WeightingMode::CgWeighted}, e, cfg).x;
    CHECK(rel(got, 2.0 * project_range(opu, e, cfg).x) < 1e-8);
  }
  SUBCASE("weights inside the normal equations cancel for a single channel")
  {
    // argmin ||D A (zeta - e)||^2 is the plain projection: the weighting
    // must act on the data, not on the residual norm, to have any effect
    Eigen::MatrixXcd A = dense::forward_matrix(op);
    auto idx = op.mask().sampled_indices();
    Eigen::VectorXcd dd(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k)
      dd(Index(k)) = 1.0 / density[idx[k]];
    Eigen::MatrixXcd G = A.adjoint() * dd.asDiagonal() * A;
    Eigen::MatrixXcd lit = (G + cfg.lambda * Eigen::MatrixXcd::Identity(64, 64)).ldlt().solve(G);
    CHECK(dense::rel_diff(lit * dense::vec(e), P * dense::vec(e)) < 1e-5); // up to the lambda bias
  }
  SUBCASE("multi-coil: closed form is rejected, cg-weighted matches dense algebra")
  {
    MeasurementOperator mc(op.mask(), simulate_coils(3, sh, rng));
    CHECK_THROWS_AS(RangeProjector(mc, {density, WeightingMode::ClosedForm}, cfg), std::invalid_argument);
    CHECK_THROWS_AS(apply_W({density, WeightingMode::ClosedForm}, mc, e, false), std::invalid_argument);
    Eigen::MatrixXcd A = dense::forward_matrix(mc);
    auto idx = op.mask().sampled_indices();
    Eigen::VectorXcd dd(3 * idx.size());
    for (Index j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < idx.size(); ++k)
        dd(j * Index(idx.size()) + Index(k)) = 1.0 / std::sqrt(density[idx[k]]);
    Eigen::MatrixXcd R = (A.adjoint() * A + cfg.lambda * Eigen::MatrixXcd::Identity(64, 64))
                           .ldlt()
                           .solve(A.adjoint() * dd.asDiagonal() * A);
    RangeProjector proj(mc, {density, WeightingMode::CgWeighted}, cfg);
    CHECK(dense::rel_diff(dense::vec(proj.apply(e).x), R * dense::vec(e)) < 1e-8);
    CHECK(dense::rel_diff(dense::vec(proj.adjoint(e)), R.adjoint() * dense::vec(e)) < 1e-8);
    CHECK(dense::rel_diff(dense::vec(proj.gram(e)), R.adjoint() * R * dense::vec(e)) < 1e-8);
  }
}

TEST_CASE("RangeProjector backward matches finite differences")
{
  Shape const sh{8, 8};
  auto density = make_density(DensityKind::GaussianVardens, sh, 3.0);
  Rng rng(14);
  MeasurementOperator op(sample_mask(density, rng), simulate_coils(2, sh, rng));
  SolverConfig cfg;
  cfg.fixed_iterations = true;
  cfg.max_iters = 4; // deliberately not converged
  RangeProjector proj(op, {density, WeightingMode::CgWeighted}, cfg);
  auto e = random_image(sh, 1), v = random_image(sh, 2), g = random_image(sh, 3);
  CgTrace tr;
  (void)proj.apply(e, tr);
  auto ebar = proj.backward(tr, g);
  Real const h = 1e-6;
  Real const fd = (real_inner(g, proj.apply(e + h * v).x) - real_inner(g, proj.apply(e - h * v).x)) / (2 * h);
  CHECK(real_inner(ebar, v) == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("apply_W")
{
  Shape const sh{8, 8};
  auto x = random_image(sh, 3);
  auto ones = DensityMap::from_values(sh, std::vector<Real>(64, 1.0));
  CHECK(rel(apply_W(ones, x, false), x) < 1e-12);
  auto d = make_density(DensityKind::GaussianVardens, sh, 3.0);
  CHECK(rel(apply_W(d, apply_W(d, x, false), true), x) < 1e-12);
  auto k = fft2c(x);
  for (Index i = 0; i < 64; ++i)
    k[i] *= d[i];
  CHECK(rel(apply_W(d, apply_W(d, x, false), false), ifft2c(k)) < 1e-12);
  auto tiny = DensityMap::from_values(sh, std::vector<Real>(64, 1e-4));
  CHECK_THROWS(apply_W(tiny, x, true));
}

namespace {

// every non-empty mask of a 1 x n pattern with its (renormalized) probability
auto enumerate(std::vector<Real> const &d) -> std::vector<std::pair<Real, SamplingMask>>
{
  auto const n = Index(d.size());
  std::vector<std::pair<Real, SamplingMask>> out;
  Real total = 0;
  for (std::uint64_t m = 1; m < (1u << n); ++m) {
    std::vector<std::uint8_t> bits(n);
    Real p = 1;
    for (Index j = 0; j < n; ++j) {
      bits[j] = (m >> j) & 1u;
      p *= bits[j] ? d[j] : 1 - d[j];
    }
    total += p;
    out.emplace_back(p, SamplingMask({1, n}, bits));
  }
  for (auto &[p, _] : out)
    p /= total;
  return out;
}

} // namespace

TEST_CASE("q_bruteforce")
{
  Shape const sh{1, 8};
  Eigen::MatrixXcd F = dense::dft2(sh);
  auto ones = DensityMap::from_values(sh, std::vector<Real>(8, 1.0));
  CHECK((q_bruteforce(ones) - Eigen::MatrixXcd::Identity(8, 8)).norm() < 1e-12);

  auto half = DensityMap::from_values(sh, std::vector<Real>(8, 0.5));
  Eigen::MatrixXcd Q = q_bruteforce(half);
  Eigen::MatrixXcd Qd = F.adjoint() * Eigen::VectorXcd::Constant(8, 0.5).asDiagonal() * F;
  Real const p0 = std::pow(0.5, 8);
  CHECK((Q - Qd).operatorNorm() <= p0);
  CHECK((Q * (1 - p0) - Qd).norm() < 1e-12);

  Rng rng(3);
  std::vector<Real> dv(8);
  for (auto &v : dv)
    v = rng.uniform(0.05, 0.95);
  auto rd = DensityMap::from_values(sh, dv);
  Eigen::MatrixXcd Qr = q_bruteforce(rd);
  CHECK((Qr - Qr.adjoint()).norm() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Qr);
  CHECK(es.eigenvalues().minCoeff() >= -1e-12);
  CHECK(es.eigenvalues().maxCoeff() <= 1 + 1e-12);

  auto lines = DensityMap::from_values({3, 4}, std::vector<Real>(12, 0.5), DensityKind::CartesianLines);
  Eigen::MatrixXcd Ql = q_bruteforce(lines);
  CHECK((Ql - Ql.adjoint()).norm() < 1e-12);

  CHECK_THROWS(q_bruteforce(DensityMap::from_values({4, 4}, std::vector<Real>(16, 0.5))));
}

TEST_CASE("projection identities over an enumerated mask ensemble")
{
  Shape const sh{1, 8};
  Rng rng(4);
  std::vector<Real> dv(8);
  for (auto &v : dv)
    v = rng.uniform(0.1, 0.9);
  auto d = DensityMap::from_values(sh, dv);
  auto masks = enumerate(dv);
  Eigen::MatrixXcd F = dense::dft2(sh);
  auto e = random_image(sh, 6);
  Eigen::VectorXcd ev = dense::vec(e);

  Eigen::MatrixXcd Q = q_bruteforce(d);
  // E_s ||P_s e||^2 = e^H Q e
  Real lhs = 0;
  for (auto const &[p, m] : masks) {
    Eigen::VectorXcd mv(8);
    for (Index i = 0; i < 8; ++i)
      mv(i) = m[i] ? 1.0 : 0.0;
    lhs += p * (F.adjoint() * mv.asDiagonal() * F * ev).squaredNorm();
  }
  CHECK(std::abs(lhs - (ev.adjoint() * Q * ev)(0).real()) < 1e-10);

  // E_s ||W^-1 P_s e||^2 = ||e||^2 with W = Q^1/2
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Q);
  Eigen::MatrixXcd Winv =
    es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().adjoint();
  Real wl = 0;
  for (auto const &[p, m] : masks) {
    Eigen::VectorXcd mv(8);
    for (Index i = 0; i < 8; ++i)
      mv(i) = m[i] ? 1.0 : 0.0;
    wl += p * (Winv * F.adjoint() * mv.asDiagonal() * F * ev).squaredNorm();
  }
  CHECK(std::abs(wl - ev.squaredNorm()) < 1e-8 * ev.squaredNorm());
}

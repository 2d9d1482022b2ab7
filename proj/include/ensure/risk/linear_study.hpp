#pragma once

// Expected risks of fixed linear reconstructions rho_hat = B u on problems
// small enough to enumerate every mask, against Monte-Carlo ENSURE.

#include "ensure/risk/losses.hpp"

#include <Eigen/Dense>

namespace ensure {

struct LinearStudyConfig
{
  Real sigma = 0.3;
  int draws = 10000;
  DivergenceConfig div{1e-3, 1, ProbeKind::Gaussian};
  EnsureVariant variant = EnsureVariant::Projected;
  WeightingMode mode = WeightingMode::CgWeighted;
  std::uint64_t seed = 1;
};

struct LinearStudy
{
  // Monte-Carlo mean and standard error of ENSURE(B1) - ENSURE(B2), paired
  // over identical (mask, noise) draws
  Real d_ensure = 0.0;
  Real d_ensure_se = 0.0;
  // exact differences by enumeration
  Real d_mse = 0.0;           // E ||B u - rho||^2
  Real d_weighted_risk = 0.0; // E ||R_s (B u - rho)||^2
  Real d_projected_risk = 0.0; // E ||P_s (B u - rho)||^2
  // largest componentwise |mean gradient of ENSURE at B1 - exact gradient|
  // in standard errors (real and imaginary parts counted separately)
  Real grad_z_mse = 0.0;
  Real grad_z_weighted_risk = 0.0;
  int grad_components = 0;
};

// Exact E_s[..] over the renormalized Bernoulli mask distribution.
struct LinearRisks
{
  Real mse = 0.0;
  Real weighted = 0.0;
  Real projected = 0.0;
  Eigen::MatrixXcd grad_mse;
  Eigen::MatrixXcd grad_weighted;
};

auto linear_risks(Eigen::MatrixXcd const &B, ComplexImage const &rho, DensityMap const &density, Real sigma,
                  WeightingMode mode) -> LinearRisks;

auto linear_study(Eigen::MatrixXcd const &B1, Eigen::MatrixXcd const &B2, ComplexImage const &rho,
                  DensityMap const &density, LinearStudyConfig const &cfg) -> LinearStudy;

// Dense matrix of an image-space linear map on a small shape.
auto dense_matrix(ImageMap const &f, Shape shape) -> Eigen::MatrixXcd;

} // namespace ensure

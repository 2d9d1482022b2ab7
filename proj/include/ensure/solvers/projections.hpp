#pragma once

#include "ensure/forward/operator.hpp"
#include "ensure/solvers/cg.hpp"

#include <Eigen/Dense>

#include <string>

namespace ensure {

enum class WeightingMode
{
  None,       // R_s = P_s
  ClosedForm, // R_s = W^-1 P_s with W = F^H diag(sqrt d) F (single channel only)
  CgWeighted, // R_s by CG with density-compensated k-space
};

auto to_string(WeightingMode m) -> std::string;
auto parse_weighting_mode(std::string const &s) -> WeightingMode;

struct WeightingSpec
{
  DensityMap density;
  WeightingMode mode = WeightingMode::CgWeighted;
};

// rho_LS = argmin ||A rho - y||^2 + lambda ||rho||^2.
auto recon_ls(MeasurementOperator const &op, KSpace const &y, SolverConfig const &cfg) -> CgResult;

// P_s e = argmin ||A (zeta - e)||^2 + lambda ||zeta||^2.
auto project_range(MeasurementOperator const &op, ComplexImage const &e, SolverConfig const &cfg) -> CgResult;

// R_s e. For cg-weighted this is the regularized SENSE solve from the
// density-compensated data D_s A e, D_s = diag(d^-1/2) on sampled locations:
//   zeta = (A^H A + lambda I)^-1 A^H D_s A e,
// which for a single channel equals W^-1 P_s e.
auto weighted_project(MeasurementOperator const &op, WeightingSpec const &wspec, ComplexImage const &e,
                      SolverConfig const &cfg) -> CgResult;

// F^H diag(d^{+-1/2}) F img.
auto apply_W(DensityMap const &density, ComplexImage const &img, bool inverse) -> ComplexImage;
auto apply_W(WeightingSpec const &wspec, MeasurementOperator const &op, ComplexImage const &img, bool inverse)
  -> ComplexImage;

// E_s[P_s] by enumerating every mask the density can produce, renormalized
// over non-empty masks to match sample_mask. At most 12 independently drawn
// locations (columns for cartesian-lines).
auto q_bruteforce(DensityMap const &density) -> Eigen::MatrixXcd;

struct WeightedMask
{
  Real probability; // renormalized over non-empty masks
  SamplingMask mask;
};

// Every non-empty mask of a small density with its probability under
// sample_mask. Same size limit as q_bruteforce.
auto enumerate_masks(DensityMap const &density) -> std::vector<WeightedMask>;

// Differentiable R_s for a fixed operator and weighting. The forward pass is
// a fixed-iteration CG (or closed form) so that backward() is the exact
// gradient of what apply() computed.
class RangeProjector
{
public:
  RangeProjector(MeasurementOperator op, WeightingSpec wspec, SolverConfig cfg);

  [[nodiscard]] auto op() const -> MeasurementOperator const & { return op_; }
  [[nodiscard]] auto config() const -> SolverConfig const & { return cfg_; }
  [[nodiscard]] auto mode() const -> WeightingMode { return wspec_.mode; }

  [[nodiscard]] auto apply(ComplexImage const &e) const -> CgResult;
  [[nodiscard]] auto apply(ComplexImage const &e, CgTrace &trace) const -> ComplexImage;
  [[nodiscard]] auto backward(CgTrace const &trace, ComplexImage const &grad) const -> ComplexImage;
  // R_s^H v, solved to tolerance.
  [[nodiscard]] auto adjoint(ComplexImage const &v) const -> ComplexImage;
  // R_s^H R_s v
  [[nodiscard]] auto gram(ComplexImage const &v) const -> ComplexImage;

private:
  [[nodiscard]] auto rhs_map(ComplexImage const &e) const -> ComplexImage;
  [[nodiscard]] auto normal_op() const -> NormalOp;

  MeasurementOperator op_;
  WeightingSpec wspec_;
  SolverConfig cfg_;
  std::vector<Real> inv_sqrt_d_;
};

} // namespace ensure

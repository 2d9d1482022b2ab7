#pragma once

#include "ensure/core/complex_image.hpp"

#include <functional>
#include <vector>

namespace ensure {

struct SolverConfig
{
  Real lambda = 1e-6;  // Tikhonov weight added to the normal operator
  int max_iters = 50;
  Real tol = 1e-9;     // relative residual ||(N + lambda I)x - b|| / ||b||
  // Run exactly max_iters iterations (stopping only on exact breakdown).
  // Required whenever the solve sits inside a differentiated computation.
  bool fixed_iterations = false;
};

// Hermitian positive semi-definite image-space map.
using NormalOp = std::function<ComplexImage(ComplexImage const &)>;

struct CgReport
{
  int iterations = 0;
  Real relative_residual = 0.0;
  bool converged = false;
};

struct CgResult
{
  ComplexImage x;
  CgReport report;
};

// Intermediate values of one CG run, sufficient to back-propagate through
// it. Solves with an early exit are differentiated as exact linear solves
// instead, which is only correct if the forward solve converged.
struct CgTrace
{
  Real lambda = 0.0;
  bool early_exit = false;
  std::vector<ComplexImage> p; // search directions p_k
  std::vector<ComplexImage> q; // (N + lambda) p_k
  std::vector<ComplexImage> r; // residuals r_{k+1}
  std::vector<Real> alpha;
  std::vector<Real> beta;
  std::vector<Real> rho;       // ||r_k||^2, k = 0..K
  std::vector<Real> gamma;     // <p_k, q_k>
  ComplexImage rhs;
};

// Solves (N + lambda I) x = rhs from x0 = 0. Non-convergence is reported in
// the result, never thrown.
auto cg_solve(NormalOp const &normal, ComplexImage const &rhs, SolverConfig const &cfg) -> CgResult;
auto cg_solve(NormalOp const &normal, ComplexImage const &rhs, SolverConfig const &cfg, CgTrace &trace) -> CgResult;

// Gradient with respect to rhs of a scalar whose gradient with respect to
// the solution is grad_x (real-stacked convention).
auto cg_backward(NormalOp const &normal, CgTrace const &trace, ComplexImage const &grad_x) -> ComplexImage;

} // namespace ensure

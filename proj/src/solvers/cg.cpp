#include "ensure/solvers/cg.hpp"

#include <cmath>
#include <stdexcept>

namespace ensure {

namespace {

// rho_{k+1} below this fraction of rho_0 is treated as exact convergence;
// continuing would divide by a vanishing curvature.
constexpr Real kBreakdown = 1e-28;

void check_config(SolverConfig const &cfg)
{
  if (!(cfg.lambda >= 0.0) || !std::isfinite(cfg.lambda))
    throw std::invalid_argument("cg: lambda must be a finite non-negative number");
  if (cfg.max_iters < 1)
    throw std::invalid_argument("cg: max_iters must be >= 1");
  if (!(cfg.tol > 0.0))
    throw std::invalid_argument("cg: tol must be positive");
}

auto solve(NormalOp const &normal, ComplexImage const &b, SolverConfig const &cfg, CgTrace *trace) -> CgResult
{
  check_config(cfg);
  require_finite(b, "cg right-hand side");

  CgResult out{ComplexImage(b.shape()), {}};
  if (trace) {
    *trace = CgTrace{};
    trace->lambda = cfg.lambda;
    trace->early_exit = !cfg.fixed_iterations;
    trace->rhs = b;
  }

  Real const rho0 = norm2(b);
  if (trace)
    trace->rho.push_back(rho0);
  if (rho0 == 0.0) {
    out.report.converged = true;
    return out;
  }

  ComplexImage r = b;
  ComplexImage p = b;
  Real rho = rho0;
  auto &x = out.x;

  for (int k = 0; k < cfg.max_iters; ++k) {
    ComplexImage q = normal(p);
    if (cfg.lambda != 0.0)
      q.axpy(cfg.lambda, p);
    Real const gamma = real_inner(p, q);
    if (!(gamma > 0.0)) {
      if (!std::isfinite(gamma))
        throw NonFiniteError("cg: non-finite curvature");
      break; // operator singular along p; nothing more to gain
    }
    Real const alpha = rho / gamma;
    x.axpy(alpha, p);
    r.axpy(-alpha, q);
    Real const rho_next = norm2(r);
    out.report.iterations = k + 1;

    bool const stop_exact = rho_next <= kBreakdown * rho0;
    bool const stop_tol = !cfg.fixed_iterations && std::sqrt(rho_next / rho0) <= cfg.tol;
    bool const last = stop_exact || stop_tol || k + 1 == cfg.max_iters;
    Real const beta = last ? 0.0 : rho_next / rho;

    if (trace) {
      trace->p.push_back(p);
      trace->q.push_back(std::move(q));
      trace->r.push_back(r);
      trace->alpha.push_back(alpha);
      trace->gamma.push_back(gamma);
      trace->beta.push_back(beta);
      trace->rho.push_back(rho_next);
    }
    rho = rho_next;
    if (last)
      break;
    p *= beta;
    p += r;
  }

  out.report.relative_residual = std::sqrt(rho / rho0);
  out.report.converged = out.report.relative_residual <= cfg.tol;
  if (!x.all_finite())
    throw NonFiniteError("cg: solution became non-finite");
  return out;
}

} // namespace

auto cg_solve(NormalOp const &normal, ComplexImage const &rhs, SolverConfig const &cfg) -> CgResult
{
  return solve(normal, rhs, cfg, nullptr);
}

auto cg_solve(NormalOp const &normal, ComplexImage const &rhs, SolverConfig const &cfg, CgTrace &trace) -> CgResult
{
  return solve(normal, rhs, cfg, &trace);
}

auto cg_backward(NormalOp const &normal, CgTrace const &t, ComplexImage const &grad_x) -> ComplexImage
{
  require_same_shape(t.rhs.shape(), grad_x.shape(), "cg_backward");
  auto const apply_m = [&](ComplexImage const &v) {
    ComplexImage out = normal(v);
    if (t.lambda != 0.0)
      out.axpy(t.lambda, v);
    return out;
  };

  if (t.early_exit) {
    // implicit gradient: (N + lambda)^-1 is self-adjoint
    SolverConfig cfg;
    cfg.lambda = t.lambda;
    cfg.max_iters = std::max<int>(1, static_cast<int>(t.alpha.size()));
    cfg.tol = std::sqrt(t.rho.back() / std::max(t.rho.front(), Real(1e-300)));
    if (!(cfg.tol > 0.0))
      cfg.tol = 1e-300;
    return cg_solve(normal, grad_x, cfg).x;
  }

  auto const K = static_cast<int>(t.alpha.size());
  Shape const sh = grad_x.shape();
  ComplexImage xbar = grad_x; // adjoint of x_k, identical for every k
  ComplexImage rbar(sh);
  ComplexImage pbar_next(sh);
  std::vector<Real> rhobar(t.rho.size(), 0.0);

  for (int k = K - 1; k >= 0; --k) {
    auto const &pk = t.p[k];
    auto const &qk = t.q[k];
    auto const &rk1 = t.r[k];
    Real const alpha = t.alpha[k], beta = t.beta[k], gamma = t.gamma[k];
    Real const rho_k = t.rho[k], rho_k1 = t.rho[k + 1];

    // p_{k+1} = r_{k+1} + beta_k p_k
    Real beta_bar = 0.0;
    if (beta != 0.0) {
      rbar += pbar_next;
      beta_bar = real_inner(pbar_next, pk);
      // beta_k = rho_{k+1} / rho_k
      rhobar[k + 1] += beta_bar / rho_k;
      rhobar[k] -= beta_bar * rho_k1 / (rho_k * rho_k);
    }
    // rho_{k+1} = ||r_{k+1}||^2
    if (rhobar[k + 1] != 0.0)
      rbar.axpy(2.0 * rhobar[k + 1], rk1);

    // r_{k+1} = r_k - alpha q_k ; x_{k+1} = x_k + alpha p_k
    Real const alpha_bar = real_inner(xbar, pk) - real_inner(rbar, qk);
    ComplexImage qbar = (-alpha) * rbar;

    // alpha_k = rho_k / gamma_k
    rhobar[k] += alpha_bar / gamma;
    Real const gamma_bar = -alpha_bar * rho_k / (gamma * gamma);

    ComplexImage pbar = beta * pbar_next;
    pbar.axpy(alpha, xbar);
    pbar.axpy(2.0 * gamma_bar, qk); // gamma_k = <p_k, M p_k>
    pbar += apply_m(qbar);          // q_k = M p_k
    pbar_next = std::move(pbar);
  }

  // r_0 = p_0 = b, rho_0 = ||b||^2
  ComplexImage bbar = rbar;
  bbar += pbar_next;
  if (!rhobar.empty() && rhobar[0] != 0.0)
    bbar.axpy(2.0 * rhobar[0], t.rhs);
  return bbar;
}

} // namespace ensure

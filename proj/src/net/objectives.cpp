#include "ensure/net/objectives.hpp"

#include <stdexcept>

namespace ensure {

namespace {

void axpy(std::vector<Real> &acc, Real s, std::vector<Real> const &v)
{
  for (std::size_t i = 0; i < acc.size(); ++i)
    acc[i] += s * v[i];
}

} // namespace

void prepare_sample(TrainingSample &s, ObjectiveConfig const &cfg, Rng &rng)
{
  s.u = s.op.adjoint(s.y);
  switch (cfg.kind) {
  case LossKind::Sup:
    if (!s.ground_truth)
      throw std::invalid_argument("supervised loss needs ground truth for sample " + std::to_string(s.index));
    break;
  case LossKind::Ensure:
  case LossKind::Gsure:
    if (!cfg.density)
      throw std::invalid_argument("ENSURE/GSURE need the sampling density");
    s.rho_ls = recon_ls(s.op, s.y, cfg.solve).x;
    break;
  case LossKind::Ssdu: {
    auto part = ssdu_partition(s.op.mask(), cfg.ssdu_ratio, rng);
    s.ssdu = split_acquisition({s.op, s.y}, part);
    break;
  }
  case LossKind::Kmse: break;
  case LossKind::Sure: throw std::invalid_argument("the denoising SURE loss does not apply to undersampled data");
  }
}

auto evaluate_sample(ReconNetwork const &net, TrainingSample const &s, ObjectiveConfig const &cfg, Rng &probes,
                     bool with_grad) -> SampleResult
{
  SampleResult out;
  Tape tape;
  Tape *tp = with_grad ? &tape : nullptr;

  switch (cfg.kind) {
  case LossKind::Sup: {
    if (!s.ground_truth)
      throw std::invalid_argument("evaluate_sample: supervised loss without ground truth");
    auto pred = forward(net, s.u, s.op, tp);
    ComplexImage r = pred - *s.ground_truth;
    out.data = norm2(r);
    if (with_grad)
      out.grad = backward(net, tape, 2.0 * r).params;
    break;
  }
  case LossKind::Kmse: {
    auto pred = forward(net, s.u, s.op, tp);
    KSpace r = s.op.apply(pred) - s.y;
    out.data = norm2(r);
    if (with_grad)
      out.grad = backward(net, tape, 2.0 * s.op.adjoint(r)).params;
    break;
  }
  case LossKind::Ssdu: {
    if (!s.ssdu)
      throw std::invalid_argument("evaluate_sample: sample was not prepared for SSDU");
    auto const &sp = *s.ssdu;
    auto pred = forward(net, sp.u, sp.dc_op, tp);
    KSpace r = sp.loss_op.apply(pred) - sp.y_loss;
    out.data = norm2(r);
    if (with_grad)
      out.grad = backward(net, tape, 2.0 * sp.loss_op.adjoint(r)).params;
    break;
  }
  case LossKind::Ensure:
  case LossKind::Gsure: {
    if (!s.rho_ls || !cfg.density)
      throw std::invalid_argument("evaluate_sample: sample was not prepared for ENSURE");
    WeightingMode const mode = cfg.kind == LossKind::Gsure ? WeightingMode::None : cfg.weighting;
    EnsureVariant const variant = cfg.kind == LossKind::Gsure ? EnsureVariant::Projected : cfg.variant;
    RangeProjector proj(s.op, {*cfg.density, mode}, cfg.projection);
    auto pred = forward(net, s.u, s.op, tp);
    CgTrace tr;
    ComplexImage z = proj.apply(pred - *s.rho_ls, tr);
    out.data = norm2(z);
    ComplexImage g = with_grad ? proj.backward(tr, 2.0 * z) : ComplexImage(pred.shape());

    Real const sigma2 = cfg.noise.sigma * cfg.noise.sigma;
    if (sigma2 > 0.0) {
      validate(cfg.div);
      Real const eps = perturbation_scale(s.u, cfg.div);
      std::vector<Real> gdiv;
      Real acc = 0.0;
      for (int k = 0; k < cfg.div.n_probes; ++k) {
        ComplexImage b = probe_vector(s.u.shape(), cfg.div.probe, probes);
        ComplexImage v = variant == EnsureVariant::Projected ? RangeProjector(s.op, {*cfg.density, mode}, cfg.solve).gram(b) : b;
        // d/dPhi of sigma^2 / (K eps) <v, f(u + eps b) - f(u)>
        v *= sigma2 / (eps * cfg.div.n_probes);
        ComplexImage up = s.u;
        up.axpy(eps, b);
        Tape tape2;
        auto fp = forward(net, up, s.op, with_grad ? &tape2 : nullptr);
        acc += real_inner(v, fp - pred);
        if (with_grad) {
          auto gp = backward(net, tape2, v).params;
          if (gdiv.empty())
            gdiv = std::move(gp);
          else
            axpy(gdiv, 1.0, gp);
          g -= v;
        }
      }
      out.divergence = acc;
      if (with_grad) {
        out.grad = backward(net, tape, g).params;
        axpy(out.grad, 1.0, gdiv);
      }
    } else if (with_grad) {
      out.grad = backward(net, tape, g).params;
    }
    break;
  }
  case LossKind::Sure: throw std::invalid_argument("evaluate_sample: SURE is a denoising loss");
  }
  return out;
}

auto reconstruct(ReconNetwork const &net, MeasurementOperator const &op, KSpace const &y) -> ComplexImage
{
  return forward(net, op.adjoint(y), op);
}

} // namespace ensure

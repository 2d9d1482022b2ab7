#include "ensure/net/network.hpp"

#include "ensure/core/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace ensure {

void NetConfig::validate() const
{
  if (n_layers < 2)
    throw std::invalid_argument("NetConfig: n_layers must be >= 2");
  if (features < 2)
    throw std::invalid_argument("NetConfig: features must be >= 2");
  if (n_unrolls < 1)
    throw std::invalid_argument("NetConfig: n_unrolls must be >= 1");
  if (!(dc_lambda > 0.0) || !std::isfinite(dc_lambda))
    throw std::invalid_argument("NetConfig: dc_lambda must be positive");
  if (dc_iters < 1)
    throw std::invalid_argument("NetConfig: dc_iters must be >= 1");
  if (!(dc_tol > 0.0))
    throw std::invalid_argument("NetConfig: dc_tol must be positive");
}

namespace {

auto make_layers(NetConfig const &cfg) -> std::vector<LayerView>
{
  std::vector<LayerView> out;
  Index off = 0;
  for (int l = 0; l < cfg.n_layers; ++l) {
    LayerView v;
    v.cin = l == 0 ? 2 : cfg.features;
    v.cout = l == cfg.n_layers - 1 ? 2 : cfg.features;
    v.kernel = off;
    off += Index(v.cout) * v.cin * 9;
    v.bias = off;
    off += v.cout;
    if (l < cfg.n_layers - 1) {
      v.scale = off;
      off += v.cout;
      v.shift = off;
      off += v.cout;
    }
    out.push_back(v);
  }
  return out;
}

auto to_act(ComplexImage const &x) -> Act
{
  Act a(2, x.size());
  for (Index i = 0; i < x.size(); ++i) {
    a(0, i) = x[i].real();
    a(1, i) = x[i].imag();
  }
  return a;
}

auto from_act(Act const &a, Shape sh) -> ComplexImage
{
  ComplexImage x(sh);
  for (Index i = 0; i < x.size(); ++i)
    x[i] = Cx{a(0, i), a(1, i)};
  return x;
}

auto dc_config(NetConfig const &cfg) -> SolverConfig
{
  SolverConfig s;
  s.lambda = cfg.dc_lambda;
  s.max_iters = cfg.dc_iters;
  s.fixed_iterations = !cfg.dc_adaptive;
  s.tol = cfg.dc_adaptive ? cfg.dc_tol : 1e-12;
  return s;
}

} // namespace

auto parameter_count(NetConfig const &cfg) -> Index
{
  cfg.validate();
  auto const F = Index(cfg.features);
  Index const first = F * 2 * 9 + F;
  Index const middle = F * F * 9 + F;
  Index const last = 2 * F * 9 + 2;
  Index const affine = 2 * F * (cfg.n_layers - 1);
  return first + middle * (cfg.n_layers - 2) + last + affine;
}

ReconNetwork::ReconNetwork(NetConfig cfg) : ReconNetwork(cfg, std::vector<Real>(parameter_count(cfg), 0.0)) {}

ReconNetwork::ReconNetwork(NetConfig cfg, std::vector<Real> params)
  : cfg_(cfg), params_(std::move(params)), layers_(make_layers(cfg))
{
  cfg_.validate();
  if (Index(params_.size()) != parameter_count(cfg_))
    throw std::invalid_argument("ReconNetwork: expected " + std::to_string(parameter_count(cfg_)) +
                                " parameters, got " + std::to_string(params_.size()));
}

auto init_network(NetConfig const &cfg, std::uint64_t seed) -> ReconNetwork
{
  ReconNetwork net(cfg);
  Rng rng(seed, 0x6e6574);
  auto &p = net.params();
  for (auto const &l : net.layers()) {
    Real const sd = std::sqrt(2.0 / (9.0 * l.cin));
    for (Index i = 0; i < Index(l.cout) * l.cin * 9; ++i)
      p[l.kernel + i] = sd * rng.normal();
    if (l.scale >= 0)
      for (int c = 0; c < l.cout; ++c)
        p[l.scale + c] = 1.0;
  }
  return net;
}

auto forward(ReconNetwork const &net, ComplexImage const &u, MeasurementOperator const &op, Tape *tape)
  -> ComplexImage
{
  require_same_shape(u.shape(), op.shape(), "network forward");
  require_finite(u, "network input");
  auto const &cfg = net.config();
  Index const H = u.rows(), W = u.cols(), HW = u.size();
  Real const *p = net.params().data();
  auto const normal = [&op](ComplexImage const &x) { return op.normal(x); };
  SolverConfig const dc = dc_config(cfg);

  if (tape) {
    *tape = Tape{};
    tape->shape = u.shape();
    tape->n_params = net.size();
    tape->config = cfg;
    tape->op = op;
    tape->unrolls.resize(cfg.n_unrolls);
  }

  ComplexImage x = u;
  Act scratch, c;
  for (int t = 0; t < cfg.n_unrolls; ++t) {
    UnrollTape *ut = tape ? &tape->unrolls[t] : nullptr;
    Act a = to_act(x);
    for (int l = 0; l < cfg.n_layers; ++l) {
      auto const &lv = net.layers()[l];
      ConstMat K(p + lv.kernel, lv.cout, Index(lv.cin) * 9);
      conv3_forward(a, K, p + lv.bias, H, W, c, scratch);
      if (!c.allFinite())
        throw NonFiniteError("network: non-finite activation in unroll " + std::to_string(t) + ", layer " +
                             std::to_string(l));
      if (ut)
        ut->acts.push_back(a);
      if (lv.scale < 0)
        break;
      if (ut)
        ut->pre.push_back(c);
      a.resize(lv.cout, HW);
      for (int ch = 0; ch < lv.cout; ++ch) {
        Real const s = p[lv.scale + ch], b = p[lv.shift + ch];
        for (Index i = 0; i < HW; ++i)
          a(ch, i) = std::max(0.0, s * c(ch, i) + b);
      }
    }
    ComplexImage z = x + from_act(c, u.shape());
    ComplexImage rhs = u;
    rhs.axpy(cfg.dc_lambda, z);
    if (ut)
      x = cg_solve(normal, rhs, dc, ut->dc).x;
    else
      x = cg_solve(normal, rhs, dc).x;
  }
  return x;
}

auto backward(ReconNetwork const &net, Tape const &tape, ComplexImage const &grad_out) -> Gradients
{
  if (tape.unrolls.empty() || !tape.op)
    throw std::invalid_argument("backward: empty tape");
  if (tape.n_params != net.size() || !(tape.config == net.config()))
    throw std::invalid_argument("backward: tape was recorded with a different network");
  require_same_shape(tape.shape, grad_out.shape(), "backward");

  auto const &cfg = net.config();
  auto const &op = *tape.op;
  Index const H = tape.shape.rows, W = tape.shape.cols, HW = tape.shape.size();
  Real const *p = net.params().data();
  auto const normal = [&op](ComplexImage const &x) { return op.normal(x); };

  Gradients g{std::vector<Real>(net.size(), 0.0), ComplexImage(tape.shape)};
  Real *gp = g.params.data();
  ComplexImage gx = grad_out;
  Act scratch, gin;

  for (int t = cfg.n_unrolls - 1; t >= 0; --t) {
    auto const &ut = tape.unrolls[t];
    // x_{t+1} = DC(u + lambda z_t)
    ComplexImage grhs = cg_backward(normal, ut.dc, gx);
    g.input += grhs;
    ComplexImage gz = cfg.dc_lambda * grhs;
    // z_t = x_t + CNN(x_t)
    ComplexImage gprev = gz;
    Act ga = to_act(gz);
    for (int l = cfg.n_layers - 1; l >= 0; --l) {
      auto const &lv = net.layers()[l];
      ConstMat K(p + lv.kernel, lv.cout, Index(lv.cin) * 9);
      MutMat gK(gp + lv.kernel, lv.cout, Index(lv.cin) * 9);
      conv3_backward(ut.acts[l], K, ga, H, W, gK, gp + lv.bias, &gin, scratch);
      ga.swap(gin);
      if (l == 0)
        break;
      // acts[l] = relu(scale * pre[l-1] + shift)
      auto const &hv = net.layers()[l - 1];
      auto const &act = ut.acts[l];
      auto const &pre = ut.pre[l - 1];
      for (int ch = 0; ch < hv.cout; ++ch) {
        Real const s = p[hv.scale + ch];
        Real gs = 0.0, gb = 0.0;
        for (Index i = 0; i < HW; ++i) {
          Real const v = act(ch, i) > 0.0 ? ga(ch, i) : 0.0;
          gb += v;
          gs += v * pre(ch, i);
          ga(ch, i) = s * v;
        }
        gp[hv.scale + ch] += gs;
        gp[hv.shift + ch] += gb;
      }
    }
    gprev += from_act(ga, tape.shape);
    gx = std::move(gprev);
  }
  g.input += gx;
  return g;
}

} // namespace ensure

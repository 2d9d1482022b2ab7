#pragma once

#include "ensure/forward/operator.hpp"
#include "ensure/net/conv.hpp"
#include "ensure/solvers/cg.hpp"

#include <span>
#include <string>
#include <vector>

namespace ensure {

struct NetConfig
{
  int n_layers = 5;
  int features = 16;
  int n_unrolls = 3;
  Real dc_lambda = 0.05;
  int dc_iters = 10;
  // Early-exit DC solves (tolerance dc_tol) are differentiated as exact
  // linear solves, so gradients are only approximate. Off by default.
  bool dc_adaptive = false;
  Real dc_tol = 1e-2;

  void validate() const;
  auto operator==(NetConfig const &) const -> bool = default;
};

auto parameter_count(NetConfig const &cfg) -> Index;

struct LayerView
{
  Index kernel = 0; // offsets into the parameter vector
  Index bias = 0;
  Index scale = -1; // hidden layers only
  Index shift = -1;
  int cin = 0;
  int cout = 0;
};

// Unrolled reconstruction network: one CNN denoiser shared by every unroll,
// each followed by a regularized CG data-consistency step.
class ReconNetwork
{
public:
  explicit ReconNetwork(NetConfig cfg);
  ReconNetwork(NetConfig cfg, std::vector<Real> params);

  [[nodiscard]] auto config() const -> NetConfig const & { return cfg_; }
  [[nodiscard]] auto params() const -> std::vector<Real> const & { return params_; }
  auto params() -> std::vector<Real> & { return params_; }
  [[nodiscard]] auto size() const -> Index { return static_cast<Index>(params_.size()); }
  [[nodiscard]] auto layers() const -> std::vector<LayerView> const & { return layers_; }

private:
  NetConfig cfg_;
  std::vector<Real> params_;
  std::vector<LayerView> layers_;
};

// He-normal kernels, zero biases, unit scale, zero shift.
auto init_network(NetConfig const &cfg, std::uint64_t seed) -> ReconNetwork;

struct UnrollTape
{
  std::vector<Act> acts;    // acts[0]: input channels; acts[l]: post-ReLU output of hidden layer l - 1
  std::vector<Act> pre;     // raw conv outputs of hidden layers, before the affine
  CgTrace dc;
};

struct Tape
{
  Shape shape{};
  Index n_params = 0;
  NetConfig config;
  std::vector<UnrollTape> unrolls;
  std::optional<MeasurementOperator> op;
};

// rho_hat for network input u = A^H y. The tape, when given, holds what
// backward() needs.
auto forward(ReconNetwork const &net, ComplexImage const &u, MeasurementOperator const &op, Tape *tape = nullptr)
  -> ComplexImage;

struct Gradients
{
  std::vector<Real> params;
  ComplexImage input;
};

// Reverse pass for a scalar whose gradient with respect to rho_hat is
// grad_out (real-stacked convention: d/dRe + i d/dIm).
auto backward(ReconNetwork const &net, Tape const &tape, ComplexImage const &grad_out) -> Gradients;

} // namespace ensure

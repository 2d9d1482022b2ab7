#pragma once

#include "ensure/core/types.hpp"

#include <Eigen/Dense>

namespace ensure {

// Feature maps: one row per channel, pixels row-major along the row.
using Act = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMat = Eigen::Map<Act const>;
using MutMat = Eigen::Map<Act>;

// 3x3, stride 1, zero padding. Kernel layout: cout x (cin * 9), column
// ci * 9 + ky * 3 + kx.
void im2col3(Act const &in, Index rows, Index cols, Act &col);
void col2im3_add(Act const &col, Index rows, Index cols, Act &in_grad);

void conv3_forward(Act const &in, ConstMat const &kernel, Real const *bias, Index rows, Index cols, Act &out,
                   Act &scratch);

// Accumulates kernel and bias gradients; writes in_grad unless null.
void conv3_backward(Act const &in, ConstMat const &kernel, Act const &out_grad, Index rows, Index cols,
                    MutMat &kernel_grad, Real *bias_grad, Act *in_grad, Act &scratch);

} // namespace ensure

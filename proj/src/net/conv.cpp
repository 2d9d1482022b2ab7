#include "ensure/net/conv.hpp"

#include <algorithm>

namespace ensure {

void im2col3(Act const &in, Index rows, Index cols, Act &col)
{
  Index const cin = in.rows();
  col.resize(cin * 9, rows * cols);
  for (Index ci = 0; ci < cin; ++ci) {
    Real const *src = in.data() + ci * rows * cols;
    for (int ky = 0; ky < 3; ++ky)
      for (int kx = 0; kx < 3; ++kx) {
        Real *dst = col.data() + (ci * 9 + ky * 3 + kx) * rows * cols;
        Index const dy = ky - 1, dx = kx - 1;
        Index const c0 = std::max<Index>(0, -dx), c1 = std::min(cols, cols - dx);
        for (Index r = 0; r < rows; ++r) {
          Real *d = dst + r * cols;
          Index const sr = r + dy;
          if (sr < 0 || sr >= rows) {
            std::fill(d, d + cols, 0.0);
            continue;
          }
          Real const *s = src + sr * cols + dx;
          for (Index c = 0; c < c0; ++c)
            d[c] = 0.0;
#pragma omp simd
          for (Index c = c0; c < c1; ++c)
            d[c] = s[c];
          for (Index c = c1; c < cols; ++c)
            d[c] = 0.0;
        }
      }
  }
}

void col2im3_add(Act const &col, Index rows, Index cols, Act &in_grad)
{
  Index const cin = in_grad.rows();
  for (Index ci = 0; ci < cin; ++ci) {
    Real *dst = in_grad.data() + ci * rows * cols;
    for (int ky = 0; ky < 3; ++ky)
      for (int kx = 0; kx < 3; ++kx) {
        Real const *src = col.data() + (ci * 9 + ky * 3 + kx) * rows * cols;
        Index const dy = ky - 1, dx = kx - 1;
        Index const c0 = std::max<Index>(0, -dx), c1 = std::min(cols, cols - dx);
        for (Index r = 0; r < rows; ++r) {
          Index const sr = r + dy;
          if (sr < 0 || sr >= rows)
            continue;
          Real const *s = src + r * cols;
          Real *d = dst + sr * cols + dx;
#pragma omp simd
          for (Index c = c0; c < c1; ++c)
            d[c] += s[c];
        }
      }
  }
}

void conv3_forward(Act const &in, ConstMat const &kernel, Real const *bias, Index rows, Index cols, Act &out,
                   Act &scratch)
{
  im2col3(in, rows, cols, scratch);
  out.noalias() = kernel * scratch;
  for (Index co = 0; co < out.rows(); ++co)
    out.row(co).array() += bias[co];
}

void conv3_backward(Act const &in, ConstMat const &kernel, Act const &out_grad, Index rows, Index cols,
                    MutMat &kernel_grad, Real *bias_grad, Act *in_grad, Act &scratch)
{
  im2col3(in, rows, cols, scratch);
  kernel_grad.noalias() += out_grad * scratch.transpose();
  for (Index co = 0; co < out_grad.rows(); ++co)
    bias_grad[co] += out_grad.row(co).sum();
  if (in_grad) {
    scratch.noalias() = kernel.transpose() * out_grad;
    in_grad->setZero(in.rows(), rows * cols);
    col2im3_add(scratch, rows, cols, *in_grad);
  }
}

} // namespace ensure

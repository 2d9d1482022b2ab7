#include "ensure/core/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace ensure {

namespace {

// Plans are created once per (rows, cols, direction) and executed on
// caller-owned buffers through the new-array interface, which FFTW
// documents as thread-safe.
class PlanCache
{
public:
  ~PlanCache()
  {
    for (auto &[key, plan] : plans_) { fftw_destroy_plan(plan); }
  }

  auto get(Index rows, Index cols, int sign) -> fftw_plan
  {
    std::lock_guard lock(mutex_);
    auto const key = std::make_tuple(rows, cols, sign);
    if (auto it = plans_.find(key); it != plans_.end()) { return it->second; }
    std::vector<Cx> scratch(static_cast<std::size_t>(rows * cols));
    auto *buf = reinterpret_cast<fftw_complex *>(scratch.data());
    fftw_plan plan = fftw_plan_dft_2d(
      static_cast<int>(rows), static_cast<int>(cols), buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

private:
  std::mutex mutex_;
  std::map<std::tuple<Index, Index, int>, fftw_plan> plans_;
};

auto cache() -> PlanCache &
{
  static PlanCache c;
  return c;
}

// dst[(r + dr) % R][(c + dc) % C] = src[r][c], row blocks at a time
void roll_into(Cx const *src, Cx *dst, Index R, Index C, Index dr, Index dc)
{
  for (Index r = 0; r < R; r++) {
    Index rr = r + dr;
    if (rr >= R) { rr -= R; }
    Cx const *s = src + r * C;
    Cx *d = dst + rr * C;
    std::copy(s, s + (C - dc), d + dc);
    std::copy(s + (C - dc), s + C, d);
  }
}

auto transform(ComplexImage const &in, int sign) -> ComplexImage
{
  if (in.size() == 0) { return in; }
  Index const R = in.rows();
  Index const C = in.cols();
  thread_local std::vector<Cx> work;
  work.resize(static_cast<std::size_t>(in.size()));
  roll_into(in.data().data(), work.data(), R, C, (R + 1) / 2, (C + 1) / 2);
  auto plan = cache().get(R, C, sign);
  auto *buf = reinterpret_cast<fftw_complex *>(work.data());
  fftw_execute_dft(plan, buf, buf);
  Real const scale = 1.0 / std::sqrt(static_cast<Real>(in.size()));
  for (auto &v : work) { v *= scale; }
  ComplexImage out(in.shape());
  roll_into(work.data(), out.data().data(), R, C, R / 2, C / 2);
  return out;
}

// Cyclic shift of both axes by (dr, dc).
void roll(ComplexImage &x, Index dr, Index dc)
{
  if (dr == 0 && dc == 0) { return; }
  ComplexImage const src = x;
  roll_into(src.data().data(), x.data().data(), x.rows(), x.cols(), dr % std::max<Index>(x.rows(), 1),
            dc % std::max<Index>(x.cols(), 1));
}

} // namespace

void fftshift(ComplexImage &x)
{
  roll(x, x.rows() / 2, x.cols() / 2);
}

void ifftshift(ComplexImage &x)
{
  roll(x, (x.rows() + 1) / 2, (x.cols() + 1) / 2);
}

auto fft2c(ComplexImage const &img) -> ComplexImage
{
  return transform(img, FFTW_FORWARD);
}

auto ifft2c(ComplexImage const &ksp) -> ComplexImage
{
  return transform(ksp, FFTW_BACKWARD);
}

} // namespace ensure

#include "ensure/data/phantom.hpp"
#include "ensure/metrics/metrics.hpp"
#include "ensure/metrics/report.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ensure;

namespace {

auto phantom(std::uint64_t seed) -> ComplexImage
{
  Rng rng(seed);
  return gen_phantom({32, 32}, rng);
}

auto tmp_path(std::string const &name) -> std::filesystem::path
{
  auto dir = std::filesystem::temp_directory_path() / "ensure_lab_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

auto slurp(std::filesystem::path const &p) -> std::string
{
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST_CASE("psnr formula")
{
  Shape const sh{4, 4};
  ComplexImage ref(sh), img(sh);
  ref[0] = 1.0;
  CHECK(psnr(ref, ref) == kPsnrIdentical);
  CHECK(std::isinf(psnr(ref, ref)));

  // magnitude error 1 everywhere -> mse 1, peak 1 -> 0 dB
  for (Index i = 0; i < sh.size(); ++i)
    img[i] = std::abs(ref[i]) + 1.0;
  CHECK(psnr(ref, img) == doctest::Approx(0.0).epsilon(1e-12));

  for (Index i = 0; i < sh.size(); ++i)
    img[i] = std::abs(ref[i]) + 0.1;
  CHECK(psnr(ref, img) == doctest::Approx(20.0).epsilon(1e-12));

  CHECK_THROWS_AS((void)psnr(ComplexImage(sh), img), std::invalid_argument);
  CHECK_THROWS_AS((void)psnr(ref, ComplexImage({4, 5})), ShapeError);
}

TEST_CASE("psnr decreases with growing noise")
{
  auto ref = phantom(1);
  Real last = INFINITY;
  for (Real s : {0.01, 0.02, 0.05, 0.1, 0.2}) {
    Rng rng(7);
    auto noisy = ref + randn_complex(ref.shape(), s, rng);
    Real const p = psnr(ref, noisy);
    CHECK(p < last);
    last = p;
  }
}

TEST_CASE("ssim")
{
  auto ref = phantom(2);
  CHECK(ssim(ref, ref) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ssim(ref, std::polar(1.0, 0.7) * ref) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ssim(ref, ComplexImage(ref.shape())) < 0.1);

  Rng rng(3);
  for (Real s : {0.01, 0.1, 1.0, 10.0}) {
    auto other = ref + randn_complex(ref.shape(), s, rng);
    Real const v = ssim(ref, other);
    CHECK(v >= -1.0);
    CHECK(v <= 1.0);
    CHECK(v < 1.0);
  }
  // anti-correlated structure
  auto neg = ref;
  for (Index i = 0; i < neg.size(); ++i)
    neg[i] = 1.0 - std::abs(ref[i]);
  CHECK(ssim(ref, neg) >= -1.0);
  CHECK_THROWS_AS((void)ssim(ComplexImage({6, 6}, 1.0), ComplexImage({6, 6}, 1.0)), ShapeError);
}

TEST_CASE("mean_std")
{
  auto s = mean_std({1.0, 2.0, 3.0, 4.0});
  CHECK(s.mean == doctest::Approx(2.5));
  CHECK(s.std == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(mean_std({3.0}).std == 0.0);
  CHECK_THROWS((void)mean_std({}));
}

TEST_CASE("write_table round trip")
{
  auto const path = tmp_path("table.csv");
  MetricRow row{"ENSURE, weighted \"cg\"", 4.0, 0.03, 31.234567890123456, 0.1 + 0.2, 0.91, 1.0 / 3.0};
  write_table({row}, path);
  auto back = read_table(path);
  REQUIRE(back.size() == 1);
  CHECK(back[0] == row); // bitwise: 17 significant digits are lossless

  auto const text = slurp(path);
  CHECK(text.rfind("method,accel,sigma,psnr_mean,psnr_std,ssim_mean,ssim_std\r\n", 0) == 0);
  CHECK(text.find("0.30000000000000004") != std::string::npos);
  CHECK(text.find("\"ENSURE, weighted \"\"cg\"\"\"") != std::string::npos);

  MetricRow inf_row{"id", 4, 0, kPsnrIdentical, 0, 1, 0};
  write_table({inf_row}, path);
  CHECK(std::isinf(read_table(path)[0].psnr_mean));

  CHECK_THROWS((void)write_table({}, path));
  row.psnr_std = -1;
  CHECK_THROWS((void)write_table({row}, path));
}

TEST_CASE("csv_parse")
{
  auto rows = csv_parse("a,b\r\n\"x,y\",\"he said \"\"hi\"\"\"\r\n,\n");
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][0] == "x,y");
  CHECK(rows[1][1] == "he said \"hi\"");
  CHECK(rows[2] == std::vector<std::string>{"", ""});
  CHECK_THROWS((void)csv_parse("\"open"));
}

TEST_CASE("write_series")
{
  auto const path = tmp_path("series.csv");
  write_series({"epoch", "loss"}, {{1, 0.5}, {2, 0.25}}, path);
  CHECK(slurp(path) == "epoch,loss\r\n1,0.5\r\n2,0.25\r\n");
  write_series({"epoch", "loss"}, {{1, 0.5}}, path, true);
  CHECK(slurp(path) == "# epoch loss\n1 0.5\n");
  CHECK_THROWS((void)write_series({"a"}, {{1, 2}}, path));
}

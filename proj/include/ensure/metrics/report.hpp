#pragma once

#include "ensure/core/types.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace ensure {

struct MetricRow
{
  std::string method;
  Real accel = 0.0;
  Real sigma = 0.0;
  Real psnr_mean = 0.0;
  Real psnr_std = 0.0;
  Real ssim_mean = 0.0;
  Real ssim_std = 0.0;

  auto operator==(MetricRow const &) const -> bool = default;
};

inline std::vector<std::string> const kMetricColumns{"method",   "accel",     "sigma",   "psnr_mean",
                                                     "psnr_std", "ssim_mean", "ssim_std"};

// Lossless decimal form (17 significant digits; inf / -inf / nan spelled out).
auto format_real(Real v) -> std::string;
auto parse_real(std::string const &s) -> Real;

// RFC 4180 CSV (CRLF line ends, fields quoted when needed).
auto csv_escape(std::string const &field) -> std::string;
auto csv_parse(std::string const &text) -> std::vector<std::vector<std::string>>;

void write_table(std::vector<MetricRow> const &rows, std::filesystem::path const &path);
auto read_table(std::filesystem::path const &path) -> std::vector<MetricRow>;

// Numeric series, one row per step. Comma-separated with a header line, or
// whitespace-delimited with a '#' header (gnuplot) when gnuplot is set.
void write_series(std::vector<std::string> const &columns, std::vector<std::vector<Real>> const &rows,
                  std::filesystem::path const &path, bool gnuplot = false);

} // namespace ensure

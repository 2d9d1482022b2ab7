#include "ensure/metrics/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ensure {

auto format_real(Real v) -> std::string
{
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

auto parse_real(std::string const &s) -> Real
{
  if (s == "nan")
    return std::nan("");
  if (s == "inf")
    return INFINITY;
  if (s == "-inf")
    return -INFINITY;
  std::size_t pos = 0;
  Real v = std::stod(s, &pos);
  if (pos != s.size())
    throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

auto csv_escape(std::string const &field) -> std::string
{
  if (field.find_first_of(",\"\r\n") == std::string::npos)
    return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"')
      out += '"';
    out += c;
  }
  return out + '"';
}

auto csv_parse(std::string const &text) -> std::vector<std::vector<std::string>>
{
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char const c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n')
        ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted)
    throw std::invalid_argument("csv: unterminated quoted field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_table(std::vector<MetricRow> const &rows, std::filesystem::path const &path)
{
  if (rows.empty())
    throw std::invalid_argument("write_table: no rows");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw std::runtime_error("cannot create " + path.string());
  for (std::size_t i = 0; i < kMetricColumns.size(); ++i)
    out << (i ? "," : "") << kMetricColumns[i];
  out << "\r\n";
  for (auto const &r : rows) {
    if (r.psnr_std < 0 || r.ssim_std < 0)
      throw std::invalid_argument("write_table: negative standard deviation");
    out << csv_escape(r.method) << ',' << format_real(r.accel) << ',' << format_real(r.sigma) << ','
        << format_real(r.psnr_mean) << ',' << format_real(r.psnr_std) << ',' << format_real(r.ssim_mean) << ','
        << format_real(r.ssim_std) << "\r\n";
  }
  if (!out)
    throw std::runtime_error("write failed for " + path.string());
}

auto read_table(std::filesystem::path const &path) -> std::vector<MetricRow>
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  auto const cells = csv_parse(ss.str());
  if (cells.empty() || cells.front() != kMetricColumns)
    throw std::invalid_argument(path.string() + ": unexpected header");
  std::vector<MetricRow> rows;
  for (std::size_t i = 1; i < cells.size(); ++i) {
    auto const &c = cells[i];
    if (c.size() != kMetricColumns.size())
      throw std::invalid_argument(path.string() + ": row " + std::to_string(i) + " has the wrong field count");
    rows.push_back({c[0], parse_real(c[1]), parse_real(c[2]), parse_real(c[3]), parse_real(c[4]),
                    parse_real(c[5]), parse_real(c[6])});
  }
  return rows;
}

void write_series(std::vector<std::string> const &columns, std::vector<std::vector<Real>> const &rows,
                  std::filesystem::path const &path, bool gnuplot)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw std::runtime_error("cannot create " + path.string());
  char const *sep = gnuplot ? " " : ",";
  char const *eol = gnuplot ? "\n" : "\r\n";
  if (gnuplot)
    out << "# ";
  for (std::size_t i = 0; i < columns.size(); ++i)
    out << (i ? sep : "") << (gnuplot ? columns[i] : csv_escape(columns[i]));
  out << eol;
  for (auto const &r : rows) {
    if (r.size() != columns.size())
      throw std::invalid_argument("write_series: row width does not match the header");
    for (std::size_t i = 0; i < r.size(); ++i)
      out << (i ? sep : "") << format_real(r[i]);
    out << eol;
  }
  if (!out)
    throw std::runtime_error("write failed for " + path.string());
}

} // namespace ensure

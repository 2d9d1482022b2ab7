#pragma once

#include "ensure/core/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ensure {

struct VerifyCheck
{
  std::string name;
  Real statistic = 0.0;
  Real tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

struct SuiteReport
{
  std::string suite;
  std::vector<VerifyCheck> checks;
  Real seconds = 0.0;
  [[nodiscard]] auto pass() const -> bool;
};

struct VerifyOptions
{
  int n = 8;              // length of the enumerated 1-D problems
  std::uint64_t seed = 1;
  int draws = 10000;      // Monte-Carlo draws (sure, lemma2)
  int probes = 10000;     // divergence probes at the largest K
};

auto verify_suites() -> std::vector<std::string> const &;

// Throws std::invalid_argument for an unknown suite.
auto run_suite(std::string const &suite, VerifyOptions const &opt) -> SuiteReport;

auto verify_json(std::vector<SuiteReport> const &reports) -> std::string;

} // namespace ensure

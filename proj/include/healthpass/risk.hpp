#pragma once
//------------------------------------------------------------------------------
//
//   Copyright 2026 The Healthpass Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace healthpass {
namespace risk {

using BigInt   = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// How pool and disturbance counts are derived from ratios.
enum class Rounding
{
  FLOOR,
  NEAREST,
  CEIL,
};

/// Population N, pool ratio R_v and disturbance ratio R_d. A committee of
/// committee_size is compromised once it seats compromise_threshold or more
/// disturbance agents.
struct RiskParams
{
  std::uint64_t population{0};
  double        pool_ratio{0.0};
  double        disturbance_ratio{0.0};
  std::uint64_t committee_size{5};
  std::uint64_t compromise_threshold{3};
  Rounding      rounding{Rounding::FLOOR};
};

struct RiskResult
{
  std::uint64_t pool{0};
  std::uint64_t disturbance{0};
  Rational      p_nd_exact;
  Rational      p_d_exact;
  double        p_nd{1.0};
  double        p_d{0.0};
};

struct MonteCarloEstimate
{
  double        estimate{0.0};
  double        standard_error{0.0};
  std::uint64_t hits{0};
  std::uint64_t trials{0};
};

/// One row of the CSV interface: columns n,r_v,r_d,v,d,p_d,feasible.
struct RiskRow
{
  std::uint64_t         n{0};
  double                r_v{0.0};
  double                r_d{0.0};
  std::uint64_t         v{0};
  std::uint64_t         d{0};
  std::optional<double> p_d;
  bool                  feasible{false};
};

std::uint64_t ScaledCount(double ratio, std::uint64_t base, Rounding rounding = Rounding::FLOOR);

BigInt Binomial(std::uint64_t n, std::uint64_t r);

/// Exact hypergeometric tail for explicit counts: P_nd is the probability
/// that a committee drawn without replacement from `pool` members, of whom
/// `disturbance` are marked, seats at most threshold-1 marked members.
RiskResult DisturbanceProbability(std::uint64_t pool, std::uint64_t disturbance, std::uint64_t committee_size = 5,
                                  std::uint64_t compromise_threshold = 3);

RiskResult PDisturbAnalytic(RiskParams const &params);

MonteCarloEstimate PDisturbMonteCarlo(RiskParams const &params, std::uint64_t trials, std::uint64_t rng_seed);

/// Explicit-count variant used by the consistency sweeps.
MonteCarloEstimate MonteCarloCounts(std::uint64_t pool, std::uint64_t disturbance, std::uint64_t committee_size,
                                    std::uint64_t compromise_threshold, std::uint64_t trials,
                                    std::uint64_t rng_seed);

/// Smallest N in [n_min, n_max] from which every N up to n_max is feasible
/// with P_d <= target. Scans exhaustively because flooring makes P_d
/// non-monotone in N.
std::optional<std::uint64_t> MinPopulationForRisk(double pool_ratio, double disturbance_ratio, double target,
                                                  std::uint64_t n_min, std::uint64_t n_max);

/// Smallest pool ratio on the 0.01 grid giving a feasible pool and P_d <= target.
std::optional<double> RequiredPoolRatio(std::uint64_t population, double disturbance_ratio, double target);

/// Inclusive grid lo, lo+step, ..., <= hi.
std::vector<double> RatioGrid(double lo, double hi, double step);

std::vector<RiskRow> RiskGrid(std::uint64_t population, double rv_lo, double rv_hi, double rd_lo, double rd_hi,
                              double step);
std::vector<RiskRow> CurveOverPopulation(double pool_ratio, double disturbance_ratio, std::uint64_t n_min,
                                         std::uint64_t n_max, std::uint64_t n_step);
std::vector<RiskRow> RequiredRatioCurve(double disturbance_ratio, double target, std::uint64_t n_min,
                                        std::uint64_t n_max, std::uint64_t n_step);

std::string ToCsv(std::vector<RiskRow> const &rows);

}  // namespace risk
}  // namespace healthpass

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

#include "healthpass/risk.hpp"
#include "healthpass/error.hpp"

#include <cmath>
#include <cstdio>
#include <random>

namespace healthpass {
namespace risk {
namespace {

// absorbs binary representation error such as 0.29 * 100 = 28.999999999999996
constexpr double COUNT_EPSILON = 1e-9;

constexpr std::uint64_t RATIO_GRID_STEPS = 100;

std::uint64_t UniformBelow(std::mt19937_64 &rng, std::uint64_t bound)
{
  auto const limit = std::numeric_limits<std::uint64_t>::max() -
                     (std::numeric_limits<std::uint64_t>::max() % bound + 1) % bound;
  for (;;)
  {
    auto const x = rng();
    if (x <= limit)
    {
      return x % bound;
    }
  }
}

void CheckRatios(double pool_ratio, double disturbance_ratio)
{
  if (!(pool_ratio > 0.0 && pool_ratio <= 1.0))
  {
    throw Error(ErrorKind::PARAMETER, "pool ratio must lie in (0, 1]");
  }
  if (!(disturbance_ratio >= 0.0 && disturbance_ratio <= 1.0))
  {
    throw Error(ErrorKind::PARAMETER, "disturbance ratio must lie in [0, 1]");
  }
}

void CheckTarget(double target)
{
  if (!(target > 0.0 && target <= 1.0))
  {
    throw Error(ErrorKind::PARAMETER, "target probability must lie in (0, 1]");
  }
}

struct Counts
{
  std::uint64_t pool;
  std::uint64_t disturbance;
};

Counts CountsFor(RiskParams const &params)
{
  if (params.population == 0)
  {
    throw Error(ErrorKind::PARAMETER, "population must be positive");
  }
  CheckRatios(params.pool_ratio, params.disturbance_ratio);
  auto const pool = ScaledCount(params.pool_ratio, params.population, params.rounding);
  return {pool, ScaledCount(params.disturbance_ratio, pool, params.rounding)};
}

bool Feasible(std::uint64_t population, double pool_ratio, std::uint64_t committee_size = 5)
{
  return ScaledCount(pool_ratio, population) >= committee_size;
}

std::string FormatRatio(double value)
{
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.6g", value);
  return buffer;
}

std::string FormatProbability(double value)
{
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

RiskRow RowFor(std::uint64_t population, double pool_ratio, double disturbance_ratio)
{
  RiskRow row;
  row.n   = population;
  row.r_v = pool_ratio;
  row.r_d = disturbance_ratio;
  row.v   = ScaledCount(pool_ratio, population);
  row.d   = ScaledCount(disturbance_ratio, row.v);
  if (row.v >= 5)
  {
    row.feasible = true;
    row.p_d      = DisturbanceProbability(row.v, row.d).p_d;
  }
  return row;
}

}  // namespace

std::uint64_t ScaledCount(double ratio, std::uint64_t base, Rounding rounding)
{
  auto const scaled = ratio * static_cast<double>(base);
  switch (rounding)
  {
  case Rounding::FLOOR:
    return static_cast<std::uint64_t>(std::floor(scaled + COUNT_EPSILON));
  case Rounding::NEAREST:
    return static_cast<std::uint64_t>(std::llround(scaled));
  case Rounding::CEIL:
    return static_cast<std::uint64_t>(std::ceil(scaled - COUNT_EPSILON));
  }
  return 0;
}

BigInt Binomial(std::uint64_t n, std::uint64_t r)
{
  if (r > n)
  {
    return 0;
  }
  r = std::min(r, n - r);
  BigInt result = 1;
  for (std::uint64_t i = 1; i <= r; ++i)
  {
    // exact at every step: result * (n - r + i) is divisible by i
    result *= n - r + i;
    result /= i;
  }
  return result;
}

RiskResult DisturbanceProbability(std::uint64_t pool, std::uint64_t disturbance, std::uint64_t committee_size,
                                  std::uint64_t compromise_threshold)
{
  if (compromise_threshold < 1 || compromise_threshold > committee_size)
  {
    throw Error(ErrorKind::PARAMETER, "compromise threshold must lie in [1, committee size]");
  }
  if (pool < committee_size)
  {
    throw Error(ErrorKind::PARAMETER, "pool of " + std::to_string(pool) + " cannot seat a committee of " +
                                          std::to_string(committee_size));
  }
  if (disturbance > pool)
  {
    throw Error(ErrorKind::PARAMETER, "disturbance count exceeds pool size");
  }

  BigInt safe = 0;
  for (std::uint64_t j = 0; j < compromise_threshold; ++j)
  {
    if (j > committee_size)
    {
      break;
    }
    safe += Binomial(disturbance, j) * Binomial(pool - disturbance, committee_size - j);
  }

  RiskResult result;
  result.pool        = pool;
  result.disturbance = disturbance;
  result.p_nd_exact  = Rational(safe, Binomial(pool, committee_size));
  result.p_d_exact   = Rational(1) - result.p_nd_exact;
  result.p_nd        = result.p_nd_exact.convert_to<double>();
  result.p_d         = result.p_d_exact.convert_to<double>();
  return result;
}

RiskResult PDisturbAnalytic(RiskParams const &params)
{
  auto const counts = CountsFor(params);
  return DisturbanceProbability(counts.pool, counts.disturbance, params.committee_size,
                                params.compromise_threshold);
}

MonteCarloEstimate MonteCarloCounts(std::uint64_t pool, std::uint64_t disturbance, std::uint64_t committee_size,
                                    std::uint64_t compromise_threshold, std::uint64_t trials,
                                    std::uint64_t rng_seed)
{
  // validates the same preconditions as the analytic route
  DisturbanceProbability(pool, disturbance, committee_size, compromise_threshold);
  if (trials == 0)
  {
    throw Error(ErrorKind::PARAMETER, "Monte-Carlo needs at least one trial");
  }

  std::mt19937_64 rng{rng_seed};
  std::uint64_t   hits = 0;
  for (std::uint64_t trial = 0; trial < trials; ++trial)
  {
    auto          marked_left = disturbance;
    auto          total_left  = pool;
    std::uint64_t seated      = 0;
    for (std::uint64_t seat = 0; seat < committee_size; ++seat)
    {
      if (UniformBelow(rng, total_left) < marked_left)
      {
        ++seated;
        --marked_left;
      }
      --total_left;
    }
    hits += seated >= compromise_threshold ? 1 : 0;
  }

  MonteCarloEstimate mc;
  mc.hits           = hits;
  mc.trials         = trials;
  mc.estimate       = static_cast<double>(hits) / static_cast<double>(trials);
  mc.standard_error = std::sqrt(mc.estimate * (1.0 - mc.estimate) / static_cast<double>(trials));
  return mc;
}

MonteCarloEstimate PDisturbMonteCarlo(RiskParams const &params, std::uint64_t trials, std::uint64_t rng_seed)
{
  auto const counts = CountsFor(params);
  return MonteCarloCounts(counts.pool, counts.disturbance, params.committee_size, params.compromise_threshold,
                          trials, rng_seed);
}

std::optional<std::uint64_t> MinPopulationForRisk(double pool_ratio, double disturbance_ratio, double target,
                                                  std::uint64_t n_min, std::uint64_t n_max)
{
  CheckRatios(pool_ratio, disturbance_ratio);
  CheckTarget(target);
  if (n_min > n_max || n_max == 0)
  {
    throw Error(ErrorKind::PARAMETER, "empty population range");
  }

  std::optional<std::uint64_t> best;
  for (auto n = n_max; n >= std::max<std::uint64_t>(n_min, 1); --n)
  {
    if (!Feasible(n, pool_ratio))
    {
      break;
    }
    auto const v = ScaledCount(pool_ratio, n);
    if (DisturbanceProbability(v, ScaledCount(disturbance_ratio, v)).p_d > target)
    {
      break;
    }
    best = n;
    if (n == 1)
    {
      break;
    }
  }
  return best;
}

std::optional<double> RequiredPoolRatio(std::uint64_t population, double disturbance_ratio, double target)
{
  CheckRatios(1.0, disturbance_ratio);
  CheckTarget(target);
  bool any_feasible = false;
  for (std::uint64_t i = 1; i <= RATIO_GRID_STEPS; ++i)
  {
    double const ratio = static_cast<double>(i) / static_cast<double>(RATIO_GRID_STEPS);
    if (!Feasible(population, ratio))
    {
      continue;
    }
    any_feasible = true;
    auto const v = ScaledCount(ratio, population);
    if (DisturbanceProbability(v, ScaledCount(disturbance_ratio, v)).p_d <= target)
    {
      return ratio;
    }
  }
  if (!any_feasible)
  {
    throw Error(ErrorKind::PARAMETER, "population " + std::to_string(population) +
                                          " is too small for any committee pool");
  }
  return std::nullopt;
}

std::vector<double> RatioGrid(double lo, double hi, double step)
{
  if (!(step > 0.0) || lo > hi)
  {
    throw Error(ErrorKind::PARAMETER, "ratio grid needs lo <= hi and a positive step");
  }
  std::vector<double> out;
  auto const          n = static_cast<std::uint64_t>(std::floor((hi - lo) / step + COUNT_EPSILON));
  for (std::uint64_t i = 0; i <= n; ++i)
  {
    out.push_back(std::round((lo + static_cast<double>(i) * step) * 1e9) / 1e9);
  }
  return out;
}

std::vector<RiskRow> RiskGrid(std::uint64_t population, double rv_lo, double rv_hi, double rd_lo, double rd_hi,
                              double step)
{
  if (population == 0)
  {
    throw Error(ErrorKind::PARAMETER, "population must be positive");
  }
  auto const pool_ratios        = RatioGrid(rv_lo, rv_hi, step);
  auto const disturbance_ratios = RatioGrid(rd_lo, rd_hi, step);
  CheckRatios(pool_ratios.front(), disturbance_ratios.front());
  CheckRatios(pool_ratios.back(), disturbance_ratios.back());

  std::vector<RiskRow> rows;
  for (auto rv : pool_ratios)
  {
    for (auto rd : disturbance_ratios)
    {
      rows.push_back(RowFor(population, rv, rd));
    }
  }
  return rows;
}

std::vector<RiskRow> CurveOverPopulation(double pool_ratio, double disturbance_ratio, std::uint64_t n_min,
                                         std::uint64_t n_max, std::uint64_t n_step)
{
  CheckRatios(pool_ratio, disturbance_ratio);
  if (n_step == 0 || n_min > n_max || n_min == 0)
  {
    throw Error(ErrorKind::PARAMETER, "population range needs 0 < n_min <= n_max and a positive step");
  }
  std::vector<RiskRow> rows;
  for (auto n = n_min; n <= n_max; n += n_step)
  {
    rows.push_back(RowFor(n, pool_ratio, disturbance_ratio));
  }
  return rows;
}

std::vector<RiskRow> RequiredRatioCurve(double disturbance_ratio, double target, std::uint64_t n_min,
                                        std::uint64_t n_max, std::uint64_t n_step)
{
  if (n_step == 0 || n_min > n_max || n_min == 0)
  {
    throw Error(ErrorKind::PARAMETER, "population range needs 0 < n_min <= n_max and a positive step");
  }
  std::vector<RiskRow> rows;
  for (auto n = n_min; n <= n_max; n += n_step)
  {
    std::optional<double> ratio;
    try
    {
      ratio = RequiredPoolRatio(n, disturbance_ratio, target);
    }
    catch (Error const &e)
    {
      if (e.kind() != ErrorKind::PARAMETER)
      {
        throw;
      }
    }
    if (ratio)
    {
      rows.push_back(RowFor(n, *ratio, disturbance_ratio));
    }
    else
    {
      RiskRow row;
      row.n   = n;
      row.r_d = disturbance_ratio;
      rows.push_back(row);
    }
  }
  return rows;
}

std::string ToCsv(std::vector<RiskRow> const &rows)
{
  std::string out = "n,r_v,r_d,v,d,p_d,feasible\n";
  for (auto const &row : rows)
  {
    out += std::to_string(row.n) + ',' + FormatRatio(row.r_v) + ',' + FormatRatio(row.r_d) + ',' +
           std::to_string(row.v) + ',' + std::to_string(row.d) + ',' +
           (row.p_d ? FormatProbability(*row.p_d) : std::string{}) + ',' + (row.feasible ? "1" : "0") + '\n';
  }
  return out;
}

}  // namespace risk
}  // namespace healthpass

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

#include "healthpass/error.hpp"
#include "healthpass/sim.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace healthpass {
namespace sim {
namespace {

std::string_view Trim(std::string_view s)
{
  auto const first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos)
  {
    return {};
  }
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

std::uint64_t ToUnsigned(std::string_view text, std::string const &where)
{
  std::uint64_t value = 0;
  auto const [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
  {
    throw Error(ErrorKind::PARSE, where + ": expected an unsigned integer, got '" + std::string{text} + "'");
  }
  return value;
}

double ToDouble(std::string_view text, std::string const &where)
{
  std::string const copy{text};
  char             *end   = nullptr;
  double const      value = std::strtod(copy.c_str(), &end);
  if (copy.empty() || end != copy.c_str() + copy.size())
  {
    throw Error(ErrorKind::PARSE, where + ": expected a number, got '" + copy + "'");
  }
  return value;
}

bool ToBool(std::string_view text, std::string const &where)
{
  if (text == "true" || text == "1" || text == "yes")
  {
    return true;
  }
  if (text == "false" || text == "0" || text == "no")
  {
    return false;
  }
  throw Error(ErrorKind::PARSE, where + ": expected true or false, got '" + std::string{text} + "'");
}

}  // namespace

ScenarioConfig ParseScenario(std::string_view text)
{
  ScenarioConfig     config;
  std::istringstream in{std::string{text}};
  std::string        raw;
  std::size_t        line_no = 0;
  while (std::getline(in, raw))
  {
    ++line_no;
    auto const line = Trim(raw);
    if (line.empty() || line.front() == '#')
    {
      continue;
    }
    auto const where = "line " + std::to_string(line_no);
    auto const eq    = line.find('=');
    if (eq == std::string_view::npos)
    {
      throw Error(ErrorKind::PARSE, where + ": expected 'key = value'");
    }
    auto const key   = Trim(line.substr(0, eq));
    auto const value = Trim(line.substr(eq + 1));

    if (key == "population")
    {
      config.population = ToUnsigned(value, where);
    }
    else if (key == "pool_ratio")
    {
      config.pool_ratio = ToDouble(value, where);
    }
    else if (key == "disturbance_ratio")
    {
      config.disturbance_ratio = ToDouble(value, where);
    }
    else if (key == "rounds")
    {
      config.rounds = ToUnsigned(value, where);
    }
    else if (key == "tickets_per_round")
    {
      config.tickets_per_round = ToUnsigned(value, where);
    }
    else if (key == "rng_seed")
    {
      config.rng_seed = ToUnsigned(value, where);
    }
    else if (key == "stake_per_validator")
    {
      config.stake_per_validator = ToUnsigned(value, where);
    }
    else if (key == "rebond_slashed")
    {
      config.rebond_slashed = ToBool(value, where);
    }
    else if (key == "drop_rate")
    {
      config.drop_rate = ToDouble(value, where);
    }
    else
    {
      throw Error(ErrorKind::PARSE, where + ": unknown key '" + std::string{key} + "'");
    }
  }
  return config;
}

ScenarioConfig LoadScenario(std::string const &path)
{
  std::ifstream in{path};
  if (!in)
  {
    throw Error(ErrorKind::IO, "cannot read " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseScenario(buffer.str());
}

}  // namespace sim
}  // namespace healthpass

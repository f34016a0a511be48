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

// Genesis config grammar, one directive per line:
//
//   # comment
//   genesis_seed = <64 hex characters>
//   minimum_stake = <integer>
//   template <id> = <criteria text>
//   identity <public key file> <stake>
//
// Key file paths are resolved relative to the config file's directory.

#include "healthpass/chain.hpp"
#include "healthpass/crypto.hpp"
#include "healthpass/error.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace healthpass {
namespace {

std::string_view Trim(std::string_view s)
{
  auto const first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos)
  {
    return {};
  }
  auto const last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::uint64_t ParseUnsigned(std::string_view text, std::size_t line_no)
{
  std::uint64_t value = 0;
  auto const [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
  {
    throw Error(ErrorKind::PARSE, "line " + std::to_string(line_no) + ": expected an unsigned integer, got '" +
                                      std::string{text} + "'");
  }
  return value;
}

std::string ReadFile(std::filesystem::path const &path)
{
  std::ifstream in{path};
  if (!in)
  {
    throw Error(ErrorKind::IO, "cannot read " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

GenesisConfig ParseGenesisConfig(std::string_view text, std::string const &base_dir)
{
  GenesisConfig config;
  bool          have_seed = false;
  std::size_t   line_no   = 0;

  std::istringstream in{std::string{text}};
  std::string        raw;
  while (std::getline(in, raw))
  {
    ++line_no;
    auto line = Trim(raw);
    if (line.empty() || line.front() == '#')
    {
      continue;
    }
    auto fail = [&](std::string const &what) {
      return Error(ErrorKind::PARSE, "line " + std::to_string(line_no) + ": " + what);
    };

    auto const space   = line.find_first_of(" \t=");
    auto const keyword = line.substr(0, space);
    auto const rest    = space == std::string_view::npos ? std::string_view{} : Trim(line.substr(space));

    if (keyword == "genesis_seed" || keyword == "minimum_stake")
    {
      if (rest.empty() || rest.front() != '=')
      {
        throw fail("expected '=' after " + std::string{keyword});
      }
      auto const value = Trim(rest.substr(1));
      if (keyword == "genesis_seed")
      {
        try
        {
          config.genesis_seed = DigestFromHex(value);
        }
        catch (Error const &)
        {
          throw fail("genesis_seed must be 64 hex characters");
        }
        have_seed = true;
      }
      else
      {
        config.minimum_stake = ParseUnsigned(value, line_no);
      }
    }
    else if (keyword == "template")
    {
      auto const eq = rest.find('=');
      if (eq == std::string_view::npos)
      {
        throw fail("template needs '<id> = <criteria>'");
      }
      ClaimTemplate t{std::string{Trim(rest.substr(0, eq))}, std::string{Trim(rest.substr(eq + 1))}};
      if (t.template_id.empty() || t.criteria.empty())
      {
        throw fail("template id and criteria must be non-empty");
      }
      config.templates.push_back(std::move(t));
    }
    else if (keyword == "identity")
    {
      auto const sep = rest.find_last_of(" \t");
      if (sep == std::string_view::npos)
      {
        throw fail("identity needs '<public key file> <stake>'");
      }
      auto const path  = std::filesystem::path{base_dir} / std::string{Trim(rest.substr(0, sep))};
      auto const stake = ParseUnsigned(Trim(rest.substr(sep + 1)), line_no);
      Bytes      key;
      try
      {
        key = DearmorPublicKey(ReadFile(path));
      }
      catch (Error const &e)
      {
        throw fail(e.what());
      }
      config.identities.push_back(GenesisIdentity{std::move(key), stake});
    }
    else
    {
      throw fail("unknown directive '" + std::string{keyword} + "'");
    }
  }
  if (!have_seed)
  {
    throw Error(ErrorKind::PARSE, "genesis config is missing genesis_seed");
  }
  return config;
}

GenesisConfig LoadGenesisConfig(std::string const &path)
{
  auto const text = ReadFile(path);
  auto const dir  = std::filesystem::path{path}.parent_path().string();
  return ParseGenesisConfig(text, dir);
}

}  // namespace healthpass

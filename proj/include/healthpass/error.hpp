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

#include <stdexcept>
#include <string>

namespace healthpass {

enum class ErrorKind
{
  CONFIG,
  PARSE,
  CHAIN,
  AUTHENTICITY,
  CONSENSUS,
  LOOKUP,
  KEY,
  COMMITTEE_SIZE,
  DUPLICATION,
  ACCESS,
  TAMPER,
  SEQUENCING,
  POOL_EXHAUSTED,
  LEDGER,
  TEMPLATE,
  ARTIFACT,
  DIRECTORY,
  AUTHORITY,
  PARAMETER,
  IO,
};

char const *ToString(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers can branch on
/// the category without parsing messages.
class Error : public std::runtime_error
{
public:
  Error(ErrorKind kind, std::string const &message)
    : std::runtime_error(std::string{ToString(kind)} + " error: " + message)
    , kind_{kind}
  {}

  ErrorKind kind() const noexcept
  {
    return kind_;
  }

private:
  ErrorKind kind_;
};

}  // namespace healthpass

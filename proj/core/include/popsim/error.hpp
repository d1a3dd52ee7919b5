//------------------------------------------------------------------------------
//
//   Copyright 2026 The popsim Authors
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

#pragma once

#include <stdexcept>
#include <type_traits>
#include <string>

namespace popsim {

/// Thrown when caller-supplied parameters violate a documented precondition.
class ValidationError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a persisted file cannot be parsed; carries the offending line.
class FormatError : public std::runtime_error
{
public:
  FormatError(std::string const &file, std::size_t line, std::string const &what)
    : std::runtime_error(file + ":" + std::to_string(line) + ": " + what)
    , line_{line}
  {}

  std::size_t line() const noexcept
  {
    return line_;
  }

private:
  std::size_t line_;
};

namespace detail {

/// `message` is a string or a callable producing one; a callable is only
/// invoked on failure.
template <typename Message>
inline void require(bool condition, Message &&message)
{
  if (!condition)
  {
    if constexpr (std::is_invocable_v<Message>)
    {
      throw ValidationError(std::string(message()));
    }
    else
    {
      throw ValidationError(std::string(message));
    }
  }
}

}  // namespace detail
}  // namespace popsim

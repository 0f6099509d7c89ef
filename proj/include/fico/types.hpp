#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace fico {

using Vertex = std::int32_t;
using AgentId = std::int32_t;
using Timestep = std::int64_t;

inline constexpr Vertex kNoVertex = -1;
inline constexpr AgentId kNoAgent = -1;
inline constexpr std::int32_t kUnreachable = std::numeric_limits<std::int32_t>::max();

// Base for all errors raised by the planning library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed map / scenario input. `line` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// File missing or unreadable.
class IoError : public Error {
 public:
  using Error::Error;
};

// Goal not reachable from an agent's position.
class Unsolvable : public Error {
 public:
  using Error::Error;
};

}  // namespace fico

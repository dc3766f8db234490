#pragma once

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace urcminer {

inline constexpr std::string_view kVersion = "0.1.0";

// All library errors derive from Error so the CLI can map them to exit 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

using Id = std::int64_t;
using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

// Accepts "YYYY-MM-DDTHH:MM:SS[.fff][Z|+hh:mm|-hh:mm]" and "YYYY-MM-DD".
// Dump timestamps carry no zone and are taken as UTC.
Timestamp parse_timestamp(std::string_view text);
// Always "YYYY-MM-DDTHH:MM:SS.fffZ".
std::string format_timestamp(Timestamp ts);

// Real-valued minutes from `from` to `to` (negative if `to` is earlier).
double minutes_between(Timestamp from, Timestamp to);

}  // namespace urcminer

#pragma once

#include <stdexcept>
#include <string>

namespace hpcpm {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InconsistentSnapshot : Error {
  using Error::Error;
};

struct OutOfOrderSnapshot : Error {
  using Error::Error;
};

struct SourceFailure : Error {
  using Error::Error;
};

struct UnassignedJob : Error {
  explicit UnassignedJob(std::string id)
      : Error("job " + id + " has no case assignment"), job_id(std::move(id)) {}
  std::string job_id;
};

struct IoFailure : Error {
  using Error::Error;
};

struct SchemaMismatch : Error {
  explicit SchemaMismatch(std::string h) : Error("unexpected CSV header: " + h), header(std::move(h)) {}
  std::string header;
};

struct BadTimestamp : Error {
  BadTimestamp(std::size_t r, const std::string& value)
      : Error("bad timestamp '" + value + "' on row " + std::to_string(r)), row(r) {}
  std::size_t row;
};

struct ParseError : Error {
  ParseError(std::size_t l, const std::string& what)
      : Error("line " + std::to_string(l) + ": " + what), line(l) {}
  std::size_t line;
};

struct ValidationError : Error {
  ValidationError(std::string id, const std::string& what)
      : Error("job " + id + ": " + what), job_id(std::move(id)) {}
  std::string job_id;
};

}  // namespace hpcpm

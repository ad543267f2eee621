#pragma once

#include <stdexcept>
#include <string>

namespace famine {

// Exit codes shared by the CLI and the pipeline.
enum class ExitCode : int { Ok = 0, Usage = 1, Data = 2, Internal = 3 };

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual ExitCode exit_code() const noexcept { return ExitCode::Internal; }
};

/// Bad flags, bad config document, unwritable output directory.
class UsageError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::Usage; }
};

/// Malformed or unusable input data (catalog, dataset, no evaluable countries).
class DataError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::Data; }
};

}  // namespace famine

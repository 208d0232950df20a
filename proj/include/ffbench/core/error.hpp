#pragma once
#include <stdexcept>
#include <string>

namespace ffbench {

// Malformed user input: config files, CLI arguments, unreadable file formats.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A computation cannot proceed: violated precondition, numerical breakdown,
// missing data.  Distinct from ConfigError so the CLI can map the two families
// to different exit codes.
struct ComputeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ffbench

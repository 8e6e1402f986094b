#pragma once

#include <stdexcept>
#include <string>

namespace qcevo {

// Configuration or input problems the caller can fix: unknown names, missing
// or malformed files, inconsistent settings. The CLI maps these to exit
// code 2, as opposed to runtime failures (exit 1).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace qcevo

#pragma once

#include <stdexcept>

namespace rebound {

// Error taxonomy mirrors the CLI exit codes: config 1, data 2, estimation 3.

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct estimation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rebound

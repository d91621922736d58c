#pragma once

#include <stdexcept>
#include <string>

namespace sensor_rank {

// Every recoverable failure in the library is reported as an Error. The CLI
// turns these into a single machine-readable line on stderr.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sensor_rank

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace klproj {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Raised when a single posterior draw cannot be evaluated or projected;
/// carries the draw index so callers can exclude rather than abort.
struct DrawError : std::runtime_error {
  Index draw;
  DrawError(Index d, const std::string& what)
      : std::runtime_error("draw " + std::to_string(d) + ": " + what), draw(d) {}
};

/// Raised on rank-deficient designs; the message names the offending columns.
struct SingularityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace klproj

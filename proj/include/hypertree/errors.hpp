#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hypertree {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Bad argument: wrong sizes, non-positive masses, malformed configs.
class InvalidInput : public Error {
  public:
    using Error::Error;
};

/// Tree text could not be parsed or validated. `position` is a 0-based
/// character offset into the input (npos when the error is not positional).
class ParseError : public InvalidInput {
  public:
    ParseError(const std::string& what, std::size_t position)
        : InvalidInput(position == std::string::npos
                           ? what
                           : what + " at position " + std::to_string(position)),
          position_(position) {}
    std::size_t position() const noexcept { return position_; }

  private:
    std::size_t position_;
};

/// The state sits on a coordinate singularity where the requested quantity
/// is undefined (zero hyperradius, moving through a zero sub-norm, a
/// csc/sec scale paired with a non-vanishing angular momentum).
class DegenerateState : public Error {
  public:
    using Error::Error;
};

/// Scattering setup that cannot be evaluated (e.g. F(rho_max) <= 0).
class InvalidSpec : public InvalidInput {
  public:
    using InvalidInput::InvalidInput;
};

}  // namespace hypertree

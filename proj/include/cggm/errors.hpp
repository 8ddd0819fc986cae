#pragma once

#include <stdexcept>
#include <string>
#include <vector>
#include <cstdint>

namespace cggm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violated by the caller (bad shape, out-of-range parameter).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Object is not in a state the operation accepts (e.g. non-chordal graph).
class InvalidState : public Error {
 public:
  using Error::Error;
};

/// Floating-point failure: non-PD matrix where PD is required.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// U_gamma^T U_gamma is singular (or numerically so) for this inclusion vector.
class RankError : public NumericError {
 public:
  RankError(const std::string& what, std::vector<std::uint8_t> gamma)
      : NumericError(what), gamma_(std::move(gamma)) {}
  const std::vector<std::uint8_t>& gamma() const noexcept { return gamma_; }

 private:
  std::vector<std::uint8_t> gamma_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cggm

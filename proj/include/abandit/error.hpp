#pragma once

#include <stdexcept>
#include <string>

namespace abandit {

// Malformed instance, config, or parameter set.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A reward stream was asked for a pull beyond its horizon.
class ExhaustedStreamError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

}  // namespace abandit

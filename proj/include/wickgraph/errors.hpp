#pragma once

#include <stdexcept>
#include <string>

namespace wickgraph {

// Malformed user input: dimension mismatches, out-of-range arguments,
// unparsable configs/files. The CLI maps this to exit code 2.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A configured cost guard tripped: term budget, component dimension cap,
// oracle size guard, fk truncation guard. The CLI maps this to exit code 3.
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The Gram matrix of the requested kernel could not be factorized even after
// jitter escalation, i.e. the kernel is not usable as a sampling covariance.
struct SamplingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace wickgraph

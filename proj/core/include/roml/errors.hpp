#pragma once

#include <stdexcept>
#include <string>

namespace roml {

// Caller-facing contract violations. The CLI maps these to exit code 2.
struct InvalidScaleError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct InfeasiblePromiseError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NotMemberError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct OverflowError : std::overflow_error {
  using std::overflow_error::overflow_error;
};

// Internal invariant violations. The CLI maps these to exit code 3.
struct DecompositionGapError : std::logic_error {
  using std::logic_error::logic_error;
};
struct AssemblyIncompleteError : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace roml

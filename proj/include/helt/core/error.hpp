#pragma once

#include <stdexcept>
#include <string>

namespace helt {

// Bad or inconsistent configuration (character specs, run configs, files).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke an operation's precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Non-finite values inside the learner.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Checkpoint or manifest failed integrity checks.
class CorruptionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define HELT_EXPECT(cond, msg)                                   \
  do {                                                           \
    if (!(cond)) throw ::helt::ContractViolation(std::string(msg)); \
  } while (0)

}  // namespace helt

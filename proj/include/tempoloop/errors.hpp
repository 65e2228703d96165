#pragma once

#include <stdexcept>
#include <string>

namespace tempoloop {

// Invalid configuration or grid setup. The command line tool maps this to
// exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// The foam cell concentration reached 1: the surrogate vessel is closed and
// the model leaves its domain of validity.
class LumenClosureError : public std::runtime_error {
 public:
  explicit LumenClosureError(double c_s)
      : std::runtime_error("lumen closure: foam cell concentration reached " +
                           std::to_string(c_s)),
        c_s_(c_s) {}

  double concentration() const { return c_s_; }

 private:
  double c_s_;
};

// An iteration cap was hit before a stopping criterion was satisfied. The
// command line tool maps this to exit code 3.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace tempoloop

#pragma once

#include <stdexcept>
#include <string>

namespace relblow {

// Input outside the physical/admissible domain (rho < 0, |u| >= c, ...).
class domain_error : public std::runtime_error {
public:
  explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

// An iterative routine failed to converge or an integral failed its tolerance.
class numerical_error : public std::runtime_error {
public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed configuration or data file.
class config_error : public std::runtime_error {
public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace relblow

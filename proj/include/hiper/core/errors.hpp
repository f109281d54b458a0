#pragma once

#include <stdexcept>
#include <string>

namespace hiper {

struct NotFoundError : std::runtime_error {
  explicit NotFoundError(const std::string& what) : std::runtime_error(what) {}
};

struct StaleDataError : std::runtime_error {
  explicit StaleDataError(const std::string& what) : std::runtime_error(what) {}
};

struct UnavailableError : std::runtime_error {
  explicit UnavailableError(const std::string& what) : std::runtime_error(what) {}
};

struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hiper

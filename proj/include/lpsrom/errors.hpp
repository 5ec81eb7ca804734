#ifndef LPSROM_ERRORS_HPP
#define LPSROM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace lpsrom {

// Error taxonomy used across the toolkit. All failures that a caller can
// meaningfully react to are typed; internal logic errors use assert().

struct GeometryError : std::runtime_error {
  explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

struct ParameterError : std::runtime_error {
  explicit ParameterError(const std::string& what) : std::runtime_error(what) {}
};

struct SpaceMismatchError : std::runtime_error {
  explicit SpaceMismatchError(const std::string& what) : std::runtime_error(what) {}
};

// Nonlinear solve failure; carries the residual history in the message.
struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

struct LinAlgError : std::runtime_error {
  explicit LinAlgError(const std::string& what) : std::runtime_error(what) {}
};

struct DataError : std::runtime_error {
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

struct RankError : std::runtime_error {
  explicit RankError(const std::string& what) : std::runtime_error(what) {}
};

struct FormatError : std::runtime_error {
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lpsrom

#endif

#pragma once

#include <stdexcept>
#include <string>

namespace infbo {

// All recoverable numeric/config failures derive from Error so callers can
// catch one type at replication boundaries.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Cholesky failed even after the full jitter escalation.
class FactorizationFailure : public Error {
public:
  explicit FactorizationFailure(const std::string& what) : Error(what) {}
};

class InvalidParameter : public Error {
public:
  explicit InvalidParameter(const std::string& what) : Error(what) {}
};

class DegenerateWeights : public Error {
public:
  explicit DegenerateWeights(const std::string& what) : Error(what) {}
};

class DimensionMismatch : public Error {
public:
  explicit DimensionMismatch(const std::string& what) : Error(what) {}
};

class OutOfBounds : public Error {
public:
  explicit OutOfBounds(const std::string& what) : Error(what) {}
};

// Metropolis chain never accepted a proposal; the likelihood is broken.
class ChainDivergence : public Error {
public:
  explicit ChainDivergence(const std::string& what) : Error(what) {}
};

class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace infbo

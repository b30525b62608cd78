#pragma once

#include <stdexcept>
#include <string>

namespace dynim {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Graph update errors.
struct MissingTarget : Error {
  using Error::Error;
};
struct DuplicateTarget : Error {
  using Error::Error;
};
struct InvalidProbability : Error {
  using Error::Error;
};

// Parameter / dataset errors.
struct InvalidParam : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};
struct EmptyDataset : Error {
  using Error::Error;
};

// Influence maximization errors.
struct AlreadySeed : Error {
  using Error::Error;
};
struct InsufficientNodes : Error {
  using Error::Error;
};
struct TooLarge : Error {
  using Error::Error;
};
struct EmptyGraph : Error {
  using Error::Error;
};
struct IndexCorrupt : Error {
  using Error::Error;
};
struct FixtureUnsatisfiable : Error {
  using Error::Error;
};

// Benchmark driver errors.
struct ConfigError : Error {
  using Error::Error;
};
struct DataError : Error {
  using Error::Error;
};

}  // namespace dynim

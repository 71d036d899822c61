#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace netexplore {

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// graph_core
class ProbeNotCandidate : public Error { using Error::Error; };
class NodeOutOfRange : public Error { using Error::Error; };
class NoCandidates : public Error { using Error::Error; };
class NodeNotObserved : public Error { using Error::Error; };

// features
class NodeNotCandidate : public Error { using Error::Error; };

// generators / io
class InvalidParams : public Error { using Error::Error; };
class GenerationFailed : public Error { using Error::Error; };
class EmptyGraph : public Error { using Error::Error; };
class IoError : public Error { using Error::Error; };

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// sampling
class InvalidFraction : public Error { using Error::Error; };

// knn / policies
class EmptyHistory : public Error { using Error::Error; };
class SingularGram : public Error { using Error::Error; };

// harness
class ConfigError : public Error { using Error::Error; };
class MixedConfigs : public Error { using Error::Error; };

}  // namespace netexplore

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kgtopos {

/// Base class for all library errors. The CLI maps these onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DuplicateError : public Error {
 public:
  DuplicateError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct DomainError : Error { using Error::Error; };
struct CompositionError : Error { using Error::Error; };
struct AmbiguityError : Error { using Error::Error; };
struct SymmetryError : Error { using Error::Error; };
struct TypingError : Error { using Error::Error; };
struct SchemaError : Error { using Error::Error; };
struct PresheafError : Error { using Error::Error; };
struct GluingError : Error { using Error::Error; };
struct UniquenessError : Error { using Error::Error; };

/// A construction would need an infinite (or unclosed) category.
struct InfinityError : Error { using Error::Error; };

/// An enumeration cap was exceeded.
struct SizeError : Error { using Error::Error; };

}  // namespace kgtopos

#pragma once

#include <stdexcept>

namespace cloudseg {

// Base for all library failures so callers can catch one family.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ShapeError : Error { using Error::Error; };       // dimension mismatch
struct FormatError : Error { using Error::Error; };      // unparsable file content
struct LengthError : Error { using Error::Error; };      // payload shorter/longer than advertised
struct IoError : Error { using Error::Error; };          // filesystem failure
struct ConfigError : Error { using Error::Error; };      // bad or inconsistent configuration
struct IntegrityError : Error { using Error::Error; };   // checksum mismatch
struct DomainError : Error { using Error::Error; };      // argument outside its valid range
struct InputError : Error { using Error::Error; };       // empty or inconsistent input sets
struct DivergenceError : Error { using Error::Error; };  // non-finite training loss
struct ContractError : Error { using Error::Error; };    // API misuse (e.g. stale tape)

}  // namespace cloudseg

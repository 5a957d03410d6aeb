#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hetprice {

// Base of every error the library throws on bad input or failed
// preconditions. kind() is the stable machine-readable name.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept = 0;
};

#define HETPRICE_DEFINE_ERROR(Name, Base)                             \
  class Name : public Base {                                          \
   public:                                                            \
    using Base::Base;                                                 \
    const char* kind() const noexcept override { return #Name; }      \
  }

HETPRICE_DEFINE_ERROR(SchemaError, Error);
HETPRICE_DEFINE_ERROR(DomainError, Error);
HETPRICE_DEFINE_ERROR(NonPositivePrice, DomainError);
HETPRICE_DEFINE_ERROR(EvaluatorDomainError, DomainError);
HETPRICE_DEFINE_ERROR(ConfigError, Error);
HETPRICE_DEFINE_ERROR(NoBracket, Error);
HETPRICE_DEFINE_ERROR(RegularityError, Error);
HETPRICE_DEFINE_ERROR(ConstructionFailed, Error);
HETPRICE_DEFINE_ERROR(UnsupportedDimension, Error);
HETPRICE_DEFINE_ERROR(UnsupportedShape, Error);
HETPRICE_DEFINE_ERROR(SearchBudgetExceeded, Error);
HETPRICE_DEFINE_ERROR(NotRumRationalizable, Error);

#undef HETPRICE_DEFINE_ERROR

// Carries the offending consumer and a replayable cycle when the input
// itself is the reason a construction cannot run.
class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what,
                             std::optional<std::size_t> consumer = std::nullopt,
                             std::optional<std::vector<std::size_t>> witness = std::nullopt)
      : Error(what), consumer_(consumer), witness_(std::move(witness)) {}
  const char* kind() const noexcept override { return "PreconditionError"; }
  const std::optional<std::size_t>& consumer() const { return consumer_; }
  const std::optional<std::vector<std::size_t>>& witness() const { return witness_; }

 private:
  std::optional<std::size_t> consumer_;
  std::optional<std::vector<std::size_t>> witness_;
};

class GarpViolation : public Error {
 public:
  GarpViolation(const std::string& what, std::vector<std::size_t> witness)
      : Error(what), witness_(std::move(witness)) {}
  const char* kind() const noexcept override { return "GarpViolation"; }
  const std::vector<std::size_t>& witness() const { return witness_; }

 private:
  std::vector<std::size_t> witness_;
};

}  // namespace hetprice

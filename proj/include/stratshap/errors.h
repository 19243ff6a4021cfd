#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "stratshap/coalition.h"

namespace stratshap {

// Base of every error raised by the library. Errors raised while evaluating a
// value function carry the offending coalition once the engine has seen them.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}

  virtual const char* kind() const noexcept { return "Error"; }

  const std::optional<Coalition>& coalition() const { return coalition_; }
  void attach_coalition(const Coalition& s) {
    if (!coalition_) coalition_ = s;
  }

 private:
  std::optional<Coalition> coalition_;
};

#define STRATSHAP_DEFINE_ERROR(Name)                                 \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& what) : Error(what) {}          \
    const char* kind() const noexcept override { return #Name; }     \
  }

STRATSHAP_DEFINE_ERROR(InvalidArgument);
STRATSHAP_DEFINE_ERROR(InvalidInput);
STRATSHAP_DEFINE_ERROR(CapExceeded);
STRATSHAP_DEFINE_ERROR(EmptyBackground);
STRATSHAP_DEFINE_ERROR(IoError);
STRATSHAP_DEFINE_ERROR(ConfigError);

#undef STRATSHAP_DEFINE_ERROR

class ModelFormatError : public Error {
 public:
  ModelFormatError(const std::string& field_path, const std::string& what)
      : Error(field_path + ": " + what), field_path_(field_path) {}
  const char* kind() const noexcept override { return "ModelFormatError"; }
  const std::string& field_path() const { return field_path_; }

 private:
  std::string field_path_;
};

class EmptyConditioningSet : public Error {
 public:
  explicit EmptyConditioningSet(const Coalition& s)
      : Error("no background rows match the conditioning coalition " + s.to_string()) {
    attach_coalition(s);
  }
  const char* kind() const noexcept override { return "EmptyConditioningSet"; }
};

class EmptyStratum : public Error {
 public:
  explicit EmptyStratum(double label)
      : Error("no background rows in stratum " + format_label(label)), label_(label) {}
  const char* kind() const noexcept override { return "EmptyStratum"; }
  double label() const { return label_; }

 private:
  static std::string format_label(double label);
  double label_;
};

}  // namespace stratshap

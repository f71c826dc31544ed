#pragma once

#include <stdexcept>
#include <string>

namespace nfce {

// Base class for all toolkit errors. Subclasses name the violated contract;
// the CLI maps the class name into its machine-readable error line.
struct Error : std::runtime_error {
  Error(std::string kind, const std::string& msg)
      : std::runtime_error(kind + ": " + msg), kind(std::move(kind)) {}
  std::string kind;
};

#define NFCE_DEFINE_ERROR(NAME)                               \
  struct NAME : Error {                                       \
    explicit NAME(const std::string& msg) : Error(#NAME, msg) {} \
  }

NFCE_DEFINE_ERROR(ConfigError);
NFCE_DEFINE_ERROR(UniquenessViolation);
NFCE_DEFINE_ERROR(InvalidMode);
NFCE_DEFINE_ERROR(ShapeMismatch);
NFCE_DEFINE_ERROR(IndexOutOfRange);
NFCE_DEFINE_ERROR(RankDeficient);
NFCE_DEFINE_ERROR(IllConditioned);
NFCE_DEFINE_ERROR(SingularKhatriRao);
NFCE_DEFINE_ERROR(SingularFim);
NFCE_DEFINE_ERROR(ZeroReference);
NFCE_DEFINE_ERROR(IoError);

#undef NFCE_DEFINE_ERROR

}  // namespace nfce

#pragma once

#include <stdexcept>
#include <string>

namespace fdgcl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define FDGCL_DEFINE_ERROR(Name)            \
  class Name : public Error {               \
   public:                                  \
    using Error::Error;                     \
  }

FDGCL_DEFINE_ERROR(DomainError);
FDGCL_DEFINE_ERROR(ConvergenceError);
FDGCL_DEFINE_ERROR(FormatError);
FDGCL_DEFINE_ERROR(ShapeError);
FDGCL_DEFINE_ERROR(SizeError);
FDGCL_DEFINE_ERROR(AsymmetryError);
FDGCL_DEFINE_ERROR(ZeroVectorError);
FDGCL_DEFINE_ERROR(NonFiniteError);
FDGCL_DEFINE_ERROR(VariantError);
FDGCL_DEFINE_ERROR(ZeroRowError);
FDGCL_DEFINE_ERROR(DegenerateColumnError);
FDGCL_DEFINE_ERROR(DegenerateError);
FDGCL_DEFINE_ERROR(ConfigError);
FDGCL_DEFINE_ERROR(SingletonClassError);
FDGCL_DEFINE_ERROR(ConnectivityError);
FDGCL_DEFINE_ERROR(FileNotFoundError);

#undef FDGCL_DEFINE_ERROR

}  // namespace fdgcl

#pragma once

#include <stdexcept>
#include <string>

namespace ctxsim {

// Base class for every failure raised by the library. Configuration problems
// derive from ConfigError so the CLI can map them to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

#define CTXSIM_DEFINE_ERROR(Name, Base)      \
  class Name : public Base {                   \
   public:                                     \
    explicit Name(const std::string& what)     \
        : Base(std::string(#Name ": ") + what) {} \
  };

// core
CTXSIM_DEFINE_ERROR(InvalidTarget, Error)
CTXSIM_DEFINE_ERROR(TargetTruncated, Error)
CTXSIM_DEFINE_ERROR(AlignmentNotFound, Error)
CTXSIM_DEFINE_ERROR(LayerOutOfRange, Error)
CTXSIM_DEFINE_ERROR(ZeroVector, Error)
CTXSIM_DEFINE_ERROR(DimensionMismatch, Error)

// datagen / ukwac_subs
CTXSIM_DEFINE_ERROR(EmptySubstituteSet, Error)
CTXSIM_DEFINE_ERROR(MalformedRow, Error)
CTXSIM_DEFINE_ERROR(InsufficientNegatives, Error)
CTXSIM_DEFINE_ERROR(EmptyRanking, Error)
CTXSIM_DEFINE_ERROR(EmptyVocabulary, Error)

// training
CTXSIM_DEFINE_ERROR(EmptyDataset, Error)
CTXSIM_DEFINE_ERROR(NonFiniteLoss, Error)

// metrics
CTXSIM_DEFINE_ERROR(LengthMismatch, Error)
CTXSIM_DEFINE_ERROR(ZeroSeries, Error)
CTXSIM_DEFINE_ERROR(ZeroVariance, Error)
CTXSIM_DEFINE_ERROR(DegenerateDenominator, Error)
CTXSIM_DEFINE_ERROR(RowCountMismatch, Error)

// configuration
CTXSIM_DEFINE_ERROR(InvalidConfig, ConfigError)
CTXSIM_DEFINE_ERROR(MissingResource, ConfigError)

#undef CTXSIM_DEFINE_ERROR

}  // namespace ctxsim

#pragma once

#include <stdexcept>
#include <string>

namespace fracreset {

/// Base class for all library errors. `code()` is a stable machine-readable
/// identifier used when errors are serialized to JSON by the CLI.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define FRACRESET_DEFINE_ERROR(NAME)                          \
  class NAME : public Error {                                 \
   public:                                                    \
    explicit NAME(const std::string& what = #NAME)            \
        : Error(#NAME, what) {}                               \
  }

// linear algebra
FRACRESET_DEFINE_ERROR(NonSquare);
FRACRESET_DEFINE_ERROR(ConvergenceFailure);
FRACRESET_DEFINE_ERROR(BranchCutViolation);
FRACRESET_DEFINE_ERROR(IllConditionedEigenbasis);
FRACRESET_DEFINE_ERROR(SingularLyapunovOperator);
FRACRESET_DEFINE_ERROR(PoleHit);

// fractional stepping
FRACRESET_DEFINE_ERROR(InvalidOrder);
FRACRESET_DEFINE_ERROR(HistoryMismatch);
FRACRESET_DEFINE_ERROR(IndexOutOfRange);

// model assembly
FRACRESET_DEFINE_ERROR(NonReciprocalOrder);
FRACRESET_DEFINE_ERROR(AlreadyFractional);
FRACRESET_DEFINE_ERROR(OrderMismatch);
FRACRESET_DEFINE_ERROR(DimensionMismatch);

// simulation & metrics
FRACRESET_DEFINE_ERROR(Divergence);
FRACRESET_DEFINE_ERROR(EmptyTrajectory);
FRACRESET_DEFINE_ERROR(NonConvergent);

// describing functions
FRACRESET_DEFINE_ERROR(NotPeriodic);

// stability analysis
FRACRESET_DEFINE_ERROR(UnstableFlow);
FRACRESET_DEFINE_ERROR(NonHurwitzDenominator);
FRACRESET_DEFINE_ERROR(ImproperTransferFunction);

// scenario front end
FRACRESET_DEFINE_ERROR(SchemaViolation);

#undef FRACRESET_DEFINE_ERROR

}  // namespace fracreset
